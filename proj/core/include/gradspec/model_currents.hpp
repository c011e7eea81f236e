#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradspec/errors.hpp"
#include "gradspec/exponent_poly.hpp"
#include "gradspec/rational.hpp"

namespace gradspec::currents {

// Linear model V = sum_j chi_j z_j d/dz_j on R^n = R^r_x times R^{n-r}_y.
// Coordinates 0..r-1 are the contracting ones (chi_j = -|chi_j|), r..n-1 the
// expanding ones. |chi_j| may be given as exact rationals or left symbolic;
// all operations treat them as independent indeterminates X_j, so identities
// are verified as polynomial identities.
struct LinearModelSpec {
  int n = 0;
  int r = 0;
  std::vector<Rational> chi_mag;  // empty => fully symbolic

  bool symbolic() const { return chi_mag.empty(); }
};

// One term coeff * y^beta * d^gamma delta(x) * dx^K ^ dy^J with the wedge
// factors stored in increasing coordinate order (signs absorbed into coeff).
// K, J are bitmasks over 0-based coordinates (K bits < r, J bits >= r).
struct CurrentTerm {
  ExponentPoly coeff;
  std::vector<uint32_t> gamma;  // size r
  std::vector<uint32_t> beta;   // size n - r
  uint32_t K = 0;
  uint32_t J = 0;

  int degree() const { return __builtin_popcount(K) + __builtin_popcount(J); }
};

// Canonical-form current: terms sorted by (gamma, beta, K, J), no zero
// coefficients, homogeneous degree.
class ModelCurrent {
 public:
  ModelCurrent() = default;
  explicit ModelCurrent(std::vector<CurrentTerm> terms) { assign(std::move(terms)); }

  const std::vector<CurrentTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const { return terms_.empty() ? -1 : terms_.front().degree(); }

  friend bool operator==(const ModelCurrent& a, const ModelCurrent& b);
  friend bool operator!=(const ModelCurrent& a, const ModelCurrent& b) { return !(a == b); }

  friend ModelCurrent operator+(const ModelCurrent& a, const ModelCurrent& b);
  friend ModelCurrent operator-(const ModelCurrent& a, const ModelCurrent& b);
  friend ModelCurrent operator*(const ExponentPoly& c, const ModelCurrent& u);
  friend ModelCurrent operator*(const Rational& c, const ModelCurrent& u);

  std::string str(const LinearModelSpec& spec) const;

 private:
  void assign(std::vector<CurrentTerm> terms);
  std::vector<CurrentTerm> terms_;
};

// (y d/dx)^alpha delta(x) (wedge_{j not in I} dx_j) ^ (wedge_{j in J} dy_j):
// gamma takes the first r entries of alpha, beta the rest, K = {0..r-1} \ I.
ModelCurrent generator(const LinearModelSpec& spec, const std::vector<uint32_t>& alpha,
                       uint32_t I_mask, uint32_t J_mask);

// Eigenvalue of the generator per the displayed closed form, as a polynomial
// in the magnitudes X_j:
//   lambda = sum_{j in I u J} (alpha_j + 1) X_j + sum_{j not in I u J} alpha_j X_j.
ExponentPoly generator_eigenvalue(const LinearModelSpec& spec,
                                  const std::vector<uint32_t>& alpha, uint32_t I_mask,
                                  uint32_t J_mask);

// Lie derivative along V, computed term by term: z d/dz contributes -(gamma+1)
// on a Dirac derivative and +beta on a y monomial, and each wedge factor dz_j
// contributes chi_j.
ModelCurrent lie_derivative(const LinearModelSpec& spec, const ModelCurrent& u);

// Interior product i_V, using x_j d^g delta(x_j) = -g d^{g-1} delta(x_j).
ModelCurrent contract_with_v(const LinearModelSpec& spec, const ModelCurrent& u);

ModelCurrent exterior_derivative(const LinearModelSpec& spec, const ModelCurrent& u);

// Pullback under z_j -> s^{chi_j} z_j splits the current into eigenvalue
// groups, each scaling by s^{lambda}; lambda is kept exact.
struct ScaledPart {
  ExponentPoly lambda;
  ModelCurrent part;
};
struct ScalingResult {
  Rational s;
  std::vector<ScaledPart> groups;  // sorted by lambda, parts canonical
};
ScalingResult scaling_pullback(const LinearModelSpec& spec, const ModelCurrent& u,
                               const Rational& s);

// Polynomial test form of complementary degree: sum of terms
// coeff * x^xexp * y^yexp * dz^{wedge} (wedge a bitmask, ascending order).
struct TestFormTerm {
  Rational coeff;
  std::vector<uint32_t> xexp;  // size r
  std::vector<uint32_t> yexp;  // size n - r
  uint32_t wedge = 0;
};
struct TestForm {
  int degree = 0;
  std::vector<TestFormTerm> terms;
};

// Formal pairing result: a linear combination of y-moments M_p of the
// implied reference bump, with polynomial coefficients in the X_j. With no
// y variables the value is the plain coefficient at the empty moment.
class MomentValue {
 public:
  explicit MomentValue(int nvars = 0) : nvars_(nvars) {}
  void add(const std::vector<uint32_t>& moment, const ExponentPoly& coeff);
  bool is_zero() const { return entries_.empty(); }
  const std::vector<std::pair<std::vector<uint32_t>, ExponentPoly>>& entries() const {
    return entries_;
  }
  // coefficient at the given moment index (zero poly if absent)
  ExponentPoly coeff(const std::vector<uint32_t>& moment) const;
  friend bool operator==(const MomentValue& a, const MomentValue& b) {
    return a.entries_ == b.entries_;
  }
  std::string str() const;

 private:
  int nvars_;
  std::vector<std::pair<std::vector<uint32_t>, ExponentPoly>> entries_;  // sorted
};

// <u, phi> on the formal level: <d^g delta, x^m> = (-1)^|g| g! [m = g] per x
// coordinate, y monomials against the moment functional. Degrees must be
// complementary.
MomentValue pair(const LinearModelSpec& spec, const ModelCurrent& u, const TestForm& phi);

}  // namespace gradspec::currents
