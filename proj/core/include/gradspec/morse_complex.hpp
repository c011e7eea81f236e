#pragma once

#include <functional>
#include <vector>

#include "gradspec/critical.hpp"
#include "gradspec/flowsim.hpp"

namespace gradspec::morse {

using IntMat = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;

// Finite Morse complex data: generators per degree are critical ids (index =
// degree), d[k] maps degree k to k+1 with the signed connection counts,
// ranks over Q by fraction-free elimination, betti_k = c_k - rk d_k - rk d_{k-1}.
struct ComplexData {
  int n = 0;
  std::vector<std::vector<int>> generators;
  std::vector<IntMat> d;  // d[k] has shape c_{k+1} x c_k
  std::vector<long long> c;
  std::vector<long long> betti;
  long long euler = 0;
};

// Throws ComplexInconsistent when d o d != 0 (a sign or clustering error
// upstream).
ComplexData build(const std::vector<CriticalPointRecord>& records,
                  const std::vector<ConnectionCount>& connections);

long long bareiss_rank(IntMat m);

struct InequalityRow {
  int k = 0;
  long long lhs = 0, rhs = 0;
  bool holds = false;
  bool equality = false;
};
std::vector<InequalityRow> morse_inequalities(const ComplexData& data);

struct DualityReport {
  bool palindromic = false;  // betti_k = betti_{n-k} for f itself
  bool cross_equal = false;  // betti_k(f) = betti_{n-k}(-f)
  bool index_swap = false;   // ind_{-f}(a) = n - ind_f(a) at every point
  bool ok() const { return palindromic && cross_equal && index_swap; }
};
DualityReport poincare_duality(const ComplexData& data_f, const ComplexData& data_minus_f,
                               const ManifoldModel& model,
                               const std::vector<CriticalPointRecord>& records_f,
                               const std::vector<CriticalPointRecord>& records_minus_f);

struct TraceReport {
  std::vector<double> times;
  std::vector<double> lefschetz_rhs;  // sum of signed unit determinant ratios
  long long euler_lhs = 0;            // sum_a (-1)^{ind(a)}
};
// Fixed points of phi^{-t} are the critical points; each summand is the sign
// of prod_j (1 - e^{-t chi_j(a)}). Throws DegenerateTime when a factor is
// within 1e-14 of zero.
TraceReport lefschetz(const std::vector<CriticalPointRecord>& records,
                      const std::vector<double>& times);

struct ProjectorReport {
  std::vector<int> alpha_ids;
  std::vector<double> predicted;  // psi at the alpha-limit point
  std::vector<double> empirical;  // psi(phi^{-T}(x))
  double max_deviation = 0.0;
  double fraction_within(double tol) const;
};
// Concrete k=0 spectral projector: on each alpha-basin cell the projected
// function is the constant psi(a); the empirical backward-flow limit is
// compared against it node by node.
ProjectorReport kernel_projector_k0(const ManifoldModel& model,
                                    const std::vector<CriticalPointRecord>& records,
                                    const std::function<double(const Vec&)>& psi,
                                    const std::vector<Vec>& grid, double t_limit = 40.0,
                                    const LimitOptions& opt = {}, int jobs = 0);

struct KoszulReport {
  std::vector<long long> dims;  // homology dimensions = c_k
  long long alternating_sum = 0;
  bool vanishing_certified = false;  // i_V(Laudenbach germ) == 0 symbolically
};
// Relies on the symbolic Koszul vanishing (checked here per critical-point
// shape through the exact current algebra); homology dims then equal c_k.
KoszulReport koszul_homology(const ComplexData& data,
                             const std::vector<CriticalPointRecord>& records);

}  // namespace gradspec::morse
