#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gradspec/rational.hpp"

namespace gradspec {

// Sparse polynomial over Rational in n commuting indeterminates X_1..X_n.
// The indeterminates stand for the Lyapunov exponent magnitudes |chi_j| of a
// linear model, so eigenvalue identities can be checked as polynomial
// identities rather than at sampled values.
class ExponentPoly {
 public:
  using Monomial = std::vector<uint8_t>;  // exponent of each X_j

  explicit ExponentPoly(int nvars = 0) : nvars_(nvars) {}

  static ExponentPoly constant(int nvars, const Rational& c) {
    ExponentPoly p(nvars);
    if (!c.is_zero()) p.terms_[Monomial(nvars, 0)] = c;
    return p;
  }
  // scale * X_j (0-based j)
  static ExponentPoly variable(int nvars, int j, const Rational& scale = Rational(1)) {
    ExponentPoly p(nvars);
    if (!scale.is_zero()) {
      Monomial m(nvars, 0);
      m[j] = 1;
      p.terms_[m] = scale;
    }
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first == Monomial(nvars_, 0));
  }
  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    return terms_.begin()->second;  // valid only when is_constant()
  }

  ExponentPoly& operator+=(const ExponentPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  ExponentPoly& operator-=(const ExponentPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend ExponentPoly operator+(ExponentPoly a, const ExponentPoly& b) { return a += b; }
  friend ExponentPoly operator-(ExponentPoly a, const ExponentPoly& b) { return a -= b; }
  ExponentPoly operator-() const {
    ExponentPoly r(nvars_);
    for (const auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }
  friend ExponentPoly operator*(const ExponentPoly& a, const ExponentPoly& b) {
    ExponentPoly r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m(ma);
        for (size_t i = 0; i < m.size(); ++i) m[i] = static_cast<uint8_t>(m[i] + mb[i]);
        r.add_term(m, ca * cb);
      }
    return r;
  }
  ExponentPoly& operator*=(const ExponentPoly& o) { return *this = *this * o; }
  ExponentPoly& operator*=(const Rational& c) {
    if (c.is_zero()) { terms_.clear(); return *this; }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
  }
  friend ExponentPoly operator*(ExponentPoly a, const Rational& c) { return a *= c; }
  friend ExponentPoly operator*(const Rational& c, ExponentPoly a) { return a *= c; }

  friend bool operator==(const ExponentPoly& a, const ExponentPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const ExponentPoly& a, const ExponentPoly& b) { return !(a == b); }
  friend bool operator<(const ExponentPoly& a, const ExponentPoly& b) {
    if (a.terms_.size() != b.terms_.size()) return a.terms_.size() < b.terms_.size();
    auto ia = a.terms_.begin(), ib = b.terms_.begin();
    for (; ia != a.terms_.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return ia->first < ib->first;
      if (ia->second != ib->second) {
        return ia->second < ib->second;
      }
    }
    return false;
  }

  Rational eval(const std::vector<Rational>& xs) const {
    Rational total(0);
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (size_t j = 0; j < m.size(); ++j)
        for (int e = 0; e < m[j]; ++e) t *= xs[j];
      total += t;
    }
    return total;
  }
  double eval(const std::vector<double>& xs) const {
    double total = 0;
    for (const auto& [m, c] : terms_) {
      double t = c.to_double();
      for (size_t j = 0; j < m.size(); ++j)
        for (int e = 0; e < m[j]; ++e) t *= xs[j];
      total += t;
    }
    return total;
  }

  std::string str(const std::string& var = "X") const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) out += " + ";
      first = false;
      out += c.str();
      for (size_t j = 0; j < m.size(); ++j) {
        if (m[j] == 0) continue;
        out += "*" + var + std::to_string(j + 1);
        if (m[j] > 1) out += "^" + std::to_string(int(m[j]));
      }
    }
    return out;
  }

 private:
  void add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_[m] = c;
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  int nvars_;
  std::map<Monomial, Rational> terms_;
};

}  // namespace gradspec
