#include "gradspec/model_currents.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace gradspec::currents {

namespace {

auto term_key(const CurrentTerm& t) {
  return std::tie(t.gamma, t.beta, t.K, t.J);
}

// +-X_j as a polynomial: chi_j = -X_j on the contracting block, +X_j after
ExponentPoly chi_signed(const LinearModelSpec& spec, int j) {
  return ExponentPoly::variable(spec.n, j, Rational(j < spec.r ? -1 : 1));
}

int position_in_mask(uint32_t mask, int j) {
  return __builtin_popcount(mask & ((1u << j) - 1u));
}

}  // namespace

void ModelCurrent::assign(std::vector<CurrentTerm> terms) {
  std::sort(terms.begin(), terms.end(), [](const CurrentTerm& a, const CurrentTerm& b) {
    return term_key(a) < term_key(b);
  });
  terms_.clear();
  for (auto& t : terms) {
    if (t.coeff.is_zero()) continue;
    if (!terms_.empty() && term_key(terms_.back()) == term_key(t)) {
      terms_.back().coeff += t.coeff;
      if (terms_.back().coeff.is_zero()) terms_.pop_back();
    } else {
      terms_.push_back(std::move(t));
    }
  }
  for (const auto& t : terms_)
    if (t.degree() != terms_.front().degree())
      throw DegreeMismatch("ModelCurrent: mixed degrees in one current");
}

bool operator==(const ModelCurrent& a, const ModelCurrent& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (size_t i = 0; i < a.terms_.size(); ++i) {
    const auto& ta = a.terms_[i];
    const auto& tb = b.terms_[i];
    if (term_key(ta) != term_key(tb) || ta.coeff != tb.coeff) return false;
  }
  return true;
}

ModelCurrent operator+(const ModelCurrent& a, const ModelCurrent& b) {
  std::vector<CurrentTerm> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return ModelCurrent(std::move(terms));
}

ModelCurrent operator-(const ModelCurrent& a, const ModelCurrent& b) {
  std::vector<CurrentTerm> terms = a.terms_;
  for (CurrentTerm t : b.terms_) {
    t.coeff = -t.coeff;
    terms.push_back(std::move(t));
  }
  return ModelCurrent(std::move(terms));
}

ModelCurrent operator*(const ExponentPoly& c, const ModelCurrent& u) {
  std::vector<CurrentTerm> terms = u.terms_;
  for (auto& t : terms) t.coeff = c * t.coeff;
  return ModelCurrent(std::move(terms));
}

ModelCurrent operator*(const Rational& c, const ModelCurrent& u) {
  std::vector<CurrentTerm> terms = u.terms_;
  for (auto& t : terms) t.coeff *= c;
  return ModelCurrent(std::move(terms));
}

std::string ModelCurrent::str(const LinearModelSpec& spec) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    std::string c = t.coeff.str("X");
    if (c.find(' ') != std::string::npos) c = "(" + c + ")";
    os << c;
    os << " * y^(";
    for (size_t i = 0; i < t.beta.size(); ++i) os << (i ? "," : "") << t.beta[i];
    os << ") * D^(";
    for (size_t i = 0; i < t.gamma.size(); ++i) os << (i ? "," : "") << t.gamma[i];
    os << ")[delta] * dx{";
    bool c1 = false;
    for (int j = 0; j < spec.r; ++j)
      if (t.K & (1u << j)) {
        os << (c1 ? "," : "") << (j + 1);
        c1 = true;
      }
    os << "} ^ dy{";
    bool c2 = false;
    for (int j = spec.r; j < spec.n; ++j)
      if (t.J & (1u << j)) {
        os << (c2 ? "," : "") << (j + 1);
        c2 = true;
      }
    os << "}";
  }
  return os.str();
}

ModelCurrent generator(const LinearModelSpec& spec, const std::vector<uint32_t>& alpha,
                       uint32_t I_mask, uint32_t J_mask) {
  if (static_cast<int>(alpha.size()) != spec.n)
    throw Error("generator: alpha has wrong length");
  uint32_t stable_mask = spec.r >= 32 ? ~0u : ((1u << spec.r) - 1u);
  uint32_t full_mask = spec.n >= 32 ? ~0u : ((1u << spec.n) - 1u);
  if ((I_mask & ~stable_mask) != 0)
    throw Error("generator: I must be a subset of the contracting coordinates");
  if ((J_mask & stable_mask) != 0 || (J_mask & ~full_mask) != 0)
    throw Error("generator: J must be a subset of the expanding coordinates");
  CurrentTerm t;
  t.coeff = ExponentPoly::constant(spec.n, Rational(1));
  t.gamma.assign(alpha.begin(), alpha.begin() + spec.r);
  t.beta.assign(alpha.begin() + spec.r, alpha.end());
  t.K = stable_mask & ~I_mask;
  t.J = J_mask;
  return ModelCurrent({t});
}

ExponentPoly generator_eigenvalue(const LinearModelSpec& spec,
                                  const std::vector<uint32_t>& alpha, uint32_t I_mask,
                                  uint32_t J_mask) {
  ExponentPoly lambda(spec.n);
  uint32_t in = I_mask | J_mask;
  for (int j = 0; j < spec.n; ++j) {
    long long w = alpha[j] + ((in & (1u << j)) ? 1 : 0);
    lambda += ExponentPoly::variable(spec.n, j, Rational(w));
  }
  return lambda;
}

namespace {

// eigenvalue of a single canonical term: the scaling weight of every symbol
ExponentPoly term_eigenvalue(const LinearModelSpec& spec, const CurrentTerm& t) {
  ExponentPoly lambda(spec.n);
  for (int j = 0; j < spec.r; ++j)
    lambda += ExponentPoly::variable(spec.n, j, Rational(t.gamma[j] + 1));
  for (int j = spec.r; j < spec.n; ++j)
    lambda += ExponentPoly::variable(spec.n, j, Rational(t.beta[j - spec.r]));
  for (int j = 0; j < spec.n; ++j) {
    if (t.K & (1u << j)) lambda += ExponentPoly::variable(spec.n, j, Rational(-1));
    if (t.J & (1u << j)) lambda += ExponentPoly::variable(spec.n, j, Rational(1));
  }
  return lambda;
}

}  // namespace

ModelCurrent lie_derivative(const LinearModelSpec& spec, const ModelCurrent& u) {
  std::vector<CurrentTerm> out;
  for (const auto& t : u.terms()) {
    CurrentTerm s = t;
    s.coeff = term_eigenvalue(spec, t) * t.coeff;
    out.push_back(std::move(s));
  }
  return ModelCurrent(std::move(out));
}

ModelCurrent contract_with_v(const LinearModelSpec& spec, const ModelCurrent& u) {
  std::vector<CurrentTerm> out;
  for (const auto& t : u.terms()) {
    uint32_t mask = t.K | t.J;
    for (int j = 0; j < spec.n; ++j) {
      if (!(mask & (1u << j))) continue;
      int pos = position_in_mask(mask, j);
      Rational sgn(pos % 2 == 0 ? 1 : -1);
      if (j < spec.r) {
        // chi_j x_j d^g delta = (-X_j)(-g) d^{g-1} delta
        if (t.gamma[j] == 0) continue;
        CurrentTerm s = t;
        s.coeff = t.coeff * ExponentPoly::variable(spec.n, j, sgn * Rational(t.gamma[j]));
        --s.gamma[j];
        s.K &= ~(1u << j);
        out.push_back(std::move(s));
      } else {
        CurrentTerm s = t;
        s.coeff = t.coeff * ExponentPoly::variable(spec.n, j, sgn);
        ++s.beta[j - spec.r];
        s.J &= ~(1u << j);
        out.push_back(std::move(s));
      }
    }
  }
  return ModelCurrent(std::move(out));
}

ModelCurrent exterior_derivative(const LinearModelSpec& spec, const ModelCurrent& u) {
  std::vector<CurrentTerm> out;
  for (const auto& t : u.terms()) {
    uint32_t mask = t.K | t.J;
    for (int j = 0; j < spec.n; ++j) {
      if (mask & (1u << j)) continue;  // dz_j ^ dz_j = 0
      int pos = position_in_mask(mask, j);
      Rational sgn(pos % 2 == 0 ? 1 : -1);
      if (j < spec.r) {
        CurrentTerm s = t;
        s.coeff = t.coeff * sgn;
        ++s.gamma[j];
        s.K |= 1u << j;
        out.push_back(std::move(s));
      } else {
        if (t.beta[j - spec.r] == 0) continue;
        CurrentTerm s = t;
        s.coeff = t.coeff * (sgn * Rational(t.beta[j - spec.r]));
        --s.beta[j - spec.r];
        s.J |= 1u << j;
        out.push_back(std::move(s));
      }
    }
  }
  return ModelCurrent(std::move(out));
}

ScalingResult scaling_pullback(const LinearModelSpec& spec, const ModelCurrent& u,
                               const Rational& s) {
  if (s.num() <= 0 || s < Rational(0) || Rational(1) < s)
    throw Error("scaling_pullback: s must satisfy 0 < s <= 1");
  ScalingResult res;
  res.s = s;
  std::map<ExponentPoly, std::vector<CurrentTerm>> groups;
  for (const auto& t : u.terms()) groups[term_eigenvalue(spec, t)].push_back(t);
  for (auto& [lambda, terms] : groups)
    res.groups.push_back({lambda, ModelCurrent(std::move(terms))});
  return res;
}

void MomentValue::add(const std::vector<uint32_t>& moment, const ExponentPoly& coeff) {
  if (coeff.is_zero()) return;
  auto it = std::lower_bound(entries_.begin(), entries_.end(), moment,
                             [](const auto& e, const std::vector<uint32_t>& m) {
                               return e.first < m;
                             });
  if (it != entries_.end() && it->first == moment) {
    it->second += coeff;
    if (it->second.is_zero()) entries_.erase(it);
  } else {
    entries_.insert(it, {moment, coeff});
  }
}

ExponentPoly MomentValue::coeff(const std::vector<uint32_t>& moment) const {
  for (const auto& [m, c] : entries_)
    if (m == moment) return c;
  return ExponentPoly(nvars_);
}

std::string MomentValue::str() const {
  if (entries_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : entries_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.str("X") << ")";
    bool any = false;
    for (uint32_t v : m)
      if (v) any = true;
    if (any || !m.empty()) {
      os << "*M(";
      for (size_t i = 0; i < m.size(); ++i) os << (i ? "," : "") << m[i];
      os << ")";
    }
  }
  return os.str();
}

MomentValue pair(const LinearModelSpec& spec, const ModelCurrent& u, const TestForm& phi) {
  if (!u.is_zero() && u.degree() + phi.degree != spec.n)
    throw DegreeMismatch("pair: degrees are not complementary");
  uint32_t full_mask = spec.n >= 32 ? ~0u : ((1u << spec.n) - 1u);
  MomentValue total(spec.n);
  for (const auto& t : u.terms()) {
    uint32_t mu = t.K | t.J;
    for (const auto& p : phi.terms) {
      if (__builtin_popcount(p.wedge) != phi.degree)
        throw DegreeMismatch("pair: test form term has wrong wedge degree");
      if ((mu & p.wedge) != 0 || (mu | p.wedge) != full_mask) continue;
      // sign of sorting (sorted mu)(sorted wedge) into ascending order
      int inversions = 0;
      for (int q = 0; q < spec.n; ++q)
        if (p.wedge & (1u << q)) inversions += __builtin_popcount(mu >> (q + 1));
      Rational sgn(inversions % 2 == 0 ? 1 : -1);
      // x block: <d^g delta, x^m> = (-1)^|g| g! [m = g]
      bool hit = true;
      Rational xfactor(1);
      for (int j = 0; j < spec.r; ++j) {
        if (t.gamma[j] != p.xexp[j]) {
          hit = false;
          break;
        }
        xfactor *= rational_factorial(t.gamma[j]);
        if (t.gamma[j] % 2 == 1) xfactor = -xfactor;
      }
      if (!hit) continue;
      std::vector<uint32_t> moment(spec.n - spec.r);
      for (int j = 0; j < spec.n - spec.r; ++j) moment[j] = t.beta[j] + p.yexp[j];
      total.add(moment, t.coeff * (sgn * xfactor * p.coeff));
    }
  }
  return total;
}

}  // namespace gradspec::currents
