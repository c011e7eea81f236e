#include "gradspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>

namespace gradspec::spectrum {

namespace {

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// m_{k,a}(alpha) from the support sizes: sum_i C(ss, i) * C(su, k - r + i)
long long multiplicity_from_support(int n, int r, int k, int ss, int su) {
  long long total = 0;
  for (int i = 0; i <= r; ++i) total += binom(ss, i) * binom(su, k - r + i);
  (void)n;
  return total;
}

struct WalkItem {
  double lambda;
  int point;
  int min_coord;  // successors may only increment coordinates >= this
  std::vector<uint32_t> alpha;
};

struct WalkCompare {
  bool operator()(const WalkItem& a, const WalkItem& b) const {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;  // min-heap
    if (a.point != b.point) return a.point > b.point;
    return a.alpha > b.alpha;
  }
};

// Best-first graded walk over the alpha lattices of every critical point;
// visit(point, alpha, lambda) is called in nondecreasing lambda order, each
// alpha exactly once per point.
void graded_walk(const std::vector<ExponentData>& data, double Lambda,
                 const std::function<void(int, const std::vector<uint32_t>&, double)>& visit) {
  std::priority_queue<WalkItem, std::vector<WalkItem>, WalkCompare> queue;
  for (size_t p = 0; p < data.size(); ++p) {
    int n = static_cast<int>(data[p].chi_mag.size());
    queue.push({0.0, static_cast<int>(p), 0, std::vector<uint32_t>(n, 0)});
  }
  while (!queue.empty()) {
    WalkItem item = queue.top();
    queue.pop();
    visit(item.point, item.alpha, item.lambda);
    const auto& chi = data[item.point].chi_mag;
    for (int j = item.min_coord; j < static_cast<int>(chi.size()); ++j) {
      double lam = item.lambda + chi[j];
      if (lam > Lambda) continue;
      WalkItem next = item;
      next.lambda = lam;
      next.min_coord = j;
      ++next.alpha[j];
      queue.push(std::move(next));
    }
  }
}

uint32_t support_mask(const std::vector<uint32_t>& alpha, int from, int to) {
  uint32_t m = 0;
  for (int j = from; j < to; ++j)
    if (alpha[j] >= 1) m |= 1u << j;
  return m;
}

}  // namespace

std::vector<ExponentData> exponent_data(const std::vector<CriticalPointRecord>& records) {
  std::vector<ExponentData> data;
  data.reserve(records.size());
  for (const auto& rec : records) {
    ExponentData d;
    d.id = rec.id;
    d.index = rec.index;
    for (int j = 0; j < rec.exponents.size(); ++j)
      d.chi_mag.push_back(std::abs(rec.exponents[j]));
    data.push_back(std::move(d));
  }
  return data;
}

long long multiplicity_alpha(const ExponentData& a, const std::vector<uint32_t>& alpha,
                             int k) {
  const int n = static_cast<int>(a.chi_mag.size());
  if (n > 20) throw DimensionTooLarge("multiplicity_alpha: n > 20");
  const int r = a.index;
  uint32_t ss = support_mask(alpha, 0, r);
  uint32_t su = support_mask(alpha, r, n);
  long long count = 0;
  // direct subset enumeration of I within the stable support, J within the
  // unstable support, constrained by |J| - |I| = k - r
  uint32_t i_sub = ss;
  for (;;) {
    int isz = __builtin_popcount(i_sub);
    int want_j = k - r + isz;
    if (want_j >= 0) {
      uint32_t j_sub = su;
      for (;;) {
        if (__builtin_popcount(j_sub) == want_j) ++count;
        if (j_sub == 0) break;
        j_sub = (j_sub - 1) & su;
      }
    }
    if (i_sub == 0) break;
    i_sub = (i_sub - 1) & ss;
  }
  return count;
}

SpectrumTable enumerate(const std::vector<ExponentData>& data, int k, double Lambda,
                        double merge_tol, long long witness_cap) {
  SpectrumTable table;
  table.degree = k;
  table.cutoff = Lambda;
  table.merge_tol = merge_tol;
  table.exact_multiplicities = jointly_rationally_independent(data);
  table.note = table.exact_multiplicities
                   ? "exact spectrum with exact multiplicities"
                   : "index-set superset; multiplicities are combinatorial upper data, "
                     "exactness not guaranteed";

  long long emitted = 0;
  graded_walk(data, Lambda, [&](int p, const std::vector<uint32_t>& alpha, double lambda) {
    const ExponentData& a = data[p];
    const int n = static_cast<int>(a.chi_mag.size());
    const int r = a.index;
    uint32_t ss = support_mask(alpha, 0, r);
    uint32_t su = support_mask(alpha, r, n);

    std::vector<ResonanceWitness> found;
    uint32_t i_sub = ss;
    for (;;) {
      int isz = __builtin_popcount(i_sub);
      int want_j = k - r + isz;
      if (want_j >= 0) {
        uint32_t j_sub = su;
        for (;;) {
          if (__builtin_popcount(j_sub) == want_j) {
            ResonanceWitness w;
            w.critical_id = a.id;
            w.I_mask = i_sub;
            w.J_mask = j_sub;
            w.alpha = alpha;
            for (int j = 0; j < n; ++j)
              if ((i_sub | j_sub) & (1u << j)) --w.alpha[j];
            found.push_back(std::move(w));
          }
          if (j_sub == 0) break;
          j_sub = (j_sub - 1) & su;
        }
      }
      if (i_sub == 0) break;
      i_sub = (i_sub - 1) & ss;
    }
    if (found.empty()) return;

    emitted += static_cast<long long>(found.size());
    if (emitted > witness_cap)
      throw CutoffTooLarge("enumerate: witness count exceeds cap " +
                           std::to_string(witness_cap));

    if (!table.entries.empty() && lambda - table.entries.back().lambda <= merge_tol) {
      auto& entry = table.entries.back();
      entry.multiplicity += static_cast<long long>(found.size());
      for (auto& w : found) entry.witnesses.push_back(std::move(w));
    } else {
      SpectrumEntry entry;
      entry.lambda = lambda;
      entry.multiplicity = static_cast<long long>(found.size());
      entry.witnesses = std::move(found);
      table.entries.push_back(std::move(entry));
    }
  });

  for (auto& entry : table.entries)
    std::sort(entry.witnesses.begin(), entry.witnesses.end(),
              [](const ResonanceWitness& a, const ResonanceWitness& b) {
                if (a.critical_id != b.critical_id) return a.critical_id < b.critical_id;
                if (a.alpha != b.alpha) return a.alpha < b.alpha;
                if (a.I_mask != b.I_mask) return a.I_mask < b.I_mask;
                return a.J_mask < b.J_mask;
              });
  return table;
}

long long count_below(const std::vector<ExponentData>& data, int k, double Lambda) {
  long long total = 0;
  for (const auto& a : data) {
    const int n = static_cast<int>(a.chi_mag.size());
    const int r = a.index;
    // DFS over the alpha lattice, summing m_{k,a}(alpha) at every node
    std::function<void(int, double, int, int)> walk = [&](int j, double partial, int ss,
                                                          int su) {
      if (j == n) {
        total += multiplicity_from_support(n, r, k, ss, su);
        return;
      }
      walk(j + 1, partial, ss, su);  // alpha_j = 0
      double lam = partial;
      for (uint32_t v = 1;; ++v) {
        lam += a.chi_mag[j];
        if (lam > Lambda) break;
        walk(j + 1, lam, ss + (j < r ? 1 : 0), su + (j >= r ? 1 : 0));
      }
    };
    walk(0, 0.0, 0, 0);
  }
  return total;
}

WeylResult weyl_check(const std::vector<ExponentData>& data, int k, double Lambda) {
  WeylResult res;
  res.count = count_below(data, k, Lambda);
  const int n = data.empty() ? 0 : static_cast<int>(data[0].chi_mag.size());
  double sum = 0.0;
  for (const auto& a : data) {
    double prod = 1.0;
    for (double c : a.chi_mag) prod *= c;
    sum += 1.0 / prod;
  }
  double fact_k = 1.0, fact_nk = 1.0;
  for (int i = 2; i <= k; ++i) fact_k *= i;
  for (int i = 2; i <= n - k; ++i) fact_nk *= i;
  res.leading = std::pow(Lambda, n) / (fact_k * fact_nk) * sum;
  res.relative_gap = std::abs(double(res.count) - res.leading) / res.leading;
  return res;
}

std::vector<CancellationRow> even_odd_cancellation(const std::vector<ExponentData>& data,
                                                   double Lambda, double merge_tol) {
  const int n = data.empty() ? 0 : static_cast<int>(data[0].chi_mag.size());
  // merged (lambda, multiplicity) lists per degree
  std::vector<std::vector<std::pair<double, long long>>> per_degree(n + 1);
  for (int k = 0; k <= n; ++k) {
    auto& list = per_degree[k];
    graded_walk(data, Lambda, [&](int p, const std::vector<uint32_t>& alpha, double lambda) {
      const ExponentData& a = data[p];
      int ss = __builtin_popcount(support_mask(alpha, 0, a.index));
      int su = __builtin_popcount(
          support_mask(alpha, a.index, static_cast<int>(a.chi_mag.size())));
      long long m = multiplicity_from_support(static_cast<int>(a.chi_mag.size()), a.index, k,
                                              ss, su);
      if (m == 0) return;
      if (!list.empty() && lambda - list.back().first <= merge_tol)
        list.back().second += m;
      else
        list.emplace_back(lambda, m);
    });
  }

  // merge the lambda axes of all degrees
  std::vector<double> lambdas;
  for (const auto& list : per_degree)
    for (const auto& [lam, m] : list) lambdas.push_back(lam);
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<CancellationRow> rows;
  for (double lam : lambdas) {
    if (!rows.empty() && lam - rows.back().lambda <= merge_tol) continue;
    CancellationRow row;
    row.lambda = lam;
    row.m_k.assign(n + 1, 0);
    rows.push_back(row);
  }
  for (int k = 0; k <= n; ++k)
    for (const auto& [lam, m] : per_degree[k]) {
      auto it = std::lower_bound(rows.begin(), rows.end(), lam - merge_tol,
                                 [](const CancellationRow& r, double v) { return r.lambda < v; });
      it->m_k[k] += m;
    }
  for (auto& row : rows) {
    row.alternating_sum = 0;
    for (int k = 0; k <= n; ++k) row.alternating_sum += (k % 2 == 0 ? 1 : -1) * row.m_k[k];
  }
  return rows;
}

double spectral_gap(const std::vector<ExponentData>& data, int k) {
  double best = std::numeric_limits<double>::infinity();
  double chi_max = 0.0;
  int n = 0;
  for (const auto& a : data) {
    n = std::max(n, static_cast<int>(a.chi_mag.size()));
    for (double c : a.chi_mag) chi_max = std::max(chi_max, c);
  }
  double Lambda = (n + 1) * chi_max + 1.0;
  for (const auto& a : data) {
    std::vector<ExponentData> single{a};
    bool done = false;
    graded_walk(single, Lambda, [&](int, const std::vector<uint32_t>& alpha, double lambda) {
      if (done || lambda <= 1e-12) return;
      int ss = __builtin_popcount(support_mask(alpha, 0, a.index));
      int su = __builtin_popcount(
          support_mask(alpha, a.index, static_cast<int>(a.chi_mag.size())));
      if (multiplicity_from_support(static_cast<int>(a.chi_mag.size()), a.index, k, ss, su) >
          0) {
        best = std::min(best, lambda);
        done = true;
      }
    });
  }
  return best;
}

bool jointly_rationally_independent(const std::vector<ExponentData>& data, int bound,
                                    double tol) {
  std::vector<double> w;
  for (const auto& a : data)
    for (double c : a.chi_mag) w.push_back(c);
  int b = feasible_relation_bound(static_cast<int>(w.size()), bound);
  return find_integer_relation(w, b, tol).empty();
}

}  // namespace gradspec::spectrum
