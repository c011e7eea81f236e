#include "gradspec/morse_complex.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gradspec/model_currents.hpp"
#include "gradspec/parallel.hpp"

namespace gradspec::morse {

long long bareiss_rank(IntMat m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  int rank = 0;
  long long prev = 1;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int i = row; i < rows; ++i)
      if (m(i, col) != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    if (pivot != row) m.row(pivot).swap(m.row(row));
    for (int i = row + 1; i < rows; ++i) {
      for (int j = col + 1; j < cols; ++j)
        m(i, j) = (m(row, col) * m(i, j) - m(i, col) * m(row, j)) / prev;
      m(i, col) = 0;
    }
    prev = m(row, col);
    ++row;
    ++rank;
  }
  return rank;
}

ComplexData build(const std::vector<CriticalPointRecord>& records,
                  const std::vector<ConnectionCount>& connections) {
  ComplexData data;
  if (records.empty()) return data;
  data.n = static_cast<int>(records.front().exponents.size());

  data.generators.assign(data.n + 1, {});
  std::map<int, std::pair<int, int>> slot;  // id -> (degree, position)
  for (const auto& rec : records) {
    slot[rec.id] = {rec.index, static_cast<int>(data.generators[rec.index].size())};
    data.generators[rec.index].push_back(rec.id);
  }
  data.c.assign(data.n + 1, 0);
  for (int k = 0; k <= data.n; ++k) data.c[k] = static_cast<long long>(data.generators[k].size());

  data.d.clear();
  for (int k = 0; k < data.n; ++k)
    data.d.push_back(IntMat::Zero(data.c[k + 1], data.c[k]));
  for (const auto& conn : connections) {
    auto [deg_a, col] = slot.at(conn.source);
    auto [deg_b, rowp] = slot.at(conn.target);
    if (deg_b != deg_a + 1)
      throw ComplexInconsistent("build: connection with index gap != 1");
    data.d[deg_a](rowp, col) = conn.signed_count;
  }

  for (int k = 0; k + 1 < data.n; ++k) {
    IntMat prod = data.d[k + 1] * data.d[k];
    if (!prod.isZero())
      throw ComplexInconsistent("build: d o d != 0 between degrees " + std::to_string(k) +
                                " and " + std::to_string(k + 2));
  }

  std::vector<long long> rank(data.n + 1, 0);  // rank[k] = rk d_k, rank[n] unused
  for (int k = 0; k < data.n; ++k) rank[k] = bareiss_rank(data.d[k]);
  data.betti.assign(data.n + 1, 0);
  for (int k = 0; k <= data.n; ++k) {
    long long rk = k < data.n ? rank[k] : 0;
    long long rk_prev = k > 0 ? rank[k - 1] : 0;
    data.betti[k] = data.c[k] - rk - rk_prev;
  }
  data.euler = 0;
  for (int k = 0; k <= data.n; ++k) data.euler += (k % 2 == 0 ? 1 : -1) * data.c[k];
  return data;
}

std::vector<InequalityRow> morse_inequalities(const ComplexData& data) {
  std::vector<InequalityRow> rows;
  for (int k = 0; k <= data.n; ++k) {
    InequalityRow row;
    row.k = k;
    for (int j = 0; j <= k; ++j) {
      long long sgn = ((k - j) % 2 == 0) ? 1 : -1;
      row.lhs += sgn * data.c[j];
      row.rhs += sgn * data.betti[j];
    }
    row.holds = row.lhs >= row.rhs;
    row.equality = row.lhs == row.rhs;
    rows.push_back(row);
  }
  return rows;
}

DualityReport poincare_duality(const ComplexData& data_f, const ComplexData& data_minus_f,
                               const ManifoldModel& model,
                               const std::vector<CriticalPointRecord>& records_f,
                               const std::vector<CriticalPointRecord>& records_minus_f) {
  DualityReport rep;
  const int n = data_f.n;
  rep.palindromic = true;
  rep.cross_equal = true;
  for (int k = 0; k <= n; ++k) {
    if (data_f.betti[k] != data_f.betti[n - k]) rep.palindromic = false;
    if (data_f.betti[k] != data_minus_f.betti[n - k]) rep.cross_equal = false;
  }
  rep.index_swap = records_f.size() == records_minus_f.size();
  for (const auto& rec : records_f) {
    bool matched = false;
    for (const auto& neg : records_minus_f)
      if (model.distance(rec.position, neg.position) < 1e-6) {
        matched = neg.index == n - rec.index;
        break;
      }
    if (!matched) rep.index_swap = false;
  }
  return rep;
}

TraceReport lefschetz(const std::vector<CriticalPointRecord>& records,
                      const std::vector<double>& times) {
  TraceReport rep;
  rep.times = times;
  rep.euler_lhs = 0;
  for (const auto& rec : records) rep.euler_lhs += (rec.index % 2 == 0) ? 1 : -1;
  for (double t : times) {
    if (t <= 0) throw DegenerateTime("lefschetz: times must be positive");
    double sum = 0.0;
    for (const auto& rec : records) {
      double prod = 1.0;
      for (int j = 0; j < rec.exponents.size(); ++j) {
        double factor = 1.0 - std::exp(-t * rec.exponents[j]);
        if (std::abs(factor) < 1e-14)
          throw DegenerateTime("lefschetz: |1 - e^{-t chi}| < 1e-14 at t = " +
                               std::to_string(t));
        prod *= factor;
      }
      sum += prod > 0 ? 1.0 : -1.0;
    }
    rep.lefschetz_rhs.push_back(sum);
  }
  return rep;
}

double ProjectorReport::fraction_within(double tol) const {
  if (empirical.empty()) return 1.0;
  size_t good = 0;
  for (size_t i = 0; i < empirical.size(); ++i)
    if (std::abs(empirical[i] - predicted[i]) < tol) ++good;
  return double(good) / double(empirical.size());
}

ProjectorReport kernel_projector_k0(const ManifoldModel& model,
                                    const std::vector<CriticalPointRecord>& records,
                                    const std::function<double(const Vec&)>& psi,
                                    const std::vector<Vec>& grid, double t_limit,
                                    const LimitOptions& opt, int jobs) {
  ProjectorReport rep;
  rep.alpha_ids.assign(grid.size(), -1);
  rep.predicted.assign(grid.size(), 0.0);
  rep.empirical.assign(grid.size(), 0.0);
  std::vector<std::string> failures(grid.size());
  parallel_for(grid.size(), [&](size_t i) {
    try {
      int alpha = alpha_limit_of(model, records, grid[i], opt);
      rep.alpha_ids[i] = alpha;
      rep.predicted[i] = psi(records[alpha].position);
      IntegrateOptions iopt;
      iopt.rtol = opt.rtol;
      iopt.record_all_steps = false;
      Trajectory traj = integrate(model, grid[i], -t_limit, iopt);
      rep.empirical[i] = psi(traj.states.front());  // state at time -t_limit
    } catch (const NoConvergence& e) {
      failures[i] = e.what();
    }
  }, jobs);
  for (const auto& f : failures)
    if (!f.empty()) throw NoConvergence(f);
  rep.max_deviation = 0.0;
  for (size_t i = 0; i < grid.size(); ++i)
    rep.max_deviation = std::max(rep.max_deviation,
                                 std::abs(rep.empirical[i] - rep.predicted[i]));
  return rep;
}

KoszulReport koszul_homology(const ComplexData& data,
                             const std::vector<CriticalPointRecord>& records) {
  KoszulReport rep;
  rep.vanishing_certified = true;
  std::vector<std::pair<int, int>> shapes;
  for (const auto& rec : records) {
    std::pair<int, int> shape{static_cast<int>(rec.exponents.size()), rec.index};
    if (std::find(shapes.begin(), shapes.end(), shape) == shapes.end()) shapes.push_back(shape);
  }
  for (auto [n, r] : shapes) {
    currents::LinearModelSpec spec{n, r, {}};
    auto germ = currents::generator(spec, std::vector<uint32_t>(n, 0), 0, 0);
    if (!currents::contract_with_v(spec, germ).is_zero()) rep.vanishing_certified = false;
  }
  rep.dims = data.c;
  rep.alternating_sum = 0;
  for (int k = 0; k <= data.n; ++k)
    rep.alternating_sum += (k % 2 == 0 ? 1 : -1) * rep.dims[k];
  return rep;
}

}  // namespace gradspec::morse
