#pragma once

#include <string>
#include <vector>

#include "gradspec/manifold.hpp"

namespace gradspec {

// Critical point with its Lyapunov data. `exponents` are the eigenvalues of
// L_f(a) (the metric-symmetrized Hessian) sorted ascending, so exactly
// `index` of them are negative. `eigenframe` columns are the matching
// g-orthonormal eigenvectors (state_dim x n; on the embedded sphere they are
// ambient tangent vectors).
struct CriticalPointRecord {
  int id = -1;
  Vec position;
  double value = 0.0;
  int index = 0;
  Vec exponents;
  Mat eigenframe;
};

struct HypothesisReport {
  bool excellent = false;
  bool rationally_independent_joint = false;
  bool rationally_independent_per_point = false;
  bool sternberg_nonresonant = false;
  int relation_bound = 12;
  double tol = 1e-9;
  std::vector<std::string> witnesses;  // one per false flag, human readable
};

// Newton iteration on V_f = 0 seeded from a grid; duplicates merged within
// 1e-6 chart distance, results sorted by canonical coordinates, ids assigned
// in that order. Throws SingularHessian on a degenerate critical point.
std::vector<CriticalPointRecord> find_critical_points(const ManifoldModel& model,
                                                      int grid_density = 24,
                                                      double newton_tol = 1e-12);

// Sorted eigenvalues of the generalized problem Hess f(a) xi = chi g(a) xi.
// Throws NotCritical when ||V_f(a)|| >= 1e-8.
Vec lyapunov_exponents(const ManifoldModel& model, const Vec& a);

CriticalPointRecord make_record(const ManifoldModel& model, const Vec& a);

// Morse index from the inertia of the Hessian alone (Sylvester's law); used
// as an independent check against the exponent sign count.
int hessian_inertia_index(const ManifoldModel& model, const Vec& a);

HypothesisReport check_hypotheses(const std::vector<CriticalPointRecord>& records,
                                  int relation_bound = 12, double tol = 1e-9);

// Exhaustive integer-relation scan (meet-in-the-middle): returns some k with
// ||k||_inf <= bound, k != 0 and |k . values| < tol, or empty when none
// exists. Cost is (2*bound+1)^ceil(dim/2).
std::vector<long long> find_integer_relation(const std::vector<double>& values, int bound,
                                             double tol);
// Largest bound <= requested keeping the half-enumeration below ~16M entries.
int feasible_relation_bound(int dim, int requested);

}  // namespace gradspec
