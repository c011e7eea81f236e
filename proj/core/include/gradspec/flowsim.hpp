#pragma once

#include <utility>
#include <vector>

#include "gradspec/critical.hpp"
#include "gradspec/manifold.hpp"

namespace gradspec {

struct Trajectory {
  std::vector<double> times;   // strictly increasing
  std::vector<Vec> states;
  std::vector<Mat> jacobians;  // d phi^t(x0); empty unless requested
};

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  bool with_jacobian = false;
  double h_min = 1e-14;
  double h_max = 1.0;
  // absolute sample times to land on exactly (in addition to accepted steps)
  std::vector<double> record_times;
  bool record_all_steps = true;
};

// Adaptive Dormand-Prince 4(5). Negative t_final integrates the backward flow;
// the returned trajectory is reported with increasing times either way. When
// with_jacobian is set the variational equation dJ/dt = DV(x) J is integrated
// alongside with J(0) = Id. Sphere states are re-projected each step.
Trajectory integrate(const ManifoldModel& model, const Vec& x0, double t_final,
                     const IntegrateOptions& opt = {});

struct LimitOptions {
  double horizon = 200.0;
  double capture_radius = 1e-4;
  double rtol = 1e-10;
};

// (alpha_id, omega_id): backward and forward limit critical points of x0.
// Capture is certified inside the linearization ball: the component of x - a
// along the expanding directions (for the given time direction) must be
// negligible, so slow saddle passages are not misclassified.
std::pair<int, int> limits(const ManifoldModel& model,
                           const std::vector<CriticalPointRecord>& records, const Vec& x0,
                           const LimitOptions& opt = {});

// single-direction variants
int omega_limit_of(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const Vec& x0, const LimitOptions& opt = {});
int alpha_limit_of(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const Vec& x0, const LimitOptions& opt = {});

struct BasinMap {
  std::vector<Vec> grid;
  std::vector<double> weights;  // quadrature weights when built from one
  std::vector<int> alpha_limit;
  std::vector<int> omega_limit;
};

BasinMap basin_map(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const std::vector<Vec>& grid, const LimitOptions& opt = {}, int jobs = 0);
BasinMap basin_map(const ManifoldModel& model, const std::vector<CriticalPointRecord>& records,
                   const QuadratureGrid& grid, const LimitOptions& opt = {}, int jobs = 0);

struct ConnectionOrbit {
  double seed_parameter = 0.0;  // angle on the unstable circle, or +-1 for 1-dim
  int sign = 0;
  double closest_approach = 0.0;
  Vec arrival_state;
};

struct ConnectionCount {
  int source = -1;
  int target = -1;
  int signed_count = 0;
  std::vector<ConnectionOrbit> orbits;
};

struct ShootOptions {
  int n_shoot = 360;
  double delta = 1e-3;
  double rtol = 1e-10;
  double horizon = 200.0;
  double capture_radius = 1e-4;
  int jobs = 0;
};

// Heteroclinic orbits a -> b for index(b) = index(a)+1, located by shooting
// from the unstable sphere of a (with bisection refinement of close-approach
// dips for 2-dimensional unstable manifolds), signed by transporting the
// oriented unstable frame of a along the connection via the integrated
// Jacobian and comparing against [flow direction, unstable frame of b].
// Connections must survive a delta/2 Richardson re-shoot to be counted.
ConnectionCount count_connections(const ManifoldModel& model,
                                  const std::vector<CriticalPointRecord>& records,
                                  const CriticalPointRecord& a, const CriticalPointRecord& b,
                                  const ShootOptions& opt = {});

// All adjacent-index pairs (the input the Morse complex needs).
std::vector<ConnectionCount> all_connections(const ManifoldModel& model,
                                             const std::vector<CriticalPointRecord>& records,
                                             const ShootOptions& opt = {});

}  // namespace gradspec
