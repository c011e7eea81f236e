#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gradspec/critical.hpp"

namespace gradspec::spectrum {

// Minimal per-critical-point input: Morse index r and the exponent magnitudes
// |chi_1..n| in the record's coordinate order (first r are the contracting
// directions). Synthetic data can be fed directly without a manifold.
struct ExponentData {
  int id = 0;
  int index = 0;
  std::vector<double> chi_mag;
};

std::vector<ExponentData> exponent_data(const std::vector<CriticalPointRecord>& records);

// Witness triple (a, alpha, I, J) of condition (*):
//   I subset {1..r}, J subset {r+1..n}, |J| - |I| = k - r,
//   lambda = sum_{j in I u J} (alpha_j + 1)|chi_j| + sum_{j not in I u J} alpha_j |chi_j|.
// Subsets are stored as bitmasks over 0-based coordinates.
struct ResonanceWitness {
  int critical_id = 0;
  std::vector<uint32_t> alpha;
  uint32_t I_mask = 0;
  uint32_t J_mask = 0;
};

struct SpectrumEntry {
  double lambda = 0.0;
  long long multiplicity = 0;
  std::vector<ResonanceWitness> witnesses;
};

struct SpectrumTable {
  int degree = 0;
  double cutoff = 0.0;
  double merge_tol = 1e-9;
  // true when the joint rational-independence test did not refute; otherwise
  // the table is the guaranteed index-set superset with combinatorial
  // multiplicity data and `note` says so.
  bool exact_multiplicities = true;
  std::string note;
  std::vector<SpectrumEntry> entries;
};

// Graded best-first enumeration of all witnesses with lambda <= Lambda, merged
// across critical points within merge_tol. Throws CutoffTooLarge past
// witness_cap.
SpectrumTable enumerate(const std::vector<ExponentData>& data, int k, double Lambda,
                        double merge_tol = 1e-9, long long witness_cap = 10'000'000);

// m_{k,a}(alpha): number of (I, J) pairs compatible with alpha, by direct
// subset enumeration. Guarded by n <= 20.
long long multiplicity_alpha(const ExponentData& a, const std::vector<uint32_t>& alpha, int k);

// Total multiplicity below Lambda without materializing witnesses.
long long count_below(const std::vector<ExponentData>& data, int k, double Lambda);

struct WeylResult {
  long long count = 0;
  double leading = 0.0;
  double relative_gap = 0.0;
};
WeylResult weyl_check(const std::vector<ExponentData>& data, int k, double Lambda);

struct CancellationRow {
  double lambda = 0.0;
  std::vector<long long> m_k;  // per degree 0..n
  long long alternating_sum = 0;
};
std::vector<CancellationRow> even_odd_cancellation(const std::vector<ExponentData>& data,
                                                   double Lambda, double merge_tol = 1e-9);

// Smallest strictly positive resonance of degree k (the predicted dominant
// correlation decay rate).
double spectral_gap(const std::vector<ExponentData>& data, int k);

bool jointly_rationally_independent(const std::vector<ExponentData>& data, int bound = 12,
                                    double tol = 1e-9);

}  // namespace gradspec::spectrum
