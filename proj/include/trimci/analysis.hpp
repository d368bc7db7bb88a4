#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "trimci/engine_types.hpp"

namespace trimci {

// Weighted occupation-distance profile relative to the largest-amplitude
// determinant. Distances count spin-orbital occupation differences, so a
// single excitation sits at distance 2.
struct HammingDistribution {
  Determinant reference;
  std::map<int, double> weights;  // distance -> sum |c|^2
};

HammingDistribution hamming_distribution(const WavefunctionState& state);

struct PowerLawFit {
  double alpha = 0.0;  // tail exponent: 1 - F(r) ~ r^-alpha
  double r_squared = 0.0;
  std::size_t fit_lo = 0;  // rank interval used (inclusive)
  std::size_t fit_hi = 0;
  double sigma = 0.0;  // 1 / alpha
};

// Sorts |c|^2 descending, forms the cumulative tail 1 - F(r) and fits
// log10(1 - F) against log10(r) over ranks [fit_lo_frac*R, fit_hi_frac*R],
// skipping ranks with a numerically exhausted tail.
PowerLawFit cumulative_and_fit(const WavefunctionState& state, double fit_lo_frac = 0.01,
                               double fit_hi_frac = 0.5);

struct ComplexityReport {
  double epsilon = 0.0;
  std::size_t r_alg = 0;
  double sigma_a = 0.0;  // log10(r_alg) / log10(1/epsilon)
  double log10_r = 0.0;
  /// Entropy of the observed complexity against a baseline sigma_0,
  /// in units k = log10(1/epsilon).
  double entropy_vs(double sigma_0) const;
};

ComplexityReport complexity_report(double epsilon, std::size_t r_alg);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log10(r_fraction) against N over (N, r_fraction) points.
ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points);

struct MDSEmbedding {
  Eigen::MatrixX2d points;            // one row per selected determinant
  double stress = 0.0;                // relative Frobenius distance residual
  std::vector<std::size_t> selected;  // indices into the state (top-K by |c|)
};

// Classical (Torgerson) scaling of the top-K determinants: double-centered
// squared Hamming distances, top-2 eigenpairs scaled by sqrt(eigenvalue).
// The largest-|c| point is reflected into the non-negative quadrant.
MDSEmbedding mds_embedding(const WavefunctionState& state, std::size_t k_max = 2000);

void write_hamming_csv(std::ostream& out, const HammingDistribution& dist);
void write_cumulative_csv(std::ostream& out, const WavefunctionState& state);
void write_mds_csv(std::ostream& out, const WavefunctionState& state,
                   const MDSEmbedding& emb);

}  // namespace trimci
