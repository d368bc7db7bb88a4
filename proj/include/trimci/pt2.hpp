#pragma once

#include <utility>
#include <vector>

#include "trimci/engine_types.hpp"
#include "trimci/integrals.hpp"

namespace trimci {

struct PT2Result {
  double e_var = 0.0;
  double e_per = 0.0;
  double epsilon2 = 0.0;
  std::size_t n_external = 0;
  // diagonal below e_var: the perturber raises rather than lowers the energy
  std::size_t n_positive_denominators = 0;
};

// Deterministic Epstein-Nesbet second-order correction:
//   E_per = sum_a (sum_j H_aj c_j)^2 / (E_var - H_aa)
// over external determinants a reached by screened excitations with
// |H_aj c_j| > epsilon2; contributions from multiple parents accumulate
// before squaring. The state must be self-consistent (coeffs are the
// eigenvector on dets, energy is their eigenvalue).
PT2Result pt2_correction(const WavefunctionState& state, const IntegralTable& ints,
                         double epsilon2);

struct ExtrapolationResult {
  std::vector<std::pair<double, double>> points;  // (-e_per, e_tot)
  double slope = 0.0;
  double intercept = 0.0;  // estimate at -e_per = 0
  double r_squared = 1.0;
};

// Least squares of e_tot = e_var + e_per against -e_per; the intercept is
// the zero-correction estimate. Optional weights 1/x^2 favor the points
// closest to the limit.
ExtrapolationResult extrapolate(const std::vector<std::pair<double, double>>& evar_eper,
                                bool weighted = false);

}  // namespace trimci
