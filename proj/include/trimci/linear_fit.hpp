#pragma once

#include <cstddef>
#include <vector>

#include "trimci/error.hpp"

namespace trimci {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Ordinary (optionally weighted) least squares of y against x.
// r_squared is 1 when the residual vanishes, including degenerate-variance y.
inline LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y,
                               const std::vector<double>* w = nullptr) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw ConfigError("least_squares: need >= 2 points");
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    sw += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw ConfigError("least_squares: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w ? (*w)[i] : 1.0;
    const double pred = fit.intercept + fit.slope * x[i];
    ss_res += wi * (y[i] - pred) * (y[i] - pred);
    ss_tot += wi * (y[i] - my) * (y[i] - my);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace trimci
