#include "trimci/pt2.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "trimci/connections.hpp"
#include "trimci/error.hpp"
#include "trimci/linear_fit.hpp"
#include "trimci/parallel.hpp"

namespace trimci {

PT2Result pt2_correction(const WavefunctionState& state, const IntegralTable& ints,
                         double epsilon2) {
  if (state.dets.empty()) throw ConfigError("pt2_correction: empty state");
  if (std::abs(state.coeffs.norm() - 1.0) > 1e-6)
    throw ConfigError("pt2_correction: coefficients are not unit norm");

  PT2Result out;
  out.e_var = state.energy;
  out.epsilon2 = epsilon2;

  std::unordered_set<Determinant, DeterminantHash> core(state.dets.begin(), state.dets.end());

  // (external det, parent index, H_aj * c_j); sorted so the accumulation
  // order is fixed regardless of threading
  struct Contribution {
    Determinant det;
    std::uint32_t parent;
    double value;
  };
  const std::size_t n = state.dets.size();
  const int nblocks = block_count_for(n);
  std::vector<std::vector<Contribution>> buckets(static_cast<std::size_t>(nblocks));
  parallel_blocks(n, [&](std::size_t b, std::size_t e, int blk) {
    auto& local = buckets[static_cast<std::size_t>(blk)];
    for (std::size_t j = b; j < e; ++j) {
      const double cj = state.coeffs[static_cast<Eigen::Index>(j)];
      const double acj = std::abs(cj);
      if (acj == 0.0) continue;
      for_each_connected(state.dets[j], ints, epsilon2 / acj,
                         [&](const Determinant& cand, double el) {
                           if (core.count(cand)) return;
                           local.push_back(Contribution{cand, static_cast<std::uint32_t>(j),
                                                        el * cj});
                         });
    }
  });

  std::size_t total = 0;
  for (const auto& b : buckets) total += b.size();
  std::vector<Contribution> contributions;
  contributions.reserve(total);
  for (auto& b : buckets)
    contributions.insert(contributions.end(), b.begin(), b.end());
  std::sort(contributions.begin(), contributions.end(),
            [](const Contribution& x, const Contribution& y) {
              if (x.det != y.det) return x.det < y.det;
              return x.parent < y.parent;
            });

  double e_per = 0.0;
  std::size_t k = 0;
  while (k < contributions.size()) {
    const Determinant& a = contributions[k].det;
    double amp = 0.0;
    while (k < contributions.size() && contributions[k].det == a) {
      amp += contributions[k].value;
      ++k;
    }
    const double denom = out.e_var - diagonal_element(a, ints);
    if (std::abs(denom) < 1e-12)
      throw SolverError("pt2_correction: near-degenerate external determinant (alpha=" +
                        to_hex(a.alpha) + ", beta=" + to_hex(a.beta) +
                        ") with |E_var - H_aa| < 1e-12");
    if (denom > 0.0) ++out.n_positive_denominators;
    e_per += amp * amp / denom;
    ++out.n_external;
  }
  out.e_per = e_per;
  return out;
}

ExtrapolationResult extrapolate(const std::vector<std::pair<double, double>>& evar_eper,
                                bool weighted) {
  if (evar_eper.size() < 2) throw ConfigError("extrapolate: need >= 2 points");
  ExtrapolationResult out;
  std::vector<double> x, y, w;
  x.reserve(evar_eper.size());
  y.reserve(evar_eper.size());
  for (const auto& [e_var, e_per] : evar_eper) {
    x.push_back(-e_per);
    y.push_back(e_var + e_per);
    out.points.emplace_back(-e_per, e_var + e_per);
  }
  bool distinct = false;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (x[i] != x[0]) distinct = true;
  if (!distinct) throw ConfigError("extrapolate: all corrections equal; degenerate fit");
  if (weighted) {
    w.reserve(x.size());
    for (double xi : x) w.push_back(1.0 / std::max(xi * xi, 1e-30));
  }
  const LinearFit fit = least_squares(x, y, weighted ? &w : nullptr);
  out.slope = fit.slope;
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace trimci
