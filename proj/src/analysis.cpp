#include "trimci/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>

#include "trimci/error.hpp"
#include "trimci/linear_fit.hpp"
#include "trimci/parallel.hpp"

namespace trimci {

namespace {

std::vector<std::size_t> order_by_weight(const WavefunctionState& state) {
  std::vector<std::size_t> order(state.dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(state.coeffs[static_cast<Eigen::Index>(x)]);
    const double ay = std::abs(state.coeffs[static_cast<Eigen::Index>(y)]);
    if (ax != ay) return ax > ay;
    return state.dets[x] < state.dets[y];
  });
  return order;
}

}  // namespace

HammingDistribution hamming_distribution(const WavefunctionState& state) {
  if (state.dets.empty()) throw ConfigError("hamming_distribution: empty state");
  const auto order = order_by_weight(state);
  HammingDistribution dist;
  dist.reference = state.dets[order[0]];
  for (std::size_t i = 0; i < state.dets.size(); ++i) {
    const double w = state.coeffs[static_cast<Eigen::Index>(i)] *
                     state.coeffs[static_cast<Eigen::Index>(i)];
    dist.weights[hamming_distance(state.dets[i], dist.reference)] += w;
  }
  return dist;
}

PowerLawFit cumulative_and_fit(const WavefunctionState& state, double fit_lo_frac,
                               double fit_hi_frac) {
  const std::size_t R = state.dets.size();
  if (R < 10) throw ConfigError("cumulative_and_fit: need at least 10 determinants");
  if (!(fit_lo_frac > 0 && fit_lo_frac < fit_hi_frac && fit_hi_frac <= 1.0))
    throw ConfigError("cumulative_and_fit: bad fit range fractions");

  std::vector<double> w(R);
  for (std::size_t i = 0; i < R; ++i) {
    const double c = state.coeffs[static_cast<Eigen::Index>(i)];
    w[i] = c * c;
  }
  std::sort(w.begin(), w.end(), std::greater<>());

  PowerLawFit fit;
  fit.fit_lo = std::max<std::size_t>(1, static_cast<std::size_t>(
                                            std::floor(fit_lo_frac * static_cast<double>(R))));
  fit.fit_hi = std::min(R, static_cast<std::size_t>(
                               std::floor(fit_hi_frac * static_cast<double>(R))));

  std::vector<double> lx, ly;
  double cum = 0.0;
  for (std::size_t r = 1; r <= fit.fit_hi; ++r) {
    cum += w[r - 1];
    if (r < fit.fit_lo) continue;
    const double tail = 1.0 - cum;
    if (tail <= 1e-14) break;
    lx.push_back(std::log10(static_cast<double>(r)));
    ly.push_back(std::log10(tail));
  }
  if (lx.size() < 3)
    throw ConfigError("cumulative_and_fit: fewer than 3 usable points in fit range");
  const LinearFit ols = least_squares(lx, ly);
  fit.alpha = -ols.slope;
  fit.r_squared = ols.r_squared;
  fit.sigma = fit.alpha != 0.0 ? 1.0 / fit.alpha : std::numeric_limits<double>::infinity();
  return fit;
}

double ComplexityReport::entropy_vs(double sigma_0) const {
  return std::log10(1.0 / epsilon) * (sigma_a - sigma_0);
}

ComplexityReport complexity_report(double epsilon, std::size_t r_alg) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("complexity_report: epsilon must lie in (0, 1)");
  if (r_alg < 1) throw ConfigError("complexity_report: r_alg must be >= 1");
  ComplexityReport rep;
  rep.epsilon = epsilon;
  rep.r_alg = r_alg;
  rep.log10_r = std::log10(static_cast<double>(r_alg));
  rep.sigma_a = rep.log10_r / std::log10(1.0 / epsilon);
  return rep;
}

ScalingFit scaling_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw ConfigError("scaling_fit: need >= 2 points");
  std::vector<double> x, y;
  for (const auto& [n, r] : points) {
    if (!(r > 0.0 && r <= 1.0))
      throw ConfigError("scaling_fit: r_fraction must lie in (0, 1]");
    x.push_back(n);
    y.push_back(std::log10(r));
  }
  const LinearFit fit = least_squares(x, y);
  return ScalingFit{fit.slope, fit.intercept, fit.r_squared};
}

MDSEmbedding mds_embedding(const WavefunctionState& state, std::size_t k_max) {
  if (state.dets.size() < 3) throw ConfigError("mds_embedding: need at least 3 determinants");
  if (k_max < 3) throw ConfigError("mds_embedding: k_max must be >= 3");

  MDSEmbedding emb;
  auto order = order_by_weight(state);
  order.resize(std::min(order.size(), k_max));
  emb.selected = order;
  const auto k = static_cast<Eigen::Index>(order.size());

  Eigen::MatrixXd d2(k, k);
  Eigen::MatrixXd d1(k, k);
  parallel_blocks(static_cast<std::size_t>(k), [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i)
      for (Eigen::Index j = 0; j < k; ++j) {
        const int d = hamming_distance(state.dets[order[i]],
                                       state.dets[order[static_cast<std::size_t>(j)]]);
        d1(static_cast<Eigen::Index>(i), j) = d;
        d2(static_cast<Eigen::Index>(i), j) = static_cast<double>(d) * d;
      }
  });

  // double centering: B = -1/2 C D2 C
  const Eigen::VectorXd row_mean = d2.rowwise().mean();
  const double grand = d2.mean();
  Eigen::MatrixXd b_mat = -0.5 * d2;
  b_mat.colwise() += 0.5 * row_mean;
  b_mat.rowwise() += 0.5 * row_mean.transpose();
  b_mat.array() -= 0.5 * grand;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b_mat);
  const double l1 = es.eigenvalues()[k - 1];
  const double l2 = k >= 2 ? es.eigenvalues()[k - 2] : 0.0;
  if (l1 <= 0.0)
    throw SolverError("mds_embedding: degenerate distance matrix (no positive spread)");

  emb.points.resize(k, 2);
  emb.points.col(0) = es.eigenvectors().col(k - 1) * std::sqrt(l1);
  emb.points.col(1) = l2 > 0.0 ? (es.eigenvectors().col(k - 2) * std::sqrt(l2)).eval()
                               : Eigen::VectorXd::Zero(k).eval();

  // reflect so the heaviest determinant lands in the non-negative quadrant
  for (int axis = 0; axis < 2; ++axis)
    if (emb.points(0, axis) < 0.0) emb.points.col(axis) = -emb.points.col(axis);

  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const double dij = (emb.points.row(i) - emb.points.row(j)).norm();
      num += (d1(i, j) - dij) * (d1(i, j) - dij);
      den += d1(i, j) * d1(i, j);
    }
  emb.stress = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return emb;
}

namespace {
void print_g17(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}
}  // namespace

void write_hamming_csv(std::ostream& out, const HammingDistribution& dist) {
  out << "d,weight\n";
  for (const auto& [d, w] : dist.weights) {
    out << d << ',';
    print_g17(out, w);
    out << '\n';
  }
}

void write_cumulative_csv(std::ostream& out, const WavefunctionState& state) {
  std::vector<double> w(state.dets.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double c = state.coeffs[static_cast<Eigen::Index>(i)];
    w[i] = c * c;
  }
  std::sort(w.begin(), w.end(), std::greater<>());
  out << "rank,one_minus_F\n";
  double cum = 0.0;
  for (std::size_t r = 1; r <= w.size(); ++r) {
    cum += w[r - 1];
    out << r << ',';
    print_g17(out, std::max(0.0, 1.0 - cum));
    out << '\n';
  }
}

void write_mds_csv(std::ostream& out, const WavefunctionState& state,
                   const MDSEmbedding& emb) {
  out << "index,alpha_bits_hex,beta_bits_hex,coeff,x,y\n";
  for (std::size_t i = 0; i < emb.selected.size(); ++i) {
    const std::size_t idx = emb.selected[i];
    out << idx << ',' << to_hex(state.dets[idx].alpha) << ','
        << to_hex(state.dets[idx].beta) << ',';
    print_g17(out, state.coeffs[static_cast<Eigen::Index>(idx)]);
    out << ',';
    print_g17(out, emb.points(static_cast<Eigen::Index>(i), 0));
    out << ',';
    print_g17(out, emb.points(static_cast<Eigen::Index>(i), 1));
    out << '\n';
  }
}

}  // namespace trimci
