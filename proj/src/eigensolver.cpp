#include "trimci/eigensolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "trimci/connections.hpp"
#include "trimci/parallel.hpp"
#include "trimci/slater_condon.hpp"

namespace trimci {

namespace {

void canonical_sign(Eigen::VectorXd& c) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double a = std::abs(c[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (c[best] < 0.0) c = -c;
}

}  // namespace

ProjectedHamiltonian build_projected(std::vector<Determinant> dets,
                                     const IntegralTable& ints,
                                     const BuildOptions& opts) {
  ProjectedHamiltonian h;
  h.dets_ = std::move(dets);
  h.ints_ = &ints;
  const std::size_t n = h.dets_.size();

  h.index_.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (!h.index_.emplace(h.dets_[i], static_cast<std::uint32_t>(i)).second)
      throw ConfigError("build_projected: duplicate determinant at position " +
                        std::to_string(i));
  }

  h.diag_.resize(static_cast<Eigen::Index>(n));
  parallel_blocks(n, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i)
      h.diag_[static_cast<Eigen::Index>(i)] = diagonal_element(h.dets_[i], ints);
  });

  // Row generation into per-block buffers, stitched in block order. Rows are
  // sorted by column, so the assembled structure is independent of threading.
  const std::size_t max_entries = opts.max_explicit_bytes / 12;
  const int nblocks = block_count_for(n);
  std::vector<std::vector<std::uint32_t>> bcols(static_cast<std::size_t>(nblocks));
  std::vector<std::vector<double>> bvals(static_cast<std::size_t>(nblocks));
  std::vector<std::vector<std::uint32_t>> bcounts(static_cast<std::size_t>(nblocks));
  std::vector<std::size_t> bbegin(static_cast<std::size_t>(nblocks), 0);
  std::atomic<std::size_t> total{0};
  std::atomic<bool> overflow{false};

  parallel_blocks(n, [&](std::size_t b, std::size_t e, int blk) {
    auto& cols = bcols[static_cast<std::size_t>(blk)];
    auto& vals = bvals[static_cast<std::size_t>(blk)];
    auto& counts = bcounts[static_cast<std::size_t>(blk)];
    bbegin[static_cast<std::size_t>(blk)] = b;
    counts.reserve(e - b);
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t i = b; i < e; ++i) {
      if (overflow.load(std::memory_order_relaxed)) return;
      row.clear();
      for_each_connected(h.dets_[i], ints, 0.0, [&](const Determinant& cand, double el) {
        const auto it = h.index_.find(cand);
        if (it != h.index_.end()) row.emplace_back(it->second, el);
      });
      std::sort(row.begin(), row.end());
      counts.push_back(static_cast<std::uint32_t>(row.size()));
      for (const auto& [j, v] : row) {
        cols.push_back(j);
        vals.push_back(v);
      }
      if (total.fetch_add(row.size(), std::memory_order_relaxed) + row.size() > max_entries)
        overflow.store(true, std::memory_order_relaxed);
    }
  });

  if (overflow.load()) {
    h.matrix_free_ = true;
    return h;
  }

  h.offsets_.assign(n + 1, 0);
  for (int blk = 0; blk < nblocks; ++blk) {
    const auto& counts = bcounts[static_cast<std::size_t>(blk)];
    for (std::size_t k = 0; k < counts.size(); ++k)
      h.offsets_[bbegin[static_cast<std::size_t>(blk)] + k + 1] = counts[k];
  }
  for (std::size_t i = 0; i < n; ++i) h.offsets_[i + 1] += h.offsets_[i];
  h.cols_.resize(h.offsets_[n]);
  h.vals_.resize(h.offsets_[n]);
  for (int blk = 0; blk < nblocks; ++blk) {
    const std::size_t at = h.offsets_[bbegin[static_cast<std::size_t>(blk)]];
    std::copy(bcols[static_cast<std::size_t>(blk)].begin(), bcols[static_cast<std::size_t>(blk)].end(),
              h.cols_.begin() + static_cast<std::ptrdiff_t>(at));
    std::copy(bvals[static_cast<std::size_t>(blk)].begin(), bvals[static_cast<std::size_t>(blk)].end(),
              h.vals_.begin() + static_cast<std::ptrdiff_t>(at));
  }
  // index map retained only for the matrix-free path
  h.index_.clear();
  return h;
}

void ProjectedHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  const std::size_t n = dets_.size();
  y.resize(static_cast<Eigen::Index>(n));
  if (!matrix_free_) {
    parallel_blocks(n, [&](std::size_t b, std::size_t e, int) {
      for (std::size_t i = b; i < e; ++i) {
        double acc = diag_[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
        for (std::uint64_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
          acc += vals_[k] * x[static_cast<Eigen::Index>(cols_[k])];
        y[static_cast<Eigen::Index>(i)] = acc;
      }
    });
    return;
  }
  parallel_blocks(n, [&](std::size_t b, std::size_t e, int) {
    for (std::size_t i = b; i < e; ++i) {
      double acc = diag_[static_cast<Eigen::Index>(i)] * x[static_cast<Eigen::Index>(i)];
      for_each_connected(dets_[i], *ints_, 0.0, [&](const Determinant& cand, double el) {
        const auto it = index_.find(cand);
        if (it != index_.end()) acc += el * x[static_cast<Eigen::Index>(it->second)];
      });
      y[static_cast<Eigen::Index>(i)] = acc;
    }
  });
}

Eigen::MatrixXd ProjectedHamiltonian::dense() const {
  const auto n = static_cast<Eigen::Index>(dets_.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = diag_[i];
  if (!matrix_free_) {
    for (std::size_t i = 0; i < dets_.size(); ++i)
      for (std::uint64_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols_[k])) = vals_[k];
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = matrix_element(dets_[static_cast<std::size_t>(i)],
                                      dets_[static_cast<std::size_t>(j)], *ints_);
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

EigenResult davidson_lowest(const SymmetricOperator& op, const Eigen::VectorXd* guess,
                            const DavidsonOptions& opts) {
  const std::size_t n = op.n;
  if (n == 0) throw ConfigError("davidson_lowest: empty operator");
  if (opts.tol <= 0) throw ConfigError("davidson_lowest: tol must be positive");
  const auto ni = static_cast<Eigen::Index>(n);
  const int max_sub = std::max(2, std::min<int>(opts.max_subspace, static_cast<int>(n)));

  Eigen::Index lowest = 0;
  for (Eigen::Index i = 1; i < ni; ++i)
    if ((*op.diag)[i] < (*op.diag)[lowest]) lowest = i;
  Eigen::VectorXd unit_lowest = Eigen::VectorXd::Zero(ni);
  unit_lowest[lowest] = 1.0;

  std::vector<Eigen::VectorXd> V;
  if (guess && guess->size() == ni && guess->norm() > 1e-12) {
    V.push_back(*guess / guess->norm());
    // keep the lowest-diagonal direction in the subspace: a warm start from
    // a different basin must not lock the iteration onto an excited state
    Eigen::VectorXd t = unit_lowest;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : V) t -= v.dot(t) * v;
    if (t.norm() > 1e-8) V.push_back(t / t.norm());
  } else {
    V.push_back(unit_lowest);
  }
  std::vector<Eigen::VectorXd> W;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(max_sub, max_sub);

  EigenResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();

  int iterations = 0;
  while (iterations < opts.max_iter) {
    ++iterations;
    // extend W and the subspace matrix for newly added basis vectors
    while (W.size() < V.size()) {
      const auto k = static_cast<Eigen::Index>(W.size());
      Eigen::VectorXd w;
      op.apply(V[static_cast<std::size_t>(k)], w);
      W.push_back(std::move(w));
      for (Eigen::Index i = 0; i <= k; ++i) {
        const double t = V[static_cast<std::size_t>(i)].dot(W[static_cast<std::size_t>(k)]);
        T(i, k) = t;
        T(k, i) = t;
      }
    }
    const auto k = static_cast<Eigen::Index>(V.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(k, k));
    const double theta = es.eigenvalues()[0];
    const Eigen::VectorXd s = es.eigenvectors().col(0);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(ni);
    Eigen::VectorXd hx = Eigen::VectorXd::Zero(ni);
    for (Eigen::Index i = 0; i < k; ++i) {
      x += s[i] * V[static_cast<std::size_t>(i)];
      hx += s[i] * W[static_cast<std::size_t>(i)];
    }
    x /= x.norm();
    Eigen::VectorXd r = hx - theta * x;
    const double rn = r.norm();

    best.energy = theta;
    best.coefficients = x;
    best.iterations = iterations;
    best.residual_norm = rn;
    if (rn <= opts.tol) {
      canonical_sign(best.coefficients);
      return best;
    }

    if (static_cast<int>(V.size()) >= max_sub) {
      // collapse to the current best vector and keep going
      V.assign(1, x);
      W.assign(1, hx);
      T(0, 0) = theta;
    }

    Eigen::VectorXd t(ni);
    for (Eigen::Index i = 0; i < ni; ++i) {
      double dd = theta - (*op.diag)[i];
      if (std::abs(dd) < 1e-8) dd = dd < 0 ? -1e-8 : 1e-8;
      t[i] = r[i] / dd;
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : V) t -= v.dot(t) * v;
    double tn = t.norm();
    if (tn < 1e-10) {
      // stagnated correction: fall back to the orthogonalized residual
      t = r;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& v : V) t -= v.dot(t) * v;
      tn = t.norm();
      if (tn < 1e-12) break;
    }
    V.push_back(t / tn);
  }
  canonical_sign(best.coefficients);
  throw DavidsonNonConvergence(
      "davidson_lowest: no convergence after " + std::to_string(iterations) +
          " iterations (residual " + std::to_string(best.residual_norm) + ")",
      best);
}

EigenResult davidson_lowest(const ProjectedHamiltonian& h, const Eigen::VectorXd* guess,
                            const DavidsonOptions& opts) {
  const std::size_t n = h.size();
  if (n == 0) throw ConfigError("davidson_lowest: empty determinant set");
  if (n <= opts.dense_cutoff) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense());
    EigenResult out;
    out.energy = es.eigenvalues()[0];
    out.coefficients = es.eigenvectors().col(0);
    out.coefficients /= out.coefficients.norm();
    out.iterations = 1;
    Eigen::VectorXd hx;
    h.apply(out.coefficients, hx);
    out.residual_norm = (hx - out.energy * out.coefficients).norm();
    canonical_sign(out.coefficients);
    return out;
  }
  SymmetricOperator op;
  op.n = n;
  op.diag = &h.diagonal();
  op.apply = [&h](const Eigen::VectorXd& x, Eigen::VectorXd& y) { h.apply(x, y); };
  return davidson_lowest(op, guess, opts);
}

double variational_energy(const std::vector<Determinant>& dets,
                          const Eigen::VectorXd& coeffs, const IntegralTable& ints) {
  if (static_cast<std::size_t>(coeffs.size()) != dets.size())
    throw ConfigError("variational_energy: coefficient/determinant size mismatch");
  if (std::abs(coeffs.norm() - 1.0) > 1e-6)
    throw ConfigError("variational_energy: coefficients are not unit norm");
  const ProjectedHamiltonian h = build_projected(dets, ints);
  Eigen::VectorXd hx;
  h.apply(coeffs, hx);
  return coeffs.dot(hx);
}

}  // namespace trimci
