#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <sstream>

#include "trimci/analysis.hpp"
#include "trimci/engine.hpp"
#include "trimci/fci.hpp"
#include "trimci/rng.hpp"

using namespace trimci;

namespace {

Determinant det(std::uint64_t alpha, std::uint64_t beta) {
  Determinant d;
  d.alpha.w[0] = alpha;
  d.beta.w[0] = beta;
  return d;
}

IntegralTable hubbard22(double u) {
  HubbardSpec spec;
  spec.lx = spec.ly = 2;
  spec.periodic = true;
  spec.u = u;
  spec.t = 1.0;
  spec.n_up = spec.n_down = 2;
  return IntegralTable::from_hubbard(spec);
}

// tail 1 - F(r) = t * r^(-alpha) exactly at every rank, by differencing the
// target cumulative (the residual tail mass past rank n stays unassigned)
WavefunctionState synthetic_power_law(std::size_t n, double alpha, double t) {
  WavefunctionState s;
  s.coeffs.resize(static_cast<Eigen::Index>(n));
  double prev_tail = 1.0;
  for (std::size_t r = 1; r <= n; ++r) {
    const double tail = t * std::pow(static_cast<double>(r), -alpha);
    s.coeffs[static_cast<Eigen::Index>(r - 1)] = std::sqrt(prev_tail - tail);
    prev_tail = tail;
  }
  // distinct determinants; identities only matter for tie-breaks
  for (std::size_t i = 0; i < n; ++i) {
    Determinant d;
    d.alpha.w[0] = i + 1;
    s.dets.push_back(d);
  }
  return s;
}

}  // namespace

TEST_CASE("hamming distribution") {
  SUBCASE("single determinant concentrates at zero") {
    WavefunctionState s;
    s.dets = {det(0b01, 0b01)};
    s.coeffs = Eigen::VectorXd::Ones(1);
    const HammingDistribution dist = hamming_distribution(s);
    CHECK(dist.weights.size() == 1);
    CHECK(dist.weights.at(0) == doctest::Approx(1.0));
  }
  SUBCASE("two determinants split by their distance") {
    WavefunctionState s;
    s.dets = {det(0b0011, 0b0), det(0b1100, 0b0)};
    s.coeffs = Eigen::VectorXd(2);
    s.coeffs << std::sqrt(0.8), std::sqrt(0.2);
    const HammingDistribution dist = hamming_distribution(s);
    CHECK(dist.reference == s.dets[0]);
    CHECK(dist.weights.at(0) == doctest::Approx(0.8));
    CHECK(dist.weights.at(4) == doctest::Approx(0.2));
  }
  SUBCASE("full 2x2 state matches a direct recomputation and sums to one") {
    const IntegralTable ints = hubbard22(2.0);
    const auto sector = enumerate_sector(4, 2, 2);
    const EigenResult res = fci_ground_state(ints, sector);
    WavefunctionState s{sector.dets, res.coefficients, res.energy, 0};
    const HammingDistribution dist = hamming_distribution(s);
    double total = 0.0;
    for (const auto& [d, w] : dist.weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    // direct recomputation with an independent argmax
    Eigen::Index imax = 0;
    for (Eigen::Index i = 0; i < res.coefficients.size(); ++i)
      if (std::abs(res.coefficients[i]) > std::abs(res.coefficients[imax])) imax = i;
    double w0 = 0.0;
    for (Eigen::Index i = 0; i < res.coefficients.size(); ++i)
      if (hamming_distance(sector.dets[static_cast<std::size_t>(i)],
                           sector.dets[static_cast<std::size_t>(imax)]) == 0)
        w0 += res.coefficients[i] * res.coefficients[i];
    CHECK(dist.weights.at(0) == doctest::Approx(w0).epsilon(1e-12));
  }
}

TEST_CASE("cumulative power-law fit") {
  SUBCASE("synthetic exact tail recovers its exponent") {
    const WavefunctionState s = synthetic_power_law(2000, 0.5, 0.5);
    const PowerLawFit fit = cumulative_and_fit(s);
    CHECK(fit.alpha == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(fit.sigma == doctest::Approx(2.0).epsilon(1e-9));
  }
  SUBCASE("uniform coefficients fit poorly but do not error") {
    WavefunctionState s;
    const std::size_t n = 500;
    s.coeffs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                         1.0 / std::sqrt(static_cast<double>(n)));
    for (std::size_t i = 0; i < n; ++i) {
      Determinant d;
      d.alpha.w[0] = i + 1;
      s.dets.push_back(d);
    }
    const PowerLawFit fit = cumulative_and_fit(s);
    CHECK(fit.r_squared < 0.99);
  }
  SUBCASE("too-small states are rejected") {
    const WavefunctionState s = synthetic_power_law(8, 0.5, 0.5);
    CHECK_THROWS_AS(cumulative_and_fit(s), ConfigError);
  }
}

TEST_CASE("complexity report") {
  const ComplexityReport rep = complexity_report(0.01, 420);
  CHECK(rep.sigma_a == doctest::Approx(std::log10(420.0) / 2.0).epsilon(1e-14));
  CHECK(rep.sigma_a == doctest::Approx(1.3116).epsilon(1e-3));
  CHECK(rep.log10_r == doctest::Approx(2.6232).epsilon(1e-3));
  CHECK(rep.entropy_vs(rep.sigma_a) == doctest::Approx(0.0).scale(1.0));

  CHECK(complexity_report(0.5, 1).sigma_a == 0.0);
  CHECK(complexity_report(0.1, 10).sigma_a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(complexity_report(1.5, 10), ConfigError);
  CHECK_THROWS_AS(complexity_report(0.1, 0), ConfigError);
}

TEST_CASE("scaling fit") {
  SUBCASE("published lattice fractions") {
    const ScalingFit fit =
        scaling_fit({{16, 2.5e-6}, {36, 3.6e-16}, {64, 1.5e-28}});
    CHECK(std::abs(fit.slope - -0.462) < 0.005);
    CHECK(std::abs(fit.intercept - 1.559) < 0.02);
    CHECK(fit.r_squared >= 0.998);
  }
  SUBCASE("two points on a line recover exactly") {
    const ScalingFit fit = scaling_fit({{10, 1e-2}, {20, 1e-4}});
    CHECK(fit.slope == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
  }
  SUBCASE("constant fraction has zero slope") {
    const ScalingFit fit = scaling_fit({{10, 1e-3}, {20, 1e-3}, {30, 1e-3}});
    CHECK(fit.slope == doctest::Approx(0.0).scale(1.0));
  }
  SUBCASE("degenerate abscissae error") {
    CHECK_THROWS_AS(scaling_fit({{10, 1e-3}, {10, 1e-4}}), ConfigError);
  }
}

TEST_CASE("mds embedding") {
  SUBCASE("three equidistant determinants form an equilateral triangle") {
    WavefunctionState s;
    s.dets = {det(0b011, 0), det(0b101, 0), det(0b110, 0)};  // pairwise distance 2
    s.coeffs = Eigen::VectorXd(3);
    s.coeffs << 0.8, 0.5, std::sqrt(1.0 - 0.64 - 0.25);
    const MDSEmbedding emb = mds_embedding(s);
    const double d01 = (emb.points.row(0) - emb.points.row(1)).norm();
    const double d02 = (emb.points.row(0) - emb.points.row(2)).norm();
    const double d12 = (emb.points.row(1) - emb.points.row(2)).norm();
    CHECK(std::abs(d01 - d02) < 1e-9);
    CHECK(std::abs(d01 - d12) < 1e-9);
    CHECK(emb.points(0, 0) >= 0.0);
    CHECK(emb.points(0, 1) >= 0.0);
    CHECK(emb.stress < 1e-9);
  }
  SUBCASE("fewer than three points is an error") {
    WavefunctionState s;
    s.dets = {det(0b01, 0), det(0b10, 0)};
    s.coeffs = Eigen::VectorXd::Constant(2, std::sqrt(0.5));
    CHECK_THROWS_AS(mds_embedding(s), ConfigError);
  }
  SUBCASE("embedded Gram matrix matches the dense top-2 truncation") {
    SplitMix64 rng(55);
    WavefunctionState s;
    const int k = 50;
    std::set<std::uint64_t> seen;
    while (s.dets.size() < static_cast<std::size_t>(k)) {
      Determinant d;
      for (int p : sample_indices(10, 4, rng)) d.alpha.set(p);
      for (int p : sample_indices(10, 4, rng)) d.beta.set(p);
      if (seen.insert(d.alpha.w[0] * 1024 + d.beta.w[0]).second) s.dets.push_back(d);
    }
    s.coeffs.resize(k);
    for (int i = 0; i < k; ++i) s.coeffs[i] = rng.uniform() + 0.01;
    s.coeffs /= s.coeffs.norm();

    const MDSEmbedding emb = mds_embedding(s);

    Eigen::MatrixXd d2(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        const int d = hamming_distance(s.dets[emb.selected[static_cast<std::size_t>(i)]],
                                       s.dets[emb.selected[static_cast<std::size_t>(j)]]);
        d2(i, j) = static_cast<double>(d) * d;
      }
    const Eigen::MatrixXd c =
        Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / k);
    const Eigen::MatrixXd b = -0.5 * c * d2 * c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    Eigen::MatrixXd truncated = es.eigenvalues()[k - 1] *
                                    es.eigenvectors().col(k - 1) *
                                    es.eigenvectors().col(k - 1).transpose() +
                                es.eigenvalues()[k - 2] *
                                    es.eigenvectors().col(k - 2) *
                                    es.eigenvectors().col(k - 2).transpose();
    const Eigen::MatrixXd gram = emb.points * emb.points.transpose();
    CHECK((gram - truncated).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("pairwise embedded distances are permutation equivariant") {
    WavefunctionState s;
    s.dets = {det(0b0011, 0b0011), det(0b0101, 0b0011), det(0b0011, 0b0101),
              det(0b1100, 0b0011), det(0b0110, 0b1001)};
    s.coeffs = Eigen::VectorXd(5);
    s.coeffs << 0.7, 0.5, 0.4, 0.2, std::sqrt(1.0 - 0.49 - 0.25 - 0.16 - 0.04);
    const MDSEmbedding a = mds_embedding(s);

    WavefunctionState p;  // reversed order
    for (int i = 4; i >= 0; --i) {
      p.dets.push_back(s.dets[static_cast<std::size_t>(i)]);
    }
    p.coeffs = s.coeffs.reverse();
    const MDSEmbedding b = mds_embedding(p);

    // selected sets are identical states, so distances between the same
    // determinants must agree
    auto coord_of = [](const MDSEmbedding& e, const WavefunctionState& st,
                       const Determinant& d) {
      for (std::size_t i = 0; i < e.selected.size(); ++i)
        if (st.dets[e.selected[i]] == d) return Eigen::RowVector2d(e.points.row(static_cast<Eigen::Index>(i)));
      FAIL("determinant not selected");
      return Eigen::RowVector2d{0, 0};
    };
    for (std::size_t i = 0; i < s.dets.size(); ++i)
      for (std::size_t j = i + 1; j < s.dets.size(); ++j) {
        const double da = (coord_of(a, s, s.dets[i]) - coord_of(a, s, s.dets[j])).norm();
        const double db = (coord_of(b, p, s.dets[i]) - coord_of(b, p, s.dets[j])).norm();
        CHECK(std::abs(da - db) < 1e-8);
      }
  }
}

TEST_CASE("csv writers") {
  SUBCASE("hamming csv for a single determinant") {
    WavefunctionState s;
    s.dets = {det(0b01, 0b01)};
    s.coeffs = Eigen::VectorXd::Ones(1);
    std::ostringstream out;
    write_hamming_csv(out, hamming_distribution(s));
    CHECK(out.str() == "d,weight\n0,1\n");
  }
  SUBCASE("cumulative csv ends at a null tail") {
    // dyadic weights sum to exactly one in floating point
    WavefunctionState s;
    const std::vector<double> w{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.03125};
    s.coeffs.resize(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      s.coeffs[static_cast<Eigen::Index>(i)] = std::sqrt(w[i]);
      Determinant d;
      d.alpha.w[0] = i + 1;
      s.dets.push_back(d);
    }
    std::ostringstream out;
    write_cumulative_csv(out, s);
    std::istringstream in(out.str());
    std::string line, last;
    std::getline(in, line);
    CHECK(line == "rank,one_minus_F");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      last = line;
    }
    CHECK(rows == 6);
    CHECK(last == "6,0");
  }
  SUBCASE("mds csv has one row per selected determinant") {
    WavefunctionState s;
    s.dets = {det(0b011, 0), det(0b101, 0), det(0b110, 0)};
    s.coeffs = Eigen::VectorXd(3);
    s.coeffs << 0.8, 0.5, std::sqrt(1.0 - 0.64 - 0.25);
    std::ostringstream out;
    write_mds_csv(out, s, mds_embedding(s));
    std::istringstream in(out.str());
    std::string line;
    int rows = -1;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
  }
}
