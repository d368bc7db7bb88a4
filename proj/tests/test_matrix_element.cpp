#include <doctest.h>

#include "support/brute_force.hpp"
#include "trimci/fci.hpp"
#include "trimci/rng.hpp"
#include "trimci/slater_condon.hpp"

using namespace trimci;

namespace {

Determinant det(std::uint64_t alpha, std::uint64_t beta) {
  Determinant d;
  d.alpha.w[0] = alpha;
  d.beta.w[0] = beta;
  return d;
}

IntegralTable hubbard(int lx, int ly, double u, bool periodic, int n_up, int n_down) {
  HubbardSpec spec;
  spec.lx = lx;
  spec.ly = ly;
  spec.u = u;
  spec.t = 1.0;
  spec.periodic = periodic;
  spec.n_up = n_up;
  spec.n_down = n_down;
  return IntegralTable::from_hubbard(spec);
}

IntegralTable random_integrals(int m, int n_up, int n_down, SplitMix64& rng) {
  IntegralTable t(m, n_up + n_down, n_up - n_down);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q <= p; ++q) t.set_one_body(p, q, rng.uniform() - 0.5);
  for (int p = 0; p < m; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s <= r; ++s)
          if (rng.uniform() < 0.6) t.set_two_body(p, q, r, s, rng.uniform() - 0.5);
  t.set_core_energy(rng.uniform() - 0.5);
  t.finalize();
  return t;
}

void check_all_pairs_against_oracle(const IntegralTable& ints, int n_up, int n_down) {
  const auto sector = enumerate_sector(ints.m(), n_up, n_down);
  for (const auto& d1 : sector.dets)
    for (const auto& d2 : sector.dets) {
      const double got = matrix_element(d1, d2, ints);
      const double want = oracle::element(d1, d2, ints);
      CHECK(got == doctest::Approx(want).epsilon(1e-12).scale(1.0));
    }
}

}  // namespace

TEST_CASE("two-site hubbard elements") {
  const IntegralTable ints = hubbard(2, 1, 4.0, false, 1, 1);
  CHECK(matrix_element(det(0b01, 0b01), det(0b01, 0b01), ints) == doctest::Approx(4.0));
  CHECK(matrix_element(det(0b01, 0b10), det(0b01, 0b10), ints) == doctest::Approx(0.0));
  // single alpha hop with beta fixed
  CHECK(matrix_element(det(0b01, 0b01), det(0b10, 0b01), ints) == doctest::Approx(-1.0));
  // determinants two hops apart carry no direct coupling in the on-site model
  CHECK(matrix_element(det(0b01, 0b01), det(0b10, 0b10), ints) == doctest::Approx(0.0));
}

TEST_CASE("matrix element agrees with operator-application oracle on full sectors") {
  SUBCASE("2-site hubbard U=4") {
    check_all_pairs_against_oracle(hubbard(2, 1, 4.0, false, 1, 1), 1, 1);
  }
  SUBCASE("3-site chain U=2, asymmetric filling") {
    check_all_pairs_against_oracle(hubbard(3, 1, 2.0, false, 2, 1), 2, 1);
  }
  SUBCASE("2x2 periodic U=2 half filling") {
    check_all_pairs_against_oracle(hubbard(2, 2, 2.0, true, 2, 2), 2, 2);
  }
  SUBCASE("random 4-orbital integrals, several fillings") {
    SplitMix64 rng(101);
    for (const auto [n_up, n_down] : {std::pair{2, 2}, {1, 3}, {3, 1}, {2, 1}, {0, 2}}) {
      const IntegralTable ints = random_integrals(4, n_up, n_down, rng);
      check_all_pairs_against_oracle(ints, n_up, n_down);
    }
  }
  SUBCASE("random 3-orbital integrals") {
    SplitMix64 rng(707);
    const IntegralTable ints = random_integrals(3, 2, 1, rng);
    check_all_pairs_against_oracle(ints, 2, 1);
  }
}

TEST_CASE("matrix element is symmetric on random pairs") {
  SplitMix64 rng(23);
  const IntegralTable ints = random_integrals(4, 2, 2, rng);
  const auto sector = enumerate_sector(4, 2, 2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto& d1 = sector.dets[rng.bounded(sector.dets.size())];
    const auto& d2 = sector.dets[rng.bounded(sector.dets.size())];
    CHECK(matrix_element(d1, d2, ints) ==
          doctest::Approx(matrix_element(d2, d1, ints)).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("determinant outside the integral range is rejected") {
  const IntegralTable ints = hubbard(2, 1, 4.0, false, 1, 1);
  Determinant d = det(0b01, 0b01);
  d.alpha.set(5);
  CHECK_THROWS_AS(diagonal_element(d, ints), ConfigError);
}
