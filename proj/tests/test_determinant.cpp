#include <doctest.h>

#include <algorithm>
#include <set>

#include "trimci/determinant.hpp"
#include "trimci/error.hpp"
#include "trimci/rng.hpp"

using namespace trimci;

namespace {

Determinant det(std::uint64_t alpha, std::uint64_t beta) {
  Determinant d;
  d.alpha.w[0] = alpha;
  d.beta.w[0] = beta;
  return d;
}

Determinant random_det(int m, int n_up, int n_down, SplitMix64& rng) {
  Determinant d;
  for (int p : sample_indices(m, n_up, rng)) d.alpha.set(p);
  for (int p : sample_indices(m, n_down, rng)) d.beta.set(p);
  return d;
}

}  // namespace

TEST_CASE("spin string bit accounting crosses the word boundary") {
  SpinString s;
  s.set(3);
  s.set(63);
  s.set(64);
  s.set(127);
  CHECK(s.popcount() == 4);
  CHECK(s.popcount_below(64) == 2);
  CHECK(s.popcount_below(65) == 3);
  CHECK(s.parity_between(3, 127) == 0);  // crosses 63 and 64
  CHECK(s.parity_between(63, 127) == 1);
  std::uint8_t occ[kMaxOrbitals];
  const int n = list_set_bits(s, occ);
  REQUIRE(n == 4);
  CHECK(occ[0] == 3);
  CHECK(occ[3] == 127);
}

TEST_CASE("hex round trip") {
  SpinString s;
  s.set(0);
  s.set(65);
  CHECK(to_hex(s) == "20000000000000001");
  CHECK(spin_string_from_hex(to_hex(s)) == s);
  CHECK(to_hex(SpinString{}) == "0");
  CHECK(spin_string_from_hex("0") == SpinString{});
  CHECK_THROWS_AS(spin_string_from_hex("xyz"), ParseError);
}

TEST_CASE("excitation classification") {
  SUBCASE("identical determinants are diagonal with phase +1") {
    const Determinant d = det(0b0011, 0b0101);
    const auto ex = excitation_between(d, d);
    REQUIRE(ex.has_value());
    CHECK(ex->kind == ExcitationKind::diagonal);
    CHECK(ex->phase == 1);
  }
  SUBCASE("alpha single 0b0011 -> 0b0101 has phase +1") {
    // hole 1, particle 2; orbital 0 stays below both and is not crossed
    const auto ex = excitation_between(det(0b0011, 0b0011), det(0b0101, 0b0011));
    REQUIRE(ex.has_value());
    CHECK(ex->kind == ExcitationKind::single);
    CHECK(ex->channel == SpinChannel::alpha_alpha);
    CHECK(ex->holes[0] == 1);
    CHECK(ex->particles[0] == 2);
    CHECK(ex->phase == 1);
  }
  SUBCASE("crossing one occupied orbital flips the sign") {
    const auto ex = excitation_between(det(0b011, 0), det(0b110, 0));
    REQUIRE(ex.has_value());
    CHECK(ex->phase == -1);  // hole 0 -> particle 2 crosses occupied orbital 1
  }
  SUBCASE("degree three is too far") {
    const auto ex = excitation_between(det(0b001111, 0b0011), det(0b110011, 0b0101));
    CHECK_FALSE(ex.has_value());
  }
}

TEST_CASE("excitation phase is involution consistent") {
  SplitMix64 rng(7);
  int checked = 0;
  while (checked < 200) {
    const Determinant a = random_det(8, 3, 3, rng);
    const Determinant b = random_det(8, 3, 3, rng);
    const auto fwd = excitation_between(a, b);
    const auto bwd = excitation_between(b, a);
    REQUIRE(fwd.has_value() == bwd.has_value());
    if (!fwd) continue;
    CHECK(fwd->phase == bwd->phase);
    ++checked;
  }
}

TEST_CASE("hamming distance") {
  CHECK(hamming_distance(det(0b01, 0b01), det(0b01, 0b01)) == 0);
  CHECK(hamming_distance(det(0b01, 0b01), det(0b10, 0b01)) == 2);  // single
  CHECK(hamming_distance(det(0b0011, 0), det(0b1100, 0)) == 4);    // double

  SplitMix64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const Determinant a = random_det(10, 4, 3, rng);
    const Determinant b = random_det(10, 4, 3, rng);
    const Determinant c = random_det(10, 4, 3, rng);
    CHECK(hamming_distance(a, b) == hamming_distance(b, a));
    CHECK((hamming_distance(a, b) == 0) == (a == b));
    CHECK(hamming_distance(a, c) <= hamming_distance(a, b) + hamming_distance(b, c));
    const auto ex = excitation_between(a, b);
    if (ex) CHECK(hamming_distance(a, b) == 2 * ex->n_moved);
  }
}

TEST_CASE("random determinants") {
  SUBCASE("a one-element sector yields its unique determinant") {
    const auto dets = random_determinants(2, 2, 2, 1, 42);
    REQUIRE(dets.size() == 1);
    CHECK(dets[0] == det(0b11, 0b11));
  }
  SUBCASE("drawing the whole m=4 half-filled sector hits each det once") {
    auto dets = random_determinants(4, 2, 2, 36, 3);
    CHECK(dets.size() == 36);
    std::sort(dets.begin(), dets.end());
    CHECK(std::adjacent_find(dets.begin(), dets.end()) == dets.end());
    for (const auto& d : dets) {
      CHECK(d.alpha.popcount() == 2);
      CHECK(d.beta.popcount() == 2);
    }
  }
  SUBCASE("fixed seed reproduces the draw") {
    CHECK(random_determinants(6, 3, 2, 10, 99) == random_determinants(6, 3, 2, 10, 99));
  }
  SUBCASE("oversubscribed sector errors") {
    CHECK_THROWS_AS(random_determinants(2, 1, 1, 5, 0), ConfigError);
  }
}

TEST_CASE("sector size saturates instead of overflowing") {
  CHECK(sector_size(4, 2, 2) == 36);
  CHECK(sector_size(16, 8, 8) == 165636900ULL);
  CHECK(sector_size(128, 64, 64) == ~std::uint64_t{0});
}
