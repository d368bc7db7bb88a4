#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace trimci {

inline constexpr int kMaxOrbitals = 128;

// Occupation bitstring of one spin channel, up to 128 spatial orbitals.
// Word 0 holds orbitals 0..63, word 1 holds 64..127. Ordering treats the
// string as a 128-bit integer (high word first), which gives the canonical
// total order used for sorting and tie-breaking everywhere.
struct SpinString {
  std::array<std::uint64_t, 2> w{0, 0};

  bool test(int p) const {
    return (w[static_cast<std::size_t>(p >> 6)] >> (p & 63)) & 1ULL;
  }
  void set(int p) { w[static_cast<std::size_t>(p >> 6)] |= 1ULL << (p & 63); }
  void reset(int p) { w[static_cast<std::size_t>(p >> 6)] &= ~(1ULL << (p & 63)); }

  int popcount() const { return std::popcount(w[0]) + std::popcount(w[1]); }

  /// Number of set bits strictly below position p.
  int popcount_below(int p) const {
    const int word = p >> 6;
    const int bit = p & 63;
    int c = word > 0 ? std::popcount(w[0]) : 0;
    const std::uint64_t mask = bit == 0 ? 0ULL : (~0ULL >> (64 - bit));
    return c + std::popcount(w[static_cast<std::size_t>(word)] & mask);
  }

  /// Parity (0/1) of set bits strictly between positions a and b.
  int parity_between(int a, int b) const {
    if (a > b) std::swap(a, b);
    return (popcount_below(b) - popcount_below(a + 1)) & 1;
  }

  SpinString operator^(const SpinString& o) const {
    return SpinString{{w[0] ^ o.w[0], w[1] ^ o.w[1]}};
  }
  SpinString operator&(const SpinString& o) const {
    return SpinString{{w[0] & o.w[0], w[1] & o.w[1]}};
  }

  bool operator==(const SpinString&) const = default;
  std::strong_ordering operator<=>(const SpinString& o) const {
    if (auto c = w[1] <=> o.w[1]; c != 0) return c;
    return w[0] <=> o.w[0];
  }
};

/// Writes the set-bit positions (ascending) into out; returns the count.
int list_set_bits(const SpinString& s, std::uint8_t* out);

std::string to_hex(const SpinString& s);
SpinString spin_string_from_hex(const std::string& hex);

// A Slater determinant: alpha/beta spatial-orbital occupations.
struct Determinant {
  SpinString alpha;
  SpinString beta;

  bool operator==(const Determinant&) const = default;
  std::strong_ordering operator<=>(const Determinant& o) const {
    if (auto c = alpha <=> o.alpha; c != 0) return c;
    return beta <=> o.beta;
  }
};

struct DeterminantHash {
  std::size_t operator()(const Determinant& d) const noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::uint64_t x : {d.alpha.w[0], d.alpha.w[1], d.beta.w[0], d.beta.w[1]}) {
      x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
      x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
      h = (h ^ (x ^ (x >> 31))) * 0x9e3779b97f4a7c15ULL;
    }
    return static_cast<std::size_t>(h ^ (h >> 32));
  }
};

/// Total occupation difference over both spin channels (2x excitation degree).
inline int hamming_distance(const Determinant& a, const Determinant& b) {
  return (a.alpha ^ b.alpha).popcount() + (b.beta ^ a.beta).popcount();
}

enum class ExcitationKind { diagonal, single, double_excitation };

/// Spin channels carrying the moved electrons.
enum class SpinChannel { alpha_alpha, beta_beta, alpha_beta };

// Classified connection between two determinants. For an alpha_beta double,
// holes[0]/particles[0] live in the alpha channel and holes[1]/particles[1]
// in beta; otherwise hole/particle indices are ascending within the channel.
struct Excitation {
  ExcitationKind kind = ExcitationKind::diagonal;
  SpinChannel channel = SpinChannel::alpha_alpha;
  std::array<std::uint8_t, 2> holes{0, 0};
  std::array<std::uint8_t, 2> particles{0, 0};
  int n_moved = 0;
  int phase = 1;
};

// Classifies from -> to; nullopt when they differ by more than a double.
// The fermionic phase follows the all-alpha-ascending-then-all-beta-ascending
// spin-orbital ordering: each hole->particle move contributes the parity of
// occupied orbitals it crosses, with same-channel pairs applied low-hole
// first on the intermediate string.
std::optional<Excitation> excitation_between(const Determinant& from,
                                             const Determinant& to);

// Draws `count` distinct determinants uniformly from the (n_up, n_down)
// sector of m orbitals; duplicates are resampled. Deterministic in seed.
std::vector<Determinant> random_determinants(int m, int n_up, int n_down,
                                             std::size_t count, std::uint64_t seed);

/// C(m, n_up) * C(m, n_down), saturated at 2^64-1.
std::uint64_t sector_size(int m, int n_up, int n_down);

}  // namespace trimci
