#include "trimci/determinant.hpp"

#include <algorithm>
#include <unordered_set>

#include "trimci/error.hpp"
#include "trimci/rng.hpp"

namespace trimci {

int list_set_bits(const SpinString& s, std::uint8_t* out) {
  int n = 0;
  for (int word = 0; word < 2; ++word) {
    std::uint64_t x = s.w[static_cast<std::size_t>(word)];
    while (x) {
      out[n++] = static_cast<std::uint8_t>((word << 6) + std::countr_zero(x));
      x &= x - 1;
    }
  }
  return n;
}

std::string to_hex(const SpinString& s) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  bool started = false;
  for (int nib = 31; nib >= 0; --nib) {
    const int word = nib >> 4;
    const int shift = (nib & 15) * 4;
    const unsigned v = static_cast<unsigned>((s.w[static_cast<std::size_t>(word)] >> shift) & 0xF);
    if (v != 0) started = true;
    if (started) out.push_back(digits[v]);
  }
  if (out.empty()) out = "0";
  return out;
}

SpinString spin_string_from_hex(const std::string& hex) {
  if (hex.empty() || hex.size() > 32)
    throw ParseError(-1, "bad occupation hex string '" + hex + "'");
  SpinString s;
  for (char c : hex) {
    unsigned v;
    if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
    else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a' + 10);
    else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A' + 10);
    else throw ParseError(-1, "bad occupation hex string '" + hex + "'");
    // shift the 128-bit value left by 4 and or in the nibble
    s.w[1] = (s.w[1] << 4) | (s.w[0] >> 60);
    s.w[0] = (s.w[0] << 4) | v;
  }
  return s;
}

namespace {

// Phase of moving one electron hole->particle within a channel, then the
// second move evaluated on the updated string. Matches sequential operator
// application in the alpha-block-then-beta-block ordering.
int single_move_phase(const SpinString& s, int hole, int particle) {
  return s.parity_between(hole, particle) ? -1 : 1;
}

}  // namespace

std::optional<Excitation> excitation_between(const Determinant& from,
                                             const Determinant& to) {
  const SpinString xa = from.alpha ^ to.alpha;
  const SpinString xb = from.beta ^ to.beta;
  const int da = xa.popcount();
  const int db = xb.popcount();
  if (da + db > 4) return std::nullopt;
  if ((da & 1) || (db & 1)) return std::nullopt;  // different sector

  Excitation ex;
  if (da + db == 0) return ex;  // diagonal, phase +1

  std::uint8_t holes_a[2], parts_a[2], holes_b[2], parts_b[2];
  int nha = list_set_bits(xa & from.alpha, holes_a);
  list_set_bits(xa & to.alpha, parts_a);
  int nhb = list_set_bits(xb & from.beta, holes_b);
  list_set_bits(xb & to.beta, parts_b);
  if (2 * nha != da || 2 * nhb != db) return std::nullopt;  // unbalanced channels

  if (da + db == 2) {
    ex.kind = ExcitationKind::single;
    ex.n_moved = 1;
    if (nha == 1) {
      ex.channel = SpinChannel::alpha_alpha;
      ex.holes[0] = holes_a[0];
      ex.particles[0] = parts_a[0];
      ex.phase = single_move_phase(from.alpha, holes_a[0], parts_a[0]);
    } else {
      ex.channel = SpinChannel::beta_beta;
      ex.holes[0] = holes_b[0];
      ex.particles[0] = parts_b[0];
      ex.phase = single_move_phase(from.beta, holes_b[0], parts_b[0]);
    }
    return ex;
  }

  ex.kind = ExcitationKind::double_excitation;
  ex.n_moved = 2;
  if (nha == 2) {
    ex.channel = SpinChannel::alpha_alpha;
    ex.holes = {holes_a[0], holes_a[1]};
    ex.particles = {parts_a[0], parts_a[1]};
    SpinString mid = from.alpha;
    ex.phase = single_move_phase(mid, holes_a[0], parts_a[0]);
    mid.reset(holes_a[0]);
    mid.set(parts_a[0]);
    ex.phase *= single_move_phase(mid, holes_a[1], parts_a[1]);
  } else if (nhb == 2) {
    ex.channel = SpinChannel::beta_beta;
    ex.holes = {holes_b[0], holes_b[1]};
    ex.particles = {parts_b[0], parts_b[1]};
    SpinString mid = from.beta;
    ex.phase = single_move_phase(mid, holes_b[0], parts_b[0]);
    mid.reset(holes_b[0]);
    mid.set(parts_b[0]);
    ex.phase *= single_move_phase(mid, holes_b[1], parts_b[1]);
  } else {
    ex.channel = SpinChannel::alpha_beta;
    ex.holes = {holes_a[0], holes_b[0]};
    ex.particles = {parts_a[0], parts_b[0]};
    ex.phase = single_move_phase(from.alpha, holes_a[0], parts_a[0]) *
               single_move_phase(from.beta, holes_b[0], parts_b[0]);
  }
  return ex;
}

std::uint64_t sector_size(int m, int n_up, int n_down) {
  auto choose = [](int n, int k) -> std::uint64_t {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) {
      const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
      if (r > (~std::uint64_t{0}) / num) return ~std::uint64_t{0};  // saturate
      r = r * num / static_cast<std::uint64_t>(i);
    }
    return r;
  };
  const std::uint64_t a = choose(m, n_up);
  const std::uint64_t b = choose(m, n_down);
  if (a != 0 && b > (~std::uint64_t{0}) / a) return ~std::uint64_t{0};
  return a * b;
}

std::vector<Determinant> random_determinants(int m, int n_up, int n_down,
                                             std::size_t count, std::uint64_t seed) {
  if (m < 1 || m > kMaxOrbitals || n_up < 0 || n_down < 0 || n_up > m || n_down > m)
    throw ConfigError("random_determinants: invalid sector (m=" + std::to_string(m) +
                      ", n_up=" + std::to_string(n_up) +
                      ", n_down=" + std::to_string(n_down) + ")");
  if (count < 1) throw ConfigError("random_determinants: count must be >= 1");
  const std::uint64_t sector = sector_size(m, n_up, n_down);
  if (sector < count)
    throw ConfigError("random_determinants: sector holds " + std::to_string(sector) +
                      " determinants, fewer than the requested " + std::to_string(count));

  SplitMix64 rng(seed);
  std::unordered_set<Determinant, DeterminantHash> seen;
  std::vector<Determinant> out;
  out.reserve(count);
  while (out.size() < count) {
    Determinant d;
    for (int p : sample_indices(m, n_up, rng)) d.alpha.set(p);
    for (int p : sample_indices(m, n_down, rng)) d.beta.set(p);
    if (seen.insert(d).second) out.push_back(d);
  }
  return out;
}

}  // namespace trimci
