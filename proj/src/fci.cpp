#include "trimci/fci.hpp"

#include <unordered_map>

#include "trimci/error.hpp"

namespace trimci {

namespace {

// All m-bit masks with k bits set, ascending numeric order (Gosper's hack on
// a 128-bit value).
std::vector<SpinString> combinations(int m, int k) {
  std::vector<SpinString> out;
  if (k == 0) {
    out.push_back(SpinString{});
    return out;
  }
  using u128 = unsigned __int128;
  const u128 one = 1;
  const u128 limit = m >= 128 ? ~static_cast<u128>(0) : (one << m) - 1;
  u128 v = (one << k) - 1;
  while (v <= limit) {
    SpinString s;
    s.w[0] = static_cast<std::uint64_t>(v);
    s.w[1] = static_cast<std::uint64_t>(v >> 64);
    out.push_back(s);
    const u128 u = v & (~v + 1);
    const u128 w = v + u;
    if (w == 0) break;
    v = w | (((v ^ w) / u) >> 2);
  }
  return out;
}

}  // namespace

SectorEnumeration enumerate_sector(int m, int n_up, int n_down, std::uint64_t cap) {
  if (m < 1 || m > kMaxOrbitals || n_up < 0 || n_down < 0 || n_up > m || n_down > m)
    throw ConfigError("enumerate_sector: invalid sector");
  const std::uint64_t count = sector_size(m, n_up, n_down);
  if (count > cap)
    throw CapError("enumerate_sector: sector holds " + std::to_string(count) +
                   " determinants, beyond the cap of " + std::to_string(cap));
  const auto alphas = combinations(m, n_up);
  const auto betas = combinations(m, n_down);
  SectorEnumeration sec;
  sec.dets.reserve(alphas.size() * betas.size());
  for (const auto& a : alphas)
    for (const auto& b : betas) sec.dets.push_back(Determinant{a, b});
  return sec;
}

EigenResult fci_ground_state(const IntegralTable& ints, const SectorEnumeration& sector,
                             const DavidsonOptions& opts) {
  if (sector.dets.empty()) throw ConfigError("fci_ground_state: empty sector");
  const ProjectedHamiltonian h = build_projected(sector.dets, ints);
  return davidson_lowest(h, nullptr, opts);
}

double fidelity(const WavefunctionState& state, const WavefunctionState& reference) {
  const WavefunctionState& small = state.dets.size() <= reference.dets.size() ? state : reference;
  const WavefunctionState& large = state.dets.size() <= reference.dets.size() ? reference : state;
  std::unordered_map<Determinant, double, DeterminantHash> lut;
  lut.reserve(small.dets.size() * 2);
  for (std::size_t i = 0; i < small.dets.size(); ++i)
    lut.emplace(small.dets[i], small.coeffs[static_cast<Eigen::Index>(i)]);
  double overlap = 0.0;
  for (std::size_t i = 0; i < large.dets.size(); ++i) {
    const auto it = lut.find(large.dets[i]);
    if (it != lut.end()) overlap += it->second * large.coeffs[static_cast<Eigen::Index>(i)];
  }
  return overlap * overlap;
}

}  // namespace trimci
