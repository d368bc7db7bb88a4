#include "trimci/wavefunction_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "trimci/error.hpp"

namespace trimci {

namespace {
constexpr const char* kMagic = "TRIMCI_WF";
}

void save_wavefunction(std::ostream& out, const WavefunctionState& state, int m,
                       int n_up, int n_down) {
  std::vector<std::size_t> order(state.dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(state.coeffs[static_cast<Eigen::Index>(x)]);
    const double ay = std::abs(state.coeffs[static_cast<Eigen::Index>(y)]);
    if (ax != ay) return ax > ay;
    return state.dets[x] < state.dets[y];
  });

  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", state.energy);
  out << kMagic << " 1\n"
      << "m " << m << '\n'
      << "n_up " << n_up << '\n'
      << "n_down " << n_down << '\n'
      << "energy " << buf << '\n'
      << "n_dets " << state.dets.size() << '\n'
      << "hamming_convention spin_orbital_xor\n";
  for (std::size_t i : order) {
    std::snprintf(buf, sizeof buf, "%.17g", state.coeffs[static_cast<Eigen::Index>(i)]);
    out << to_hex(state.dets[i].alpha) << ' ' << to_hex(state.dets[i].beta) << ' ' << buf
        << '\n';
  }
  if (!out) throw IoError("wavefunction write failure");
}

LoadedWavefunction load_wavefunction(std::istream& in) {
  LoadedWavefunction loaded;
  auto& h = loaded.header;
  std::string magic;
  long lineno = 1;
  if (!(in >> magic >> h.format_version) || magic != kMagic)
    throw ParseError(lineno, "not a wavefunction file (expected " + std::string(kMagic) + ")");
  if (h.format_version != 1)
    throw ParseError(lineno, "unsupported wavefunction format version " +
                                 std::to_string(h.format_version));
  auto expect_key = [&](const std::string& key) {
    std::string k;
    ++lineno;
    if (!(in >> k) || k != key)
      throw ParseError(lineno, "expected header key '" + key + "'");
  };
  expect_key("m");
  if (!(in >> h.m)) throw ParseError(lineno, "bad value for m");
  expect_key("n_up");
  if (!(in >> h.n_up)) throw ParseError(lineno, "bad value for n_up");
  expect_key("n_down");
  if (!(in >> h.n_down)) throw ParseError(lineno, "bad value for n_down");
  expect_key("energy");
  if (!(in >> h.energy)) throw ParseError(lineno, "bad value for energy");
  expect_key("n_dets");
  if (!(in >> h.n_dets)) throw ParseError(lineno, "bad value for n_dets");
  expect_key("hamming_convention");
  if (!(in >> h.hamming_convention)) throw ParseError(lineno, "bad hamming_convention");

  std::vector<std::pair<Determinant, double>> records;
  records.reserve(h.n_dets);
  for (std::size_t i = 0; i < h.n_dets; ++i) {
    std::string ah, bh;
    double c;
    ++lineno;
    if (!(in >> ah >> bh >> c))
      throw ParseError(lineno, "truncated wavefunction record " + std::to_string(i + 1) +
                                   " of " + std::to_string(h.n_dets));
    records.emplace_back(
        Determinant{spin_string_from_hex(ah), spin_string_from_hex(bh)}, c);
  }
  std::sort(records.begin(), records.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  for (std::size_t i = 1; i < records.size(); ++i)
    if (records[i].first == records[i - 1].first)
      throw ParseError(-1, "duplicate determinant in wavefunction file");

  loaded.state.dets.reserve(records.size());
  loaded.state.coeffs.resize(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    loaded.state.dets.push_back(records[i].first);
    loaded.state.coeffs[static_cast<Eigen::Index>(i)] = records[i].second;
  }
  loaded.state.energy = h.energy;
  return loaded;
}

void save_wavefunction_file(const std::string& path, const WavefunctionState& state,
                            int m, int n_up, int n_down) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  save_wavefunction(f, state, m, n_up, n_down);
}

LoadedWavefunction load_wavefunction_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  return load_wavefunction(f);
}

}  // namespace trimci
