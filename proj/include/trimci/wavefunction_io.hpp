#pragma once

#include <iosfwd>
#include <string>

#include "trimci/engine_types.hpp"

namespace trimci {

struct WavefunctionHeader {
  int format_version = 1;
  int m = 0;
  int n_up = 0;
  int n_down = 0;
  double energy = 0.0;
  std::size_t n_dets = 0;
  std::string hamming_convention = "spin_orbital_xor";
};

struct LoadedWavefunction {
  WavefunctionHeader header;
  WavefunctionState state;  // determinants restored to canonical order
};

// Text format: header lines, then one record per determinant
// (alpha hex, beta hex, coefficient with 17 significant digits), sorted by
// descending |coefficient| then canonical order. Reload is bit-exact.
void save_wavefunction(std::ostream& out, const WavefunctionState& state, int m,
                       int n_up, int n_down);
LoadedWavefunction load_wavefunction(std::istream& in);

void save_wavefunction_file(const std::string& path, const WavefunctionState& state,
                            int m, int n_up, int n_down);
LoadedWavefunction load_wavefunction_file(const std::string& path);

}  // namespace trimci
