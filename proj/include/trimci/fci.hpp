#pragma once

#include <vector>

#include "trimci/eigensolver.hpp"
#include "trimci/engine_types.hpp"

namespace trimci {

struct SectorEnumeration {
  std::vector<Determinant> dets;  // canonical order
};

// All C(m, n_up) * C(m, n_down) determinants of the sector, canonical order.
// Errors when the count exceeds cap.
SectorEnumeration enumerate_sector(int m, int n_up, int n_down,
                                   std::uint64_t cap = 2'000'000);

/// Exact lowest eigenpair over the full sector.
EigenResult fci_ground_state(const IntegralTable& ints, const SectorEnumeration& sector,
                             const DavidsonOptions& opts = {});

/// |<state|reference>|^2 over the union of supports; missing coefficients are 0.
double fidelity(const WavefunctionState& state, const WavefunctionState& reference);

}  // namespace trimci
