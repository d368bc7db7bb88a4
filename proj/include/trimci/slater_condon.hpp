#pragma once

#include "trimci/determinant.hpp"
#include "trimci/integrals.hpp"

namespace trimci {

// Hamiltonian matrix element <d1|H|d2> by the Slater-Condon rules; 0 when
// the determinants differ by more than a double excitation. Diagonal
// elements include the core energy.
double matrix_element(const Determinant& d1, const Determinant& d2,
                      const IntegralTable& ints);

/// Diagonal element <d|H|d> (includes core energy).
double diagonal_element(const Determinant& d, const IntegralTable& ints);

/// Element for a pre-classified non-diagonal excitation from d1.
double offdiagonal_element(const Determinant& d1, const Excitation& ex,
                           const IntegralTable& ints);

}  // namespace trimci
