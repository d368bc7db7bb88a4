#pragma once

// Independent oracle: the Hamiltonian assembled by explicit second-quantized
// operator application on occupation vectors. Spin orbitals are ordered as
// all alpha (positions 0..m-1) then all beta (positions m..2m-1); operator
// signs come from the parity of occupied positions below the acted index.
// Deliberately slow and literal; used to pin down every sign convention.

#include <vector>

#include <Eigen/Core>

#include "trimci/determinant.hpp"
#include "trimci/integrals.hpp"

namespace trimci::oracle {

struct Ket {
  std::vector<int> occ;  // one slot per spin orbital
  int sign = 1;          // 0 after annihilation of the state
};

inline Ket from_determinant(const Determinant& d, int m) {
  Ket k;
  k.occ.assign(static_cast<std::size_t>(2 * m), 0);
  for (int p = 0; p < m; ++p) {
    if (d.alpha.test(p)) k.occ[static_cast<std::size_t>(p)] = 1;
    if (d.beta.test(p)) k.occ[static_cast<std::size_t>(m + p)] = 1;
  }
  return k;
}

inline int parity_below(const Ket& k, int pos) {
  int c = 0;
  for (int i = 0; i < pos; ++i) c += k.occ[static_cast<std::size_t>(i)];
  return c & 1;
}

inline void annihilate(Ket& k, int pos) {
  if (k.sign == 0) return;
  if (!k.occ[static_cast<std::size_t>(pos)]) {
    k.sign = 0;
    return;
  }
  if (parity_below(k, pos)) k.sign = -k.sign;
  k.occ[static_cast<std::size_t>(pos)] = 0;
}

inline void create(Ket& k, int pos) {
  if (k.sign == 0) return;
  if (k.occ[static_cast<std::size_t>(pos)]) {
    k.sign = 0;
    return;
  }
  if (parity_below(k, pos)) k.sign = -k.sign;
  k.occ[static_cast<std::size_t>(pos)] = 1;
}

inline bool same_occupation(const Ket& a, const Ket& b) { return a.occ == b.occ; }

// <bra| H |ket> with
//   H = sum_pq t_pq sum_s c+_ps c_qs
//     + 1/2 sum_pqrs (pq|rs) sum_st c+_ps c+_rt c_st c_qs
//     + E_core
inline double element(const Determinant& bra, const Determinant& ket,
                      const IntegralTable& ints) {
  const int m = ints.m();
  const Ket bra_occ = from_determinant(bra, m);
  const Ket ket_occ = from_determinant(ket, m);
  double total = bra == ket ? ints.core_energy() : 0.0;

  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      const double t = ints.one_body(p, q);
      if (t == 0.0) continue;
      for (int spin = 0; spin < 2; ++spin) {
        Ket k = ket_occ;
        annihilate(k, q + spin * m);
        create(k, p + spin * m);
        if (k.sign != 0 && same_occupation(k, bra_occ)) total += k.sign * t;
      }
    }

  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          const double v = ints.two_body(p, q, r, s);
          if (v == 0.0) continue;
          for (int sp = 0; sp < 2; ++sp)
            for (int tp = 0; tp < 2; ++tp) {
              Ket k = ket_occ;
              annihilate(k, q + sp * m);
              annihilate(k, s + tp * m);
              create(k, r + tp * m);
              create(k, p + sp * m);
              if (k.sign != 0 && same_occupation(k, bra_occ)) total += 0.5 * k.sign * v;
            }
        }
  return total;
}

inline Eigen::MatrixXd dense_hamiltonian(const std::vector<Determinant>& dets,
                                         const IntegralTable& ints) {
  const auto n = static_cast<Eigen::Index>(dets.size());
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      h(i, j) = element(dets[static_cast<std::size_t>(i)], dets[static_cast<std::size_t>(j)],
                        ints);
  return h;
}

}  // namespace trimci::oracle
