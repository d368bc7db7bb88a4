#pragma once

#include <cstdlib>

#include "trimci/determinant.hpp"
#include "trimci/integrals.hpp"
#include "trimci/slater_condon.hpp"

namespace trimci {

// Visits every determinant d' connected to d with |<d'|H|d>| > min_element,
// calling fn(d', element). Singles are screened by evaluating the exact
// element; doubles walk the heat-bath lists in descending bound order and
// stop once the bound can no longer beat min_element. min_element = 0 visits
// the full nonzero connectivity. Visit order is deterministic.
template <typename F>
void for_each_connected(const Determinant& d, const IntegralTable& ints,
                        double min_element, F&& fn) {
  const int m = ints.m();
  std::uint8_t occ_a[kMaxOrbitals], occ_b[kMaxOrbitals];
  const int na = list_set_bits(d.alpha, occ_a);
  const int nb = list_set_bits(d.beta, occ_b);

  // singles
  for (int spin = 0; spin < 2; ++spin) {
    const SpinString& s = spin == 0 ? d.alpha : d.beta;
    const std::uint8_t* occ = spin == 0 ? occ_a : occ_b;
    const int n = spin == 0 ? na : nb;
    for (int i = 0; i < n; ++i) {
      const int a = occ[i];
      for (int c = 0; c < m; ++c) {
        if (s.test(c)) continue;
        Excitation ex;
        ex.kind = ExcitationKind::single;
        ex.channel = spin == 0 ? SpinChannel::alpha_alpha : SpinChannel::beta_beta;
        ex.holes[0] = static_cast<std::uint8_t>(a);
        ex.particles[0] = static_cast<std::uint8_t>(c);
        ex.phase = s.parity_between(a, c) ? -1 : 1;
        const double el = offdiagonal_element(d, ex, ints);
        if (std::abs(el) > min_element) {
          Determinant cand = d;
          SpinString& cs = spin == 0 ? cand.alpha : cand.beta;
          cs.reset(a);
          cs.set(c);
          fn(cand, el);
        }
      }
    }
  }

  // same-spin doubles; unordered target pairs taken with r < s
  for (int spin = 0; spin < 2; ++spin) {
    const SpinString& s = spin == 0 ? d.alpha : d.beta;
    const std::uint8_t* occ = spin == 0 ? occ_a : occ_b;
    const int n = spin == 0 ? na : nb;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        for (const HeatBathEntry& hb : ints.heat_bath(occ[i], occ[j])) {
          if (hb.bound <= min_element) break;
          if (hb.r >= hb.s) continue;
          if (s.test(hb.r) || s.test(hb.s)) continue;
          Determinant cand = d;
          SpinString& cs = spin == 0 ? cand.alpha : cand.beta;
          cs.reset(occ[i]);
          cs.reset(occ[j]);
          cs.set(hb.r);
          cs.set(hb.s);
          const double el = matrix_element(d, cand, ints);
          if (std::abs(el) > min_element) fn(cand, el);
        }
      }
  }

  // opposite-spin doubles: r replaces the alpha hole, s the beta hole
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j) {
      for (const HeatBathEntry& hb : ints.heat_bath(occ_a[i], occ_b[j])) {
        if (hb.bound <= min_element) break;
        if (d.alpha.test(hb.r) || d.beta.test(hb.s)) continue;
        Determinant cand = d;
        cand.alpha.reset(occ_a[i]);
        cand.alpha.set(hb.r);
        cand.beta.reset(occ_b[j]);
        cand.beta.set(hb.s);
        const double el = matrix_element(d, cand, ints);
        if (std::abs(el) > min_element) fn(cand, el);
      }
    }
}

}  // namespace trimci
