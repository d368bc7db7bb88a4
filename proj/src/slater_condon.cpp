#include "trimci/slater_condon.hpp"

#include "trimci/error.hpp"

namespace trimci {

namespace {

void check_range(const Determinant& d, const IntegralTable& ints) {
  const int m = ints.m();
  if (m >= kMaxOrbitals) return;
  SpinString mask;
  for (int p = m; p < kMaxOrbitals; ++p) mask.set(p);
  if ((d.alpha & mask).popcount() != 0 || (d.beta & mask).popcount() != 0)
    throw ConfigError("determinant occupies orbitals beyond the integral table (m=" +
                      std::to_string(m) + ")");
}

}  // namespace

double diagonal_element(const Determinant& d, const IntegralTable& ints) {
  check_range(d, ints);
  std::uint8_t occ_a[kMaxOrbitals], occ_b[kMaxOrbitals];
  const int na = list_set_bits(d.alpha, occ_a);
  const int nb = list_set_bits(d.beta, occ_b);

  double e = ints.core_energy();
  for (int i = 0; i < na; ++i) e += ints.one_body(occ_a[i], occ_a[i]);
  for (int i = 0; i < nb; ++i) e += ints.one_body(occ_b[i], occ_b[i]);

  // same-spin pairs: direct minus exchange
  for (int i = 0; i < na; ++i)
    for (int j = i + 1; j < na; ++j) {
      const int p = occ_a[i], q = occ_a[j];
      e += ints.two_body(p, p, q, q) - ints.two_body(p, q, q, p);
    }
  for (int i = 0; i < nb; ++i)
    for (int j = i + 1; j < nb; ++j) {
      const int p = occ_b[i], q = occ_b[j];
      e += ints.two_body(p, p, q, q) - ints.two_body(p, q, q, p);
    }
  // opposite-spin pairs: direct only
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < nb; ++j)
      e += ints.two_body(occ_a[i], occ_a[i], occ_b[j], occ_b[j]);
  return e;
}

double offdiagonal_element(const Determinant& d1, const Excitation& ex,
                           const IntegralTable& ints) {
  if (ex.kind == ExcitationKind::single) {
    const int a = ex.holes[0], c = ex.particles[0];
    double v = ints.one_body(a, c);
    std::uint8_t occ[kMaxOrbitals];
    const bool alpha_channel = ex.channel == SpinChannel::alpha_alpha;
    const SpinString& same = alpha_channel ? d1.alpha : d1.beta;
    const SpinString& other = alpha_channel ? d1.beta : d1.alpha;
    int n = list_set_bits(same, occ);
    for (int i = 0; i < n; ++i) {
      const int q = occ[i];
      if (q == a) continue;
      v += ints.two_body(a, c, q, q) - ints.two_body(a, q, q, c);
    }
    n = list_set_bits(other, occ);
    for (int i = 0; i < n; ++i) {
      const int q = occ[i];
      v += ints.two_body(a, c, q, q);
    }
    return ex.phase * v;
  }

  // double excitation: holes (a,b) -> particles (c,d) paired in stored order
  const int a = ex.holes[0], b = ex.holes[1];
  const int c = ex.particles[0], d = ex.particles[1];
  if (ex.channel == SpinChannel::alpha_beta)
    return ex.phase * ints.two_body(a, c, b, d);
  return ex.phase * (ints.two_body(a, c, b, d) - ints.two_body(a, d, b, c));
}

double matrix_element(const Determinant& d1, const Determinant& d2,
                      const IntegralTable& ints) {
  const auto ex = excitation_between(d1, d2);
  if (!ex) return 0.0;
  if (ex->kind == ExcitationKind::diagonal) return diagonal_element(d1, ints);
  check_range(d1, ints);
  check_range(d2, ints);
  return offdiagonal_element(d1, *ex, ints);
}

}  // namespace trimci
