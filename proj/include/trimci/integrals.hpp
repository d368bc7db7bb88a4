#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace trimci {

// Sorted double-excitation screening list for one ordered parent orbital
// pair (a, b): candidate target pair (r, s) with an upper bound on the
// coupling magnitude, bound = |(ar|bs)| + |(as|br)|. The bound dominates the
// exact element in every spin channel, so a descending scan with early exit
// never misses a candidate; exact elements are recomputed per candidate.
struct HeatBathEntry {
  double bound;
  std::uint16_t r;
  std::uint16_t s;
};

struct HubbardSpec {
  int lx = 1;
  int ly = 1;
  double t = 1.0;
  double u = 0.0;
  bool periodic = false;
  int n_up = 0;
  int n_down = 0;
};

// One- and two-electron integrals in chemist notation (pq|rs) with 8-fold
// permutational symmetry. Immutable after load; shared read-only.
class IntegralTable {
 public:
  IntegralTable(int m, int n_electrons, int ms2);

  int m() const { return m_; }
  int n_electrons() const { return n_electrons_; }
  int ms2() const { return ms2_; }
  int n_up() const { return (n_electrons_ + ms2_) / 2; }
  int n_down() const { return (n_electrons_ - ms2_) / 2; }

  double core_energy() const { return core_energy_; }
  void set_core_energy(double e) { core_energy_ = e; }

  double one_body(int p, int q) const { return one_body_(p, q); }
  void set_one_body(int p, int q, double v) {
    one_body_(p, q) = v;
    one_body_(q, p) = v;
  }

  /// Chemist (pq|rs); any of the 8 symmetry-equivalent index orders.
  double two_body(int p, int q, int r, int s) const;

  /// Returns true if the canonical slot was already written (last write wins).
  bool set_two_body(int p, int q, int r, int s, double v);

  std::size_t duplicate_writes() const { return duplicate_writes_; }

  /// Must be called once after all integrals are set.
  void finalize();
  bool finalized() const { return finalized_; }

  const std::vector<HeatBathEntry>& heat_bath(int a, int b) const {
    return heat_bath_[static_cast<std::size_t>(a) * static_cast<std::size_t>(m_) +
                      static_cast<std::size_t>(b)];
  }

  /// Canonical (p,q,r,s) tuples with nonzero value, ascending canonical index.
  std::vector<std::array<int, 4>> nonzero_two_body() const;

  static IntegralTable from_hubbard(const HubbardSpec& spec);

 private:
  std::uint64_t canonical_key(int p, int q, int r, int s) const;

  int m_;
  int n_electrons_;
  int ms2_;
  double core_energy_ = 0.0;
  Eigen::MatrixXd one_body_;
  bool dense_two_body_;
  std::vector<double> dense2_;                          // m <= 40
  std::unordered_map<std::uint64_t, double> sparse2_;   // m > 40
  std::vector<std::vector<HeatBathEntry>> heat_bath_;   // m*m parent pairs
  std::size_t duplicate_writes_ = 0;
  bool finalized_ = false;
};

// FCIDUMP (Molpro convention): namelist header with NORB/NELEC/MS2
// (ORBSYM/ISYM tolerated and ignored), then `value i j k l` lines with
// 1-based indices. Fortran D exponents accepted. Duplicate
// symmetry-equivalent entries overwrite with a warning counter.
IntegralTable parse_fcidump(std::istream& in);

/// Loads an FCIDUMP file; names ending in .gz are decompressed first.
IntegralTable load_fcidump_file(const std::string& path);

// Emits canonical representatives only, with enough digits that
// parse(write(T)) reproduces T exactly.
void write_fcidump(const IntegralTable& table, std::ostream& out);

}  // namespace trimci
