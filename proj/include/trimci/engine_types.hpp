#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "trimci/determinant.hpp"

namespace trimci {

enum class PoolStrategy { heat_bath, uniform, normalized_uniform };

// Parameter schedule of the expansion-trimming loop. Field names follow the
// run-configuration vocabulary so configs map one-to-one onto this struct.
struct TrimCIConfig {
  std::size_t initial_random_count = 100;
  std::size_t first_cycle_keep_size = 10;  // 0 disables the initial filter pass
  double pool_core_ratio = 10.0;
  PoolStrategy strategy = PoolStrategy::heat_bath;
  int num_groups = 10;
  double keep_ratio = 0.1;
  // alternative local-trim rule: survivors per group relative to |core|;
  // mutually exclusive with keep_ratio (experimental)
  std::optional<double> local_trim_keep_ratio;
  std::vector<double> core_set_ratio{1.0, 1.0, 1.0, 1.1};
  std::size_t max_final_dets = 0;  // required
  int num_runs = 1;
  std::uint64_t seed = 0;
  std::size_t trim_disable_threshold = 0;  // 0 disables; else skip local trim past it
  int ensemble_early_iterations = 4;

  void validate() const;
};

// Explicit wavefunction over an ordered determinant list. Determinants are
// kept in canonical order; coefficients are unit norm.
struct WavefunctionState {
  std::vector<Determinant> dets;
  Eigen::VectorXd coeffs;
  double energy = 0.0;
  int iteration = 0;
};

struct IterationRecord {
  int iteration = 0;
  std::size_t core_size = 0;
  std::size_t pool_size = 0;
  double theta = 0.0;
  double energy = 0.0;
  double wall_time_s = 0.0;
};

}  // namespace trimci
