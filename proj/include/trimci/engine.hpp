#pragma once

#include <functional>
#include <limits>

#include "trimci/eigensolver.hpp"
#include "trimci/engine_types.hpp"

namespace trimci {

struct ExpandResult {
  std::vector<Determinant> pool;  // superset of the core, canonical order
  double theta_used = 0.0;
};

// Grows the core into a pool of roughly target_pool_size determinants by
// screening |H_ij c_j| > theta against each core member, adapting theta
// geometrically from theta_start until the pool lands in
// [0.8, 1.5] * target_pool_size (closest achievable side otherwise).
// With no connectivity at all the pool is the core and theta is +inf.
ExpandResult expand(const WavefunctionState& core, const IntegralTable& ints,
                    std::size_t target_pool_size, PoolStrategy strategy,
                    std::uint64_t seed, double theta_start = 1e-3);

// Randomized local trimming: the new determinants are shuffled into
// num_groups nearly equal groups, each group is diagonalized together with
// the full core, and the top ceil(keep_ratio * |group|) new determinants per
// group survive. Returns core + survivors in canonical order. When
// keep_per_group_override is set (the core-relative rule) it replaces the
// per-group keep count.
std::vector<Determinant> local_trim(const std::vector<Determinant>& pool,
                                    const WavefunctionState& core,
                                    const IntegralTable& ints, int num_groups,
                                    double keep_ratio, std::uint64_t seed,
                                    std::optional<std::size_t> keep_per_group_override = {});

// Diagonalizes the reduced pool (warm-started), keeps the top-k_b
// determinants by |coefficient|, and re-diagonalizes on the kept set so the
// returned state is self-consistent.
WavefunctionState global_trim(const std::vector<Determinant>& reduced_pool,
                              const IntegralTable& ints, std::size_t k_b,
                              const WavefunctionState* warm_start);

using IterationCallback = std::function<void(const IterationRecord&, const WavefunctionState&)>;

struct RunResult {
  WavefunctionState state;
  std::vector<IterationRecord> records;
};

// Full expansion-trimming loop: random initial core, optional first-cycle
// filter, then expand -> local trim -> global trim per iteration until the
// core reaches max_final_dets or the energy plateaus.
RunResult run(const TrimCIConfig& config, const IntegralTable& ints,
              const IterationCallback& on_iteration = {});

struct RunSummary {
  int run_index = 0;
  std::uint64_t seed = 0;
  double energy = 0.0;
  std::size_t core_size = 0;
  bool failed = false;
};

struct EnsembleResult {
  RunResult best;
  int best_run_index = 0;
  std::vector<RunSummary> summaries;
};

// Runs num_runs seeds for the first ensemble_early_iterations iterations,
// keeps the lowest-energy run (ties to the lower index) and continues it to
// completion.
EnsembleResult ensemble_run(const TrimCIConfig& config, const IntegralTable& ints,
                            const IterationCallback& on_iteration = {});

}  // namespace trimci
