#include "trimci/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "trimci/connections.hpp"
#include "trimci/parallel.hpp"
#include "trimci/rng.hpp"

namespace trimci {

void TrimCIConfig::validate() const {
  if (initial_random_count < 1) throw ConfigError("config: initial_random_count must be >= 1");
  if (pool_core_ratio <= 1.0) throw ConfigError("config: pool_core_ratio must be > 1");
  if (local_trim_keep_ratio) {
    if (*local_trim_keep_ratio <= 0.0)
      throw ConfigError("config: local_trim_keep_ratio must be positive");
  } else if (!(keep_ratio > 0.0 && keep_ratio <= 1.0)) {
    throw ConfigError("config: keep_ratio must lie in (0, 1]");
  }
  if (num_groups < 1) throw ConfigError("config: num_groups must be >= 1");
  if (core_set_ratio.empty()) throw ConfigError("config: core_set_ratio must not be empty");
  for (double r : core_set_ratio)
    if (r < 1.0) throw ConfigError("config: core_set_ratio entries must be >= 1");
  if (max_final_dets < 1) throw ConfigError("config: max_final_dets is required");
  if (num_runs < 1) throw ConfigError("config: num_runs must be >= 1");
  if (ensemble_early_iterations < 1)
    throw ConfigError("config: ensemble_early_iterations must be >= 1");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd map_warm_start(const WavefunctionState& warm,
                               const std::vector<Determinant>& target) {
  // both determinant lists sorted: merge join
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(target.size()));
  std::size_t i = 0, j = 0;
  while (i < warm.dets.size() && j < target.size()) {
    if (warm.dets[i] < target[j]) ++i;
    else if (target[j] < warm.dets[i]) ++j;
    else {
      guess[static_cast<Eigen::Index>(j)] = warm.coeffs[static_cast<Eigen::Index>(i)];
      ++i;
      ++j;
    }
  }
  return guess;
}

// Diagonalizes a sorted distinct determinant list, optionally warm-started.
WavefunctionState diagonalize_sorted(std::vector<Determinant> dets, const IntegralTable& ints,
                                     const WavefunctionState* warm) {
  const ProjectedHamiltonian h = build_projected(dets, ints);
  EigenResult res;
  if (warm && !warm->dets.empty()) {
    const Eigen::VectorXd guess = map_warm_start(*warm, dets);
    res = davidson_lowest(h, guess.norm() > 1e-12 ? &guess : nullptr);
  } else {
    res = davidson_lowest(h, nullptr);
  }
  WavefunctionState out;
  out.dets = std::move(dets);
  out.coeffs = std::move(res.coefficients);
  out.energy = res.energy;
  return out;
}

struct Candidate {
  Determinant det;
  double contrib;  // max_j |H_ij c_j| over screened contributions
};

// All determinants outside the core reachable with |H_ij c_j| > theta,
// sorted canonically, each carrying its largest screened contribution.
std::vector<Candidate> generate_candidates(const WavefunctionState& core,
                                           const IntegralTable& ints, double theta) {
  const std::size_t n = core.dets.size();
  const int nblocks = block_count_for(n);
  std::vector<std::vector<Candidate>> buckets(static_cast<std::size_t>(nblocks));
  parallel_blocks(n, [&](std::size_t b, std::size_t e, int blk) {
    auto& local = buckets[static_cast<std::size_t>(blk)];
    for (std::size_t j = b; j < e; ++j) {
      const double cj = std::abs(core.coeffs[static_cast<Eigen::Index>(j)]);
      if (cj == 0.0) continue;
      const double min_el = theta / cj;
      for_each_connected(core.dets[j], ints, min_el, [&](const Determinant& cand, double el) {
        local.push_back(Candidate{cand, std::abs(el) * cj});
      });
    }
  });
  std::size_t total = 0;
  for (const auto& b : buckets) total += b.size();
  std::vector<Candidate> all;
  all.reserve(total);
  for (auto& b : buckets) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end(), [](const Candidate& x, const Candidate& y) {
    if (x.det != y.det) return x.det < y.det;
    return x.contrib > y.contrib;
  });
  // keep the best contribution per determinant, drop core members
  std::vector<Candidate> out;
  out.reserve(all.size());
  std::size_t ci = 0;  // cursor into the sorted core
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (k > 0 && all[k].det == all[k - 1].det) continue;
    while (ci < core.dets.size() && core.dets[ci] < all[k].det) ++ci;
    if (ci < core.dets.size() && core.dets[ci] == all[k].det) continue;
    out.push_back(all[k]);
  }
  return out;
}

std::vector<Determinant> assemble_pool(const WavefunctionState& core,
                                       const std::vector<Candidate>& cands, double theta) {
  std::vector<Determinant> pool;
  pool.reserve(core.dets.size() + cands.size());
  // merge the sorted core with the sorted qualifying candidates
  std::size_t i = 0, k = 0;
  while (i < core.dets.size() || k < cands.size()) {
    while (k < cands.size() && cands[k].contrib <= theta) ++k;
    if (k == cands.size()) {
      for (; i < core.dets.size(); ++i) pool.push_back(core.dets[i]);
      break;
    }
    if (i < core.dets.size() && core.dets[i] < cands[k].det) pool.push_back(core.dets[i++]);
    else pool.push_back(cands[k++].det);
  }
  return pool;
}

}  // namespace

ExpandResult expand(const WavefunctionState& core, const IntegralTable& ints,
                    std::size_t target_pool_size, PoolStrategy strategy,
                    std::uint64_t seed, double theta_start) {
  if (core.dets.empty()) throw ConfigError("expand: empty core");
  if (target_pool_size <= core.dets.size())
    throw ConfigError("expand: target_pool_size must exceed the core size");

  constexpr double kThetaFloor = 1e-15;

  if (strategy != PoolStrategy::heat_bath) {
    // experimental: uniform sampling among all connected determinants
    const auto cands = generate_candidates(core, ints, kThetaFloor);
    const std::size_t want = std::min(cands.size(), target_pool_size - core.dets.size());
    SplitMix64 rng(seed);
    const auto pick = sample_indices(static_cast<int>(cands.size()), static_cast<int>(want), rng);
    std::vector<Determinant> chosen;
    chosen.reserve(want + core.dets.size());
    for (int idx : pick) chosen.push_back(cands[static_cast<std::size_t>(idx)].det);
    chosen.insert(chosen.end(), core.dets.begin(), core.dets.end());
    std::sort(chosen.begin(), chosen.end());
    return ExpandResult{std::move(chosen), 0.0};
  }

  const double lo = 0.8 * static_cast<double>(target_pool_size);
  const double hi = 1.5 * static_cast<double>(target_pool_size);

  // geometric descent: halve theta until the cached candidate list can fill
  // the band (each regeneration is complete for every contribution > theta)
  double theta = std::max(theta_start, kThetaFloor);
  std::vector<Candidate> cands = generate_candidates(core, ints, theta);
  double cached_theta = theta;
  for (int adjust = 0; adjust < 30; ++adjust) {
    if (static_cast<double>(core.dets.size() + cands.size()) >= lo) break;
    if (cached_theta <= kThetaFloor) break;  // connectivity exhausted
    cached_theta = std::max(cached_theta / 2.0, kThetaFloor);
    cands = generate_candidates(core, ints, cached_theta);
  }

  if (cands.empty())
    return ExpandResult{core.dets, std::numeric_limits<double>::infinity()};

  // The cache is complete above cached_theta, so the pool size for any
  // threshold >= cached_theta is exact: pick the achievable count closest to
  // the band (ties toward the target). Contributions cluster on degenerate
  // lattices, so counts jump; a blind geometric raise can skip the band.
  std::vector<double> contribs;
  contribs.reserve(cands.size());
  for (const auto& c : cands) contribs.push_back(c.contrib);
  std::sort(contribs.begin(), contribs.end(), std::greater<>());

  auto band_distance = [&](std::size_t n) {
    const double x = static_cast<double>(n);
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  };
  const double t_target = static_cast<double>(target_pool_size);

  double best_theta = cached_theta;
  std::size_t best_n = core.dets.size() + contribs.size();
  auto consider = [&](double th, std::size_t n) {
    const double d = band_distance(n);
    const double bd = band_distance(best_n);
    const bool better =
        d < bd ||
        (d == bd && std::abs(static_cast<double>(n) - t_target) <
                        std::abs(static_cast<double>(best_n) - t_target)) ||
        (d == bd && n == best_n && th > best_theta);
    if (better) {
      best_theta = th;
      best_n = n;
    }
  };
  consider(cached_theta, best_n);
  for (std::size_t k = 0; k < contribs.size();) {
    // admitting everything strictly above contribs[k] keeps exactly k entries
    std::size_t tie_end = k;
    while (tie_end < contribs.size() && contribs[tie_end] == contribs[k]) ++tie_end;
    consider(contribs[k], core.dets.size() + k);
    k = tie_end;
  }

  std::vector<Determinant> pool = assemble_pool(core, cands, best_theta);
  return ExpandResult{std::move(pool), best_theta};
}

std::vector<Determinant> local_trim(const std::vector<Determinant>& pool,
                                    const WavefunctionState& core,
                                    const IntegralTable& ints, int num_groups,
                                    double keep_ratio, std::uint64_t seed,
                                    std::optional<std::size_t> keep_per_group_override) {
  if (!keep_per_group_override && !(keep_ratio > 0.0 && keep_ratio <= 1.0))
    throw ConfigError("local_trim: keep_ratio must lie in (0, 1]");
  if (num_groups < 1) throw ConfigError("local_trim: num_groups must be >= 1");
  if (!std::includes(pool.begin(), pool.end(), core.dets.begin(), core.dets.end()))
    throw ConfigError("local_trim: pool does not contain the core");

  std::vector<Determinant> fresh;
  fresh.reserve(pool.size() - core.dets.size());
  std::set_difference(pool.begin(), pool.end(), core.dets.begin(), core.dets.end(),
                      std::back_inserter(fresh));
  if (fresh.empty()) return pool;

  SplitMix64 rng(seed);
  fisher_yates_shuffle(fresh, rng);

  const auto g = static_cast<std::size_t>(num_groups);
  const std::size_t base = fresh.size() / g;
  const std::size_t extra = fresh.size() % g;

  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  std::size_t at = 0;
  for (std::size_t gi = 0; gi < g && at < fresh.size(); ++gi) {
    const std::size_t len = base + (gi < extra ? 1 : 0);
    if (len == 0) continue;
    chunks.emplace_back(at, at + len);
    at += len;
  }

  const bool anchor = std::getenv("TRIMCI_UNANCHORED_GROUPS") == nullptr;
  std::vector<std::vector<Determinant>> survivors(chunks.size());
  parallel_blocks(chunks.size(), [&](std::size_t b, std::size_t e, int) {
    for (std::size_t gi = b; gi < e; ++gi) {
      const auto [cb, ce] = chunks[gi];
      const std::size_t len = ce - cb;
      const std::size_t head = anchor ? core.dets.size() : 0;
      std::vector<Determinant> group_dets;
      group_dets.reserve(head + len);
      if (anchor)
        group_dets.insert(group_dets.end(), core.dets.begin(), core.dets.end());
      group_dets.insert(group_dets.end(), fresh.begin() + static_cast<std::ptrdiff_t>(cb),
                        fresh.begin() + static_cast<std::ptrdiff_t>(ce));
      const ProjectedHamiltonian h = build_projected(group_dets, ints);
      EigenResult res;
      if (anchor) {
        Eigen::VectorXd guess =
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(group_dets.size()));
        guess.head(static_cast<Eigen::Index>(core.dets.size())) = core.coeffs;
        res = davidson_lowest(h, guess.norm() > 1e-12 ? &guess : nullptr);
      } else {
        res = davidson_lowest(h, nullptr);
      }

      std::size_t keep = keep_per_group_override
                             ? *keep_per_group_override
                             : static_cast<std::size_t>(
                                   std::ceil(keep_ratio * static_cast<double>(len)));
      keep = std::min(std::max<std::size_t>(keep, keep_per_group_override ? 0 : 1), len);

      std::vector<std::size_t> order(len);
      for (std::size_t i = 0; i < len; ++i) order[i] = head + i;
      std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        const double ax = std::abs(res.coefficients[static_cast<Eigen::Index>(x)]);
        const double ay = std::abs(res.coefficients[static_cast<Eigen::Index>(y)]);
        if (ax != ay) return ax > ay;
        return group_dets[x] < group_dets[y];
      });
      auto& keepers = survivors[gi];
      keepers.reserve(keep);
      for (std::size_t i = 0; i < keep; ++i) keepers.push_back(group_dets[order[i]]);
    }
  });

  std::vector<Determinant> reduced(core.dets.begin(), core.dets.end());
  for (const auto& s : survivors) reduced.insert(reduced.end(), s.begin(), s.end());
  std::sort(reduced.begin(), reduced.end());
  return reduced;
}

WavefunctionState global_trim(const std::vector<Determinant>& reduced_pool,
                              const IntegralTable& ints, std::size_t k_b,
                              const WavefunctionState* warm_start) {
  if (reduced_pool.empty()) throw ConfigError("global_trim: empty pool");
  if (k_b < 1) throw ConfigError("global_trim: k_b must be >= 1");

  std::vector<Determinant> dets = reduced_pool;
  std::sort(dets.begin(), dets.end());
  WavefunctionState full = diagonalize_sorted(std::move(dets), ints, warm_start);
  if (k_b >= full.dets.size()) return full;

  std::vector<std::size_t> order(full.dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double ax = std::abs(full.coeffs[static_cast<Eigen::Index>(x)]);
    const double ay = std::abs(full.coeffs[static_cast<Eigen::Index>(y)]);
    if (ax != ay) return ax > ay;
    return full.dets[x] < full.dets[y];
  });
  std::vector<Determinant> kept;
  kept.reserve(k_b);
  for (std::size_t i = 0; i < k_b; ++i) kept.push_back(full.dets[order[i]]);
  std::sort(kept.begin(), kept.end());
  return diagonalize_sorted(std::move(kept), ints, &full);
}

namespace {

struct LoopState {
  WavefunctionState state;
  double theta = 1e-3;
  std::size_t cycle = 0;
  int plateau = 0;
  int next_iteration = 1;
  bool finished = false;
  Clock::time_point t0 = Clock::now();
};

LoopState init_loop(const TrimCIConfig& config, const IntegralTable& ints,
                    std::vector<IterationRecord>& records) {
  LoopState loop;
  const std::uint64_t sector = sector_size(ints.m(), ints.n_up(), ints.n_down());
  if (sector == 0) throw ConfigError("run: empty particle-number sector");
  const std::size_t initial =
      static_cast<std::size_t>(std::min<std::uint64_t>(config.initial_random_count, sector));

  std::vector<Determinant> init_dets = random_determinants(
      ints.m(), ints.n_up(), ints.n_down(), initial, mix_seed(config.seed, 0, 17));
  std::sort(init_dets.begin(), init_dets.end());

  const std::size_t keep0 =
      config.first_cycle_keep_size > 0 && config.first_cycle_keep_size < init_dets.size()
          ? config.first_cycle_keep_size
          : init_dets.size();
  loop.state = global_trim(init_dets, ints, keep0, nullptr);
  loop.state.iteration = 0;
  records.push_back(IterationRecord{0, loop.state.dets.size(), init_dets.size(), 0.0,
                                    loop.state.energy, seconds_since(loop.t0)});
  return loop;
}

void advance_loop(const TrimCIConfig& config, const IntegralTable& ints, LoopState& loop,
                  std::vector<IterationRecord>& records, const IterationCallback& cb,
                  int iteration_cap) {
  while (!loop.finished && (iteration_cap < 0 || loop.next_iteration <= iteration_cap)) {
    const int it = loop.next_iteration;
    try {
      if (loop.state.dets.size() >= config.max_final_dets) {
        loop.finished = true;
        break;
      }
      const auto target = std::max<std::size_t>(
          loop.state.dets.size() + 1,
          static_cast<std::size_t>(std::llround(
              config.pool_core_ratio * static_cast<double>(loop.state.dets.size()))));
      ExpandResult ex = expand(loop.state, ints, target, config.strategy,
                               mix_seed(config.seed, static_cast<std::uint64_t>(it), 1),
                               loop.theta);
      if (std::isfinite(ex.theta_used) && ex.theta_used > 0) loop.theta = ex.theta_used;

      std::vector<Determinant> reduced;
      const bool trim_disabled = config.trim_disable_threshold > 0 &&
                                 loop.state.dets.size() >= config.trim_disable_threshold;
      if (trim_disabled) {
        reduced = ex.pool;
      } else if (config.local_trim_keep_ratio) {
        const auto keep = static_cast<std::size_t>(
            std::ceil(*config.local_trim_keep_ratio *
                      static_cast<double>(loop.state.dets.size()) /
                      static_cast<double>(config.num_groups)));
        reduced = local_trim(ex.pool, loop.state, ints, config.num_groups, 1.0,
                             mix_seed(config.seed, static_cast<std::uint64_t>(it), 2), keep);
      } else {
        reduced = local_trim(ex.pool, loop.state, ints, config.num_groups, config.keep_ratio,
                             mix_seed(config.seed, static_cast<std::uint64_t>(it), 2));
      }

      const double ratio =
          config.core_set_ratio[loop.cycle % config.core_set_ratio.size()];
      auto k_b = static_cast<std::size_t>(
          std::llround(ratio * static_cast<double>(loop.state.dets.size())));
      k_b = std::min(std::max<std::size_t>(k_b, 1), config.max_final_dets);

      const std::size_t prev_size = loop.state.dets.size();
      WavefunctionState next = global_trim(reduced, ints, k_b, &loop.state);
      next.iteration = it;
      double improvement = loop.state.energy - next.energy;
      if (improvement >= -1e-10) {
        loop.state = std::move(next);
      } else {
        // a swap that raises the energy is discarded; the previous core
        // stands and the cycle schedule still advances
        improvement = 0.0;
        loop.state.iteration = it;
      }
      records.push_back(IterationRecord{it, loop.state.dets.size(), ex.pool.size(),
                                        ex.theta_used, loop.state.energy,
                                        seconds_since(loop.t0)});
      if (cb) cb(records.back(), loop.state);

      // saturation check: fixed-size refinement cycles are exempt, so the
      // streak must outlast a full schedule period with no growth at all
      const bool stalled =
          improvement < 1e-9 && loop.state.dets.size() <= prev_size;
      loop.plateau = stalled ? loop.plateau + 1 : 0;
      const int patience =
          std::max<int>(3, static_cast<int>(config.core_set_ratio.size()));
      if (loop.plateau >= patience) loop.finished = true;
      ++loop.cycle;
      ++loop.next_iteration;
    } catch (const DavidsonNonConvergence& e) {
      throw SolverError("run: iteration " + std::to_string(it) + ": " + e.what());
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw SolverError("run: iteration " + std::to_string(it) + ": " + e.what());
    }
  }
}

}  // namespace

RunResult run(const TrimCIConfig& config, const IntegralTable& ints,
              const IterationCallback& on_iteration) {
  config.validate();
  RunResult out;
  LoopState loop = init_loop(config, ints, out.records);
  if (on_iteration) on_iteration(out.records.back(), loop.state);
  advance_loop(config, ints, loop, out.records, on_iteration, -1);
  out.state = std::move(loop.state);
  return out;
}

EnsembleResult ensemble_run(const TrimCIConfig& config, const IntegralTable& ints,
                            const IterationCallback& on_iteration) {
  config.validate();
  if (config.num_runs < 2) throw ConfigError("ensemble_run: num_runs must be >= 2");

  struct Preview {
    LoopState loop;
    std::vector<IterationRecord> records;
    bool ok = false;
    std::string error;
  };
  std::vector<Preview> previews(static_cast<std::size_t>(config.num_runs));
  std::vector<RunSummary> summaries;

  for (int r = 0; r < config.num_runs; ++r) {
    TrimCIConfig cfg = config;
    cfg.seed = config.seed + static_cast<std::uint64_t>(r);
    auto& pv = previews[static_cast<std::size_t>(r)];
    try {
      pv.loop = init_loop(cfg, ints, pv.records);
      advance_loop(cfg, ints, pv.loop, pv.records, {}, config.ensemble_early_iterations);
      pv.ok = true;
      summaries.push_back(RunSummary{r, cfg.seed, pv.loop.state.energy,
                                     pv.loop.state.dets.size(), false});
    } catch (const Error& e) {
      pv.error = e.what();
      summaries.push_back(RunSummary{r, cfg.seed, 0.0, 0, true});
    }
  }

  int best = -1;
  for (int r = 0; r < config.num_runs; ++r) {
    const auto& pv = previews[static_cast<std::size_t>(r)];
    if (!pv.ok) continue;
    if (best < 0 ||
        pv.loop.state.energy < previews[static_cast<std::size_t>(best)].loop.state.energy)
      best = r;
  }
  if (best < 0) {
    std::string msg = "ensemble_run: all runs failed:";
    for (const auto& pv : previews) msg += "\n  " + pv.error;
    throw SolverError(msg);
  }

  EnsembleResult out;
  out.best_run_index = best;
  out.summaries = std::move(summaries);
  auto& pv = previews[static_cast<std::size_t>(best)];
  if (on_iteration) {
    for (std::size_t k = 0; k + 1 < pv.records.size(); ++k)
      on_iteration(pv.records[k], pv.loop.state);
    if (!pv.records.empty()) on_iteration(pv.records.back(), pv.loop.state);
  }
  TrimCIConfig cfg = config;
  cfg.seed = config.seed + static_cast<std::uint64_t>(best);
  advance_loop(cfg, ints, pv.loop, pv.records, on_iteration, -1);
  out.best.state = std::move(pv.loop.state);
  out.best.records = std::move(pv.records);
  return out;
}

}  // namespace trimci
