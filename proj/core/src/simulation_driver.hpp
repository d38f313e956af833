#pragma once

// Chunked, schedule-independent Monte Carlo driver shared by the correlated,
// intensity and independent models. A kernel draws one sample's (S, T) from
// its own counter-based stream; the driver applies the decision rule and
// reduces in fixed sample blocks.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "welfare_order/engine.hpp"
#include "welfare_order/errors.hpp"
#include "welfare_order/rng.hpp"

namespace welfare_order::detail {

// Reduction granularity; fixed so sums never depend on chunk_size.
inline constexpr std::uint64_t kReductionBlock = 4096;

struct KernelOutput {
  double s;
  double t;
};

struct DecisionParams {
  double sigma;
  double tie_threshold;
  bool antithetic;
};

template <class Kernel>
SampleDraw draw_one(const Kernel& kernel, std::uint64_t seed,
                    std::uint64_t index, const DecisionParams& params) {
  CounterStream stream(seed, index);
  const KernelOutput out = kernel.draw(stream, params.antithetic);
  SampleDraw draw;
  draw.s = out.s;
  draw.t = out.t;
  draw.tie = std::abs(out.t) <= params.tie_threshold;
  if (draw.tie) {
    // The coin comes after the margin draws on the same stream.
    const int coin = stream.coin();
    draw.decision = params.antithetic ? -coin : coin;
  } else {
    draw.decision = out.t > 0.0 ? 1 : -1;
  }
  draw.s_norm = out.s / params.sigma;
  draw.w = draw.decision > 0 ? draw.s_norm : -draw.s_norm;
  if (draw.w == 0.0) draw.w = 0.0;  // no signed zeros in W
  return draw;
}

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

inline void check_run(const RunOptions& run) {
  if (run.samples == 0) throw ConfigError("samples must be >= 1");
  if (run.chunk_size == 0) throw ConfigError("chunk_size must be >= 1");
}

template <class Kernel>
SimulationResult run_simulation(const Kernel& kernel, const RunOptions& run,
                                const DecisionParams& params, ModelKind model,
                                std::size_t groups) {
  check_run(run);
  const std::uint64_t m = run.samples;
  const bool retain = m <= run.sample_cap;
  const bool keep_order = retain && run.keep_order;
  const std::uint64_t blocks = (m + kReductionBlock - 1) / kReductionBlock;
  const std::uint64_t blocks_per_task =
      std::max<std::uint64_t>(1, run.chunk_size / kReductionBlock);
  const std::uint64_t tasks = (blocks + blocks_per_task - 1) / blocks_per_task;
  const unsigned threads = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_threads(run.threads), tasks));

  std::vector<SampleMoments> block_moments(blocks);
  std::vector<double> welfare, s_norm;
  if (retain) {
    welfare.resize(m);
    s_norm.resize(m);
  }
  std::vector<CdfSketch> welfare_sketches, s_sketches;
  if (!retain) {
    welfare_sketches.resize(threads);
    s_sketches.resize(threads);
  }

  std::atomic<std::uint64_t> next_task{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&](unsigned id) {
    try {
      for (;;) {
        const std::uint64_t task = next_task.fetch_add(1);
        if (task >= tasks) break;
        const std::uint64_t first_block = task * blocks_per_task;
        const std::uint64_t last_block =
            std::min(blocks, first_block + blocks_per_task);
        for (std::uint64_t b = first_block; b < last_block; ++b) {
          SampleMoments local;
          const std::uint64_t begin = b * kReductionBlock;
          const std::uint64_t end = std::min(m, begin + kReductionBlock);
          for (std::uint64_t j = begin; j < end; ++j) {
            const SampleDraw d = draw_one(kernel, run.seed, j, params);
            local.add(d.w, d.s_norm, d.tie);
            if (retain) {
              welfare[j] = d.w;
              s_norm[j] = d.s_norm;
            } else {
              welfare_sketches[id].add(d.w);
              s_sketches[id].add(d.s_norm);
            }
          }
          block_moments[b] = local;
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned id = 0; id < threads; ++id) pool.emplace_back(worker, id);
  }
  if (failure) std::rethrow_exception(failure);

  SimulationResult result;
  result.model = model;
  result.samples = m;
  result.seed = run.seed;
  result.sigma = params.sigma;
  result.groups = groups;
  for (const SampleMoments& bm : block_moments) result.moments.merge(bm);
  result.tie_count = result.moments.ties;
  result.estimates = estimate_objectives(result.moments);

  if (retain) {
    if (keep_order) {
      result.ordered_welfare = welfare;
      result.ordered_s_norm = s_norm;
    }
    result.welfare = EmpiricalWelfare::from_samples(std::move(welfare));
    result.s_norm = EmpiricalWelfare::from_samples(std::move(s_norm));
  } else {
    CdfSketch w_total, s_total;
    for (unsigned id = 0; id < threads; ++id) {
      w_total.merge(welfare_sketches[id]);
      s_total.merge(s_sketches[id]);
    }
    const double s_mean =
        result.moments.sum_s / static_cast<double>(result.moments.count);
    result.welfare =
        EmpiricalWelfare::from_sketch(std::move(w_total), result.estimates.u_hat);
    result.s_norm = EmpiricalWelfare::from_sketch(std::move(s_total), s_mean);
  }
  result.welfare.seed = run.seed;
  result.s_norm.seed = run.seed;
  return result;
}

}  // namespace welfare_order::detail
