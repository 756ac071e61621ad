#include "fsm/analysis.hpp"
#include "fsm/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace fsm {

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::K: return "K";
    case SweepAxis::N: return "N";
    case SweepAxis::M: return "M";
  }
  return "?";
}

SweepAxis parse_axis(const std::string& s) {
  if (s == "K") return SweepAxis::K;
  if (s == "N") return SweepAxis::N;
  if (s == "M") return SweepAxis::M;
  throw ConfigError("axis: expected one of K, N, M, got '" + s + "'");
}

namespace {

FsParams point_params(const FsParams& base, SweepAxis axis, int value) {
  FsParams p = base;
  switch (axis) {
    case SweepAxis::K: p.K = value; break;
    case SweepAxis::N: p.N = value; break;
    case SweepAxis::M: p.M = value; break;
  }
  return p;
}

ErrorRecord run_point(const FsParams& params, const SweepSetup& setup, const ReferenceSpectrum& reference) {
  try {
    params.validate();
    const FeshbachSchurOperator op(params, setup.potential);
    const auto fp = solve_fixed_point(op, setup.strategy, setup.options);
    return compute_errors(fp, params, setup.potential, reference, setup.context);
  } catch (const std::exception& e) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ErrorRecord rec;
    rec.params = params;
    rec.i = setup.context.i;
    rec.strategy = setup.strategy.label();
    rec.t = setup.context.t;
    rec.s = setup.context.s;
    rec.lambda_sigma = nan;
    rec.err_val = nan;
    rec.err_vec = nan;
    rec.err_vec_coarse_s = nan;
    rec.epsilon_bound = epsilon_bound(params, setup.potential.period(), setup.context.norm_v_r);
    rec.converged = false;
    rec.failure = e.what();
    return rec;
  }
}

}  // namespace

std::vector<ErrorRecord> sweep(SweepAxis axis, std::span<const int> grid, const SweepSetup& setup,
                               const ReferenceSpectrum& reference) {
  std::vector<ErrorRecord> out(grid.size());
  const auto n = grid.size();
  const auto workers = static_cast<std::size_t>(std::clamp<int>(setup.jobs, 1, 64));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < n; k = next++) {
      out[k] = run_point(point_params(setup.base, axis, grid[k]), setup, reference);
    }
  };
  if (workers == 1 || n < 2) {
    work();
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(work);
  pool.clear();
  return out;
}

}  // namespace fsm
