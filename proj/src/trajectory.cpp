// Copyright 2026 The Retroq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "retroq/trajectory.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "retroq/errors.hpp"
#include "retroq/filter.hpp"

namespace retroq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_index) {
  const std::uint64_t mixed =
      splitmix64(splitmix64(seed) ^ splitmix64(stream_index + 0x51ed270b7a4cULL));
  engine_.seed(mixed);
}

double RandomStream::normal() { return gauss_(engine_); }

double RandomStream::uniform01() { return unit_(engine_); }

double RandomStream::gaussian_increment(double dt) {
  return normal() * std::sqrt(dt);
}

RandomStream derive_rng(std::uint64_t seed, std::uint64_t stream_index) {
  return RandomStream(seed, stream_index);
}

TrajectoryResult simulate(const ExperimentSpec& spec,
                          const SimulateOptions& options) {
  validate_or_throw(spec);
  const double dt = spec.dt;
  const Eigen::Index n = spec.n_steps();
  const Eigen::Index nc = spec.model.n_channels();
  const double sqrt_dt = std::sqrt(dt);
  RandomStream rng = derive_rng(spec.seed, options.trajectory_index);

  std::vector<std::pair<Eigen::Index, std::size_t>> at_step;
  for (std::size_t i = 0; i < spec.interventions.size(); ++i) {
    at_step.emplace_back(spec.grid_step(spec.interventions[i]), i);
  }

  TrajectoryResult out;
  out.record.dt = dt;
  out.record.increments.resize(nc, n);
  out.intervention_outcomes.resize(spec.interventions.size());

  CMatrix rho = spec.initial_state;
  if (options.store_states) {
    out.states.reserve(n + 1);
    out.states.push_back(rho);
  }

  std::size_t next_iv = 0;
  Eigen::VectorXd dY(nc);
  for (Eigen::Index i = 0; i <= n; ++i) {
    while (next_iv < at_step.size() && at_step[next_iv].first == i) {
      const std::size_t which = at_step[next_iv].second;
      const auto& iv = spec.interventions[which];
      // Born sampling of the probe readout.
      const double u = rng.uniform01();
      double cum = 0.0;
      std::size_t picked = iv.outcomes.size() - 1;
      for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
        cum += outcome_probability(iv, rho, m);
        if (u <= cum) {
          picked = m;
          break;
        }
      }
      rho = conditioned_update(iv, rho, picked);
      out.intervention_outcomes[which] = iv.outcomes[picked].label;
      if (options.store_states) out.states[i] = rho;
      ++next_iv;
    }
    if (i == n) break;

    const Eigen::VectorXd rates = signal_rates(spec.model, rho);
    for (Eigen::Index k = 0; k < nc; ++k) {
      dY(k) = rates(k) * dt + rng.normal() * sqrt_dt;
    }
    out.record.increments.col(i) = dY;

    const CMatrix g = step_factor(spec.model, dY, dt);
    CMatrix next = propagate_density(rho, g, residual_ops(spec.model, dt));
    if (!next.allFinite()) {
      throw PropagationError("simulate: state left the finite range", i);
    }
    const double p = next.trace().real();
    if (!(p > 0.0)) {
      throw PropagationError("simulate: nonpositive trace factor", i);
    }
    rho = next / p;
    const double lo = min_eigenvalue(rho);
    if (lo < -1e-8) {
      throw PropagationError("simulate: state negativity " + std::to_string(lo),
                             i);
    }
    if (options.store_states) {
      out.states.push_back(rho);
    }
  }
  if (!options.store_states) {
    out.states.push_back(rho);
  }
  return out;
}

void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers =
      static_cast<unsigned>(std::min<Eigen::Index>(n, hw));
  if (workers <= 1) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Eigen::Index> cursor{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const Eigen::Index i = cursor.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace retroq
