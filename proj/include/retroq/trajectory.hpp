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

#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "retroq/model.hpp"

namespace retroq {

/// Deterministic per trajectory random stream. Streams with different
/// (seed, stream_index) pairs are independent for practical purposes.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_index);

  double normal();
  double uniform01();
  /// Gaussian increment with variance dt.
  double gaussian_increment(double dt);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

RandomStream derive_rng(std::uint64_t seed, std::uint64_t stream_index);

/// Raw detector output on the time grid: increments(k, i) = dY_k over
/// [i dt, (i+1) dt).
struct MeasurementRecord {
  double dt = 0.0;
  Eigen::MatrixXd increments;

  Eigen::Index n_channels() const { return increments.rows(); }
  Eigen::Index n_steps() const { return increments.cols(); }
  double horizon() const { return static_cast<double>(n_steps()) * dt; }
};

struct SimulateOptions {
  std::uint64_t trajectory_index = 0;
  bool store_states = false;
};

/// One sampled run of the experiment.
struct TrajectoryResult {
  MeasurementRecord record;
  /// Sampled outcome label of each intervention, in spec order.
  std::vector<std::string> intervention_outcomes;
  /// Conditional states at every grid point when store_states was set
  /// (N + 1 entries; entry j includes any probe update at t_j). Otherwise
  /// only the final state is kept.
  std::vector<CMatrix> states;

  const CMatrix& final_state() const { return states.back(); }
};

/// Sample one diffusive trajectory of the experiment: draw the Wiener noise
/// from derive_rng(spec.seed, trajectory_index), emit the detector record,
/// sample probe outcomes at intervention times by their Born weights, and
/// propagate the conditional state alongside.
TrajectoryResult simulate(const ExperimentSpec& spec,
                          const SimulateOptions& options = {});

/// Run fn(i) for i in [0, n) across hardware threads. Order of execution is
/// unspecified; fn must be safe to call concurrently for distinct i.
void parallel_for(Eigen::Index n, const std::function<void(Eigen::Index)>& fn);

}  // namespace retroq
