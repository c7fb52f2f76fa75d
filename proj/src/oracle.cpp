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

#include "retroq/oracle.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

void check_cap(const HilbertFactorization& f) {
  double log2_dim = 0.0;
  for (auto d : f.factor_dims) log2_dim += std::log2(static_cast<double>(d));
  if (log2_dim > std::log2(static_cast<double>(kOracleDimCap)) + 1e-9) {
    throw DimensionError("oracle: global dimension exceeds the cap of " +
                         std::to_string(kOracleDimCap));
  }
}

void check_record(const DiscreteModel& dm, const DiscreteRecord& rec,
                  const char* who) {
  if (rec.outcomes.size() != static_cast<std::size_t>(dm.n_steps)) {
    throw DimensionError(std::string(who) + ": record length mismatch");
  }
  for (auto o : rec.outcomes) {
    if (o >= dm.step_outcomes.size()) {
      throw DimensionError(std::string(who) + ": outcome index out of range");
    }
  }
  if (!rec.intervention_outcomes.empty() &&
      rec.intervention_outcomes.size() != dm.interventions.size()) {
    throw DimensionError(std::string(who) +
                         ": need one revealed outcome per intervention");
  }
}

void check_sites(const DiscreteModel& dm) {
  for (std::size_t k = 0; k < dm.interventions.size(); ++k) {
    const auto s = dm.interventions[k].step;
    if (s < 1 || s > dm.n_steps - 1) {
      throw DimensionError("oracle: intervention site off the step grid");
    }
    if (k > 0 && dm.interventions[k - 1].step >= s) {
      throw DimensionError("oracle: intervention sites must increase");
    }
  }
}

// Extract the unit vector of a rank one projector.
CVector projector_vector(const CMatrix& p, const char* who) {
  if (std::abs(p.trace().real() - 1.0) > 1e-9) {
    throw DimensionError(std::string(who) +
                         ": readout projector must be rank one");
  }
  Eigen::Index best = 0;
  double best_norm = -1.0;
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    const double nn = p.col(c).norm();
    if (nn > best_norm) {
      best_norm = nn;
      best = c;
    }
  }
  CVector v = p.col(best);
  return v / v.norm();
}

std::vector<std::size_t> revealed_indices(const DiscreteModel& dm,
                                          const DiscreteRecord& rec) {
  std::vector<std::size_t> ms;
  for (std::size_t k = 0; k < dm.interventions.size(); ++k) {
    ms.push_back(
        outcome_index(dm.interventions[k].spec, rec.intervention_outcomes[k]));
  }
  return ms;
}

// The record projector has rank system_dim * prod(probe_dims) because every
// readout projector is rank one. Compressing the global state through the
// corresponding isometry leaves the unnormalized conditional state on
// system (x) probes, which is all any conditioning query needs.
CMatrix compressed_conditional(const DiscreteModel& dm,
                               const DiscreteRecord& rec,
                               const CMatrix& global_state) {
  const auto d = dm.system_dim;
  const auto a = dm.ancilla_dim;
  Eigen::Index q = 1;
  for (const auto& site : dm.interventions) q *= site.spec.probe_dim;
  Eigen::Index an = 1;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) an *= a;

  std::vector<CVector> phis;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    phis.push_back(projector_vector(
        dm.step_outcomes[rec.outcomes[i]].projector, "oracle conditioning"));
  }

  CMatrix v = CMatrix::Zero(global_state.rows(), d * q);
  for (Eigen::Index s = 0; s < d; ++s) {
    for (Eigen::Index af = 0; af < an; ++af) {
      complexd amp = 1.0;
      Eigen::Index rest = af;
      for (Eigen::Index i = dm.n_steps - 1; i >= 0; --i) {
        amp *= phis[i](rest % a);
        rest /= a;
      }
      if (amp == complexd(0.0, 0.0)) continue;
      for (Eigen::Index p = 0; p < q; ++p) {
        v((s * an + af) * q + p, s * q + p) = amp;
      }
    }
  }
  return v.adjoint() * global_state * v;
}

// Projector on one tuple of probe outcomes in the compressed
// system (x) probes space.
CMatrix small_tuple_projector(const DiscreteModel& dm,
                              const std::vector<std::size_t>& ms) {
  std::vector<CMatrix> chain;
  chain.push_back(identity(dm.system_dim));
  for (std::size_t k = 0; k < dm.interventions.size(); ++k) {
    chain.push_back(dm.interventions[k].spec.outcomes[ms[k]].projector);
  }
  return tensor_chain(chain);
}

}  // namespace

DiscreteModel make_collision_model(const OpenSystemModel& model,
                                   const CMatrix& rho0, double dt,
                                   Eigen::Index n_steps,
                                   std::vector<InterventionSite> interventions) {
  const auto nc = model.n_channels();
  if (nc < 1) {
    throw DimensionError("make_collision_model: need a monitored channel");
  }
  for (double eta : model.efficiencies) {
    if (eta != 1.0) {
      throw DimensionError(
          "make_collision_model: only unit efficiency channels are exact");
    }
  }
  DiscreteModel dm;
  dm.system_dim = model.dim;
  dm.ancilla_dim = Eigen::Index(1) << nc;
  dm.n_steps = n_steps;
  dm.dt = dt;
  dm.initial_state = rho0;
  dm.interventions = std::move(interventions);
  check_sites(dm);

  // One qubit per channel inside the step ancilla.
  HilbertFactorization anc;
  anc.factor_dims.assign(static_cast<std::size_t>(nc), 2);
  HilbertFactorization joint;
  joint.factor_dims.push_back(model.dim);
  for (Eigen::Index k = 0; k < nc; ++k) joint.factor_dims.push_back(2);

  CMatrix gen = complexd(0.0, -1.0) * dt *
                embed_operator(model.hamiltonian, joint, {0});
  const double s = std::sqrt(dt);
  for (Eigen::Index k = 0; k < nc; ++k) {
    const int slot = static_cast<int>(1 + k);
    gen += s * embed_operator(tensor_product(model.couplings[k], sigma_plus()),
                              joint, {0, slot});
    gen -= s * embed_operator(
                   tensor_product(CMatrix(model.couplings[k].adjoint()),
                                  sigma_minus()),
                   joint, {0, slot});
  }
  dm.step_unitary = gen.exp();
  dm.ancilla_init = basis_ket(0, dm.ancilla_dim);

  // +/- readout of every qubit; outcome bit 0 means +.
  const CVector plus = (basis_ket(0, 2) + basis_ket(1, 2)) / std::sqrt(2.0);
  const CVector minus = (basis_ket(0, 2) - basis_ket(1, 2)) / std::sqrt(2.0);
  const std::size_t n_out = std::size_t(1) << nc;
  for (std::size_t o = 0; o < n_out; ++o) {
    std::vector<CMatrix> chain;
    std::string label;
    Eigen::VectorXd signal(nc);
    for (Eigen::Index k = 0; k < nc; ++k) {
      const bool bit = (o >> (nc - 1 - k)) & 1u;
      chain.push_back(projector(bit ? minus : plus));
      label += bit ? '-' : '+';
      signal(k) = (bit ? -1.0 : 1.0) * s;
    }
    dm.step_outcomes.push_back({label, tensor_chain(chain)});
    dm.outcome_signals.push_back(signal);
  }
  return dm;
}

HilbertFactorization global_factorization(const DiscreteModel& dm) {
  HilbertFactorization f;
  f.factor_dims.push_back(dm.system_dim);
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    f.factor_dims.push_back(dm.ancilla_dim);
  }
  for (const auto& site : dm.interventions) {
    f.factor_dims.push_back(site.spec.probe_dim);
  }
  return f;
}

CMatrix global_unitary(const DiscreteModel& dm) {
  check_sites(dm);
  const auto f = global_factorization(dm);
  check_cap(f);
  const auto d = f.total_dim();
  CMatrix w = CMatrix::Identity(d, d);
  std::size_t next_site = 0;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    while (next_site < dm.interventions.size() &&
           dm.interventions[next_site].step == i) {
      const int probe_slot =
          static_cast<int>(1 + dm.n_steps + next_site);
      w = embed_operator(dm.interventions[next_site].spec.coupling, f,
                         {0, probe_slot}) *
          w;
      ++next_site;
    }
    w = embed_operator(dm.step_unitary, f, {0, static_cast<int>(1 + i)}) * w;
  }
  return w;
}

CMatrix build_global_state(const DiscreteModel& dm) {
  const auto f = global_factorization(dm);
  check_cap(f);
  std::vector<CMatrix> chain;
  chain.push_back(dm.initial_state);
  const CMatrix anc = dm.ancilla_init * dm.ancilla_init.adjoint();
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) chain.push_back(anc);
  for (const auto& site : dm.interventions) {
    chain.push_back(site.spec.probe_state);
  }
  const CMatrix init = tensor_chain(chain);
  const CMatrix w = global_unitary(dm);
  return w * init * w.adjoint();
}

double record_probability(const DiscreteModel& dm, const DiscreteRecord& rec,
                          const CMatrix& global_state) {
  check_record(dm, rec, "record_probability");
  const CMatrix sigma = compressed_conditional(dm, rec, global_state);
  if (rec.intervention_outcomes.empty() || dm.interventions.empty()) {
    return std::max(sigma.trace().real(), 0.0);
  }
  const CMatrix proj = small_tuple_projector(dm, revealed_indices(dm, rec));
  return std::max(trace_of_product(sigma, proj).real(), 0.0);
}

double record_probability(const DiscreteModel& dm, const DiscreteRecord& rec) {
  return record_probability(dm, rec, build_global_state(dm));
}

std::vector<double> exact_conditional_probabilities(
    const DiscreteModel& dm, const DiscreteRecord& rec,
    const CMatrix& global_state) {
  check_record(dm, rec, "exact_conditional_probabilities");
  if (dm.interventions.empty()) {
    throw DimensionError(
        "exact_conditional_probabilities: no interventions to condition on");
  }
  const CMatrix sigma = compressed_conditional(dm, rec, global_state);

  const auto r = dm.interventions.size();
  std::vector<std::size_t> counts(r), stride(r, 1);
  for (std::size_t k = 0; k < r; ++k) {
    counts[k] = dm.interventions[k].spec.outcomes.size();
  }
  for (int k = static_cast<int>(r) - 2; k >= 0; --k) {
    stride[k] = stride[k + 1] * counts[k + 1];
  }
  const std::size_t n_tuples = stride[0] * counts[0];

  std::vector<double> weights(n_tuples);
  double total = 0.0;
  std::vector<std::size_t> ms(r);
  for (std::size_t flat = 0; flat < n_tuples; ++flat) {
    for (std::size_t k = 0; k < r; ++k) ms[k] = (flat / stride[k]) % counts[k];
    const double w = std::max(
        trace_of_product(sigma, small_tuple_projector(dm, ms)).real(), 0.0);
    weights[flat] = w;
    total += w;
  }
  if (!(total > 0.0)) {
    throw ZeroProbabilityError(
        "exact_conditional_probabilities: record has zero probability");
  }
  for (auto& w : weights) w /= total;
  return weights;
}

std::vector<double> exact_conditional_probabilities(const DiscreteModel& dm,
                                                    const DiscreteRecord& rec) {
  return exact_conditional_probabilities(dm, rec, build_global_state(dm));
}

CMatrix exact_conditional_state(const DiscreteModel& dm,
                                const DiscreteRecord& rec,
                                const CMatrix& global_state) {
  check_record(dm, rec, "exact_conditional_state");
  if (!dm.interventions.empty() && rec.intervention_outcomes.empty()) {
    throw DimensionError(
        "exact_conditional_state: intervention outcomes must be revealed");
  }
  CMatrix sigma = compressed_conditional(dm, rec, global_state);
  HilbertFactorization small;
  small.factor_dims.push_back(dm.system_dim);
  for (const auto& site : dm.interventions) {
    small.factor_dims.push_back(site.spec.probe_dim);
  }
  if (!dm.interventions.empty()) {
    const CMatrix proj = small_tuple_projector(dm, revealed_indices(dm, rec));
    sigma = proj * sigma * proj;
  }
  const double p = sigma.trace().real();
  if (!(p > 0.0)) {
    throw ZeroProbabilityError(
        "exact_conditional_state: record has zero probability");
  }
  return partial_trace(sigma, small, {0}) / p;
}

CMatrix exact_conditional_state(const DiscreteModel& dm,
                                const DiscreteRecord& rec) {
  return exact_conditional_state(dm, rec, build_global_state(dm));
}

std::vector<CMatrix> step_kraus(const DiscreteModel& dm) {
  const auto d = dm.system_dim;
  const auto a = dm.ancilla_dim;
  std::vector<CMatrix> out;
  for (const auto& oc : dm.step_outcomes) {
    const CVector phi = projector_vector(oc.projector, "step_kraus");
    CMatrix k = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        complexd acc = 0.0;
        for (Eigen::Index x = 0; x < a; ++x) {
          for (Eigen::Index y = 0; y < a; ++y) {
            acc += std::conj(phi(x)) * dm.step_unitary(i * a + x, j * a + y) *
                   dm.ancilla_init(y);
          }
        }
        k(i, j) = acc;
      }
    }
    out.push_back(std::move(k));
  }
  return out;
}

CMatrix kraus_filter(const DiscreteModel& dm, const DiscreteRecord& rec) {
  check_record(dm, rec, "kraus_filter");
  const auto kraus = step_kraus(dm);
  CMatrix rho = dm.initial_state;
  std::size_t next_site = 0;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    while (next_site < dm.interventions.size() &&
           dm.interventions[next_site].step == i) {
      const auto& iv = dm.interventions[next_site].spec;
      if (rec.intervention_outcomes.empty()) {
        rho = marginal_update(iv, rho);
      } else {
        rho = conditioned_update(
            iv, rho, outcome_index(iv, rec.intervention_outcomes[next_site]));
      }
      ++next_site;
    }
    const auto& k = kraus[rec.outcomes[i]];
    CMatrix next = k * rho * k.adjoint();
    const double p = next.trace().real();
    if (!(p > 0.0)) {
      throw ZeroProbabilityError("kraus_filter: record has zero probability");
    }
    rho = hermitize(next / p);
  }
  return rho;
}

PropagatorSequence collision_propagators(const DiscreteModel& dm,
                                         const DiscreteRecord& rec) {
  check_record(dm, rec, "collision_propagators");
  const auto kraus = step_kraus(dm);
  PropagatorSequence seq;
  seq.dt = dm.dt;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    seq.factors.push_back(kraus[rec.outcomes[i]]);
  }
  return seq;
}

MeasurementRecord to_measurement_record(const DiscreteModel& dm,
                                        const DiscreteRecord& rec) {
  check_record(dm, rec, "to_measurement_record");
  if (dm.outcome_signals.size() != dm.step_outcomes.size()) {
    throw DimensionError(
        "to_measurement_record: model carries no detector signals");
  }
  const auto nc = dm.outcome_signals.front().size();
  MeasurementRecord record;
  record.dt = dm.dt;
  record.increments.resize(nc, dm.n_steps);
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    record.increments.col(i) = dm.outcome_signals[rec.outcomes[i]];
  }
  return record;
}

double check_commutation(const DiscreteModel& dm) {
  check_sites(dm);
  const auto f = global_factorization(dm);
  check_cap(f);
  const auto d = f.total_dim();

  // Chronological chain with the running prefix applied to each observable
  // at its own time: observables of measured slots, pushed back to time
  // zero, must commute pairwise.
  CMatrix prefix = CMatrix::Identity(d, d);
  std::vector<CMatrix> conjugated;
  std::size_t next_site = 0;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    while (next_site < dm.interventions.size() &&
           dm.interventions[next_site].step == i) {
      const auto& iv = dm.interventions[next_site].spec;
      const int slot = static_cast<int>(1 + dm.n_steps + next_site);
      prefix = embed_operator(iv.coupling, f, {0, slot}) * prefix;
      CMatrix obs = CMatrix::Zero(iv.probe_dim, iv.probe_dim);
      for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
        obs += static_cast<double>(m + 1) * iv.outcomes[m].projector;
      }
      conjugated.push_back(prefix.adjoint() * embed_operator(obs, f, {slot}) *
                           prefix);
      ++next_site;
    }
    prefix = embed_operator(dm.step_unitary, f, {0, static_cast<int>(1 + i)}) *
             prefix;
    CMatrix obs = CMatrix::Zero(dm.ancilla_dim, dm.ancilla_dim);
    for (std::size_t o = 0; o < dm.step_outcomes.size(); ++o) {
      obs += static_cast<double>(o + 1) * dm.step_outcomes[o].projector;
    }
    conjugated.push_back(
        prefix.adjoint() *
        embed_operator(obs, f, {static_cast<int>(1 + i)}) * prefix);
  }

  double worst = 0.0;
  for (std::size_t a = 0; a < conjugated.size(); ++a) {
    for (std::size_t b = a + 1; b < conjugated.size(); ++b) {
      const CMatrix comm =
          conjugated[a] * conjugated[b] - conjugated[b] * conjugated[a];
      worst = std::max(worst, comm.norm());
    }
  }
  return worst;
}

DiscreteRecord sample_discrete_record(const DiscreteModel& dm,
                                      RandomStream& rng) {
  const auto kraus = step_kraus(dm);
  DiscreteRecord rec;
  rec.outcomes.resize(dm.n_steps);
  rec.intervention_outcomes.resize(dm.interventions.size());
  CMatrix rho = dm.initial_state;
  std::size_t next_site = 0;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    while (next_site < dm.interventions.size() &&
           dm.interventions[next_site].step == i) {
      const auto& iv = dm.interventions[next_site].spec;
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
      rec.intervention_outcomes[next_site] = iv.outcomes[picked].label;
      ++next_site;
    }
    const double u = rng.uniform01();
    double cum = 0.0;
    std::size_t picked = kraus.size() - 1;
    for (std::size_t o = 0; o < kraus.size(); ++o) {
      cum += (kraus[o] * rho * kraus[o].adjoint()).trace().real();
      if (u <= cum) {
        picked = o;
        break;
      }
    }
    const auto& k = kraus[picked];
    CMatrix next = k * rho * k.adjoint();
    rho = hermitize(next / next.trace().real());
    rec.outcomes[i] = picked;
  }
  return rec;
}

std::size_t n_discrete_records(const DiscreteModel& dm) {
  std::size_t n = 1;
  for (Eigen::Index i = 0; i < dm.n_steps; ++i) {
    n *= dm.step_outcomes.size();
  }
  return n;
}

DiscreteRecord decode_record(const DiscreteModel& dm, std::size_t flat) {
  if (flat >= n_discrete_records(dm)) {
    throw DimensionError("decode_record: record index out of range");
  }
  DiscreteRecord rec;
  rec.outcomes.resize(dm.n_steps);
  const std::size_t base = dm.step_outcomes.size();
  for (Eigen::Index i = dm.n_steps - 1; i >= 0; --i) {
    rec.outcomes[i] = flat % base;
    flat /= base;
  }
  return rec;
}

}  // namespace retroq
