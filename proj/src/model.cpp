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

#include "retroq/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "retroq/errors.hpp"

namespace retroq {

namespace {

// V (rho (x) rho_probe) V^dag for one intervention.
CMatrix coupled_state(const InterventionSpec& iv, const CMatrix& rho) {
  const CMatrix joint = tensor_product(rho, iv.probe_state);
  return iv.coupling * joint * iv.coupling.adjoint();
}

void require_outcome(const InterventionSpec& iv, std::size_t m,
                     const char* who) {
  if (m >= iv.outcomes.size()) {
    throw DimensionError(std::string(who) + ": outcome index " +
                         std::to_string(m) + " out of range");
  }
}

void check_state(std::vector<Violation>& out, const std::string& path,
                 const CMatrix& rho, Eigen::Index dim) {
  if (rho.rows() != dim || rho.cols() != dim) {
    out.push_back({path, "expected a " + std::to_string(dim) + "x" +
                             std::to_string(dim) + " density matrix"});
    return;
  }
  const double defect = hermiticity_defect(rho);
  if (defect > kValidationTol) {
    out.push_back({path, "not Hermitian (defect " + std::to_string(defect) + ")"});
    return;
  }
  const double lo = min_eigenvalue(rho);
  if (lo < -kValidationTol) {
    out.push_back({path, "not positive semidefinite (min eigenvalue " +
                             std::to_string(lo) + ")"});
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > kValidationTol) {
    out.push_back({path, "trace is " + std::to_string(tr) + ", expected 1"});
  }
}

}  // namespace

Eigen::Index ExperimentSpec::n_steps() const {
  return static_cast<Eigen::Index>(std::llround(horizon / dt));
}

Eigen::Index ExperimentSpec::grid_step(const InterventionSpec& iv) const {
  return static_cast<Eigen::Index>(std::llround(iv.tau / dt));
}

std::vector<Violation> validate(const ExperimentSpec& spec) {
  std::vector<Violation> out;
  const auto& mdl = spec.model;

  if (mdl.dim < 1) {
    out.push_back({"model.dim", "dimension must be at least 1"});
    return out;
  }
  if (mdl.hamiltonian.rows() != mdl.dim || mdl.hamiltonian.cols() != mdl.dim) {
    out.push_back({"model.hamiltonian", "shape does not match model.dim"});
  } else if (!is_hermitian(mdl.hamiltonian, kValidationTol)) {
    out.push_back({"model.hamiltonian",
                   "not Hermitian (defect " +
                       std::to_string(hermiticity_defect(mdl.hamiltonian)) +
                       ")"});
  }
  if (mdl.efficiencies.size() != mdl.couplings.size()) {
    out.push_back({"model.efficiencies",
                   "need one efficiency per coupling operator"});
  }
  for (std::size_t k = 0; k < mdl.couplings.size(); ++k) {
    if (mdl.couplings[k].rows() != mdl.dim ||
        mdl.couplings[k].cols() != mdl.dim) {
      out.push_back({"model.couplings[" + std::to_string(k) + "]",
                     "shape does not match model.dim"});
    }
  }
  for (std::size_t k = 0; k < mdl.efficiencies.size(); ++k) {
    const double eta = mdl.efficiencies[k];
    if (!(eta >= 0.0 && eta <= 1.0)) {
      out.push_back({"model.efficiencies[" + std::to_string(k) + "]",
                     "must lie in [0, 1], got " + std::to_string(eta)});
    }
  }

  check_state(out, "initial_state", spec.initial_state, mdl.dim);

  if (!(spec.dt > 0.0)) {
    out.push_back({"dt", "must be positive"});
  }
  if (!(spec.horizon > 0.0)) {
    out.push_back({"horizon", "must be positive"});
  }
  if (spec.dt > 0.0 && spec.horizon > 0.0) {
    const double steps = spec.horizon / spec.dt;
    if (std::abs(steps - std::llround(steps)) > 1e-9 * std::max(1.0, steps)) {
      out.push_back({"horizon", "must be an integer multiple of dt"});
    }
  }

  for (std::size_t i = 0; i < spec.interventions.size(); ++i) {
    const auto& iv = spec.interventions[i];
    const std::string base = "interventions[" + std::to_string(i) + "]";
    if (!(iv.tau > 0.0 && iv.tau < spec.horizon)) {
      out.push_back({base + ".tau", "must lie strictly inside (0, horizon)"});
    } else if (spec.dt > 0.0) {
      const double snapped = spec.grid_step(iv) * spec.dt;
      if (std::abs(snapped - iv.tau) > 1e-9 * std::max(1.0, std::abs(iv.tau))) {
        out.push_back({base + ".tau", "must sit on the dt time grid"});
      }
    }
    if (i > 0 && !(spec.interventions[i - 1].tau < iv.tau)) {
      out.push_back({base + ".tau", "times must be strictly increasing"});
    }
    if (iv.probe_dim < 1) {
      out.push_back({base + ".probe_dim", "must be at least 1"});
      continue;
    }
    check_state(out, base + ".probe_state", iv.probe_state, iv.probe_dim);
    const Eigen::Index joint = mdl.dim * iv.probe_dim;
    if (iv.coupling.rows() != joint || iv.coupling.cols() != joint) {
      out.push_back({base + ".coupling",
                     "shape does not match system (x) probe dimension"});
    } else {
      const double defect = unitarity_defect(iv.coupling);
      if (defect > kValidationTol) {
        out.push_back({base + ".coupling",
                       "not unitary (defect " + std::to_string(defect) + ")"});
      }
    }
    if (iv.outcomes.empty()) {
      out.push_back({base + ".outcomes", "at least one outcome is required"});
      continue;
    }
    std::set<std::string> labels;
    CMatrix sum = CMatrix::Zero(iv.probe_dim, iv.probe_dim);
    bool shapes_ok = true;
    for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
      const auto& oc = iv.outcomes[m];
      const std::string opath = base + ".outcomes[" + std::to_string(m) + "]";
      if (oc.label.empty()) {
        out.push_back({opath + ".label", "must be nonempty"});
      } else if (!labels.insert(oc.label).second) {
        out.push_back({opath + ".label", "duplicate label '" + oc.label + "'"});
      }
      if (oc.projector.rows() != iv.probe_dim ||
          oc.projector.cols() != iv.probe_dim) {
        out.push_back({opath + ".projector", "shape does not match probe_dim"});
        shapes_ok = false;
        continue;
      }
      if (!is_hermitian(oc.projector, kValidationTol)) {
        out.push_back({opath + ".projector", "not Hermitian"});
      }
      const double idem =
          frobenius_distance(oc.projector * oc.projector, oc.projector);
      if (idem > kValidationTol) {
        out.push_back({opath + ".projector",
                       "not idempotent (defect " + std::to_string(idem) + ")"});
      }
      sum += oc.projector;
    }
    if (shapes_ok) {
      const double res = frobenius_distance(
          sum, CMatrix::Identity(iv.probe_dim, iv.probe_dim));
      if (res > kValidationTol) {
        out.push_back({base + ".outcomes",
                       "projectors must resolve the identity (defect " +
                           std::to_string(res) + ")"});
      }
    }
  }
  return out;
}

void validate_or_throw(const ExperimentSpec& spec) {
  const auto violations = validate(spec);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "experiment description is invalid:";
  for (const auto& v : violations) {
    msg << "\n  " << v.path << ": " << v.message;
  }
  throw ValidationError(msg.str());
}

CMatrix cp_map(const InterventionSpec& iv, const CMatrix& rho, std::size_t m) {
  require_outcome(iv, m, "cp_map");
  if (rho.rows() * iv.probe_dim != iv.coupling.rows()) {
    throw DimensionError("cp_map: state does not match coupling dimension");
  }
  const CMatrix post = coupled_state(iv, rho);
  const Eigen::Index d = rho.rows();
  const Eigen::Index q = iv.probe_dim;
  const CMatrix& p = iv.outcomes[m].projector;
  // tr_probe{ post (1 (x) P_m) }, written out blockwise.
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      complexd acc = 0.0;
      for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) {
          acc += post(i * q + a, j * q + b) * p(b, a);
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

double outcome_probability(const InterventionSpec& iv, const CMatrix& rho,
                           std::size_t m) {
  return cp_map(iv, rho, m).trace().real();
}

CMatrix conditioned_update(const InterventionSpec& iv, const CMatrix& rho,
                           std::size_t m) {
  const CMatrix mapped = cp_map(iv, rho, m);
  const double p = mapped.trace().real();
  const double scale = std::abs(rho.trace().real());
  if (!(p > kZeroProbabilityTol * std::max(scale, 1e-300))) {
    throw ZeroProbabilityError("conditioned_update: outcome '" +
                               iv.outcomes[m].label +
                               "' has probability " + std::to_string(p));
  }
  return mapped / p;
}

CMatrix marginal_update(const InterventionSpec& iv, const CMatrix& rho) {
  CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
    out += cp_map(iv, rho, m);
  }
  return out;
}

CMatrix heisenberg_cp_map(const InterventionSpec& iv, const CMatrix& effect,
                          std::size_t m) {
  require_outcome(iv, m, "heisenberg_cp_map");
  const Eigen::Index d = effect.rows();
  const Eigen::Index q = iv.probe_dim;
  if (d * q != iv.coupling.rows()) {
    throw DimensionError("heisenberg_cp_map: effect does not match coupling");
  }
  const CMatrix lifted = tensor_product(effect, iv.outcomes[m].projector);
  const CMatrix a = iv.coupling.adjoint() * lifted * iv.coupling;
  // D(j, i) = sum_ab rho_probe(a, b) A((j, b), (i, a)) gives the dual map,
  // i.e. tr{Phi_m(rho) E} = tr{rho D} for every rho.
  CMatrix out = CMatrix::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      complexd acc = 0.0;
      for (Eigen::Index a0 = 0; a0 < q; ++a0) {
        for (Eigen::Index b = 0; b < q; ++b) {
          acc += iv.probe_state(a0, b) * a(j * q + b, i * q + a0);
        }
      }
      out(j, i) = acc;
    }
  }
  return out;
}

CMatrix heisenberg_marginal(const InterventionSpec& iv, const CMatrix& effect) {
  CMatrix out = CMatrix::Zero(effect.rows(), effect.cols());
  for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
    out += heisenberg_cp_map(iv, effect, m);
  }
  return out;
}

std::size_t outcome_index(const InterventionSpec& iv,
                          const std::string& label) {
  for (std::size_t m = 0; m < iv.outcomes.size(); ++m) {
    if (iv.outcomes[m].label == label) return m;
  }
  throw DimensionError("unknown outcome label '" + label + "'");
}

}  // namespace retroq
