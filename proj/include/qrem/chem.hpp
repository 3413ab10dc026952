// Copyright 2026 The qrem-bias Authors
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

/**
 * @file
 * Trotterized UCC ansatz circuits, a VQE loop measured through readout
 * mitigation, and the time-evolution error benchmark.
 *
 * Reference states are prepared by exact X gates applied after the reset
 * noise, so every qubit carries its initialization error into the circuit.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrem/circuit.hpp"
#include "qrem/density_matrix.hpp"
#include "qrem/detail/text.hpp"
#include "qrem/error.hpp"
#include "qrem/fermion.hpp"
#include "qrem/nelder_mead.hpp"
#include "qrem/pauli.hpp"
#include "qrem/spam.hpp"

namespace qrem {

struct AnsatzSpec {
  std::size_t n_qubits = 0;
  std::size_t n_electrons = 0;
  std::vector<FermionExcitation> excitations;
  std::size_t trotter_steps = 1;

  std::size_t parameter_count() const {
    std::size_t p = 0;
    for (const auto& e : excitations) p = std::max(p, e.slot + 1);
    return p;
  }

  void validate() const {
    if (n_electrons > n_qubits) throw DomainError("AnsatzSpec: more electrons than qubits");
    if (trotter_steps < 1) throw DomainError("AnsatzSpec: trotter_steps must be >= 1");
    std::vector<bool> used(parameter_count(), false);
    for (const auto& e : excitations) {
      e.validate();
      if (e.max_orbital() >= n_qubits) throw DomainError("AnsatzSpec: orbital out of range");
      used[e.slot] = true;
    }
    for (bool u : used)
      if (!u) throw DomainError("AnsatzSpec: parameter slots must be contiguous from 0");
  }
};

/// Header `n_qubits n_electrons`, then `S p q [slot]` or `D p q r s [slot]`
/// lines. A missing slot opens a new one.
inline AnsatzSpec parse_ansatz(std::string_view text) {
  const auto lines = detail::tokenize_lines(text);
  if (lines.empty()) throw ParseError(0, "empty ansatz file");
  AnsatzSpec spec;
  auto index = [](const detail::Line& line, std::string_view tok) {
    const auto v = detail::parse_uint(tok);
    if (!v) throw ParseError(line.number, "expected a non-negative integer, got '" + std::string(tok) + "'");
    return static_cast<std::size_t>(*v);
  };
  const auto& head = lines.front();
  if (head.tokens.size() != 2) throw ParseError(head.number, "header must be 'n_qubits n_electrons'");
  spec.n_qubits = index(head, head.tokens[0]);
  spec.n_electrons = index(head, head.tokens[1]);
  std::size_t next_slot = 0;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& line = lines[l];
    const auto& tok = line.tokens;
    std::size_t arity = 0;
    if (tok[0] == "S") arity = 2;
    else if (tok[0] == "D") arity = 4;
    else throw ParseError(line.number, "expected 'S' or 'D', got '" + std::string(tok[0]) + "'");
    if (tok.size() != arity + 1 && tok.size() != arity + 2)
      throw ParseError(line.number, "wrong number of fields for " + std::string(tok[0]));
    std::array<std::size_t, 4> o{};
    for (std::size_t k = 0; k < arity; ++k) o[k] = index(line, tok[k + 1]);
    const std::size_t slot = tok.size() == arity + 2 ? index(line, tok.back()) : next_slot;
    next_slot = std::max(next_slot, slot + 1);
    try {
      spec.excitations.push_back(arity == 2
                                     ? FermionExcitation::single(o[0], o[1], slot)
                                     : FermionExcitation::double_(o[0], o[1], o[2], o[3], slot));
    } catch (const DomainError& e) {
      throw ParseError(line.number, e.what());
    }
  }
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw ParseError(0, e.what());
  }
  return spec;
}

struct UccsdOptions {
  bool doubles = true;
  /// Orbitals 2k and 2k+1 are the up and down spin of spatial orbital k;
  /// excitations must conserve spin. When false, orbitals are spinless.
  bool spin_orbitals = true;
  /// Spin-flipped partner excitations share one parameter slot.
  bool share_spin_partners = false;
};

/// Occupied orbitals are 0..n_electrons-1. Singles are listed before
/// doubles, each family in lexicographic (virtual, occupied) order.
inline AnsatzSpec generate_uccsd(std::size_t n_qubits, std::size_t n_electrons,
                                 const UccsdOptions& opt = {}) {
  if (n_electrons > n_qubits) throw DomainError("generate_uccsd: more electrons than qubits");
  AnsatzSpec spec{n_qubits, n_electrons, {}, 1};
  auto spin = [&](std::size_t p) { return opt.spin_orbitals ? p % 2 : 0; };
  auto flip = [&](std::size_t p) { return opt.spin_orbitals ? p ^ 1U : p; };
  std::map<std::array<std::size_t, 4>, std::size_t> slot_of;
  std::size_t next = 0;
  auto slot_for = [&](std::array<std::size_t, 4> key, std::array<std::size_t, 4> partner) {
    if (opt.share_spin_partners && opt.spin_orbitals) {
      if (auto it = slot_of.find(partner); it != slot_of.end()) return it->second;
    }
    slot_of[key] = next;
    return next++;
  };
  for (std::size_t a = n_electrons; a < n_qubits; ++a)
    for (std::size_t i = 0; i < n_electrons; ++i) {
      if (spin(a) != spin(i)) continue;
      const std::size_t s = slot_for({a, i, 0, 0}, {flip(a), flip(i), 0, 0});
      spec.excitations.push_back(FermionExcitation::single(a, i, s));
    }
  if (opt.doubles) {
    auto ordered = [](std::size_t x, std::size_t y) {
      return x > y ? std::array<std::size_t, 2>{x, y} : std::array<std::size_t, 2>{y, x};
    };
    for (std::size_t a = n_electrons + 1; a < n_qubits; ++a)
      for (std::size_t b = n_electrons; b < a; ++b)
        for (std::size_t i = 1; i < n_electrons; ++i)
          for (std::size_t j = 0; j < i; ++j) {
            if (spin(a) + spin(b) != spin(i) + spin(j)) continue;
            const auto v = ordered(flip(a), flip(b)), o = ordered(flip(i), flip(j));
            const std::size_t s = slot_for({a, b, i, j}, {v[0], v[1], o[0], o[1]});
            spec.excitations.push_back(FermionExcitation::double_(a, b, i, j, s));
          }
  }
  return spec;
}

/// One Pauli exponential exp(i angle P) of the ansatz; angle = scale * theta[slot].
struct AnsatzRotation {
  PauliString string;
  std::size_t slot;
  double scale;
};

/// trotter_steps repetitions of prod_k exp(theta_slot(k) / N * G_k), G_k the
/// generator of excitation k, flattened into Pauli exponentials in circuit
/// order.
inline std::vector<AnsatzRotation> uccsd_rotations(const AnsatzSpec& spec) {
  spec.validate();
  const double inv_n = 1.0 / static_cast<double>(spec.trotter_steps);
  std::vector<PauliSumOperator> generators;
  for (const auto& e : spec.excitations)
    generators.push_back(jordan_wigner_excitation(e, spec.n_qubits));
  std::vector<AnsatzRotation> out;
  for (std::size_t rep = 0; rep < spec.trotter_steps; ++rep)
    for (std::size_t k = 0; k < spec.excitations.size(); ++k)
      for (const auto& term : generators[k].terms()) {
        // term = c (i P), so exp(theta c i P) = exp(i (theta c) P).
        out.push_back({term.string.with_phase(Phase::kPlusOne), spec.excitations[k].slot,
                       term.coefficient * inv_n});
      }
  return out;
}

/// Ansatz circuit with slot-bound (initially zero) angles.
inline Circuit uccsd_template(const AnsatzSpec& spec) {
  Circuit c(spec.n_qubits);
  for (const auto& r : uccsd_rotations(spec)) append_exp_pauli(c, r.string, 0.0, r.slot, r.scale);
  return c;
}

/// Applies the ansatz rotations to `rho` without compiling to gates.
inline DensityMatrix apply_ansatz(DensityMatrix rho, const std::vector<AnsatzRotation>& rotations,
                                  std::span<const double> theta) {
  for (const auto& r : rotations) {
    if (r.slot >= theta.size()) throw DimensionError("apply_ansatz: parameter count mismatch");
    rho.apply_pauli_rotation(r.string, r.scale * theta[r.slot]);
  }
  return rho;
}

inline Circuit uccsd_circuit(const AnsatzSpec& spec, std::span<const double> theta) {
  if (theta.size() != spec.parameter_count())
    throw DimensionError("uccsd_circuit: parameter count mismatch");
  Circuit c = uccsd_template(spec);
  c.bind(theta);
  return c;
}

/// Basis index with the n_electrons lowest qubits set.
inline std::uint64_t hf_state(std::size_t n_qubits, std::size_t n_electrons) {
  if (n_electrons > n_qubits) throw DomainError("hf_state: more electrons than qubits");
  if (n_qubits > 63) throw DomainError("hf_state: too many qubits");
  return (std::uint64_t{1} << n_electrons) - 1;
}

inline Circuit hf_prep_circuit(std::size_t n_qubits, std::size_t n_electrons) {
  hf_state(n_qubits, n_electrons);
  Circuit c(n_qubits);
  for (std::size_t i = 0; i < n_electrons; ++i) c.x(i);
  return c;
}

/// Reset noise from `spam`, then the X-gate reference preparation.
inline DensityMatrix noisy_reference_state(const SpamModel& spam, std::size_t n_electrons) {
  const std::size_t n = spam.n_qubits();
  return apply_circuit(noisy_initial_state(n, spam.q_list()), hf_prep_circuit(n, n_electrons));
}

/// <HF|H|HF> evaluated exactly.
inline double hf_energy(const PauliSumOperator& h, std::size_t n_electrons) {
  return expectation(DensityMatrix::basis(h.n_qubits(), hf_state(h.n_qubits(), n_electrons)), h);
}

enum class VqePipeline {
  kMitigated,  ///< reset noise and readout noise, corrected per Pauli term
  kClean,      ///< no noise, exact traces
};

struct VqeConfig {
  NelderMeadConfig optimizer{};
  VqePipeline pipeline = VqePipeline::kMitigated;
  std::optional<double> gate_noise;
};

struct VqeResult {
  std::vector<double> theta;
  double energy = 0.0;
  std::vector<double> history;
  std::size_t evaluations = 0;
  bool converged = false;
  SpamModel spam;
  VqeConfig config;
};

namespace detail {

inline void check_chem_sizes(const PauliSumOperator& h, std::size_t n, const SpamModel& spam) {
  if (h.n_qubits() != n || spam.n_qubits() != n)
    throw DimensionError("Hamiltonian, ansatz and SPAM model sizes differ");
  if (n > kMaxDenseQubits) throw DomainError("dense simulation limited to 12 qubits");
  if (!h.is_hermitian()) throw DomainError("Hamiltonian must be Hermitian");
}

}  // namespace detail

/// Energy of the ansatz at `theta` through the configured pipeline.
inline double vqe_energy(const PauliSumOperator& h, const AnsatzSpec& spec, const SpamModel& spam,
                         std::span<const double> theta, const VqeConfig& cfg = {}) {
  detail::check_chem_sizes(h, spec.n_qubits, spam);
  const Circuit ansatz = uccsd_circuit(spec, theta);
  if (cfg.pipeline == VqePipeline::kClean) {
    const auto rho = apply_circuit(
        DensityMatrix::basis(spec.n_qubits, hf_state(spec.n_qubits, spec.n_electrons)), ansatz);
    return expectation(rho, h);
  }
  const auto rho =
      apply_circuit(noisy_reference_state(spam, spec.n_electrons), ansatz, cfg.gate_noise);
  return qrem_energy(rho, h, spam);
}

/// Minimizes the ansatz energy from theta = 0 with Nelder-Mead.
inline VqeResult vqe_optimize(const PauliSumOperator& h, const AnsatzSpec& spec,
                              const SpamModel& spam, const VqeConfig& cfg = {}) {
  detail::check_chem_sizes(h, spec.n_qubits, spam);
  spec.validate();
  const std::size_t p = spec.parameter_count();
  const DensityMatrix start =
      cfg.pipeline == VqePipeline::kClean
          ? DensityMatrix::basis(spec.n_qubits, hf_state(spec.n_qubits, spec.n_electrons))
          : noisy_reference_state(spam, spec.n_electrons);
  // Gate noise needs the compiled circuit; otherwise the fused rotations give
  // the same state much faster.
  Circuit ansatz = uccsd_template(spec);
  const auto rotations = uccsd_rotations(spec);
  auto state = [&](std::span<const double> theta) {
    if (cfg.gate_noise) {
      ansatz.bind(theta);
      return apply_circuit(start, ansatz, cfg.gate_noise);
    }
    return apply_ansatz(start, rotations, theta);
  };
  auto objective = [&](std::span<const double> theta) {
    if (cfg.pipeline == VqePipeline::kClean) return expectation(state(theta), h);
    return qrem_energy(state(theta), h, spam);
  };
  const auto nm = nelder_mead(objective, std::vector<double>(p, 0.0), cfg.optimizer);
  return {nm.x, nm.value, nm.history, nm.evaluations, nm.converged, spam, cfg};
}

struct QteResult {
  std::size_t n_qubits = 0;
  std::size_t n_s = 0;
  double t = 0.0;
  double q = 0.0;  ///< mean initialization rate
  double e0 = 0.0;
  double e_t = 0.0;
  double e_t_trotter = 0.0;
  double trotter_error = 0.0;  ///< e_t_trotter - e_t
  double total_error = 0.0;    ///< e_t_trotter - e0
};

/// E0 is the noiseless reference energy. E_t (exact propagator) and the
/// Trotterized E~_t both start from the noisy reference state and are read
/// out through the mitigated measurement path.
inline QteResult qte_benchmark(const PauliSumOperator& h, std::size_t n_electrons, double t,
                               std::size_t n_s, const SpamModel& spam) {
  const std::size_t n = h.n_qubits();
  detail::check_chem_sizes(h, n, spam);
  const DensityMatrix rho0 = noisy_reference_state(spam, n_electrons);
  QteResult r;
  r.n_qubits = n;
  r.n_s = n_s;
  r.t = t;
  r.q = detail::mean(spam.q_list());
  r.e0 = hf_energy(h, n_electrons);
  r.e_t = qrem_energy(exact_evolution(h, t, rho0), h, spam);
  r.e_t_trotter = qrem_energy(apply_circuit(rho0, trotterize(h, t, n_s)), h, spam);
  r.trotter_error = r.e_t_trotter - r.e_t;
  r.total_error = r.e_t_trotter - r.e0;
  return r;
}

/// Open transverse-field Ising chain H = -J sum X_i X_{i+1} - h sum Z_i.
inline PauliSumOperator tfim_chain(std::size_t n, double coupling = 1.0, double field = 1.0) {
  if (n < 2) throw DomainError("tfim_chain: need at least 2 sites");
  std::vector<PauliSumOperator::Term> terms;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    QubitMask x;
    x.set(i);
    x.set(i + 1);
    terms.push_back({-coupling, PauliString(n, x, QubitMask{})});
  }
  for (std::size_t i = 0; i < n; ++i) terms.push_back({-field, PauliString::single(n, i, 'Z')});
  return PauliSumOperator(n, terms);
}

/// Half filling with every occupied-to-virtual single on spinless orbitals.
inline AnsatzSpec tfim_ansatz(std::size_t n) {
  return generate_uccsd(n, n / 2, {.doubles = false, .spin_orbitals = false});
}

}  // namespace qrem
