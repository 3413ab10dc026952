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
 * Gate-level circuits, Pauli-exponential compilation and first-order
 * Trotterization.
 *
 * exp(i theta P) is compiled into a V-shaped block: a basis change (H for X,
 * HY for Y) on each support qubit, a CNOT ladder that accumulates the parity
 * of the support onto its highest qubit, RZ(-2 theta) there, the mirrored
 * ladder and the basis change again. RZ(phi) = exp(-i phi Z / 2), so the
 * block equals exp(i theta P) exactly; identity qubits are skipped.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qrem/detail/text.hpp"
#include "qrem/error.hpp"
#include "qrem/pauli.hpp"
#include "qrem/stabilizer.hpp"

namespace qrem {

/// HY = (Z + Y) / sqrt(2); Hermitian, self-inverse, HY Y HY = Z.
enum class GateKind { kH, kHY, kX, kRZ, kCNOT, kCZ };

struct Gate {
  GateKind kind;
  std::size_t q0;          // target, or control for CNOT, or first qubit for CZ
  std::size_t q1 = 0;      // CNOT target, CZ second qubit
  double angle = 0.0;      // RZ only, radians

  bool is_two_qubit() const { return kind == GateKind::kCNOT || kind == GateKind::kCZ; }
};

/// RZ gate `gate_index` gets angle `scale * theta[slot]` on bind.
struct SlotBinding {
  std::size_t gate_index;
  double scale;
};

class Circuit {
 public:
  Circuit() = default;
  explicit Circuit(std::size_t n_qubits) : n_(n_qubits) {}

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }
  std::size_t size() const noexcept { return gates_.size(); }
  std::size_t slot_count() const noexcept { return slots_.size(); }
  const std::vector<std::vector<SlotBinding>>& slots() const noexcept { return slots_; }

  Circuit& h(std::size_t q) { return push({GateKind::kH, q}); }
  Circuit& hy(std::size_t q) { return push({GateKind::kHY, q}); }
  Circuit& x(std::size_t q) { return push({GateKind::kX, q}); }
  Circuit& rz(std::size_t q, double angle) { return push({GateKind::kRZ, q, 0, angle}); }
  Circuit& cnot(std::size_t c, std::size_t t) { return push({GateKind::kCNOT, c, t}); }
  Circuit& cz(std::size_t a, std::size_t b) { return push({GateKind::kCZ, a, b}); }

  /// Ties the most recently added gate (an RZ) to parameter `slot`.
  void bind_last(std::size_t slot, double scale) {
    if (gates_.empty() || gates_.back().kind != GateKind::kRZ)
      throw DomainError("bind_last: last gate is not RZ");
    if (slots_.size() <= slot) slots_.resize(slot + 1);
    slots_[slot].push_back({gates_.size() - 1, scale});
  }

  /// Sets every slot-driven RZ angle to scale * theta[slot].
  void bind(std::span<const double> theta) {
    if (theta.size() != slots_.size())
      throw DimensionError("bind: parameter count mismatch");
    for (std::size_t s = 0; s < slots_.size(); ++s)
      for (const SlotBinding& b : slots_[s]) gates_[b.gate_index].angle = b.scale * theta[s];
  }

  void append(const Circuit& other) {
    if (other.n_ != n_) throw DimensionError("append: qubit count mismatch");
    const std::size_t offset = gates_.size();
    gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
    if (slots_.size() < other.slots_.size()) slots_.resize(other.slots_.size());
    for (std::size_t s = 0; s < other.slots_.size(); ++s)
      for (SlotBinding b : other.slots_[s]) slots_[s].push_back({b.gate_index + offset, b.scale});
  }

  /// Debug dump: one gate per line, e.g. `H 0`, `RZ 3 -0.6`, `CNOT 1 0`.
  std::string dump() const {
    std::string out;
    for (const Gate& g : gates_) {
      switch (g.kind) {
        case GateKind::kH: out += "H " + std::to_string(g.q0); break;
        case GateKind::kHY: out += "HY " + std::to_string(g.q0); break;
        case GateKind::kX: out += "X " + std::to_string(g.q0); break;
        case GateKind::kRZ:
          out += "RZ " + std::to_string(g.q0) + " " + detail::format_double(g.angle);
          break;
        case GateKind::kCNOT:
          out += "CNOT " + std::to_string(g.q0) + " " + std::to_string(g.q1);
          break;
        case GateKind::kCZ:
          out += "CZ " + std::to_string(g.q0) + " " + std::to_string(g.q1);
          break;
      }
      out += '\n';
    }
    return out;
  }

 private:
  Circuit& push(Gate g) {
    if (g.q0 >= n_ || (g.is_two_qubit() && (g.q1 >= n_ || g.q1 == g.q0)))
      throw DomainError("Circuit: bad qubit index");
    gates_.push_back(g);
    return *this;
  }

  std::size_t n_ = 0;
  std::vector<Gate> gates_;
  std::vector<std::vector<SlotBinding>> slots_;
};

inline Circuit to_circuit(const CliffordCircuit& c) {
  Circuit out(c.n_qubits());
  for (const CliffordGate& g : c.gates()) {
    switch (g.kind) {
      case CliffordKind::kH: out.h(g.a); break;
      case CliffordKind::kX: out.x(g.a); break;
      case CliffordKind::kCZ: out.cz(g.a, g.b); break;
      case CliffordKind::kCNOT: out.cnot(g.a, g.b); break;
    }
  }
  return out;
}

/// Appends exp(i theta P) for Hermitian `p` (phase -1 negates theta). When
/// `slot` is given the RZ is bound with scale `scale` (theta is then the
/// current slot value times `scale`). Identity strings add nothing.
inline void append_exp_pauli(Circuit& c, const PauliString& p, double theta,
                             std::optional<std::size_t> slot = std::nullopt,
                             double scale = 1.0) {
  if (p.n_qubits() != c.n_qubits()) throw DimensionError("append_exp_pauli: size mismatch");
  if (!p.is_hermitian()) throw DomainError("append_exp_pauli: string must be Hermitian");
  if (p.is_identity()) return;
  const double sign = p.phase() == Phase::kMinusOne ? -1.0 : 1.0;
  const auto support = p.support_qubits();

  auto basis_change = [&] {
    for (std::size_t q : support) {
      const char op = p.op(q);
      if (op == 'X') c.h(q);
      else if (op == 'Y') c.hy(q);
    }
  };
  basis_change();
  for (std::size_t j = 0; j + 1 < support.size(); ++j) c.cnot(support[j], support[j + 1]);
  c.rz(support.back(), -2.0 * sign * theta);
  if (slot) c.bind_last(*slot, -2.0 * sign * scale);
  for (std::size_t j = support.size() - 1; j > 0; --j) c.cnot(support[j - 1], support[j]);
  basis_change();
}

/// Circuit for exp(i theta P) up to global phase.
inline Circuit exp_pauli_circuit(const PauliString& p, double theta) {
  Circuit c(p.n_qubits());
  append_exp_pauli(c, p, theta);
  return c;
}

/// Term order used by `trotterize`: descending |coefficient|, ties broken by
/// lexicographic label.
inline std::vector<PauliSumOperator::Term> trotter_order(const PauliSumOperator& h) {
  std::vector<PauliSumOperator::Term> terms = h.terms();
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    const double ca = std::abs(a.coefficient), cb = std::abs(b.coefficient);
    if (ca != cb) return ca > cb;
    return a.string.label() < b.string.label();
  });
  return terms;
}

/// n_s repetitions of prod_i exp(i c_i P_i dt), dt = t / n_s.
inline Circuit trotterize(const PauliSumOperator& h, double t, std::size_t n_s) {
  if (n_s < 1) throw DomainError("trotterize: n_s must be >= 1");
  if (!h.is_hermitian()) throw DomainError("trotterize: Hamiltonian must be Hermitian");
  const double dt = t / static_cast<double>(n_s);
  const auto terms = trotter_order(h);
  Circuit c(h.n_qubits());
  for (std::size_t step = 0; step < n_s; ++step)
    for (const auto& term : terms) append_exp_pauli(c, term.string, term.coefficient * dt);
  return c;
}

}  // namespace qrem
