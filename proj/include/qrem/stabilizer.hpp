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
 * Clifford propagation of initialization errors and the QREM-corrected
 * ("fake") fidelity of stabilizer states.
 *
 * A noisy reset leaves rho_ini = 2^{-n} sum_k lambda_k Z^{a(k)}, with
 * lambda_k = prod_{i in a(k)} (1 - 2 q_i). A Clifford preparation U maps
 * Z^{a(k)} to a stabilizer A'_k = U Z^{a(k)} U^dagger. Mitigation with a
 * calibration that absorbed the reset error divides each measured
 * stabilizer by prod_{i in supp A'_k} (1 - 2 q_i), so the reported fidelity
 * is the mean over k of lambda_k / lambda_{b_k}.
 */

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qrem/detail/parallel.hpp"
#include "qrem/detail/text.hpp"
#include "qrem/error.hpp"
#include "qrem/pauli.hpp"

namespace qrem {

/// Simple undirected graph; edges are stored with i < j, sorted.
class GraphSpec {
 public:
  GraphSpec() = default;

  GraphSpec(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges)
      : n_(n) {
    for (auto [a, b] : edges) {
      if (a == b) throw DomainError("GraphSpec: self-loop on vertex " + std::to_string(a));
      if (a >= n || b >= n) throw DomainError("GraphSpec: vertex index out of range");
      edges_.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw DomainError("GraphSpec: duplicate edge");
  }

  static GraphSpec path(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return GraphSpec(n, std::move(e));
  }

  static GraphSpec complete(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> e;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return GraphSpec(n, std::move(e));
  }

  std::size_t n_vertices() const noexcept { return n_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept {
    return edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// File format: first line `n`, then one `i j` edge per line.
inline GraphSpec parse_graph(std::string_view text) {
  const auto lines = detail::tokenize_lines(text);
  if (lines.empty()) throw ParseError(0, "empty graph file");
  if (lines[0].tokens.size() != 1) throw ParseError(lines[0].number, "expected vertex count");
  auto n = detail::parse_uint(lines[0].tokens[0]);
  if (!n) throw ParseError(lines[0].number, "bad vertex count");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto& line = lines[l];
    if (line.tokens.size() != 2) throw ParseError(line.number, "expected 'i j'");
    auto a = detail::parse_uint(line.tokens[0]);
    auto b = detail::parse_uint(line.tokens[1]);
    if (!a || !b) throw ParseError(line.number, "bad vertex index");
    edges.emplace_back(*a, *b);
  }
  try {
    return GraphSpec(*n, std::move(edges));
  } catch (const DomainError& e) {
    throw ParseError(0, e.what());
  }
}

enum class CliffordKind { kH, kX, kCZ, kCNOT };

struct CliffordGate {
  CliffordKind kind;
  std::size_t a;      // target (single-qubit), first qubit (CZ), control (CNOT)
  std::size_t b = 0;  // second qubit (CZ), target (CNOT)

  friend bool operator==(const CliffordGate&, const CliffordGate&) = default;
};

class CliffordCircuit {
 public:
  CliffordCircuit() = default;
  explicit CliffordCircuit(std::size_t n) : n_(n) {}

  std::size_t n_qubits() const noexcept { return n_; }
  const std::vector<CliffordGate>& gates() const noexcept { return gates_; }

  CliffordCircuit& h(std::size_t q) { return push({CliffordKind::kH, q}); }
  CliffordCircuit& x(std::size_t q) { return push({CliffordKind::kX, q}); }
  CliffordCircuit& cz(std::size_t a, std::size_t b) { return push({CliffordKind::kCZ, a, b}); }
  CliffordCircuit& cnot(std::size_t c, std::size_t t) {
    return push({CliffordKind::kCNOT, c, t});
  }

  /// All gates in the set are self-inverse, so the inverse is the reversal.
  CliffordCircuit inverse() const {
    CliffordCircuit r(n_);
    r.gates_.assign(gates_.rbegin(), gates_.rend());
    return r;
  }

 private:
  CliffordCircuit& push(CliffordGate g) {
    const bool two = g.kind == CliffordKind::kCZ || g.kind == CliffordKind::kCNOT;
    if (g.a >= n_ || (two && g.b >= n_))
      throw DomainError("CliffordCircuit: qubit index out of range");
    if (two && g.a == g.b) throw DomainError("CliffordCircuit: two-qubit gate on one qubit");
    gates_.push_back(g);
    return *this;
  }

  std::size_t n_ = 0;
  std::vector<CliffordGate> gates_;
};

/// H on every vertex, then CZ per edge in sorted order.
inline CliffordCircuit graph_state_circuit(const GraphSpec& g) {
  CliffordCircuit c(g.n_vertices());
  for (std::size_t i = 0; i < g.n_vertices(); ++i) c.h(i);
  for (auto [a, b] : g.edges()) c.cz(a, b);
  return c;
}

enum class GhzVariant { kLinear, kCompact };

/// Linear: H0 then CNOT(i, i+1). Compact: H0 then CNOT(0, i).
inline CliffordCircuit ghz_circuit(std::size_t n, GhzVariant variant) {
  if (n < 1) throw DomainError("ghz_circuit: n must be >= 1");
  CliffordCircuit c(n);
  c.h(0);
  for (std::size_t i = 1; i < n; ++i)
    c.cnot(variant == GhzVariant::kLinear ? i - 1 : 0, i);
  return c;
}

namespace detail {

// In-place Heisenberg update P -> G P G^dagger, with the sign tracked as in a
// stabilizer tableau row.
struct PauliRow {
  QubitMask x, z;
  bool negative = false;

  void h(std::size_t q) {
    negative ^= x[q] && z[q];
    const bool t = x[q];
    x[q] = z[q];
    z[q] = t;
  }
  void not_gate(std::size_t q) { negative ^= static_cast<bool>(z[q]); }
  void cnot(std::size_t c, std::size_t t) {
    negative ^= x[c] && z[t] && (x[t] == z[c]);
    x[t] = x[t] ^ x[c];
    z[c] = z[c] ^ z[t];
  }
  void cz(std::size_t a, std::size_t b) {
    h(b);
    cnot(a, b);
    h(b);
  }
};

}  // namespace detail

/// U p U^dagger where U applies the gates of `c` in order.
inline PauliString conjugate_pauli(const CliffordCircuit& c, const PauliString& p) {
  if (c.n_qubits() != p.n_qubits())
    throw DimensionError("conjugate_pauli: qubit count mismatch");
  // Hermitian part carries the sign; a residual factor of i rides along.
  detail::PauliRow row{p.x_bits(), p.z_bits(), false};
  for (const CliffordGate& g : c.gates()) {
    switch (g.kind) {
      case CliffordKind::kH: row.h(g.a); break;
      case CliffordKind::kX: row.not_gate(g.a); break;
      case CliffordKind::kCZ: row.cz(g.a, g.b); break;
      case CliffordKind::kCNOT: row.cnot(g.a, g.b); break;
    }
  }
  const Phase sign = row.negative ? Phase::kMinusOne : Phase::kPlusOne;
  return PauliString(p.n_qubits(), row.x, row.z, p.phase() * sign);
}

enum class FidelityMethod {
  kExactEnumeration,
  kSampled,
  kDpLinearCluster,
  kDpLinearGhz,
  kClosedFormFullGraph,
};

inline std::string to_string(FidelityMethod m) {
  switch (m) {
    case FidelityMethod::kExactEnumeration: return "exact-enumeration";
    case FidelityMethod::kSampled: return "sampled";
    case FidelityMethod::kDpLinearCluster: return "dp-linear-cluster";
    case FidelityMethod::kDpLinearGhz: return "dp-linear-ghz";
    case FidelityMethod::kClosedFormFullGraph: return "closed-form-full-graph";
  }
  return "unknown";
}

struct FidelityEstimate {
  double value = 1.0;
  double std_error = 0.0;
  FidelityMethod method = FidelityMethod::kExactEnumeration;
  std::size_t n = 0;
  double q = 0.0;  // mean initialization rate
  std::optional<std::uint64_t> seed;
};

inline constexpr std::size_t kMaxEnumerationQubits = 24;

namespace detail {

inline void check_rates(std::span<const double> q_list, std::size_t n) {
  if (q_list.size() != n) throw DimensionError("q_list length does not match qubit count");
  for (double q : q_list)
    if (!(q >= 0.0 && q < 0.5)) throw DomainError("initialization rate outside [0, 0.5)");
}

// Exact for constant input.
inline double mean(std::span<const double> v) {
  if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }))
    return v[0];
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Product of per-qubit factors over a <= 24-bit mask via three byte tables.
class MaskProduct {
 public:
  explicit MaskProduct(std::span<const double> factors) {
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t m = 0; m < 256; ++m) {
        double p = 1.0;
        for (std::size_t b = 0; b < 8; ++b) {
          const std::size_t q = 8 * t + b;
          if (((m >> b) & 1U) && q < factors.size()) p *= factors[q];
        }
        tables_[t][m] = p;
      }
    }
  }
  double operator()(std::uint32_t mask) const {
    return tables_[0][mask & 0xFFU] * tables_[1][(mask >> 8) & 0xFFU] *
           tables_[2][(mask >> 16) & 0xFFU];
  }

 private:
  std::array<std::array<double, 256>, 3> tables_{};
};

inline std::vector<PauliString> z_images(const CliffordCircuit& c) {
  std::vector<PauliString> images;
  for (std::size_t i = 0; i < c.n_qubits(); ++i)
    images.push_back(conjugate_pauli(c, PauliString::single(c.n_qubits(), i, 'Z')));
  return images;
}

// splitmix64 finalizer; (seed, counter) -> 64 uniform bits.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Mean of lambda_k / lambda_{b_k} over all 2^n initial Z patterns.
///
/// Patterns are visited in Gray-code order inside fixed 4096-pattern chunks;
/// chunk sums are combined by a pairwise tree, so the result does not depend
/// on the worker count.
inline FidelityEstimate exact_fake_fidelity(const CliffordCircuit& c,
                                            std::span<const double> q_list,
                                            std::size_t workers = detail::thread_count()) {
  const std::size_t n = c.n_qubits();
  if (n > kMaxEnumerationQubits)
    throw DomainError("exact_fake_fidelity: n exceeds enumeration guard");
  detail::check_rates(q_list, n);

  std::vector<double> factors(n);
  for (std::size_t i = 0; i < n; ++i) factors[i] = 1.0 - 2.0 * q_list[i];
  const detail::MaskProduct product(factors);

  // Support of A'_k is x|z of the XOR of the images of the set bits.
  std::vector<std::uint32_t> img_x(n), img_z(n);
  const auto images = detail::z_images(c);
  for (std::size_t i = 0; i < n; ++i) {
    img_x[i] = static_cast<std::uint32_t>(to_u64(images[i].x_bits()));
    img_z[i] = static_cast<std::uint32_t>(to_u64(images[i].z_bits()));
  }

  const std::uint64_t total = std::uint64_t{1} << n;
  constexpr std::uint64_t kChunk = 4096;
  const std::size_t n_chunks = static_cast<std::size_t>((total + kChunk - 1) / kChunk);
  std::vector<double> chunk_sums(n_chunks, 0.0);

  detail::parallel_for(
      n_chunks,
      [&](std::size_t ci) {
        const std::uint64_t begin = ci * kChunk;
        const std::uint64_t end = std::min(total, begin + kChunk);
        std::uint32_t k = static_cast<std::uint32_t>(begin ^ (begin >> 1));
        std::uint32_t ax = 0, az = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if ((k >> i) & 1U) {
            ax ^= img_x[i];
            az ^= img_z[i];
          }
        }
        double sum = 0.0;
        for (std::uint64_t j = begin;;) {
          sum += product(k) / product(ax | az);
          if (++j == end) break;
          const auto bit = static_cast<std::size_t>(std::countr_zero(j));
          k ^= std::uint32_t{1} << bit;
          ax ^= img_x[bit];
          az ^= img_z[bit];
        }
        chunk_sums[ci] = sum;
      },
      workers);

  FidelityEstimate est;
  est.value = detail::pairwise_sum(chunk_sums) / static_cast<double>(total);
  est.std_error = 0.0;
  est.method = FidelityMethod::kExactEnumeration;
  est.n = n;
  est.q = detail::mean(q_list);
  return est;
}

/// Uniform sampling of m stabilizer indices k in [0, 2^n).
///
/// Sample s draws its bits from a counter-based hash of (seed, s), so the
/// estimate is reproducible and independent of evaluation order.
inline FidelityEstimate sampled_fake_fidelity(const CliffordCircuit& c,
                                              std::span<const double> q_list, std::size_t m,
                                              std::uint64_t seed) {
  const std::size_t n = c.n_qubits();
  if (m < 1) throw DomainError("sampled_fake_fidelity: m must be >= 1");
  detail::check_rates(q_list, n);
  std::vector<double> factors(n);
  for (std::size_t i = 0; i < n; ++i) factors[i] = 1.0 - 2.0 * q_list[i];
  const auto images = detail::z_images(c);
  const QubitMask valid = low_mask(n);

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    QubitMask k = from_u64(detail::counter_hash(seed, 2 * s));
    k |= from_u64(detail::counter_hash(seed, 2 * s + 1)) << 64;
    k &= valid;
    QubitMask ax, az;
    double num = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!k[i]) continue;
      ax ^= images[i].x_bits();
      az ^= images[i].z_bits();
      num *= factors[i];
    }
    const QubitMask supp = ax | az;
    double den = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (supp[i]) den *= factors[i];
    const double r = num / den;
    sum += r;
    sum_sq += r * r;
  }
  const double md = static_cast<double>(m);
  const double mean = sum / md;
  double var = m > 1 ? (sum_sq - md * mean * mean) / (md - 1.0) : 0.0;
  if (var < 0.0) var = 0.0;

  FidelityEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(var / md);
  est.method = FidelityMethod::kSampled;
  est.n = n;
  est.q = detail::mean(q_list);
  est.seed = seed;
  return est;
}

/// Un-mitigated expectation (1 - 2q)^{m_g} of a product of m_g distinct
/// generators under uniform reset error.
inline double noisy_generator_expectation(std::size_t generator_count, double q) {
  if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
  return std::pow(1.0 - 2.0 * q, static_cast<double>(generator_count));
}

/// Distribution d_{n,s,t} of stabilizer classes: `states` tail-qubit states
/// and power differences t = |supp A'_k| - |a(k)| in [-n, n].
struct DPTable {
  std::size_t n = 0;
  std::size_t states = 0;
  std::vector<std::vector<double>> d;  // d[s][t + n]

  double at(std::size_t s, long t) const {
    if (t < -static_cast<long>(n) || t > static_cast<long>(n)) return 0.0;
    return d[s][static_cast<std::size_t>(t + static_cast<long>(n))];
  }

  double mass() const {
    double m = 0.0;
    for (const auto& row : d)
      for (double v : row) m += v;
    return m;
  }

  /// sum_{s,t} (1 - 2q)^{-t} d_{n,s,t}
  double fidelity(double q) const {
    const double f = 1.0 - 2.0 * q;
    double total = 0.0;
    for (const auto& row : d)
      for (std::size_t i = 0; i < row.size(); ++i)
        if (row[i] != 0.0)
          total += std::pow(f, -(static_cast<double>(i) - static_cast<double>(n))) * row[i];
    return total;
  }
};

namespace detail {

// Advances a table by one qubit. `step(prev, s, t)` returns 2 d_{n,s,t}.
template <typename Step>
DPTable dp_advance(const DPTable& prev, Step&& step) {
  DPTable next;
  next.n = prev.n + 1;
  next.states = prev.states;
  next.d.assign(prev.states, std::vector<double>(2 * next.n + 1, 0.0));
  const long n = static_cast<long>(next.n);
  for (std::size_t s = 0; s < prev.states; ++s)
    for (long t = -n; t <= n; ++t)
      next.d[s][static_cast<std::size_t>(t + n)] = 0.5 * step(prev, s, t);
  return next;
}

inline DPTable dp_base(std::size_t states, std::initializer_list<std::size_t> half_states) {
  DPTable base;
  base.n = 1;
  base.states = states;
  base.d.assign(states, std::vector<double>(3, 0.0));
  for (std::size_t s : half_states) base.d[s][1] = 0.5;
  return base;
}

inline void check_dp_args(std::size_t n, double q) {
  if (n < 2) throw DomainError("DP recurrence requires n >= 2");
  if (!(q >= 0.0 && q < 0.5)) throw DomainError("q outside [0, 0.5)");
}

}  // namespace detail

/// Linear cluster table. State s is the Pauli on the last qubit as if it had
/// no right neighbour (0 I, 1 X, 2 Z, 3 Y); the one-qubit table has
/// d_{1,I,0} = d_{1,X,0} = 1/2.
inline DPTable linear_cluster_table(std::size_t n) {
  if (n < 1) throw DomainError("linear_cluster_table: n must be >= 1");
  DPTable table = detail::dp_base(4, {0, 1});
  while (table.n < n) {
    table = detail::dp_advance(table, [](const DPTable& p, std::size_t s, long t) {
      switch (s) {
        case 0: return p.at(0, t) + p.at(2, t);
        case 1: return p.at(0, t - 1) + p.at(2, t + 1);
        case 2: return p.at(1, t - 1) + p.at(3, t - 1);
        default: return p.at(1, t) + p.at(3, t);
      }
    });
  }
  return table;
}

/// Linear GHZ table. States 0/1: first bit clear and last bit 0/1; state 2:
/// first bit set (X on every qubit). One-qubit table d_{1,0,0} = d_{1,2,0} =
/// 1/2.
inline DPTable linear_ghz_table(std::size_t n) {
  if (n < 1) throw DomainError("linear_ghz_table: n must be >= 1");
  DPTable table = detail::dp_base(3, {0, 2});
  while (table.n < n) {
    table = detail::dp_advance(table, [](const DPTable& p, std::size_t s, long t) {
      switch (s) {
        case 0: return p.at(0, t) + p.at(1, t);
        case 1: return p.at(1, t + 1) + p.at(0, t - 1);
        default: return p.at(2, t) + p.at(2, t - 1);
      }
    });
  }
  return table;
}

inline FidelityEstimate dp_linear_cluster(std::size_t n, double q) {
  detail::check_dp_args(n, q);
  return {linear_cluster_table(n).fidelity(q), 0.0, FidelityMethod::kDpLinearCluster, n, q,
          std::nullopt};
}

inline FidelityEstimate dp_linear_ghz(std::size_t n, double q) {
  detail::check_dp_args(n, q);
  return {linear_ghz_table(n).fidelity(q), 0.0, FidelityMethod::kDpLinearGhz, n, q,
          std::nullopt};
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::size_t i = 1; i <= k; ++i)
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

/// Fully connected graph state:
///   d_{n,0}   = 1/2 + [(1 - (-1)^n) / 2^{n+1}] C(n, 0)
///   d_{n,t}   = [(1 - (-1)^{n-t}) / 2^{n+1}] C(n, t)   for 0 < t < n
inline FidelityEstimate closed_form_full_graph(std::size_t n, double q) {
  detail::check_dp_args(n, q);
  const double f = 1.0 - 2.0 * q;
  const double scale = std::ldexp(1.0, -static_cast<int>(n) - 1);
  double total = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double parity = ((n - t) % 2 == 1) ? 2.0 : 0.0;
    double d = parity * scale * binomial(n, t);
    if (t == 0) d += 0.5;
    total += std::pow(f, -static_cast<double>(t)) * d;
  }
  return {total, 0.0, FidelityMethod::kClosedFormFullGraph, n, q, std::nullopt};
}

}  // namespace qrem
