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
 * Sweep drivers behind the command-line tool. Each returns rows sorted by
 * their sweep key; points are evaluated in parallel.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrem/chem.hpp"
#include "qrem/circuit.hpp"
#include "qrem/density_matrix.hpp"
#include "qrem/detail/parallel.hpp"
#include "qrem/error.hpp"
#include "qrem/spam.hpp"
#include "qrem/stabilizer.hpp"

namespace qrem {

enum class Topology { kLinearCluster, kFullGraph, kLinearGhz, kCompactGhz, kCustomGraph };

inline Topology parse_topology(std::string_view s) {
  if (s == "1d-graph") return Topology::kLinearCluster;
  if (s == "full-graph") return Topology::kFullGraph;
  if (s == "linear-ghz") return Topology::kLinearGhz;
  if (s == "compact-ghz") return Topology::kCompactGhz;
  throw DomainError("unknown topology '" + std::string(s) + "'");
}

inline std::string to_string(Topology t) {
  switch (t) {
    case Topology::kLinearCluster: return "1d-graph";
    case Topology::kFullGraph: return "full-graph";
    case Topology::kLinearGhz: return "linear-ghz";
    case Topology::kCompactGhz: return "compact-ghz";
    case Topology::kCustomGraph: return "graph-file";
  }
  return "unknown";
}

enum class MethodChoice { kAuto, kExact, kDp, kSampled };

inline MethodChoice parse_method(std::string_view s) {
  if (s == "auto") return MethodChoice::kAuto;
  if (s == "exact") return MethodChoice::kExact;
  if (s == "dp") return MethodChoice::kDp;
  if (s == "sampled") return MethodChoice::kSampled;
  throw DomainError("unknown method '" + std::string(s) + "'");
}

/// Largest n for which `auto` picks exact enumeration.
inline constexpr std::size_t kAutoExactQubits = 22;

struct FidelityRequest {
  Topology topology = Topology::kLinearCluster;
  std::optional<GraphSpec> graph;  ///< required for kCustomGraph; fixes n
  MethodChoice method = MethodChoice::kAuto;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};

inline bool has_dp(Topology t) {
  return t == Topology::kLinearCluster || t == Topology::kLinearGhz || t == Topology::kFullGraph;
}

inline CliffordCircuit preparation_circuit(const FidelityRequest& req, std::size_t n) {
  switch (req.topology) {
    case Topology::kLinearCluster: return graph_state_circuit(GraphSpec::path(n));
    case Topology::kFullGraph: return graph_state_circuit(GraphSpec::complete(n));
    case Topology::kLinearGhz: return ghz_circuit(n, GhzVariant::kLinear);
    case Topology::kCompactGhz: return ghz_circuit(n, GhzVariant::kCompact);
    case Topology::kCustomGraph:
      if (!req.graph) throw DomainError("graph topology needs a graph file");
      if (req.graph->n_vertices() != n) throw DimensionError("graph size differs from n");
      return graph_state_circuit(*req.graph);
  }
  throw DomainError("unknown topology");
}

/// Fake fidelity for one (n, q_list). `auto` uses the DP or closed form when
/// q is uniform and the topology has one, else exact enumeration up to 22
/// qubits, else sampling.
inline FidelityEstimate fidelity_point(const FidelityRequest& req, std::span<const double> q_list,
                                       std::size_t workers = 1) {
  const std::size_t n = q_list.size();
  const bool uniform =
      std::adjacent_find(q_list.begin(), q_list.end(), std::not_equal_to<>()) == q_list.end();
  MethodChoice m = req.method;
  if (m == MethodChoice::kAuto) {
    if (uniform && has_dp(req.topology)) m = MethodChoice::kDp;
    else if (n <= kAutoExactQubits) m = MethodChoice::kExact;
    else m = MethodChoice::kSampled;
  }
  if (m == MethodChoice::kDp) {
    if (!uniform) throw DomainError("dp method needs a uniform q");
    const double q = q_list.empty() ? 0.0 : q_list[0];
    switch (req.topology) {
      case Topology::kLinearCluster: return dp_linear_cluster(n, q);
      case Topology::kLinearGhz: return dp_linear_ghz(n, q);
      case Topology::kFullGraph: return closed_form_full_graph(n, q);
      default: throw DomainError("no dp recurrence for topology " + to_string(req.topology));
    }
  }
  const CliffordCircuit c = preparation_circuit(req, n);
  if (m == MethodChoice::kExact) return exact_fake_fidelity(c, q_list, workers);
  return sampled_fake_fidelity(c, q_list, req.samples, req.seed);
}

/// One point per n at uniform q.
inline std::vector<FidelityEstimate> fidelity_sweep(const FidelityRequest& req,
                                                    const std::vector<std::size_t>& ns, double q) {
  std::vector<FidelityEstimate> rows(ns.size());
  const std::size_t workers = detail::thread_count();
  // Large enumerations parallelize internally; small points run side by side.
  detail::parallel_for(
      ns.size(),
      [&](std::size_t i) {
        const std::vector<double> q_list(ns[i], q);
        rows[i] = fidelity_point(req, q_list, ns[i] >= 16 ? workers : 1);
      },
      workers);
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.n < b.n; });
  return rows;
}

struct BoundRow {
  double q;
  std::size_t n;
  double delta;
};

struct ContourRow {
  double bound;
  double q;
  double n_star;
};

inline std::vector<BoundRow> bound_grid(const std::vector<double>& qs,
                                        const std::vector<std::size_t>& ns) {
  std::vector<BoundRow> rows;
  for (double q : qs)
    for (std::size_t n : ns) rows.push_back({q, n, safety_bound_delta(static_cast<double>(n), q)});
  return rows;
}

inline std::vector<ContourRow> bound_contours(const std::vector<double>& qs,
                                              const std::vector<double>& levels) {
  std::vector<ContourRow> rows;
  for (double b : levels)
    for (double q : qs) rows.push_back({b, q, bound_contour(q, b)});
  return rows;
}

struct EntangleRow {
  std::size_t n;
  double q;
  double gate_noise;
  double true_fidelity;
  double qrem_fidelity;
  double gap;  ///< qrem_fidelity - true_fidelity
};

/// Noisy 1D cluster state: reset noise q, depolarizing after every CZ.
/// The true fidelity is Tr(rho |G><G|); the mitigated estimate is the mean
/// of qrem_measure over all 2^n stabilizers.
inline EntangleRow entangle_point(std::size_t n, double q, double gate_noise, double delta0 = 0.0,
                                  double delta1 = 0.0) {
  if (n > kMaxDenseQubits) throw DomainError("entangle-noisy: n exceeds dense-size guard");
  const CliffordCircuit prep = graph_state_circuit(GraphSpec::path(n));
  const Circuit gates = to_circuit(prep);
  const SpamModel spam = SpamModel::uniform(n, delta0, delta1, q);
  const DensityMatrix ideal = apply_circuit(DensityMatrix(n), gates);
  const DensityMatrix rho =
      apply_circuit(noisy_initial_state(n, spam.q_list()), gates, gate_noise);
  const double true_f = (rho.matrix().cwiseProduct(ideal.matrix().conjugate())).sum().real();
  const auto images = detail::z_images(prep);
  std::vector<double> terms(std::size_t{1} << n);
  for (std::size_t k = 0; k < terms.size(); ++k) {
    PauliString s(n);
    for (std::size_t i = 0; i < n; ++i)
      if ((k >> i) & 1U) s = s * images[i];
    terms[k] = qrem_measure(rho, s, spam);
  }
  const double est = detail::pairwise_sum(terms) / static_cast<double>(terms.size());
  return {n, q, gate_noise, true_f, est, est - true_f};
}

inline std::vector<EntangleRow> entangle_sweep(std::size_t n, const std::vector<double>& qs,
                                               const std::vector<double>& gate_noises,
                                               double delta0 = 0.0, double delta1 = 0.0) {
  std::vector<EntangleRow> rows(qs.size() * gate_noises.size());
  detail::parallel_for(rows.size(), [&](std::size_t i) {
    rows[i] = entangle_point(n, qs[i / gate_noises.size()], gate_noises[i % gate_noises.size()],
                             delta0, delta1);
  });
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.gate_noise != b.gate_noise ? a.gate_noise < b.gate_noise : a.q < b.q;
  });
  return rows;
}

/// A Hamiltonian with its ansatz, either from files or a built-in family.
struct ChemProblem {
  PauliSumOperator hamiltonian;
  AnsatzSpec ansatz;
};

struct VqeRow {
  std::size_t n;
  double q;
  double energy;
  double clean_energy;  ///< same ansatz, no noise, exact traces
  double error;         ///< energy - clean_energy
  std::size_t evaluations;
  bool converged;
};

/// Per problem and per q: a mitigated VQE with readout rates (delta0, delta1)
/// and reset rate q, plus one clean reference run per problem.
inline std::vector<VqeRow> vqe_sweep(const std::vector<ChemProblem>& problems,
                                     const std::vector<double>& qs, double delta0, double delta1,
                                     const VqeConfig& cfg = {}) {
  const std::size_t per = qs.size() + 1;
  std::vector<VqeResult> results(problems.size() * per);
  detail::parallel_for(results.size(), [&](std::size_t i) {
    const auto& pr = problems[i / per];
    const std::size_t n = pr.hamiltonian.n_qubits();
    const std::size_t j = i % per;
    VqeConfig c = cfg;
    if (j == qs.size()) {
      c.pipeline = VqePipeline::kClean;
      results[i] = vqe_optimize(pr.hamiltonian, pr.ansatz, SpamModel::ideal(n), c);
    } else {
      c.pipeline = VqePipeline::kMitigated;
      results[i] = vqe_optimize(pr.hamiltonian, pr.ansatz,
                                SpamModel::uniform(n, delta0, delta1, qs[j]), c);
    }
  });
  std::vector<VqeRow> rows;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    const VqeResult& clean = results[p * per + qs.size()];
    for (std::size_t j = 0; j < qs.size(); ++j) {
      const VqeResult& r = results[p * per + j];
      rows.push_back({problems[p].hamiltonian.n_qubits(), qs[j], r.energy, clean.energy,
                      r.energy - clean.energy, r.evaluations, r.converged});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.n != b.n ? a.n < b.n : a.q < b.q;
  });
  return rows;
}

inline std::vector<QteResult> qte_sweep(const std::vector<ChemProblem>& problems,
                                        const std::vector<std::size_t>& n_s_list,
                                        const std::vector<double>& qs, double t, double delta0,
                                        double delta1) {
  const std::size_t per = n_s_list.size() * qs.size();
  std::vector<QteResult> rows(problems.size() * per);
  detail::parallel_for(rows.size(), [&](std::size_t i) {
    const auto& pr = problems[i / per];
    const std::size_t rest = i % per;
    const std::size_t n = pr.hamiltonian.n_qubits();
    rows[i] = qte_benchmark(pr.hamiltonian, pr.ansatz.n_electrons, t,
                            n_s_list[rest / qs.size()],
                            SpamModel::uniform(n, delta0, delta1, qs[rest % qs.size()]));
  });
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.n_qubits != b.n_qubits) return a.n_qubits < b.n_qubits;
    if (a.q != b.q) return a.q < b.q;
    return a.n_s < b.n_s;
  });
  return rows;
}

}  // namespace qrem
