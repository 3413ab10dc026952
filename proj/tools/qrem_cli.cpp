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

// qrem: sweep drivers writing CSV or JSON.
//
//   qrem fidelity --topology 1d-graph --q 0.01 --n 2..20 --method dp
//   qrem bound --q 0.0001,0.001,0.01 --n 1..100
//   qrem entangle-noisy --n 10 --q 0,0.01,0.05 --gate-noise 0,0.01
//   qrem vqe --family tfim --n 2..8:2 --q 0,0.001
//   qrem qte --hamiltonian data/h2_sto3g_jw.txt --ansatz data/h2_uccsd.txt --ns 1,2,4
//
// Files begin with `#` comment lines recording the resolved configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qrem.hpp"

namespace {

using nlohmann::ordered_json;
using qrem::detail::format_double;

struct Output {
  std::string path = "-";
  std::string format = "csv";
  std::uint64_t seed = 1;
};

// Ordered key/value echo of the resolved configuration.
using Config = std::vector<std::pair<std::string, std::string>>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<ordered_json>> rows;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qrem::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename F>
auto parse_file(const std::string& path, F&& parse) {
  const std::string text = read_file(path);
  try {
    return parse(text);
  } catch (const qrem::Error& e) {
    throw qrem::Error(path + ": " + e.what());
  }
}

std::string cell_csv(const ordered_json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  return format_double(v.get<double>());
}

ordered_json number(double v) {
  if (!std::isfinite(v)) return v > 0 ? ordered_json("inf") : ordered_json("-inf");
  return v;
}

std::string render(const Output& out, const Config& cfg, const Table& t) {
  std::ostringstream os;
  if (out.format == "json") {
    ordered_json doc;
    ordered_json c = ordered_json::object();
    for (const auto& [k, v] : cfg) c[k] = v;
    doc["config"] = c;
    doc["rows"] = ordered_json::array();
    for (const auto& r : t.rows) {
      ordered_json row = ordered_json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) row[t.columns[i]] = r[i];
      doc["rows"].push_back(row);
    }
    os << doc.dump(2) << '\n';
    return os.str();
  }
  for (const auto& [k, v] : cfg) os << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << cell_csv(r[i]);
    os << '\n';
  }
  return os.str();
}

// Writes to a sibling temp file and renames it into place.
void emit(const Output& out, const Config& cfg, const Table& t) {
  const std::string body = render(out, cfg, t);
  if (out.path == "-") {
    std::cout << body;
    return;
  }
  const std::filesystem::path target(out.path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw qrem::Error("cannot write '" + tmp.string() + "'");
    f << body;
    f.close();
    if (!f) throw qrem::Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

// "a..b", "a..b:step", "a,b,c" or a single value.
std::vector<std::size_t> parse_count_list(const std::string& s, const std::string& flag) {
  auto num = [&](std::string_view tok) {
    auto v = qrem::detail::parse_uint(tok);
    if (!v) throw qrem::Error(flag + ": bad integer '" + std::string(tok) + "'");
    return static_cast<std::size_t>(*v);
  };
  std::vector<std::size_t> out;
  if (auto dots = s.find(".."); dots != std::string::npos) {
    const std::string rest = s.substr(dots + 2);
    const auto colon = rest.find(':');
    const std::size_t lo = num(s.substr(0, dots));
    const std::size_t hi = num(rest.substr(0, colon));
    const std::size_t step = colon == std::string::npos ? 1 : num(rest.substr(colon + 1));
    if (step == 0 || hi < lo) throw qrem::Error(flag + ": empty range '" + s + "'");
    for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(num(tok));
  if (out.empty()) throw qrem::Error(flag + ": empty list");
  return out;
}

std::vector<double> parse_real_list(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) {
    auto v = qrem::detail::parse_double(tok);
    if (!v) throw qrem::Error(flag + ": bad number '" + tok + "'");
    out.push_back(*v);
  }
  if (out.empty()) throw qrem::Error(flag + ": empty list");
  return out;
}

void check_rates(const std::vector<double>& qs, const std::string& flag) {
  for (double q : qs)
    if (!(q >= 0.0 && q < 0.5)) throw qrem::Error(flag + ": rate outside [0, 0.5)");
}

void add_output_flags(CLI::App* app, Output& out) {
  app->add_option("--out", out.path, "Output file, '-' for stdout")->capture_default_str();
  app->add_option("--format", out.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app->add_option("--seed", out.seed, "Sampling seed")->capture_default_str();
}

Config base_config(const std::string& sub, const Output& out) {
  return {{"subcommand", sub}, {"format", out.format}, {"seed", std::to_string(out.seed)}};
}

struct ChemFlags {
  std::string family = "tfim";
  std::string hamiltonian, ansatz;
  std::string n = "2..8:2";
  std::string q = "0,0.001";
  double delta0 = 0.0, delta1 = 0.0;
  double coupling = 1.0, field = 1.0;
};

void add_chem_flags(CLI::App* app, ChemFlags& f) {
  app->add_option("--family", f.family, "Built-in Hamiltonian family (tfim)")
      ->check(CLI::IsMember({"tfim"}))
      ->capture_default_str();
  app->add_option("--hamiltonian", f.hamiltonian, "Pauli-sum file; overrides --family")
      ->check(CLI::ExistingFile);
  app->add_option("--ansatz", f.ansatz, "Ansatz file (S/D excitations)")->check(CLI::ExistingFile);
  app->add_option("--n", f.n, "Chain lengths for the built-in family")->capture_default_str();
  app->add_option("--q", f.q, "Initialization error rates")->capture_default_str();
  app->add_option("--delta0", f.delta0, "Readout error 0->1")->capture_default_str();
  app->add_option("--delta1", f.delta1, "Readout error 1->0")->capture_default_str();
  app->add_option("--coupling", f.coupling, "TFIM coupling J")->capture_default_str();
  app->add_option("--field", f.field, "TFIM field h")->capture_default_str();
}

std::vector<qrem::ChemProblem> load_problems(const ChemFlags& f, Config& cfg) {
  std::vector<qrem::ChemProblem> out;
  if (!f.hamiltonian.empty()) {
    if (f.ansatz.empty()) throw qrem::Error("--hamiltonian requires --ansatz");
    auto h = parse_file(f.hamiltonian, qrem::parse_pauli_sum);
    auto a = parse_file(f.ansatz, qrem::parse_ansatz);
    if (h.n_qubits() != a.n_qubits)
      throw qrem::Error("Hamiltonian and ansatz qubit counts differ");
    cfg.push_back({"hamiltonian", f.hamiltonian});
    cfg.push_back({"ansatz", f.ansatz});
    out.push_back({std::move(h), std::move(a)});
    return out;
  }
  cfg.push_back({"family", f.family});
  cfg.push_back({"n", f.n});
  cfg.push_back({"coupling", format_double(f.coupling)});
  cfg.push_back({"field", format_double(f.field)});
  for (std::size_t n : parse_count_list(f.n, "--n"))
    out.push_back({qrem::tfim_chain(n, f.coupling, f.field), qrem::tfim_ansatz(n)});
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Readout-mitigation bias under state-preparation error"};
  app.require_subcommand(1);

  Output out;

  // fidelity
  auto* fid = app.add_subcommand("fidelity", "Mitigated (fake) fidelity of graph and GHZ states");
  std::string topology = "1d-graph", graph_file, fid_n = "2..20", method = "auto";
  double fid_q = 0.01;
  std::size_t samples = 10000;
  fid->add_option("--topology", topology, "1d-graph, full-graph, linear-ghz or compact-ghz")
      ->check(CLI::IsMember({"1d-graph", "full-graph", "linear-ghz", "compact-ghz"}))
      ->capture_default_str();
  fid->add_option("--graph", graph_file, "Graph file; overrides --topology and --n")
      ->check(CLI::ExistingFile);
  fid->add_option("--q", fid_q, "Uniform initialization error rate")->capture_default_str();
  fid->add_option("--n", fid_n, "Qubit counts, e.g. 2..20")->capture_default_str();
  fid->add_option("--method", method, "auto, exact, dp or sampled")
      ->check(CLI::IsMember({"auto", "exact", "dp", "sampled"}))
      ->capture_default_str();
  fid->add_option("--samples", samples, "Samples for the sampled method")->capture_default_str();
  add_output_flags(fid, out);

  // bound
  auto* bnd = app.add_subcommand("bound", "Safety bound (1-2q)^-n - 1 and its contours");
  std::string bnd_q = "0.0001,0.0002,0.0005,0.001,0.002,0.005,0.01,0.02,0.05";
  std::string bnd_n = "1..100", levels = "0.1,0.01,0.001";
  bnd->add_option("--q", bnd_q, "Initialization error rates")->capture_default_str();
  bnd->add_option("--n", bnd_n, "Qubit counts")->capture_default_str();
  bnd->add_option("--levels", levels, "Bound levels b for the contours")->capture_default_str();
  add_output_flags(bnd, out);

  // entangle-noisy
  auto* ent = app.add_subcommand("entangle-noisy",
                                 "True vs mitigated fidelity of a noisy 1D cluster state");
  std::size_t ent_n = 10;
  std::string ent_q = "0,0.001,0.005,0.01,0.02,0.05", ent_gate = "0,0.005,0.01,0.02";
  double ent_d0 = 0.0, ent_d1 = 0.0;
  ent->add_option("--n", ent_n, "Qubits (at most 12)")->capture_default_str();
  ent->add_option("--q", ent_q, "Initialization error rates")->capture_default_str();
  ent->add_option("--gate-noise", ent_gate, "Two-qubit depolarizing rates")->capture_default_str();
  ent->add_option("--delta0", ent_d0, "Readout error 0->1")->capture_default_str();
  ent->add_option("--delta1", ent_d1, "Readout error 1->0")->capture_default_str();
  add_output_flags(ent, out);

  // vqe
  auto* vqe = app.add_subcommand("vqe", "Optimized VQE energy under SPAM noise and mitigation");
  ChemFlags vqe_flags;
  std::size_t max_evals = 100000;
  double ftol = 1e-10;
  double vqe_gate = 0.0;
  add_chem_flags(vqe, vqe_flags);
  vqe->add_option("--max-evals", max_evals, "Objective evaluation budget per run")
      ->capture_default_str();
  vqe->add_option("--ftol", ftol, "Absolute function tolerance")->capture_default_str();
  vqe->add_option("--gate-noise", vqe_gate, "Two-qubit depolarizing rate")->capture_default_str();
  add_output_flags(vqe, out);

  // qte
  auto* qte = app.add_subcommand("qte", "Trotter and total energy error of time evolution");
  ChemFlags qte_flags;
  qte_flags.q = "0,0.06";
  qte_flags.n = "4";
  std::string ns = "1,2,4,8,16";
  double t = 2.0;
  add_chem_flags(qte, qte_flags);
  qte->add_option("--ns", ns, "Trotter step counts")->capture_default_str();
  qte->add_option("--t", t, "Evolution time")->capture_default_str();
  add_output_flags(qte, out);

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg;
    Table table;
    if (*fid) {
      cfg = base_config("fidelity", out);
      check_rates({fid_q}, "--q");
      qrem::FidelityRequest req;
      req.method = qrem::parse_method(method);
      req.samples = samples;
      req.seed = out.seed;
      std::vector<std::size_t> n_list;
      if (!graph_file.empty()) {
        req.topology = qrem::Topology::kCustomGraph;
        req.graph = parse_file(graph_file, qrem::parse_graph);
        n_list = {req.graph->n_vertices()};
        cfg.push_back({"graph", graph_file});
      } else {
        req.topology = qrem::parse_topology(topology);
        n_list = parse_count_list(fid_n, "--n");
        cfg.push_back({"topology", topology});
        cfg.push_back({"n", fid_n});
      }
      cfg.push_back({"q", format_double(fid_q)});
      cfg.push_back({"method", method});
      cfg.push_back({"samples", std::to_string(samples)});
      cfg.push_back({"threads", std::to_string(qrem::detail::thread_count())});
      table.columns = {"n", "q", "method", "fidelity", "std_error", "seed"};
      for (const auto& r : qrem::fidelity_sweep(req, n_list, fid_q))
        table.rows.push_back({r.n, number(r.q), qrem::to_string(r.method), number(r.value),
                              number(r.std_error),
                              r.seed ? ordered_json(*r.seed) : ordered_json(nullptr)});
    } else if (*bnd) {
      cfg = base_config("bound", out);
      const auto qs = parse_real_list(bnd_q, "--q");
      check_rates(qs, "--q");
      const auto n_list = parse_count_list(bnd_n, "--n");
      const auto lv = parse_real_list(levels, "--levels");
      for (double b : lv)
        if (!(b > 0.0)) throw qrem::Error("--levels: bound must be positive");
      cfg.push_back({"q", bnd_q});
      cfg.push_back({"n", bnd_n});
      cfg.push_back({"levels", levels});
      table.columns = {"kind", "q", "n", "bound", "value"};
      for (const auto& r : qrem::bound_grid(qs, n_list))
        table.rows.push_back({"delta", number(r.q), r.n, nullptr, number(r.delta)});
      for (const auto& r : qrem::bound_contours(qs, lv))
        table.rows.push_back({"contour", number(r.q), nullptr, number(r.bound), number(r.n_star)});
    } else if (*ent) {
      cfg = base_config("entangle-noisy", out);
      const auto qs = parse_real_list(ent_q, "--q");
      const auto gates = parse_real_list(ent_gate, "--gate-noise");
      check_rates(qs, "--q");
      check_rates({ent_d0, ent_d1}, "--delta");
      for (double g : gates)
        if (!(g >= 0.0 && g <= 1.0)) throw qrem::Error("--gate-noise: rate outside [0, 1]");
      cfg.push_back({"n", std::to_string(ent_n)});
      cfg.push_back({"q", ent_q});
      cfg.push_back({"gate_noise", ent_gate});
      cfg.push_back({"delta0", format_double(ent_d0)});
      cfg.push_back({"delta1", format_double(ent_d1)});
      table.columns = {"n", "q", "gate_noise", "true_fidelity", "qrem_fidelity", "gap"};
      for (const auto& r : qrem::entangle_sweep(ent_n, qs, gates, ent_d0, ent_d1))
        table.rows.push_back({r.n, number(r.q), number(r.gate_noise), number(r.true_fidelity),
                              number(r.qrem_fidelity), number(r.gap)});
    } else if (*vqe) {
      cfg = base_config("vqe", out);
      const auto problems = load_problems(vqe_flags, cfg);
      const auto qs = parse_real_list(vqe_flags.q, "--q");
      check_rates(qs, "--q");
      check_rates({vqe_flags.delta0, vqe_flags.delta1}, "--delta");
      qrem::VqeConfig vc;
      vc.optimizer.max_evaluations = max_evals;
      vc.optimizer.ftol = ftol;
      if (vqe_gate > 0.0) vc.gate_noise = vqe_gate;
      cfg.push_back({"q", vqe_flags.q});
      cfg.push_back({"delta0", format_double(vqe_flags.delta0)});
      cfg.push_back({"delta1", format_double(vqe_flags.delta1)});
      cfg.push_back({"max_evals", std::to_string(max_evals)});
      cfg.push_back({"ftol", format_double(ftol)});
      cfg.push_back({"gate_noise", format_double(vqe_gate)});
      table.columns = {"n",     "q",           "energy",   "clean_energy",
                       "error", "evaluations", "converged"};
      for (const auto& r :
           qrem::vqe_sweep(problems, qs, vqe_flags.delta0, vqe_flags.delta1, vc))
        table.rows.push_back({r.n, number(r.q), number(r.energy), number(r.clean_energy),
                              number(r.error), r.evaluations, r.converged});
    } else if (*qte) {
      cfg = base_config("qte", out);
      const auto problems = load_problems(qte_flags, cfg);
      const auto qs = parse_real_list(qte_flags.q, "--q");
      check_rates(qs, "--q");
      check_rates({qte_flags.delta0, qte_flags.delta1}, "--delta");
      const auto ns_list = parse_count_list(ns, "--ns");
      for (std::size_t s : ns_list)
        if (s == 0) throw qrem::Error("--ns: step counts must be >= 1");
      cfg.push_back({"q", qte_flags.q});
      cfg.push_back({"delta0", format_double(qte_flags.delta0)});
      cfg.push_back({"delta1", format_double(qte_flags.delta1)});
      cfg.push_back({"ns", ns});
      cfg.push_back({"t", format_double(t)});
      table.columns = {"n",   "n_s", "t",           "q",           "e0",
                       "e_t", "e_t_trotter", "trotter_error", "total_error"};
      for (const auto& r :
           qrem::qte_sweep(problems, ns_list, qs, t, qte_flags.delta0, qte_flags.delta1))
        table.rows.push_back({r.n_qubits, r.n_s, number(r.t), number(r.q), number(r.e0),
                              number(r.e_t), number(r.e_t_trotter), number(r.trotter_error),
                              number(r.total_error)});
    }
    emit(out, cfg, table);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
