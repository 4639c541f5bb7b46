// nccs: run Chern-Simons scenarios and verification suites from the command line.
//
// Exit codes: 0 success, 1 a checked identity failed, 2 invalid input or a
// resource limit was hit.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "nccs/nccs.hpp"

namespace {

using nccs::json;

struct Options {
  std::string scenario;
  std::string out;
  std::string csv;
  std::string suite;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool timing = false;
};

struct CsvRow {
  std::string label;
  std::string cycle;
  nccs::cplx value;
};

/// Everything a task produces.
struct Outcome {
  json results = json::object();
  std::vector<nccs::CheckResult> checks;
  std::vector<CsvRow> csv;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nccs::CheckResult check(const std::string& name, const std::string& identity, double residual,
                        double tolerance, std::size_t instances = 1) {
  nccs::CheckResult c{"scenario", name, identity, instances, residual, tolerance, false, {}};
  c.passed = !std::isnan(residual) && residual <= tolerance;
  return c;
}

void add_pairings(Outcome& o, const std::string& label, const nccs::CyclePairing& p) {
  o.results[label] = nccs::pairings_json(p);
  for (const auto& [m, v] : p) o.csv.push_back({label, nccs::mask_name(m), v});
}

/// Compare pairings against {"expect": {"pairings": {"dx1": "1/3", ...}}}.
void check_expected(Outcome& o, const nccs::Scenario& s, const nccs::CyclePairing& p, double tol) {
  if (s.expect.is_null() || !s.expect.contains("pairings")) return;
  const auto& e = s.expect["pairings"];
  if (!e.is_object()) throw nccs::ScenarioError("$.expect.pairings: expected an object");
  for (const auto& [cycle, value] : e.items()) {
    const auto path = "$.expect.pairings." + cycle;
    const nccs::cplx want = value.is_array() ? nccs::parse_complex(value, path)
                                             : nccs::cplx(nccs::parse_angle_json(value, path).value);
    const nccs::CyclePairing::value_type* hit = nullptr;
    for (const auto& kv : p)
      if (nccs::mask_name(kv.first) == cycle) hit = &kv;
    if (!hit) throw nccs::ScenarioError(path + ": no such cycle in the result");
    o.checks.push_back(check("expected_pairing_" + cycle, "pairing on " + cycle + " matches expect",
                             std::abs(hit->second - want), tol));
  }
}

template <class A>
nccs::Connection<A> connection_at(const nccs::Scenario& s, std::size_t i,
                                  const std::shared_ptr<const A>& alg) {
  if (i >= s.connections.size()) return nccs::Connection<A>::trivial(alg, s.dim, s.rank);
  return nccs::build_connection<A>(s, s.connections[i], alg);
}

template <class A>
Outcome run_alpha(const nccs::Scenario& s, std::shared_ptr<const A> alg, double tol) {
  if (s.connections.empty()) throw nccs::ScenarioError("$.connections: need a flat connection");
  const auto flat = connection_at(s, 0, alg);
  const auto triv = s.gauge.is_null()
                        ? connection_at(s, 1, alg)
                        : nccs::gauge_transform(
                              nccs::Connection<A>::trivial(alg, s.dim, s.rank),
                              nccs::build_gauge<A>(s, alg));
  const auto r = s.gauge.is_null() ? nccs::alpha_invariant(flat, triv)
                                   : nccs::alpha_invariant(flat, nccs::build_gauge<A>(s, alg));
  Outcome o;
  add_pairings(o, "alpha", r.pairings);
  o.results["max_imag"] = r.max_imag;
  const bool unitary = nccs::unitarity_check(flat) && nccs::unitarity_check(triv);
  o.results["unitary"] = unitary;
  if (unitary)
    o.checks.push_back(check("alpha_real", "Im alpha = 0 for unitary flat bundles", r.max_imag, tol));
  check_expected(o, s, r.pairings, tol);
  return o;
}

template <class A>
Outcome run_cs(const nccs::Scenario& s, std::shared_ptr<const A> alg, double tol) {
  if (s.connections.size() < 2) throw nccs::ScenarioError("$.connections: need two connections");
  const auto c0 = connection_at(s, 0, alg);
  const auto c1 = connection_at(s, 1, alg);
  const int nodes = nccs::default_quadrature_nodes(s.dim);
  const auto cs = nccs::chern_simons_path(c0, c1, nodes);
  Outcome o;
  add_pairings(o, "cs", nccs::cycle_pairings(cs, true));
  o.results["quadrature_nodes"] = nodes;
  const double transgression = (nccs::exterior_derivative(cs) -
                                (nccs::chern_character(c1) - nccs::chern_character(c0)))
                                   .max_abs();
  o.checks.push_back(check("transgression", "d cs = ch(nabla_1) - ch(nabla_0)", transgression, tol));
  const double doubling = (nccs::chern_simons_path(c0, c1, 2 * nodes) - cs).max_abs();
  o.checks.push_back(check("quadrature_doubling", "cs is unchanged when nodes double", doubling,
                           std::min(tol, 1e-12)));
  if (nccs::is_flat(c0) && nccs::is_flat(c1)) {
    const auto flat = nccs::chern_simons_flat(c1, c0);
    o.checks.push_back(check("flat_closed_form", "closed-form cs pairs like the path integral",
                             nccs::pairing_distance(nccs::cycle_pairings(flat, true),
                                                    nccs::cycle_pairings(cs, true)),
                             tol));
  }
  check_expected(o, s, nccs::cycle_pairings(cs, true), tol);
  return o;
}

template <class A>
Outcome run_odd_chern(const nccs::Scenario& s, std::shared_ptr<const A> alg, double tol) {
  const auto c = connection_at(s, 0, alg);
  const auto t = nccs::build_gauge<A>(s, alg);
  const auto ch = nccs::odd_chern_character(t, c);
  Outcome o;
  add_pairings(o, "odd_chern", nccs::cycle_pairings(ch, true));
  if (nccs::is_flat(c)) {
    o.checks.push_back(
        check("closed", "d ch(T, nabla) = 0", nccs::exterior_derivative(ch).max_abs(), tol));
    const auto cs = nccs::chern_simons_flat(nccs::gauge_transform(c, t), c);
    o.checks.push_back(check("odd_character_transgression", "ch(T, nabla) = cs(T^{-1} nabla T, nabla)",
                             (ch - cs).max_abs(), tol));
  }
  check_expected(o, s, nccs::cycle_pairings(ch, true), tol);
  return o;
}

/// The n x n holonomy of connections[0] for the witness tasks.
Eigen::MatrixXcd witness_holonomy(const nccs::Scenario& s, int n) {
  if (s.connections.empty() || s.connections[0].kind == "trivial")
    return Eigen::MatrixXcd::Identity(n, n);
  const auto& c = s.connections[0];
  if (c.kind != "holonomy")
    throw nccs::ScenarioError(c.path + ": witness tasks need a holonomy connection");
  nccs::Scenario local = s;
  local.rank = 1;
  local.algebra.n = n;
  auto alg = std::make_shared<const nccs::MatrixAlgebra>(n);
  const auto conn = nccs::build_connection<nccs::MatrixAlgebra>(local, c, alg);
  return nccs::holonomy(conn, 0);
}

Outcome run_witness(const nccs::Scenario& s, const Options& opt, double tol) {
  if (s.dim != 1) throw nccs::ScenarioError("$.manifold.dim: witness tasks live on the circle");
  Outcome o;
  const auto& type = s.algebra.type;
  auto main_checks = [&](const nccs::MainPropReport& r) {
    o.results["main"] = nccs::main_prop_json(r);
    o.csv.push_back({"ch_pairing", "dx1", r.ch_pairing});
    o.csv.push_back({"alpha_pairing", "dx1", r.alpha_pairing});
    o.checks.push_back(check("main_identity", "<ch(T), [S^1]> = alpha", r.residual, tol));
    o.checks.push_back(check("intertwining", "T^{-1} (triv x W) T = V x W", r.intertwining, tol));
    o.checks.push_back(check("holonomy_conjugation", "U h U* = gamma", r.holonomy_residual, tol));
    o.checks.push_back(check("intertwiner_unitary", "T* T = 1", r.unitarity_defect, tol));
    for (const auto& step : r.chain) o.checks.push_back(check(step.name, step.name, step.residual, tol));
  };
  if (type == "rotation") {
    const double theta = s.algebra.theta.value;
    if (!(theta >= 0.0 && theta < 1.0))
      throw nccs::ScenarioError("$.bundle.algebra.theta: angle must lie in [0, 1)");
    o.results["backend"] = "rotation";
    o.results["theta"] = theta;
    main_checks(nccs::main_prop_check(nccs::build_rotation_witness(theta)));
  } else if (type == "freeproduct") {
    const auto psi = witness_holonomy(s, s.algebra.n);
    o.results["backend"] = "freeproduct";
    main_checks(nccs::main_prop_check(
        nccs::build_freeproduct_witness(psi, s.algebra.max_word_length.value_or(32))));
  } else if (type == "haar") {
    const auto u = witness_holonomy(s, s.algebra.n);
    const auto r = nccs::haar_witness_check(u, s.algebra.samples, s.algebra.seed, opt.threads);
    o.results["backend"] = "haar";
    o.results["haar"] = nccs::haar_json(r);
    o.csv.push_back({"ch_pairing", "dx1", r.ch_pairing.value});
    o.csv.push_back({"alpha_pairing", "dx1", r.alpha_total});
    const double floor = opt.tol.value_or(1e-12);
    auto c = check("haar_main_identity", "Monte-Carlo <ch(T), [S^1]> within 3 standard errors",
                   r.deviation, 3.0 * r.ch_pairing.std_error + floor);
    o.checks.push_back(c);
    o.checks.push_back(check("intertwining", "T^{-1} (triv x W) T = V x W",
                             std::max(r.intertwining, r.holonomy_residual), tol));
  } else {
    throw nccs::ScenarioError("$.bundle.algebra.type: kk-witness needs rotation, freeproduct or haar");
  }
  return o;
}

Outcome run_lemma33(const nccs::Scenario& s, const Options& opt, std::uint64_t seed, double tol) {
  if (s.algebra.type != "freeproduct")
    throw nccs::ScenarioError("$.bundle.algebra.type: lemma33 needs a freeproduct algebra");
  const int n = s.algebra.n;
  std::vector<Eigen::MatrixXcd> us;
  if (!s.unitaries.is_null()) {
    if (!s.unitaries.is_array() || s.unitaries.empty())
      throw nccs::ScenarioError("$.unitaries: expected a non-empty list of matrices");
    for (std::size_t i = 0; i < s.unitaries.size(); ++i) {
      const auto p = "$.unitaries[" + std::to_string(i) + "]";
      us.push_back(nccs::require_shape(nccs::parse_matrix(s.unitaries[i], p), n, p));
      if (!nccs::is_unitary(us.back())) throw nccs::ScenarioError(p + ": not unitary within 1e-12");
    }
  } else if (n == 2) {
    us = nccs::lemma33_unitaries(seed);
  } else {
    throw nccs::ScenarioError("$.unitaries: required unless n = 2");
  }
  const int length = s.algebra.max_word_length.value_or(6);
  const auto r = nccs::lemma33_suite(us, length, 5, seed, opt.threads);
  Outcome o;
  o.results["lemma33"] = nccs::lemma33_json(r);
  o.results["max_word_length"] = length;
  double direct = 0.0, embedded = 0.0;
  for (const auto& c : r.cases) {
    direct = std::max(direct, c.direct_residual);
    embedded = std::max({embedded, c.embedded_residual, c.embedding_trace_residual});
  }
  o.checks.push_back(check("phi_preserves_trace", "tau(phi_u(w)) = tau(w)", direct, tol, us.size()));
  o.checks.push_back(check("phi_preserves_trace_embedded", "same identity through A + A", embedded,
                           tol, us.size()));
  return o;
}

template <class F>
Outcome with_fibre(const nccs::Scenario& s, F&& f) {
  if (s.algebra.type != "matrix")
    throw nccs::ScenarioError("$.bundle.algebra.type: task '" + s.task +
                              "' needs a matrix algebra fibre");
  if (s.algebra.n == 1) return f(nccs::scalars());
  return f(std::make_shared<const nccs::MatrixAlgebra>(s.algebra.n));
}

nccs::Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("scenario '" + path + "' is not valid JSON: " + e.what());
  }
  return nccs::parse_scenario(j);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

std::string csv_text(const std::vector<CsvRow>& rows) {
  std::ostringstream s;
  s << std::setprecision(17) << "label,cycle,re,im\n";
  for (const auto& r : rows)
    s << r.label << ',' << r.cycle << ',' << r.value.real() << ',' << r.value.imag() << '\n';
  return s.str();
}

void print_table(const std::vector<nccs::CheckResult>& checks) {
  std::cerr << std::left << std::setw(8) << "status" << std::setw(40) << "check" << std::setw(14)
            << "residual"
            << "tolerance\n";
  for (const auto& c : checks)
    std::cerr << std::setw(8) << (c.passed ? "pass" : "FAIL") << std::setw(40) << c.name
              << std::setw(14) << std::setprecision(4) << c.residual << c.tolerance << "\n";
}

int run(const std::string& command, const Options& opt) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<nccs::Scenario> scenario;
  if (!opt.scenario.empty()) scenario = load_scenario(opt.scenario);
  if (!scenario && command != "verify")
    throw InputError("--scenario is required for '" + command + "'");
  if (scenario && scenario->task != command)
    throw nccs::ScenarioError("$.task: scenario task '" + scenario->task +
                              "' does not match subcommand '" + command + "'");
  if (scenario && scenario->support_cap) nccs::set_support_cap(*scenario->support_cap);

  const std::uint64_t seed = opt.seed.value_or(scenario ? scenario->seed : 1);
  const std::optional<double> tol_override = opt.tol ? opt.tol : (scenario ? scenario->tolerance : std::nullopt);
  const double tol = tol_override.value_or(1e-9);

  Outcome outcome;
  json report;
  report["tool"] = "nccs";
  report["command"] = command;
  report["seed"] = seed;
  if (command == "verify") {
    std::string suite = opt.suite.empty() ? (scenario && scenario->suite ? *scenario->suite : "all")
                                          : opt.suite;
    nccs::SuiteOptions so;
    so.seed = seed;
    so.threads = opt.threads;
    so.tolerance = tol_override;
    report["suite"] = suite;
    const auto r = nccs::run_suite(suite, so);
    outcome.checks = r.checks;
  } else {
    const auto& s = *scenario;
    report["tolerance"] = tol;
    if (command == "alpha")
      outcome = with_fibre(s, [&](auto alg) { return run_alpha(s, alg, tol); });
    else if (command == "cs")
      outcome = with_fibre(s, [&](auto alg) { return run_cs(s, alg, tol); });
    else if (command == "odd-chern")
      outcome = with_fibre(s, [&](auto alg) { return run_odd_chern(s, alg, tol); });
    else if (command == "kk-witness")
      outcome = run_witness(s, opt, tol);
    else if (command == "lemma33")
      outcome = run_lemma33(s, opt, seed, tol);
  }

  bool passed = true;
  for (const auto& c : outcome.checks) passed = passed && c.passed;
  report["conventions"] = nccs::conventions_json();
  report["results"] = outcome.results;
  report["checks"] = nccs::checks_json(outcome.checks);
  report["passed"] = passed;
  if (opt.timing)
    report["timing_ms"] = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();

  const std::string text = report.dump(2) + "\n";
  if (opt.out.empty())
    std::cout << text;
  else
    write_text(opt.out, text);
  if (!opt.csv.empty()) write_text(opt.csv, csv_text(outcome.csv));
  if (!passed) {
    std::cerr << "nccs: " << command << ": one or more checks failed\n";
    print_table(outcome.checks);
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traced Chern-Weil computations on flat tori"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"alpha", "alpha-invariant pairings of a flat connection"},
      {"cs", "Chern-Simons form of the linear path between two connections"},
      {"odd-chern", "odd Chern character of a gauge transformation"},
      {"kk-witness", "operator-algebra witness for the alpha-invariant"},
      {"lemma33", "trace invariance of phi_u on the free product"},
      {"verify", "run property suites"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opt.scenario, "scenario JSON file");
    sub->add_option("--out", opt.out, "write the JSON report here instead of stdout");
    sub->add_option("--csv", opt.csv, "write pairing vectors as CSV");
    sub->add_option("--tol", opt.tol, "tolerance for every check")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--threads", opt.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--timing", opt.timing, "include wall-clock time in the report");
    if (name == "verify")
      sub->add_option("--suite", opt.suite, "forms | characters | prop19 | witness | lemma33 | all")
          ->check(CLI::IsMember(nccs::suite_names()));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const nccs::ResourceError& e) {
    std::cerr << "nccs: resource limit: " << e.what() << "\n";
  } catch (const nccs::ScenarioError& e) {
    std::cerr << "nccs: invalid scenario: " << e.what() << "\n";
  } catch (const InputError& e) {
    std::cerr << "nccs: " << e.what() << "\n";
  } catch (const std::logic_error& e) {
    std::cerr << "nccs: invalid input: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "nccs: invalid scenario: " << e.what() << "\n";
  }
  return 2;
}
