#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nccs/connections.hpp"
#include "nccs/rational.hpp"

namespace nccs {

/// Scenario file does not match the schema; the message names the field.
class ScenarioError : public StructuralError {
 public:
  using StructuralError::StructuralError;
};

struct AlgebraSpec {
  std::string type = "matrix";  // matrix | rotation | haar | freeproduct
  int n = 1;
  Angle theta;
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  std::optional<int> max_word_length;
};

struct ConnectionSpec {
  std::string kind;  // trivial | holonomy | explicit
  nlohmann::json data;
  std::string path;
};

struct Scenario {
  int dim = 1;
  int rank = 1;
  AlgebraSpec algebra;
  std::vector<ConnectionSpec> connections;
  nlohmann::json gauge;
  nlohmann::json expect;
  nlohmann::json unitaries;
  std::string task;
  std::optional<std::string> suite;
  std::optional<double> tolerance;
  std::uint64_t seed = 1;
  std::optional<std::size_t> support_cap;
};

namespace scenario_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ScenarioError(path + ": " + what);
}

inline const json& need(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "number is not finite");
  return v;
}

inline std::int64_t integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  const auto v = integer(j, path);
  if (v < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

inline std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace scenario_detail

/// A real number, or [re, im].
inline cplx parse_complex(const nlohmann::json& j, const std::string& path) {
  using namespace scenario_detail;
  if (j.is_number()) return number(j, path);
  if (!j.is_array() || j.size() != 2) scenario_detail::fail(path, "expected a number or [re, im]");
  return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

/// Angle from a "p/q" or decimal string, or a plain number.
inline Angle parse_angle_json(const nlohmann::json& j, const std::string& path) {
  if (j.is_number()) return Angle{scenario_detail::number(j, path), std::nullopt};
  if (!j.is_string()) scenario_detail::fail(path, "expected an angle (number or \"p/q\" string)");
  try {
    return parse_angle(j.get<std::string>());
  } catch (const StructuralError& e) {
    scenario_detail::fail(path, e.what());
  }
}

/// Dense complex matrix given as a list of rows.
inline Eigen::MatrixXcd parse_matrix(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) scenario_detail::fail(path, "expected a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) scenario_detail::fail(path + "[0]", "expected a row");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto rp = path + "[" + std::to_string(i) + "]";
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      scenario_detail::fail(rp, "rows must all have " + std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = parse_complex(row[static_cast<std::size_t>(c)], rp + "[" + std::to_string(c) + "]");
  }
  return m;
}

inline Scenario parse_scenario(const nlohmann::json& j) {
  using namespace scenario_detail;
  if (!j.is_object()) fail("$", "scenario must be a JSON object");
  Scenario s;

  const auto& manifold = need(j, "manifold", "$");
  if (string(need(manifold, "type", "$.manifold"), "$.manifold.type") != "torus")
    fail("$.manifold.type", "only \"torus\" is supported");
  s.dim = static_cast<int>(integer(need(manifold, "dim", "$.manifold"), "$.manifold.dim"));
  if (s.dim < 1 || s.dim > kMaxDim)
    fail("$.manifold.dim", "torus dimension must be in 1.." + std::to_string(kMaxDim));

  s.task = string(need(j, "task", "$"), "$.task");
  static const std::vector<std::string> tasks = {"alpha",      "cs",      "odd-chern",
                                                 "kk-witness", "lemma33", "verify"};
  if (std::find(tasks.begin(), tasks.end(), s.task) == tasks.end())
    fail("$.task", "unknown task '" + s.task + "'");

  if (j.contains("bundle")) {
    const auto& b = j["bundle"];
    if (b.contains("rank")) {
      s.rank = static_cast<int>(integer(b["rank"], "$.bundle.rank"));
      if (s.rank < 1) fail("$.bundle.rank", "rank must be positive");
    }
    if (b.contains("algebra")) {
      const auto& a = b["algebra"];
      const std::string ap = "$.bundle.algebra";
      s.algebra.type = string(need(a, "type", ap), ap + ".type");
      const auto& t = s.algebra.type;
      if (t != "matrix" && t != "rotation" && t != "haar" && t != "freeproduct")
        fail(ap + ".type", "unknown algebra '" + t + "'");
      if (a.contains("n")) s.algebra.n = static_cast<int>(integer(a["n"], ap + ".n"));
      if (s.algebra.n < 1) fail(ap + ".n", "n must be positive");
      if (t == "rotation") s.algebra.theta = parse_angle_json(need(a, "theta", ap), ap + ".theta");
      if (a.contains("samples"))
        s.algebra.samples = static_cast<std::size_t>(unsigned_integer(a["samples"], ap + ".samples"));
      if (a.contains("seed")) s.algebra.seed = unsigned_integer(a["seed"], ap + ".seed");
      if (a.contains("maxWordLen"))
        s.algebra.max_word_length = static_cast<int>(integer(a["maxWordLen"], ap + ".maxWordLen"));
      if (s.algebra.samples < 1) fail(ap + ".samples", "need at least one sample");
      if (s.algebra.max_word_length && *s.algebra.max_word_length < 1) fail(ap + ".maxWordLen", "must be positive");
    }
  } else if (s.task != "verify" && s.task != "lemma33") {
    fail("$.bundle", "missing required field");
  }

  if (j.contains("connections")) {
    const auto& cs = j["connections"];
    if (!cs.is_array()) fail("$.connections", "expected a list");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const auto p = "$.connections[" + std::to_string(i) + "]";
      ConnectionSpec c;
      c.kind = string(need(cs[i], "kind", p), p + ".kind");
      if (c.kind != "trivial" && c.kind != "holonomy" && c.kind != "explicit")
        fail(p + ".kind", "unknown connection kind '" + c.kind + "'");
      if (c.kind != "trivial") c.data = need(cs[i], "data", p);
      c.path = p + ".data";
      s.connections.push_back(std::move(c));
    }
  }
  if (j.contains("gauge")) s.gauge = j["gauge"];
  if (j.contains("expect")) s.expect = j["expect"];
  if (j.contains("unitaries")) s.unitaries = j["unitaries"];
  if (j.contains("suite")) s.suite = string(j["suite"], "$.suite");
  if (j.contains("tolerance")) {
    s.tolerance = number(j["tolerance"], "$.tolerance");
    if (*s.tolerance < 0.0) fail("$.tolerance", "tolerance must be non-negative");
  }
  if (j.contains("seed")) s.seed = unsigned_integer(j["seed"], "$.seed");
  if (j.contains("supportCap"))
    s.support_cap = static_cast<std::size_t>(unsigned_integer(j["supportCap"], "$.supportCap"));
  return s;
}

/// Fibre size of the dense view: rank for complex fibres, rank * n over M_n.
inline int dense_size(const Scenario& s) { return s.rank * s.algebra.n; }

inline Eigen::MatrixXcd require_shape(Eigen::MatrixXcd m, int size, const std::string& path) {
  if (m.rows() != size || m.cols() != size)
    scenario_detail::fail(path, "expected a " + std::to_string(size) + "x" + std::to_string(size) +
                                    " matrix");
  return m;
}

inline Freq parse_freq(const nlohmann::json& j, int dim, const std::string& path) {
  Freq k{};
  if (j.is_null()) return k;
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    scenario_detail::fail(path, "expected " + std::to_string(dim) + " integer frequencies");
  for (int i = 0; i < dim; ++i) {
    const auto v = scenario_detail::integer(j[static_cast<std::size_t>(i)],
                                            path + "[" + std::to_string(i) + "]");
    if (std::abs(v) > 1000000) scenario_detail::fail(path, "frequency out of range");
    k[static_cast<std::size_t>(i)] = static_cast<int>(v);
  }
  return k;
}

/// Build a connection over a dense-representable fibre algebra.
template <TracedStarAlgebra A>
  requires DenseRepresentable<A>
Connection<A> build_connection(const Scenario& s, const ConnectionSpec& c,
                               std::shared_ptr<const A> alg) {
  using namespace scenario_detail;
  const int size = dense_size(s);
  if (c.kind == "trivial") return Connection<A>::trivial(alg, s.dim, s.rank);
  const auto& d = c.data;
  if (c.kind == "holonomy") {
    std::vector<Eigen::MatrixXcd> gens;
    if (d.contains("angles")) {
      const auto& a = d["angles"];
      if (!a.is_array() || static_cast<int>(a.size()) != s.dim)
        fail(c.path + ".angles", "expected one entry per torus direction");
      for (int j = 0; j < s.dim; ++j) {
        const auto p = c.path + ".angles[" + std::to_string(j) + "]";
        const auto& e = a[static_cast<std::size_t>(j)];
        Eigen::VectorXcd diag(size);
        if (e.is_array()) {
          if (static_cast<int>(e.size()) != size)
            fail(p, "expected " + std::to_string(size) + " angles");
          for (int i = 0; i < size; ++i)
            diag(i) = kTwoPiI * parse_angle_json(e[static_cast<std::size_t>(i)],
                                                 p + "[" + std::to_string(i) + "]")
                                    .value;
        } else {
          diag.setConstant(kTwoPiI * parse_angle_json(e, p).value);
        }
        gens.push_back(diag.asDiagonal());
      }
      return flat_from_generators<A>(alg, s.dim, gens);
    }
    const bool explicit_logs = d.contains("generators");
    const char* key = explicit_logs ? "generators" : "matrices";
    const auto& mats = need(d, key, c.path);
    if (!mats.is_array() || static_cast<int>(mats.size()) != s.dim)
      fail(c.path + "." + key, "expected one matrix per torus direction");
    for (int j = 0; j < s.dim; ++j) {
      const auto p = c.path + "." + key + "[" + std::to_string(j) + "]";
      gens.push_back(require_shape(parse_matrix(mats[static_cast<std::size_t>(j)], p), size, p));
    }
    if (explicit_logs) return flat_from_generators<A>(alg, s.dim, gens);
    LogBranch branch = LogBranch::principal;
    if (d.contains("branch")) {
      const auto b = string(d["branch"], c.path + ".branch");
      if (b == "unit_interval")
        branch = LogBranch::unit_interval;
      else if (b != "principal")
        fail(c.path + ".branch", "expected \"principal\" or \"unit_interval\"");
    }
    return flat_from_holonomies<A>(alg, HolonomyData::from_matrices(gens), branch);
  }
  // explicit
  const auto& terms = need(d, "terms", c.path);
  if (!terms.is_array()) fail(c.path + ".terms", "expected a list");
  GradedForm<A> omega(alg, s.dim, s.rank, s.rank);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto p = c.path + ".terms[" + std::to_string(i) + "]";
    const auto dx = integer(need(terms[i], "dx", p), p + ".dx");
    if (dx < 1 || dx > s.dim) fail(p + ".dx", "direction must be in 1.." + std::to_string(s.dim));
    const Freq k = parse_freq(terms[i].contains("freq") ? terms[i]["freq"] : nlohmann::json(),
                              s.dim, p + ".freq");
    const auto m = require_shape(parse_matrix(need(terms[i], "matrix", p), p + ".matrix"), size,
                                 p + ".matrix");
    omega.add_term(static_cast<Mask>(1u << (dx - 1)), k, DenseView<A>::from_dense(*alg, m));
  }
  omega.canonicalize();
  return Connection<A>(std::move(omega));
}

/// Gauge transformation {"terms": [{"freq", "matrix"}], "phase_generators": [...]}.
template <TracedStarAlgebra A>
  requires DenseRepresentable<A>
GaugeTransform<A> build_gauge(const Scenario& s, std::shared_ptr<const A> alg) {
  using namespace scenario_detail;
  const std::string path = "$.gauge";
  if (s.gauge.is_null()) fail(path, "missing required field");
  const int size = dense_size(s);
  const auto& terms = need(s.gauge, "terms", path);
  if (!terms.is_array() || terms.empty()) fail(path + ".terms", "expected a non-empty list");
  GradedForm<A> u(alg, s.dim, s.rank, s.rank);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto p = path + ".terms[" + std::to_string(i) + "]";
    const Freq k = parse_freq(terms[i].contains("freq") ? terms[i]["freq"] : nlohmann::json(),
                              s.dim, p + ".freq");
    const auto m = require_shape(parse_matrix(need(terms[i], "matrix", p), p + ".matrix"), size,
                                 p + ".matrix");
    u.add_term(Mask{0}, k, DenseView<A>::from_dense(*alg, m));
  }
  u.canonicalize();
  std::vector<Mat<typename A::element>> ks;
  if (s.gauge.contains("phase_generators")) {
    const auto& g = s.gauge["phase_generators"];
    if (!g.is_array() || static_cast<int>(g.size()) != s.dim)
      fail(path + ".phase_generators", "expected one matrix per torus direction");
    for (int j = 0; j < s.dim; ++j) {
      const auto p = path + ".phase_generators[" + std::to_string(j) + "]";
      ks.push_back(DenseView<A>::from_dense(
          *alg, require_shape(parse_matrix(g[static_cast<std::size_t>(j)], p), size, p)));
    }
  }
  return GaugeTransform<A>(std::move(u), std::move(ks), 1e-10);
}

}  // namespace nccs
