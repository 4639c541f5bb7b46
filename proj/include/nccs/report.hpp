#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nccs/forms.hpp"
#include "nccs/suites.hpp"
#include "nccs/witness.hpp"

namespace nccs {

using json = nlohmann::ordered_json;

/// Conventions every report is computed under.
inline json conventions_json() {
  return json{
      {"holonomy", "exp(X_j) for omega = sum_j X_j dx_j; the circle bundle with holonomy "
                   "exp(2 pi i theta) has omega = 2 pi i theta dx and alpha pairing theta"},
      {"log_branch", "principal (-pi, pi] by default (eigenvalue -1 rejected); unit_interval "
                     "[0, 2 pi) selectable; angle inputs bypass the logarithm"},
      {"cs_path", "nabla_t = nabla_0 + t (nabla_1 - nabla_0), coefficient 1/(k! (2 pi i)^(k+1)), "
                  "Gauss-Legendre in t"},
      {"cs_flat", "sum_k (-1)^k k! / ((2k+1)! (2 pi i)^(k+1)) tau(alpha^(2k+1))"},
      {"odd_character", "T^{-1} d_nabla T = U* K U + U* dU + U* omega U - omega for "
                        "T = exp(sum x_j K_j) U"},
      {"trace", "unnormalized matrix trace composed with the normalized algebra trace"},
      {"phi", "phi_u fixes A and sends z to z u"},
      {"cohomology", "classes compared through pairings with coordinate subtori"},
      {"haar", "agreement within 3 standard errors plus a 1e-12 rounding floor"},
  };
}

inline json complex_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline json pairings_json(const CyclePairing& p) {
  json a = json::array();
  for (const auto& [m, v] : p)
    a.push_back(json{{"cycle", mask_name(m)}, {"re", v.real()}, {"im", v.imag()}});
  return a;
}

inline json check_json(const CheckResult& c) {
  json j{{"suite", c.suite},         {"name", c.name},
         {"identity", c.identity},   {"instances", c.instances},
         {"residual", c.residual},   {"tolerance", c.tolerance},
         {"passed", c.passed}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline json checks_json(const std::vector<CheckResult>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back(check_json(c));
  return a;
}

inline json main_prop_json(const MainPropReport& r) {
  json chain = json::array();
  for (const auto& s : r.chain) chain.push_back(json{{"step", s.name}, {"residual", s.residual}});
  return json{{"ch_pairing", complex_json(r.ch_pairing)},
              {"alpha_pairing", complex_json(r.alpha_pairing)},
              {"residual", r.residual},
              {"intertwining_residual", r.intertwining},
              {"holonomy_residual", r.holonomy_residual},
              {"unitarity_defect", r.unitarity_defect},
              {"chain", chain}};
}

inline json haar_json(const HaarWitnessReport& r) {
  json diag = json::array();
  for (const auto& e : r.diagonal)
    diag.push_back(json{{"value", complex_json(e.value)}, {"std_error", e.std_error}});
  return json{{"angles", r.angles},
              {"alpha_total", r.alpha_total},
              {"alpha_mod1", r.alpha_mod1},
              {"ch_pairing", complex_json(r.ch_pairing.value)},
              {"ch_std_error", r.ch_pairing.std_error},
              {"deviation", r.deviation},
              {"diagonal", diag},
              {"diagonal_expected", r.diagonal_expected},
              {"intertwining_residual", r.intertwining},
              {"holonomy_residual", r.holonomy_residual},
              {"samples", r.samples}};
}

inline json lemma33_json(const Lemma33Report& r) {
  json cases = json::array();
  for (const auto& c : r.cases)
    cases.push_back(json{{"trace_u", complex_json(c.trace_u)},
                         {"direct_residual", c.direct_residual},
                         {"embedded", c.embedded},
                         {"embedded_residual", c.embedded_residual},
                         {"embedding_trace_residual", c.embedding_trace_residual}});
  return json{{"words_per_unitary", r.words}, {"max_residual", r.max_residual()}, {"cases", cases}};
}

}  // namespace nccs
