// Acceptance run: one PASS/FAIL line per criterion with its residual and
// wall-clock time against the budget. Exit status is nonzero if any fails.
//
// Suites run once each; a criterion drawn from a suite is charged the whole
// suite's time, which is never less than its own share.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "nccs/nccs.hpp"

namespace {

using nccs::CheckResult;
using Clock = std::chrono::steady_clock;

struct TimedSuite {
  std::vector<CheckResult> checks;
  double seconds = 0.0;
};

TimedSuite timed(const std::function<std::vector<CheckResult>()>& run) {
  const auto start = Clock::now();
  TimedSuite t;
  t.checks = run();
  t.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return t;
}

struct Criterion {
  int id;
  std::string title;
  const TimedSuite* suite;
  std::vector<std::string> checks;
  double budget;
};

bool report(const Criterion& c) {
  bool ok = c.suite->seconds <= c.budget;
  double residual = 0.0;
  double tolerance = -1.0;
  std::string missing;
  for (const auto& name : c.checks) {
    const CheckResult* hit = nullptr;
    for (const auto& r : c.suite->checks)
      if (r.name == name) hit = &r;
    if (!hit) {
      ok = false;
      missing += " " + name;
      continue;
    }
    ok = ok && hit->passed;
    if (tolerance < 0.0 || std::isnan(hit->residual) || hit->residual > residual) {
      residual = hit->residual;
      tolerance = hit->tolerance;
    }
    if (!hit->passed)
      std::printf("    failed %s: residual %.3e > %.1e\n", name.c_str(), hit->residual, hit->tolerance);
  }
  std::printf("criterion %2d %s  %-44s max residual %.3e (tol %.0e)  %.2f s / %.0f s%s\n", c.id,
              ok ? "PASS" : "FAIL", c.title.c_str(), residual, tolerance, c.suite->seconds,
              c.budget, missing.empty() ? "" : (" missing:" + missing).c_str());
  return ok;
}

}  // namespace

int main() {
  nccs::SuiteOptions opt;
  opt.seed = 20240601;
  opt.threads = 1;

  const auto forms = timed([&] { return nccs::forms_suite(opt, 50); });
  const auto characters = timed([&] { return nccs::characters_suite(opt, 25); });
  const auto prop19 = timed([&] { return nccs::prop19_suite(opt, 10); });
  const auto witness = timed([&] { return nccs::witness_suite(opt); });
  const auto lemma33 = timed([&] { return nccs::lemma33_checks(opt, 6, 5); });

  const std::vector<Criterion> criteria = {
      {1, "calculus identities, d <= 4", &forms, {"d_squared", "graded_leibniz", "associativity"}, 30},
      {2, "closedness of ch", &characters, {"closedness"}, 60},
      {3, "transgression and quadrature doubling", &characters,
       {"transgression", "quadrature_doubling"}, 120},
      {4, "flat closed form vs path, T^3", &characters, {"flat_closed_form"}, 60},
      {5, "sum and product identities", &prop19,
       {"ch_direct_sum", "ch_tensor_product", "cs_cocycle", "cs_direct_sum", "cs_tensor_product"},
       120},
      {6, "odd character vs flat transgression", &characters, {"odd_character_transgression"}, 30},
      {7, "circle normalization", &characters, {"circle_normalization"}, 5},
      {8, "rotation witness", &witness,
       {"rotation_main_identity", "rotation_intertwining", "rotation_trivial_angle_exact"}, 30},
      {9, "phi_u preserves the free-product trace", &lemma33,
       {"phi_preserves_trace", "phi_preserves_trace_embedded"}, 60},
      {10, "Haar route, n = 2, N = 1e5", &witness, {"haar_main_identity", "haar_diagonal_estimates"}, 120},
      {11, "reality of alpha", &characters, {"unitary_reality", "isometry_reality"}, 30},
  };

  bool all = true;
  for (const auto& c : criteria) all = report(c) && all;

  // Determinism: the full report at 1 and 4 threads, byte for byte.
  {
    const auto start = Clock::now();
    nccs::SuiteOptions one = opt, four = opt;
    four.threads = 4;
    const auto a = nccs::checks_json(nccs::run_suite("all", one).checks).dump(2);
    const auto b = nccs::checks_json(nccs::run_suite("all", four).checks).dump(2);
    const auto again = nccs::checks_json(nccs::run_suite("all", one).checks).dump(2);
    const bool ok = a == b && a == again;
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("criterion 12 %s  %-44s %zu bytes, threads 1 vs 4 %s, rerun %s  %.2f s\n",
                ok ? "PASS" : "FAIL", "byte-identical reports across --threads", a.size(),
                a == b ? "identical" : "DIFFER", a == again ? "identical" : "DIFFER", s);
    all = all && ok;
  }
  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
