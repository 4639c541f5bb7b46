#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nccs/characters.hpp"
#include "nccs/connections.hpp"
#include "nccs/forms.hpp"
#include "nccs/parallel.hpp"
#include "nccs/random.hpp"
#include "nccs/witness.hpp"

namespace nccs {

/// One verified identity: the largest residual over its instances.
struct CheckResult {
  std::string suite;
  std::string name;
  std::string identity;
  std::size_t instances = 0;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string note;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<double> tolerance;  // overrides every default tolerance
  std::size_t haar_samples = 100000;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

namespace detail {

inline std::uint64_t tag_of(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) h = (h ^ ch) * 0x100000001b3ull;
  return h;
}

/// NaN-propagating max.
inline double worst(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  return std::max(a, b);
}

/// Run f(rng, i) for i < count in parallel and return the largest residual.
/// Each instance has its own generator seeded from (seed, name, i).
template <class F>
double max_residual(const SuiteOptions& opt, std::string_view name, std::size_t count, F&& f) {
  std::vector<double> slots(count, 0.0);
  const std::uint64_t base = mix_seed(opt.seed, tag_of(name));
  parallel_for(count, opt.threads, [&](std::size_t i) {
    std::mt19937_64 rng(mix_seed(base, i));
    slots[i] = f(rng, i);
  });
  double m = 0.0;
  for (double r : slots) m = worst(m, r);
  return m;
}

inline CheckResult make_check(const SuiteOptions& opt, std::string suite, std::string name,
                              std::string identity, std::size_t instances, double residual,
                              double tolerance) {
  CheckResult c{std::move(suite), std::move(name), std::move(identity), instances, residual,
                opt.tolerance.value_or(tolerance), false, {}};
  c.passed = !std::isnan(c.residual) && c.residual <= c.tolerance;
  return c;
}

inline double scalar_form_distance(const ScalarForm& a, const ScalarForm& b) {
  return (a - b).max_abs();
}

inline double sign_of_degree_product(int p, int q) { return (p * q) % 2 ? -1.0 : 1.0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Exterior calculus.

inline std::vector<CheckResult> forms_suite(const SuiteOptions& opt, int per_dim = 50) {
  using detail::make_check;
  using detail::max_residual;
  std::vector<CheckResult> out;
  const auto s = scalars();
  auto spec_for = [](int d) { return RandomFormSpec{d, 2, 2, 2, 2, 1.0}; };
  auto all_degrees = [](int d) {
    std::vector<int> v;
    for (int p = 0; p <= d; ++p) v.push_back(p);
    return v;
  };
  const std::size_t count = static_cast<std::size_t>(per_dim) * 4;

  auto dd = max_residual(opt, "dd", count, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 4) + 1;
    const auto f = random_form<ScalarAlgebra>(s, spec_for(d), all_degrees(d), rng);
    return exterior_derivative(exterior_derivative(f)).max_abs();
  });
  out.push_back(make_check(opt, "forms", "d_squared", "d(d f) = 0", count, dd, 1e-12));

  auto leibniz = max_residual(opt, "leibniz", count, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 4) + 1;
    std::uniform_int_distribution<int> pick(0, d);
    const int p = pick(rng), q = pick(rng);
    const auto a = random_form<ScalarAlgebra>(s, spec_for(d), {p}, rng);
    const auto b = random_form<ScalarAlgebra>(s, spec_for(d), {q}, rng);
    const auto lhs = exterior_derivative(wedge(a, b));
    const auto rhs = wedge(exterior_derivative(a), b) +
                     cplx(p % 2 ? -1.0 : 1.0) * wedge(a, exterior_derivative(b));
    return (lhs - rhs).max_abs();
  });
  out.push_back(make_check(opt, "forms", "graded_leibniz",
                           "d(a ^ b) = da ^ b + (-1)^|a| a ^ db", count, leibniz, 1e-12));

  auto assoc = max_residual(opt, "assoc", count, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 4) + 1;
    const auto a = random_form<ScalarAlgebra>(s, spec_for(d), all_degrees(d), rng);
    const auto b = random_form<ScalarAlgebra>(s, spec_for(d), all_degrees(d), rng);
    const auto c = random_form<ScalarAlgebra>(s, spec_for(d), all_degrees(d), rng);
    return (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs();
  });
  out.push_back(
      make_check(opt, "forms", "associativity", "(a ^ b) ^ c = a ^ (b ^ c)", count, assoc, 1e-12));

  auto invol = max_residual(opt, "involution", count, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 4) + 1;
    std::uniform_int_distribution<int> pick(0, d);
    const int p = pick(rng), q = pick(rng);
    const auto a = random_form<ScalarAlgebra>(s, spec_for(d), {p}, rng);
    const auto b = random_form<ScalarAlgebra>(s, spec_for(d), {q}, rng);
    return (star(wedge(a, b)) -
            cplx(detail::sign_of_degree_product(p, q)) * wedge(star(b), star(a)))
        .max_abs();
  });
  out.push_back(make_check(opt, "forms", "involution", "(a ^ b)* = (-1)^{|a||b|} b* ^ a*", count,
                           invol, 1e-12));

  auto stokes = max_residual(opt, "stokes", count, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 4) + 1;
    auto spec = spec_for(d);
    spec.rows = spec.cols = 1;
    const auto f = random_form<ScalarAlgebra>(s, spec, all_degrees(d), rng);
    double m = 0.0;
    for (const auto& [mask, v] : cycle_pairings(exterior_derivative(f), true)) m = std::max(m, std::abs(v));
    for (const auto& [mask, v] : cycle_pairings(exterior_derivative(f), false)) m = std::max(m, std::abs(v));
    return m;
  });
  out.push_back(make_check(opt, "forms", "stokes", "<d f, [T^I]> = 0 on coordinate cycles", count,
                           stokes, 1e-12));
  return out;
}

// ---------------------------------------------------------------------------
// Characters.

namespace detail {

/// Random connection alternating between scalar rank-2 and M_2 rank-1 fibres.
template <class F>
double on_random_connection(std::mt19937_64& rng, std::size_t i, int d, F&& f) {
  RandomFormSpec spec{d, 2, 2, 2, 1, 0.5};
  if (i % 2 == 0) return f(random_connection<ScalarAlgebra>(scalars(), spec, rng), rng);
  spec.rows = spec.cols = 1;
  auto m2 = std::make_shared<const MatrixAlgebra>(2);
  return f(random_connection<MatrixAlgebra>(m2, spec, rng), rng);
}

/// Flat nabla_0 from commuting constants on T^d and nabla_1 = T^{-1} nabla_0 T
/// for a monomial-type unitary T.
struct GaugePair {
  Connection<ScalarAlgebra> c0;
  GaugeTransform<ScalarAlgebra> t;
  Connection<ScalarAlgebra> c1;
};

inline GaugePair random_gauge_pair(int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rank_pick(2, 3);
  const int rank = rank_pick(rng);
  auto flat = random_commuting_flat(dim, rank, rng);
  GaugeTransform<ScalarAlgebra> t(random_monomial_unitary(dim, rank, 1, rng), {}, 1e-10);
  auto c1 = gauge_transform(flat.connection, t);
  return GaugePair{flat.connection, std::move(t), std::move(c1)};
}

}  // namespace detail

inline std::vector<CheckResult> characters_suite(const SuiteOptions& opt, int per_dim = 25) {
  using detail::make_check;
  using detail::max_residual;
  std::vector<CheckResult> out;
  const std::size_t count = static_cast<std::size_t>(per_dim) * 4;

  auto closed = max_residual(opt, "closedness", count, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i / 2 % 4) + 1;
    return detail::on_random_connection(rng, i, d, [](const auto& c, std::mt19937_64&) {
      return exterior_derivative(chern_character(c)).max_abs();
    });
  });
  out.push_back(make_check(opt, "characters", "closedness", "d ch(nabla) = 0", count, closed, 1e-10));

  std::vector<double> doubling(count, 0.0);
  auto transgression =
      max_residual(opt, "transgression", count, [&](std::mt19937_64& rng, std::size_t i) {
        const int d = static_cast<int>(i / 2 % 4) + 1;
        return detail::on_random_connection(rng, i, d, [&](const auto& c0, std::mt19937_64& r) {
          using A = typename std::decay_t<decltype(c0)>::Form::algebra_type;
          RandomFormSpec spec{d, c0.rank(), c0.rank(), 2, 1, 0.5};
          const auto c1 = random_connection<A>(c0.algebra_ptr(), spec, r);
          const int nodes = default_quadrature_nodes(d);
          const auto cs = chern_simons_path(c0, c1, nodes);
          doubling[i] = (chern_simons_path(c0, c1, 2 * nodes) - cs).max_abs();
          return (exterior_derivative(cs) - (chern_character(c1) - chern_character(c0))).max_abs();
        });
      });
  out.push_back(make_check(opt, "characters", "transgression",
                           "d cs(nabla_0, nabla_1) = ch(nabla_1) - ch(nabla_0)", count,
                           transgression, 1e-9));
  double dbl = 0.0;
  for (double v : doubling) dbl = detail::worst(dbl, v);
  out.push_back(make_check(opt, "characters", "quadrature_doubling",
                           "cs with 2N Gauss-Legendre nodes equals cs with N nodes", count, dbl,
                           1e-12));

  const std::size_t flat_count = static_cast<std::size_t>(per_dim);
  auto closed_form = max_residual(opt, "flat_closed_form", flat_count,
                                  [&](std::mt19937_64& rng, std::size_t) {
                                    const auto p = detail::random_gauge_pair(3, rng);
                                    return pairing_distance(
                                        cycle_pairings(chern_simons_flat(p.c1, p.c0), true),
                                        cycle_pairings(chern_simons_path(p.c0, p.c1), true));
                                  });
  out.push_back(make_check(opt, "characters", "flat_closed_form",
                           "closed-form cs between flat connections pairs like the path integral",
                           flat_count, closed_form, 1e-9));

  auto odd = max_residual(opt, "odd_character", flat_count, [&](std::mt19937_64& rng, std::size_t) {
    const auto p = detail::random_gauge_pair(3, rng);
    return (odd_chern_character(p.t, p.c0) - chern_simons_flat(p.c1, p.c0)).max_abs();
  });
  out.push_back(make_check(opt, "characters", "odd_character_transgression",
                           "ch(T, nabla) = cs(T^{-1} nabla T, nabla)", flat_count, odd, 1e-10));

  auto odd_closed =
      max_residual(opt, "odd_closed", flat_count, [&](std::mt19937_64& rng, std::size_t) {
        const auto p = detail::random_gauge_pair(3, rng);
        return exterior_derivative(odd_chern_character(p.t, p.c0)).max_abs();
      });
  out.push_back(make_check(opt, "characters", "odd_character_closed",
                           "d ch(T, nabla) = 0 for flat nabla", flat_count, odd_closed, 1e-10));

  const std::size_t even_count = 5;
  auto even = max_residual(opt, "even_cs", even_count, [&](std::mt19937_64& rng, std::size_t) {
    const auto p = detail::random_gauge_pair(3, rng);
    const int rank = p.c0.rank();
    Eigen::MatrixXcd h = random_matrix(rank, rank, rng, 0.7);
    h = (h - h.adjoint()).eval() * 0.5;
    const UnitaryPath path{h};
    const auto cs = even_chern_simons(p.t, path, p.c0);
    const auto t1 = path_endpoint(p.t, path);
    return (exterior_derivative(cs) -
            (odd_chern_character(t1, p.c0) - odd_chern_character(p.t, p.c0)))
        .max_abs();
  });
  out.push_back(make_check(opt, "characters", "even_transgression",
                           "d cs(u_t) = ch(u_1, nabla) - ch(u_0, nabla)", even_count, even, 1e-8));

  // Circle normalization on {k/7} and an irrational surrogate.
  std::vector<double> grid;
  for (int k = 0; k < 7; ++k) grid.push_back(k / 7.0);
  grid.push_back(0.6180339887);
  double circle = 0.0;
  for (double theta : grid) {
    auto h = HolonomyData::from_matrices({Eigen::MatrixXcd::Constant(1, 1, std::exp(kTwoPiI * theta))});
    auto c = flat_from_holonomies<ScalarAlgebra>(scalars(), h, LogBranch::unit_interval);
    auto a = alpha_invariant(c, Connection<ScalarAlgebra>::trivial(scalars(), 1, 1));
    circle = detail::worst(circle, std::abs(a.pairings.at(1) - theta));
  }
  out.push_back(make_check(opt, "characters", "circle_normalization",
                           "alpha pairing of holonomy exp(2 pi i theta) on S^1 equals theta",
                           grid.size(), circle, 1e-9));

  // Reality of alpha for unitary holonomies and for U(1,1) holonomies.
  auto real_u = max_residual(opt, "unitary_reality", 10, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 3) + 1;
    const auto p = detail::random_gauge_pair(d, rng);
    const auto triv = Connection<ScalarAlgebra>::trivial(scalars(), d, p.c0.rank());
    const auto a = alpha_invariant(p.c0, triv);
    const auto b = alpha_invariant(p.c1, triv);
    return std::max(a.max_imag, b.max_imag);
  });
  out.push_back(make_check(opt, "characters", "unitary_reality",
                           "Im alpha = 0 for unitary flat bundles", 10, real_u, 1e-9));

  const Eigen::MatrixXcd q = Eigen::Vector2cd(1.0, -1.0).asDiagonal();
  auto real_q = max_residual(opt, "isometry_reality", 5, [&](std::mt19937_64& rng, std::size_t i) {
    const int d = static_cast<int>(i % 3) + 1;
    const auto gens = random_u11_generators(d, rng);
    std::vector<Eigen::MatrixXcd> hol;
    for (const auto& g : gens) hol.push_back(g.exp());
    if (!isometry_form_check(HolonomyData::from_matrices(hol), q))
      return std::numeric_limits<double>::infinity();
    const auto c = flat_from_generators<ScalarAlgebra>(scalars(), d, gens, 1e-10);
    return alpha_invariant(c, Connection<ScalarAlgebra>::trivial(scalars(), d, 2)).max_imag;
  });
  out.push_back(make_check(opt, "characters", "isometry_reality",
                           "Im alpha = 0 when holonomies preserve a nondegenerate Hermitian form",
                           5, real_q, 1e-9));
  return out;
}

// ---------------------------------------------------------------------------
// Sum and product identities.

inline std::vector<CheckResult> prop19_suite(const SuiteOptions& opt, int instances = 10) {
  using detail::make_check;
  using detail::max_residual;
  std::vector<CheckResult> out;
  const auto count = static_cast<std::size_t>(instances);
  const auto s = scalars();
  auto m2 = std::make_shared<const MatrixAlgebra>(2);
  const int d = 3;
  auto scalar_conn = [&](int rank, std::mt19937_64& rng) {
    return random_connection<ScalarAlgebra>(s, RandomFormSpec{d, rank, rank, 2, 1, 0.5}, rng);
  };
  auto matrix_conn = [&](std::mt19937_64& rng) {
    return random_connection<MatrixAlgebra>(m2, RandomFormSpec{d, 1, 1, 2, 1, 0.5}, rng);
  };
  auto odd_pairs = [](const ScalarForm& f) { return cycle_pairings(f, true); };

  auto sum_ch = max_residual(opt, "ch_sum", count, [&](std::mt19937_64& rng, std::size_t) {
    const auto v = scalar_conn(1, rng);
    const auto w = scalar_conn(2, rng);
    return (chern_character(direct_sum_connection(v, w)) -
            (chern_character(v) + chern_character(w)))
        .max_abs();
  });
  out.push_back(make_check(opt, "prop19", "ch_direct_sum", "ch(V + W) = ch(V) + ch(W)", count,
                           sum_ch, 1e-9));

  auto prod_ch = max_residual(opt, "ch_product", count, [&](std::mt19937_64& rng, std::size_t) {
    const auto v = scalar_conn(2, rng);
    const auto w = matrix_conn(rng);
    return (chern_character(tensor_connection(v, w)) -
            wedge(chern_character(v), chern_character(w)))
        .max_abs();
  });
  out.push_back(make_check(opt, "prop19", "ch_tensor_product", "ch(V x W) = ch(V) ^ ch(W)", count,
                           prod_ch, 1e-9));

  auto cocycle = max_residual(opt, "cs_cocycle", count, [&](std::mt19937_64& rng, std::size_t) {
    const auto c0 = scalar_conn(2, rng);
    const auto c1 = scalar_conn(2, rng);
    const auto c2 = scalar_conn(2, rng);
    const auto lhs = chern_simons_path(c0, c1) + chern_simons_path(c1, c2);
    return pairing_distance(odd_pairs(lhs), odd_pairs(chern_simons_path(c0, c2)));
  });
  out.push_back(make_check(opt, "prop19", "cs_cocycle",
                           "cs(0,1) + cs(1,2) = cs(0,2) modulo exact forms", count, cocycle, 1e-9));

  auto cs_sum = max_residual(opt, "cs_sum", count, [&](std::mt19937_64& rng, std::size_t) {
    const auto v0 = scalar_conn(1, rng);
    const auto v1 = scalar_conn(1, rng);
    const auto w0 = scalar_conn(2, rng);
    const auto w1 = scalar_conn(2, rng);
    const auto lhs =
        chern_simons_path(direct_sum_connection(v0, w0), direct_sum_connection(v1, w1));
    return (lhs - (chern_simons_path(v0, v1) + chern_simons_path(w0, w1))).max_abs();
  });
  out.push_back(make_check(opt, "prop19", "cs_direct_sum", "cs(V + W) = cs(V) + cs(W)", count,
                           cs_sum, 1e-9));

  // Tensor product: two endpoint placements, both valid modulo exact forms.
  std::vector<double> symmetric(count, 0.0);
  auto placed = max_residual(opt, "cs_product", count, [&](std::mt19937_64& rng, std::size_t i) {
    const auto v0 = scalar_conn(1, rng);
    const auto v1 = scalar_conn(1, rng);
    const auto w0 = matrix_conn(rng);
    const auto w1 = matrix_conn(rng);
    const auto lhs = odd_pairs(chern_simons_path(tensor_connection(v0, w0), tensor_connection(v1, w1)));
    const auto cs_v = chern_simons_path(v0, v1);
    const auto cs_w = chern_simons_path(w0, w1);
    const auto a = wedge(chern_character(v0), cs_w) + wedge(chern_character(w1), cs_v);
    const auto b = wedge(chern_character(v1), cs_w) + wedge(chern_character(w0), cs_v);
    symmetric[i] = pairing_distance(lhs, odd_pairs(b));
    return pairing_distance(lhs, odd_pairs(a));
  });
  double other = 0.0;
  for (double v : symmetric) other = detail::worst(other, v);
  auto c = make_check(opt, "prop19", "cs_tensor_product",
                      "cs(V x W) = ch(V_0) cs(W) + ch(W_1) cs(V) modulo exact forms", count,
                      std::min(placed, other), 1e-9);
  const bool first = placed <= c.tolerance, second = other <= c.tolerance;
  c.note = std::string("placement ch(V_0) cs(W) + ch(W_1) cs(V): ") + (first ? "holds" : "fails") +
           " (residual " + std::to_string(placed) + "); placement ch(V_1) cs(W) + ch(W_0) cs(V): " +
           (second ? "holds" : "fails") + " (residual " + std::to_string(other) + ")";
  c.passed = first || second;
  out.push_back(std::move(c));
  return out;
}

// ---------------------------------------------------------------------------
// Operator-algebra witnesses.

inline std::vector<double> witness_angle_grid() {
  std::vector<double> grid;
  for (int k = 0; k < 7; ++k) grid.push_back(k / 7.0);
  grid.push_back(0.6180339887);
  return grid;
}

/// The three Haar test holonomies: identity, diag(e^{2 pi i/3}, e^{-2 pi i/3}),
/// and the real rotation by 2 pi 0.2.
inline std::vector<Eigen::MatrixXcd> haar_test_unitaries() {
  const double a = 2.0 * kPi * 0.2;
  Eigen::MatrixXcd r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return {Eigen::MatrixXcd::Identity(2, 2),
          Eigen::Vector2cd(std::exp(kTwoPiI / 3.0), std::exp(-kTwoPiI / 3.0)).asDiagonal(), r};
}

inline std::vector<CheckResult> witness_suite(const SuiteOptions& opt) {
  using detail::make_check;
  std::vector<CheckResult> out;
  const auto grid = witness_angle_grid();
  std::vector<MainPropReport> reports(grid.size());
  parallel_for(grid.size(), opt.threads,
               [&](std::size_t i) { reports[i] = main_prop_check(build_rotation_witness(grid[i])); });
  double main = 0.0, inter = 0.0, hol = 0.0, unit = 0.0, chain = 0.0, at_zero = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = reports[i];
    main = detail::worst(main, r.residual);
    inter = detail::worst(inter, r.intertwining);
    hol = detail::worst(hol, r.holonomy_residual);
    unit = detail::worst(unit, r.unitarity_defect);
    for (const auto& c : r.chain) chain = detail::worst(chain, c.residual);
    if (grid[i] == 0.0) at_zero = r.intertwining + r.holonomy_residual + std::abs(r.ch_pairing);
  }
  out.push_back(make_check(opt, "witness", "rotation_main_identity",
                           "<ch(T), [S^1]> = alpha(V, triv) over the rotation algebra", grid.size(),
                           main, 1e-9));
  out.push_back(make_check(opt, "witness", "rotation_intertwining",
                           "T^{-1} (triv x W) T = V x W", grid.size(), inter, 1e-9));
  out.push_back(make_check(opt, "witness", "rotation_holonomy_conjugation",
                           "u (exp(2 pi i theta) gamma) u^{-1} = gamma", grid.size(), hol, 1e-12));
  out.push_back(make_check(opt, "witness", "rotation_intertwiner_unitary", "T* T = 1", grid.size(),
                           unit, 1e-10));
  out.push_back(make_check(opt, "witness", "rotation_chain",
                           "odd character = flat cs; tensor cs with flat W; tau(1) = 1",
                           grid.size(), chain, 1e-9));
  {
    auto c = make_check(opt, "witness", "rotation_trivial_angle_exact",
                        "theta = 0 gives exactly zero residuals", 1, at_zero, 0.0);
    c.passed = at_zero == 0.0;
    out.push_back(std::move(c));
  }

  // Free-product witness for psi = diag(e^{2 pi i/5}, e^{-2 pi i/5}) and trivial psi.
  const std::vector<Eigen::MatrixXcd> psis = {
      Eigen::Vector2cd(std::exp(kTwoPiI / 5.0), std::exp(-kTwoPiI / 5.0)).asDiagonal(),
      Eigen::MatrixXcd::Identity(2, 2)};
  double fp_main = 0.0, fp_hol = 0.0;
  for (const auto& psi : psis) {
    const auto r = main_prop_check(build_freeproduct_witness(psi));
    fp_main = detail::worst(fp_main, r.residual);
    for (const auto& c : r.chain) fp_main = detail::worst(fp_main, c.residual);
    fp_main = detail::worst(fp_main, r.intertwining);
    fp_hol = detail::worst(fp_hol, r.holonomy_residual);
  }
  out.push_back(make_check(opt, "witness", "freeproduct_main_identity",
                           "<ch(z-based T), [S^1]> = alpha over (A * C(S^1)) x| Z", psis.size(),
                           fp_main, 1e-9));
  out.push_back(make_check(opt, "witness", "freeproduct_holonomy_conjugation",
                           "z (psi gamma) z^{-1} = gamma", psis.size(), fp_hol, 1e-12));

  // Haar route: agreement within three standard errors plus a rounding floor.
  const auto unitaries = haar_test_unitaries();
  double haar_excess = 0.0, diag_excess = 0.0, haar_inter = 0.0;
  std::string note;
  for (std::size_t i = 0; i < unitaries.size(); ++i) {
    const auto r = haar_witness_check(unitaries[i], opt.haar_samples, mix_seed(opt.seed, 1000 + i),
                                      opt.threads);
    const double floor = opt.tolerance.value_or(1e-12);
    haar_excess = detail::worst(haar_excess, r.deviation - 3.0 * r.ch_pairing.std_error - floor);
    for (const auto& e : r.diagonal)
      diag_excess = detail::worst(
          diag_excess, std::abs(e.value - r.diagonal_expected) - 3.0 * e.std_error - floor);
    haar_inter = detail::worst(haar_inter, std::max(r.intertwining, r.holonomy_residual));
    note += (note.empty() ? "" : "; ") + std::string("alpha ") + std::to_string(r.alpha_total) +
            " (mod 1: " + std::to_string(r.alpha_mod1) + "), estimate " +
            std::to_string(r.ch_pairing.value.real()) + " +- " +
            std::to_string(r.ch_pairing.std_error);
  }
  {
    auto c = make_check(opt, "witness", "haar_main_identity",
                        "Monte-Carlo <ch(T), [S^1]> within 3 standard errors of the angle sum",
                        unitaries.size(), std::max(haar_excess, 0.0), 0.0);
    c.passed = haar_excess <= 0.0;
    c.note = note;
    out.push_back(std::move(c));
  }
  {
    auto c = make_check(opt, "witness", "haar_diagonal_estimates",
                        "tau((u* X u)_ii) = tr(X)/n within 3 standard errors", unitaries.size(),
                        std::max(diag_excess, 0.0), 0.0);
    c.passed = diag_excess <= 0.0;
    out.push_back(std::move(c));
  }
  out.push_back(make_check(opt, "witness", "haar_intertwining",
                           "T^{-1} (triv x W) T = V x W and u (U gamma) u* = gamma",
                           unitaries.size(), haar_inter, 1e-9));
  return out;
}

/// 20 unitaries in M_2: ten traceless (including the swap E12 + E21) and
/// ten with nonzero trace (including i * 1 and the identity).
inline std::vector<Eigen::MatrixXcd> lemma33_unitaries(std::uint64_t seed) {
  std::vector<Eigen::MatrixXcd> us;
  Eigen::MatrixXcd swap(2, 2);
  swap << 0, 1, 1, 0;
  us.push_back(swap);
  std::mt19937_64 rng(mix_seed(seed, detail::tag_of("lemma33_unitaries")));
  const Eigen::MatrixXcd sign = Eigen::Vector2cd(1.0, -1.0).asDiagonal();
  while (us.size() < 10) {
    const auto v = sample_haar_unitary(2, rng);
    us.push_back(v * sign * v.adjoint());
  }
  us.push_back(cplx(0.0, 1.0) * Eigen::MatrixXcd::Identity(2, 2));
  us.push_back(Eigen::MatrixXcd::Identity(2, 2));
  while (us.size() < 20) us.push_back(sample_haar_unitary(2, rng));
  return us;
}

inline std::vector<CheckResult> lemma33_checks(const SuiteOptions& opt, int max_length = 6,
                                               int words_per_length = 5) {
  const auto us = lemma33_unitaries(opt.seed);
  const auto r = lemma33_suite(us, max_length, words_per_length, opt.seed, opt.threads);
  double direct = 0.0, embedded = 0.0, embedding = 0.0;
  std::size_t nonzero = 0;
  for (const auto& c : r.cases) {
    direct = detail::worst(direct, c.direct_residual);
    embedded = detail::worst(embedded, c.embedded_residual);
    embedding = detail::worst(embedding, c.embedding_trace_residual);
    nonzero += c.embedded ? 1 : 0;
  }
  std::vector<CheckResult> out;
  out.push_back(detail::make_check(opt, "lemma33", "phi_preserves_trace",
                                   "tau(phi_u(w)) = tau(w) for words of length <= " +
                                       std::to_string(max_length),
                                   us.size(), direct, 1e-10));
  auto e = detail::make_check(opt, "lemma33", "phi_preserves_trace_embedded",
                              "tau(phi_{u (+) -u}(w')) = tau(w') in (A + A) * C(S^1)", nonzero,
                              std::max(embedded, embedding), 1e-10);
  e.note = std::to_string(nonzero) + " unitaries with nonzero trace routed through A + A; " +
           std::to_string(r.words) + " words per unitary";
  out.push_back(std::move(e));
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"forms", "characters", "prop19", "witness",
                                                  "lemma33", "all"};
  return names;
}

inline SuiteReport run_suite(const std::string& name, const SuiteOptions& opt) {
  SuiteReport r{name, {}};
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& c : v) r.checks.push_back(std::move(c));
  };
  const bool all = name == "all";
  if (all || name == "forms") append(forms_suite(opt));
  if (all || name == "characters") append(characters_suite(opt));
  if (all || name == "prop19") append(prop19_suite(opt));
  if (all || name == "witness") append(witness_suite(opt));
  if (all || name == "lemma33") append(lemma33_checks(opt));
  if (r.checks.empty()) throw StructuralError("unknown suite '" + name + "'");
  return r;
}

}  // namespace nccs
