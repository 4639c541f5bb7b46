#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nccs/connections.hpp"
#include "nccs/forms.hpp"

namespace nccs {

/// Gauss-Legendre rule on [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature gauss_legendre(int n) {
  if (n < 1) throw ContractError("quadrature needs at least one node");
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const auto idx = static_cast<std::size_t>(n - 1 - i);
    q.nodes[idx] = 0.5 * (x + 1.0);
    q.weights[idx] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

/// ceil((d + 4) / 2): exact for the polynomial t-integrand of a linear path.
inline int default_quadrature_nodes(int dim) { return (dim + 5) / 2; }

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// ch(nabla) = sum_k tau(F^k) / (k! (2 pi i)^k).
template <TracedStarAlgebra A>
ScalarForm chern_character(const Connection<A>& c) {
  const auto f = curvature(c);
  auto power = GradedForm<A>::identity(c.algebra_ptr(), c.dim(), c.rank());
  ScalarForm ch = trace(power);
  for (int k = 1; 2 * k <= c.dim(); ++k) {
    power = wedge(power, f);
    ch += (1.0 / (factorial(k) * std::pow(kTwoPiI, k))) * trace(power);
  }
  return ch;
}

/// Linear path nabla_t = nabla_0 + t alpha.
template <TracedStarAlgebra A>
struct PathOfConnections {
  Connection<A> start;
  GradedForm<A> alpha;
  int nodes = 0;  // 0 selects default_quadrature_nodes(dim)

  static PathOfConnections linear(const Connection<A>& c0, const Connection<A>& c1, int nodes = 0) {
    return PathOfConnections{c0, c1.omega() - c0.omega(), nodes};
  }

  Connection<A> at(double t) const { return Connection<A>(start.omega() + cplx(t) * alpha); }
};

/// cs = int_0^1 sum_k tau(alpha ^ F_t^k) / (k! (2 pi i)^{k+1}) dt, so that
/// d cs = ch(nabla_1) - ch(nabla_0).
template <TracedStarAlgebra A>
ScalarForm chern_simons_path(const PathOfConnections<A>& p) {
  const int dim = p.start.dim();
  const int nodes = p.nodes == 0 ? default_quadrature_nodes(dim) : p.nodes;
  if (nodes < default_quadrature_nodes(dim))
    throw ContractError("chern_simons_path needs at least " +
                        std::to_string(default_quadrature_nodes(dim)) + " quadrature nodes");
  const auto q = gauss_legendre(nodes);
  ScalarForm cs(scalars(), dim, 1, 1);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const auto f = curvature(p.at(q.nodes[i]));
    auto term = p.alpha;  // alpha ^ F^k
    ScalarForm integrand = (1.0 / kTwoPiI) * trace(term);
    for (int k = 1; 2 * k + 1 <= dim; ++k) {
      term = wedge(term, f);
      integrand += (1.0 / (factorial(k) * std::pow(kTwoPiI, k + 1))) * trace(term);
    }
    cs += q.weights[i] * integrand;
  }
  return cs;
}

template <TracedStarAlgebra A>
ScalarForm chern_simons_path(const Connection<A>& c0, const Connection<A>& c1, int nodes = 0) {
  return chern_simons_path(PathOfConnections<A>::linear(c0, c1, nodes));
}

/// sum_k (-1)^k k! / ((2k+1)! (2 pi i)^{k+1}) tau(beta^{2k+1}).
template <TracedStarAlgebra A>
ScalarForm odd_series(const GradedForm<A>& beta) {
  const auto beta2 = wedge(beta, beta);
  auto power = beta;
  ScalarForm r = (1.0 / kTwoPiI) * trace(power);
  for (int k = 1; 2 * k + 1 <= beta.dim(); ++k) {
    power = wedge(power, beta2);
    const double sign = (k % 2) ? -1.0 : 1.0;
    r += (sign * factorial(k) / (factorial(2 * k + 1) * std::pow(kTwoPiI, k + 1))) * trace(power);
  }
  return r;
}

/// Closed-form Chern-Simons form between flat connections (the linear path
/// integrated exactly): cs(nabla_1, nabla_0) with alpha = nabla_1 - nabla_0.
template <TracedStarAlgebra A>
ScalarForm chern_simons_flat(const Connection<A>& c1, const Connection<A>& c0,
                             double flat_tol = 1e-10) {
  if (!is_flat(c1, flat_tol) || !is_flat(c0, flat_tol))
    throw ContractError("chern_simons_flat requires flat connections");
  return odd_series(c1.omega() - c0.omega());
}

/// Odd Chern character of a bundle automorphism T relative to nabla.
template <TracedStarAlgebra A>
ScalarForm odd_chern_character(const GaugeTransform<A>& t, const Connection<A>& c) {
  return odd_series(relative_form(t, c));
}

/// Unitary path u_t = U exp(t H) with U a periodic unitary 0-form and H a
/// constant skew-Hermitian complex matrix.
struct UnitaryPath {
  Eigen::MatrixXcd generator;
};

/// Even Chern-Simons form
///   int_0^1 sum_k (-1)^k k! / ((2k)! (2 pi i)^{k+1}) tau(u^{-1} u' (u^{-1} d_nabla u)^{2k}) dt,
/// satisfying d cs = ch(u_1, nabla) - ch(u_0, nabla).
template <TracedStarAlgebra A>
ScalarForm even_chern_simons(const GaugeTransform<A>& start, const UnitaryPath& path,
                             const Connection<A>& c, int nodes = 24) {
  const auto& u0 = start.periodic_part();
  const auto& h = path.generator;
  if (!start.phase_generators().empty())
    throw UnsupportedError("even Chern-Simons paths need a periodic starting unitary");
  if (h.rows() != u0.rows() || h.cols() != u0.cols())
    throw StructuralError("path generator shape mismatch");
  if ((h + h.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ContractError("path generator must be skew-Hermitian");
  const auto& alg = c.algebra();
  const auto q = gauss_legendre(nodes);
  const auto du0 = exterior_derivative(u0);
  ScalarForm cs(scalars(), c.dim(), 1, 1);
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    const Eigen::MatrixXcd e = (q.nodes[i] * h).exp();
    const auto ef = GradedForm<A>::constant(c.algebra_ptr(), c.dim(), mat_from_scalars(alg, e));
    const auto hef =
        GradedForm<A>::constant(c.algebra_ptr(), c.dim(), mat_from_scalars(alg, h * e));
    const auto u = wedge(u0, ef);
    const auto u_dot = wedge(u0, hef);
    const auto u_inv = star(u);
    const auto v = wedge(u_inv, u_dot);
    const auto beta = wedge(u_inv, wedge(du0, ef)) + wedge(wedge(u_inv, c.omega()), u) - c.omega();
    const auto beta2 = wedge(beta, beta);
    auto term = v;
    ScalarForm integrand = (1.0 / kTwoPiI) * trace(term);
    for (int k = 1; 2 * k <= c.dim(); ++k) {
      term = wedge(term, beta2);
      const double sign = (k % 2) ? -1.0 : 1.0;
      integrand +=
          (sign * factorial(k) / (factorial(2 * k) * std::pow(kTwoPiI, k + 1))) * trace(term);
    }
    cs += q.weights[i] * integrand;
  }
  return cs;
}

/// Endpoint u_1 = U exp(H) of a unitary path as a gauge transformation.
template <TracedStarAlgebra A>
GaugeTransform<A> path_endpoint(const GaugeTransform<A>& start, const UnitaryPath& path) {
  const auto& u0 = start.periodic_part();
  const auto e = GradedForm<A>::constant(u0.algebra_ptr(), u0.dim(),
                                         mat_from_scalars(u0.algebra(), path.generator.exp()));
  return GaugeTransform<A>(wedge(u0, e), start.phase_generators(), 1e-10);
}

/// Alpha-invariant surrogate: pairings of cs(nabla_flat, nabla_triv) with
/// all odd coordinate cycles.
struct AlphaResult {
  CyclePairing pairings;
  ScalarForm cs;
  double max_imag = 0.0;
};

template <TracedStarAlgebra A>
AlphaResult alpha_from_forms(ScalarForm cs) {
  AlphaResult r{cycle_pairings(cs, true), std::move(cs), 0.0};
  for (const auto& [m, v] : r.pairings) r.max_imag = std::max(r.max_imag, std::abs(v.imag()));
  return r;
}

template <TracedStarAlgebra A>
AlphaResult alpha_invariant(const Connection<A>& flat, const Connection<A>& triv,
                            double tol = 1e-10) {
  if (!is_flat(flat, tol)) throw ContractError("alpha_invariant: connection is not flat");
  if (!is_flat(triv, tol)) throw ContractError("alpha_invariant: trivial connection is not flat");
  if (!triv.omega().is_constant())
    throw UnsupportedError(
        "alpha_invariant: a non-constant trivial connection must be given as a gauge transform");
  if constexpr (DenseRepresentable<A>) {
    for (int j = 0; j < triv.dim(); ++j) {
      const auto h = holonomy(triv, j);
      if ((h - Eigen::MatrixXcd::Identity(h.rows(), h.cols())).cwiseAbs().maxCoeff() > tol)
        throw ContractError("alpha_invariant: reference connection has nontrivial holonomy");
    }
  }
  return alpha_from_forms<A>(chern_simons_flat(flat, triv, tol));
}

/// Reference connection T^{-1} d T for a periodic unitary T; its holonomy is
/// trivial by construction.
template <TracedStarAlgebra A>
AlphaResult alpha_invariant(const Connection<A>& flat, const GaugeTransform<A>& trivialization,
                            double tol = 1e-10) {
  if (!trivialization.phase_generators().empty())
    throw ContractError("alpha_invariant: trivialization must be periodic");
  const auto triv = gauge_transform(
      Connection<A>::trivial(flat.algebra_ptr(), flat.dim(), flat.rank()), trivialization);
  if (!is_flat(flat, tol)) throw ContractError("alpha_invariant: connection is not flat");
  return alpha_from_forms<A>(chern_simons_flat(flat, triv, tol));
}

}  // namespace nccs
