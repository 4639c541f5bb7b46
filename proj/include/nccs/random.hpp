#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "nccs/connections.hpp"
#include "nccs/forms.hpp"
#include "nccs/haar.hpp"

namespace nccs {

/// Shape of a random trig-poly form: `terms` monomials per multi-index with
/// frequencies in [-max_freq, max_freq]^d and Gaussian coefficients.
struct RandomFormSpec {
  int dim = 2;
  int rows = 2;
  int cols = 2;
  int terms = 2;
  int max_freq = 2;
  double scale = 1.0;
};

inline cplx random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  const double re = normal(rng);
  return {re, normal(rng)};
}

inline Eigen::MatrixXcd random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  Eigen::MatrixXcd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = random_complex(rng, scale);
  return m;
}

inline Freq random_freq(int dim, int max_freq, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> f(-max_freq, max_freq);
  Freq k{};
  for (int j = 0; j < dim; ++j) k[j] = f(rng);
  return k;
}

/// Random element of A; specialized per backend below.
template <class A>
struct RandomElement;

template <>
struct RandomElement<ScalarAlgebra> {
  static cplx draw(const ScalarAlgebra&, std::mt19937_64& rng, double scale) {
    return random_complex(rng, scale);
  }
};

template <>
struct RandomElement<MatrixAlgebra> {
  static Eigen::MatrixXcd draw(const MatrixAlgebra& alg, std::mt19937_64& rng, double scale) {
    return random_matrix(alg.n(), alg.n(), rng, scale);
  }
};

/// Random form whose homogeneous components have the listed degrees.
template <TracedStarAlgebra A>
GradedForm<A> random_form(std::shared_ptr<const A> alg, const RandomFormSpec& spec,
                          const std::vector<int>& degrees, std::mt19937_64& rng) {
  GradedForm<A> f(alg, spec.dim, spec.rows, spec.cols);
  for (unsigned m = 0; m <= full_mask(spec.dim); ++m) {
    const Mask mask = static_cast<Mask>(m);
    if (std::find(degrees.begin(), degrees.end(), degree_of(mask)) == degrees.end()) continue;
    for (int t = 0; t < spec.terms; ++t) {
      Mat<typename A::element> c(spec.rows, spec.cols, alg->zero());
      for (auto& e : c.data) e = RandomElement<A>::draw(*alg, rng, spec.scale);
      f.add_term(mask, random_freq(spec.dim, spec.max_freq, rng), c);
    }
  }
  f.canonicalize();
  return f;
}

/// Random (generally non-flat) connection d + omega.
template <TracedStarAlgebra A>
Connection<A> random_connection(std::shared_ptr<const A> alg, const RandomFormSpec& spec,
                                std::mt19937_64& rng) {
  RandomFormSpec s = spec;
  s.cols = s.rows;
  return Connection<A>(random_form(std::move(alg), s, {1}, rng));
}

/// Flat unitary connection with constant commuting generators
/// X_j = V diag(2 pi i theta_jk) V*, V Haar and theta uniform in [0, 1).
struct RandomFlat {
  Connection<ScalarAlgebra> connection;
  std::vector<Eigen::MatrixXcd> generators;
  Eigen::MatrixXcd frame;
};

inline RandomFlat random_commuting_flat(int dim, int rank, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 1.0);
  const Eigen::MatrixXcd v = sample_haar_unitary(rank, rng);
  std::vector<Eigen::MatrixXcd> gens;
  for (int j = 0; j < dim; ++j) {
    Eigen::VectorXcd d(rank);
    for (int i = 0; i < rank; ++i) d(i) = kTwoPiI * angle(rng);
    gens.push_back(v * d.asDiagonal() * v.adjoint());
  }
  auto c = flat_from_generators<ScalarAlgebra>(scalars(), dim, gens, 1e-10);
  return RandomFlat{std::move(c), std::move(gens), v};
}

/// Monomial-type unitary T(x) = V P diag(exp(2 pi i k_i.x)) W with V, W
/// Haar, P a permutation and k_i in [-max_freq, max_freq]^d.
inline GradedForm<ScalarAlgebra> random_monomial_unitary(int dim, int rank, int max_freq,
                                                         std::mt19937_64& rng) {
  const Eigen::MatrixXcd v = sample_haar_unitary(rank, rng);
  const Eigen::MatrixXcd w = sample_haar_unitary(rank, rng);
  std::vector<int> perm(static_cast<std::size_t>(rank));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXcd vp(rank, rank);
  for (int i = 0; i < rank; ++i) vp.col(i) = v.col(perm[static_cast<std::size_t>(i)]);
  GradedForm<ScalarAlgebra> t(scalars(), dim, rank, rank);
  for (int i = 0; i < rank; ++i) {
    const Eigen::MatrixXcd outer = vp.col(i) * w.row(i);
    t.add_term(Mask{0}, random_freq(dim, max_freq, rng),
               DenseView<ScalarAlgebra>::from_dense(ScalarAlgebra{}, outer));
  }
  t.canonicalize();
  return t;
}

/// Commuting generators S_j = c_j S_0 + i d_j I of U(1,1), where
/// S_0 = [[i a, b], [conj(b), i e]] satisfies S* Q + Q S = 0 for Q = diag(1, -1).
inline std::vector<Eigen::MatrixXcd> random_u11_generators(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  Eigen::MatrixXcd s0(2, 2);
  const cplx b = random_complex(rng, 0.5);
  s0 << cplx(0.0, normal(rng)), b, std::conj(b), cplx(0.0, normal(rng));
  std::vector<Eigen::MatrixXcd> gens;
  for (int j = 0; j < dim; ++j) {
    const double c = normal(rng);
    const double d = normal(rng);
    gens.push_back(c * s0 + cplx(0.0, d) * Eigen::MatrixXcd::Identity(2, 2));
  }
  return gens;
}

}  // namespace nccs
