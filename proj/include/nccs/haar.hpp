#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <vector>

#include "nccs/algebra.hpp"
#include "nccs/crossed_product.hpp"
#include "nccs/parallel.hpp"

namespace nccs {

/// Haar-distributed unitary: orthonormalize a complex Gaussian matrix and
/// fix the phases of R's diagonal.
inline Eigen::MatrixXcd sample_haar_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = cplx(re, im) / std::sqrt(2.0);
    }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0 ? d / a : cplx(1.0));
  }
  return q;
}

/// Monte-Carlo value with its estimated standard error.
struct Estimate {
  cplx value;
  double std_error = 0.0;
};

/// Polynomial in the matrix entries u_ij of the inclusion function
/// U_n -> M_n and their conjugates. Variable id = 2 (i n + j) + conj.
using HaarMonomial = std::vector<std::uint16_t>;
using HaarPoly = std::map<HaarMonomial, cplx>;

/// C(U_n), represented by polynomials in the entries of the inclusion
/// function, traced by integration against Haar measure. The integral is
/// estimated from N samples drawn with per-sample seeds mix_seed(seed, s),
/// so results depend only on (N, seed).
class HaarFunctionAlgebra {
 public:
  using element = HaarPoly;

  HaarFunctionAlgebra(int n, std::size_t samples, std::uint64_t seed, int threads = 1,
                      std::size_t probes = 64)
      : n_(n), seed_(seed), threads_(threads) {
    if (n < 1) throw ContractError("Haar algebra needs n >= 1");
    if (samples < 1) throw ContractError("Haar trace needs at least one sample");
    samples_.resize(samples);
    parallel_for(samples, threads, [&](std::size_t s) {
      std::mt19937_64 rng(mix_seed(seed, s));
      samples_[s] = sample_haar_unitary(n, rng);
    });
    probes_ = std::min(probes, samples);
  }

  int n() const { return n_; }
  std::size_t samples() const { return samples_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<Eigen::MatrixXcd>& sample_points() const { return samples_; }

  static std::uint16_t var(int n, int i, int j, bool conj) {
    return static_cast<std::uint16_t>(2 * (i * n + j) + (conj ? 1 : 0));
  }

  /// The entry u_ij (or its conjugate) as a function on U_n.
  element entry(int i, int j, bool conj = false) const {
    return element{{HaarMonomial{var(n_, i, j, conj)}, 1.0}};
  }

  element zero() const { return {}; }
  element one() const { return element{{HaarMonomial{}, 1.0}}; }

  element add(const element& a, const element& b) const {
    element r = a;
    for (const auto& [m, c] : b) accumulate(r, m, c);
    return r;
  }

  element mul(const element& a, const element& b) const {
    element r;
    for (const auto& [m, c] : a)
      for (const auto& [l, e] : b) {
        HaarMonomial p;
        p.reserve(m.size() + l.size());
        std::merge(m.begin(), m.end(), l.begin(), l.end(), std::back_inserter(p));
        accumulate(r, p, c * e);
      }
    return r;
  }

  element scale(cplx s, const element& a) const {
    element r;
    if (s == 0.0) return r;
    for (const auto& [m, c] : a) r.emplace(m, s * c);
    return r;
  }

  element star(const element& a) const {
    element r;
    for (const auto& [m, c] : a) {
      HaarMonomial p = m;
      for (auto& v : p) v ^= 1u;
      std::sort(p.begin(), p.end());
      accumulate(r, p, std::conj(c));
    }
    return r;
  }

  cplx trace(const element& a) const { return estimate(a).value; }

  /// Sample mean of a over the Haar samples with its standard error.
  Estimate estimate(const element& a) const {
    if (a.empty()) return {};
    if (a.size() == 1 && a.begin()->first.empty()) return {a.begin()->second, 0.0};
    const std::size_t count = samples_.size();
    std::vector<cplx> values(count);
    parallel_for(count, threads_, [&](std::size_t s) { values[s] = evaluate(a, samples_[s]); });
    cplx mean = 0.0;
    for (const auto& v : values) mean += v;
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (const auto& v : values) var += std::norm(v - mean);
    const double se = count > 1 ? std::sqrt(var / double(count - 1) / double(count)) : 0.0;
    return {mean, se};
  }

  /// Sup of |a| over the first probe samples (a is a function on U_n, so
  /// coefficient size is not a norm).
  double norm(const element& a) const {
    if (a.empty()) return 0.0;
    double m = 0.0;
    for (std::size_t s = 0; s < probes_; ++s) m = std::max(m, std::abs(evaluate(a, samples_[s])));
    return m;
  }

  element prune(const element& a, double eps) const {
    element r;
    for (const auto& [m, c] : a)
      if (std::abs(c) >= eps) r.emplace(m, c);
    return r;
  }

  bool is_zero(const element& a) const { return a.empty(); }

  cplx evaluate(const element& a, const Eigen::MatrixXcd& g) const {
    cplx s = 0.0;
    for (const auto& [m, c] : a) {
      cplx p = c;
      for (auto v : m) {
        const int idx = v >> 1;
        const cplx x = g(idx / n_, idx % n_);
        p *= (v & 1u) ? std::conj(x) : x;
      }
      s += p;
    }
    return s;
  }

  /// f -> f(. g) for a fixed unitary g: u_ij -> sum_k u_ik g_kj.
  element right_translate(const element& a, const Eigen::MatrixXcd& g) const {
    element r;
    for (const auto& [m, c] : a) {
      element prod = scale(c, one());
      for (auto v : m) {
        const int idx = v >> 1;
        const int i = idx / n_, j = idx % n_;
        const bool conj = v & 1u;
        element lin;
        for (int k = 0; k < n_; ++k) {
          const cplx w = conj ? std::conj(g(k, j)) : g(k, j);
          if (w != 0.0) accumulate(lin, HaarMonomial{var(n_, i, k, conj)}, w);
        }
        prod = mul(prod, lin);
      }
      r = add(r, prod);
    }
    return prune(r, kDropTolerance);
  }

 private:
  static void accumulate(element& r, const HaarMonomial& m, cplx c) {
    auto [it, inserted] = r.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) r.erase(it);
    }
  }

  int n_;
  std::uint64_t seed_;
  int threads_;
  std::size_t probes_;
  std::vector<Eigen::MatrixXcd> samples_;
};

using HaarCrossedAlgebra = CrossedProduct<HaarFunctionAlgebra>;

/// C(U_n) x| Z where the generator acts by right translation by the
/// holonomy U: rho_m(f)(g) = f(g U^m). Haar measure is right invariant, so
/// the action preserves the exact trace; no sampled check is made because
/// the Monte-Carlo trace is only invariant in expectation.
inline std::shared_ptr<const HaarCrossedAlgebra> make_haar_crossed_algebra(
    std::shared_ptr<const HaarFunctionAlgebra> base, const Eigen::MatrixXcd& holonomy) {
  if (holonomy.rows() != base->n() || holonomy.cols() != base->n())
    throw StructuralError("holonomy size does not match the Haar algebra");
  const Eigen::MatrixXcd inverse = holonomy.adjoint();
  auto action = [base_raw = base.get(), holonomy, inverse](int m, const HaarPoly& f) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(holonomy.rows(), holonomy.cols());
    for (int i = 0; i < std::abs(m); ++i) g = g * (m > 0 ? holonomy : inverse);
    return base_raw->right_translate(f, g);
  };
  return std::make_shared<const HaarCrossedAlgebra>(base, action);
}

/// Estimate tau(e) = delta_e * Haar integral with its standard error.
inline Estimate haar_trace(const HaarCrossedAlgebra& alg, const HaarCrossedAlgebra::element& e) {
  auto it = e.find(0);
  if (it == e.end()) return {};
  return alg.base().estimate(it->second);
}

}  // namespace nccs
