#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <complex>
#include <concepts>
#include <cstddef>
#include <memory>
#include <numbers>
#include <vector>

#include "nccs/errors.hpp"

namespace nccs {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};

/// Coefficients below this magnitude are dropped during canonicalization.
inline constexpr double kDropTolerance = 1e-14;

namespace detail {
inline std::atomic<std::size_t>& support_cap_storage() {
  static std::atomic<std::size_t> cap{1'000'000};
  return cap;
}
}  // namespace detail

/// Maximal number of stored Fourier entries in a single form or polynomial.
inline std::size_t support_cap() { return detail::support_cap_storage().load(); }
inline void set_support_cap(std::size_t cap) { detail::support_cap_storage().store(cap); }

/// A unital *-algebra carrying a normalized trace.
///
/// Algebras are context objects: elements are plain values and every
/// operation goes through the algebra, which holds parameters such as the
/// rotation angle or the free-product word cap.
template <class A>
concept TracedStarAlgebra =
    requires(const A& alg, const typename A::element& x, const typename A::element& y, cplx c,
             double eps) {
      typename A::element;
      { alg.zero() } -> std::convertible_to<typename A::element>;
      { alg.one() } -> std::convertible_to<typename A::element>;
      { alg.add(x, y) } -> std::convertible_to<typename A::element>;
      { alg.mul(x, y) } -> std::convertible_to<typename A::element>;
      { alg.scale(c, x) } -> std::convertible_to<typename A::element>;
      { alg.star(x) } -> std::convertible_to<typename A::element>;
      { alg.trace(x) } -> std::convertible_to<cplx>;
      { alg.norm(x) } -> std::convertible_to<double>;
      { alg.prune(x, eps) } -> std::convertible_to<typename A::element>;
      { alg.is_zero(x) } -> std::convertible_to<bool>;
    };

/// Complex numbers with the identity trace.
struct ScalarAlgebra {
  using element = cplx;

  element zero() const { return 0.0; }
  element one() const { return 1.0; }
  element add(const element& a, const element& b) const { return a + b; }
  element mul(const element& a, const element& b) const { return a * b; }
  element scale(cplx c, const element& a) const { return c * a; }
  element star(const element& a) const { return std::conj(a); }
  cplx trace(const element& a) const { return a; }
  double norm(const element& a) const { return std::abs(a); }
  element prune(const element& a, double eps) const { return std::abs(a) < eps ? 0.0 : a; }
  bool is_zero(const element& a) const { return a == 0.0; }
  bool operator==(const ScalarAlgebra&) const = default;
};

inline std::shared_ptr<const ScalarAlgebra> scalars() {
  static const auto instance = std::make_shared<const ScalarAlgebra>();
  return instance;
}

/// M_n(C) with the normalized trace tr(a)/n.
class MatrixAlgebra {
 public:
  using element = Eigen::MatrixXcd;

  explicit MatrixAlgebra(int n) : n_(n) {
    if (n < 1) throw ContractError("MatrixAlgebra: n must be positive");
  }

  int n() const { return n_; }

  element zero() const { return element::Zero(n_, n_); }
  element one() const { return element::Identity(n_, n_); }
  element add(const element& a, const element& b) const { return a + b; }
  element mul(const element& a, const element& b) const { return a * b; }
  element scale(cplx c, const element& a) const { return c * a; }
  element star(const element& a) const { return a.adjoint(); }
  cplx trace(const element& a) const { return a.trace() / static_cast<double>(n_); }
  double norm(const element& a) const { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }
  element prune(const element& a, double eps) const {
    element r = a;
    for (Eigen::Index i = 0; i < r.size(); ++i)
      if (std::abs(r.data()[i]) < eps) r.data()[i] = 0.0;
    return r;
  }
  bool is_zero(const element& a) const { return a.isZero(0.0); }
  bool operator==(const MatrixAlgebra&) const = default;

 private:
  int n_;
};

/// Whether two algebra handles denote the same algebra.
template <class A>
bool same_algebra(const std::shared_ptr<const A>& a, const std::shared_ptr<const A>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if constexpr (std::equality_comparable<A>) {
    return *a == *b;
  } else {
    return false;
  }
}

/// Dense rows x cols matrix with entries in an algebra. Storage only;
/// arithmetic goes through the mat_* helpers which take the algebra.
template <class E>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<E> data;

  Mat() = default;
  Mat(int r, int c, const E& fill) : rows(r), cols(c), data(static_cast<std::size_t>(r * c), fill) {}

  E& operator()(int i, int j) { return data[static_cast<std::size_t>(i * cols + j)]; }
  const E& operator()(int i, int j) const { return data[static_cast<std::size_t>(i * cols + j)]; }
};

template <TracedStarAlgebra A>
Mat<typename A::element> mat_zero(const A& alg, int rows, int cols) {
  return Mat<typename A::element>(rows, cols, alg.zero());
}

template <TracedStarAlgebra A>
Mat<typename A::element> mat_identity(const A& alg, int n) {
  auto m = mat_zero(alg, n, n);
  for (int i = 0; i < n; ++i) m(i, i) = alg.one();
  return m;
}

/// Embed a complex matrix as constants c_ij * 1.
template <TracedStarAlgebra A>
Mat<typename A::element> mat_from_scalars(const A& alg, const Eigen::MatrixXcd& m) {
  Mat<typename A::element> r(static_cast<int>(m.rows()), static_cast<int>(m.cols()), alg.zero());
  for (int i = 0; i < r.rows; ++i)
    for (int j = 0; j < r.cols; ++j)
      if (m(i, j) != 0.0) r(i, j) = alg.scale(m(i, j), alg.one());
  return r;
}

template <TracedStarAlgebra A>
Mat<typename A::element> mat_add(const A& alg, const Mat<typename A::element>& a,
                                 const Mat<typename A::element>& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw StructuralError("matrix shape mismatch in add");
  auto r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] = alg.add(a.data[i], b.data[i]);
  return r;
}

template <TracedStarAlgebra A>
Mat<typename A::element> mat_scale(const A& alg, cplx c, const Mat<typename A::element>& a) {
  auto r = a;
  for (auto& e : r.data) e = alg.scale(c, e);
  return r;
}

template <TracedStarAlgebra A>
Mat<typename A::element> mat_mul(const A& alg, const Mat<typename A::element>& a,
                                 const Mat<typename A::element>& b) {
  if (a.cols != b.rows) throw StructuralError("matrix shapes not composable");
  Mat<typename A::element> r(a.rows, b.cols, alg.zero());
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      auto acc = alg.zero();
      bool touched = false;
      for (int k = 0; k < a.cols; ++k) {
        if (alg.is_zero(a(i, k)) || alg.is_zero(b(k, j))) continue;
        auto p = alg.mul(a(i, k), b(k, j));
        acc = touched ? alg.add(acc, p) : p;
        touched = true;
      }
      r(i, j) = acc;
    }
  return r;
}

/// Conjugate transpose with entrywise involution.
template <TracedStarAlgebra A>
Mat<typename A::element> mat_star(const A& alg, const Mat<typename A::element>& a) {
  Mat<typename A::element> r(a.cols, a.rows, alg.zero());
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) r(j, i) = alg.star(a(i, j));
  return r;
}

/// Unnormalized matrix trace composed with the algebra trace.
template <TracedStarAlgebra A>
cplx mat_trace(const A& alg, const Mat<typename A::element>& a) {
  if (a.rows != a.cols) throw StructuralError("trace of a non-square matrix");
  cplx t = 0.0;
  for (int i = 0; i < a.rows; ++i) t += alg.trace(a(i, i));
  return t;
}

template <TracedStarAlgebra A>
double mat_norm(const A& alg, const Mat<typename A::element>& a) {
  double n = 0.0;
  for (const auto& e : a.data) n = std::max(n, alg.norm(e));
  return n;
}

template <TracedStarAlgebra A>
Mat<typename A::element> mat_prune(const A& alg, const Mat<typename A::element>& a, double eps) {
  auto r = a;
  for (auto& e : r.data) e = alg.prune(e, eps);
  return r;
}

template <TracedStarAlgebra A>
bool mat_is_zero(const A& alg, const Mat<typename A::element>& a) {
  for (const auto& e : a.data)
    if (!alg.is_zero(e)) return false;
  return true;
}

template <TracedStarAlgebra A>
Mat<typename A::element> mat_commutator(const A& alg, const Mat<typename A::element>& a,
                                        const Mat<typename A::element>& b) {
  return mat_add(alg, mat_mul(alg, a, b), mat_scale(alg, -1.0, mat_mul(alg, b, a)));
}

}  // namespace nccs
