#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <vector>

#include "nccs/algebra.hpp"
#include "nccs/trig_poly.hpp"

namespace nccs {

/// Strictly increasing multi-index I of {1..d}, stored as a bitmask
/// (bit j stands for dx_{j+1}).
using Mask = std::uint8_t;

inline int degree_of(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

inline Mask full_mask(int dim) { return static_cast<Mask>((1u << dim) - 1u); }

/// Parity sign of the shuffle that sorts dx_I ^ dx_J into dx_{I u J}.
inline int shuffle_sign(Mask a, Mask b) {
  int inversions = 0;
  for (int j = 0; j < kMaxDim; ++j)
    if (b & (1u << j)) inversions += std::popcount(static_cast<unsigned>(a) >> (j + 1));
  return (inversions % 2) ? -1 : 1;
}

inline std::string mask_name(Mask m) {
  std::string s;
  for (int j = 0; j < kMaxDim; ++j)
    if (m & (1u << j)) {
      if (!s.empty()) s += "^";
      s += "dx" + std::to_string(j + 1);
    }
  return s.empty() ? "1" : s;
}

/// Differential form on T^d with values in rows x cols matrices over a
/// traced algebra: a sum of terms M * exp(2 pi i k.x) dx_I.
template <TracedStarAlgebra A>
class GradedForm {
 public:
  using algebra_type = A;
  using element = typename A::element;
  using Matrix = Mat<element>;
  using Series = std::map<Freq, Matrix>;

  GradedForm(std::shared_ptr<const A> alg, int dim, int rows, int cols)
      : alg_(std::move(alg)), dim_(dim), rows_(rows), cols_(cols) {
    check_dim(dim);
    if (!alg_) throw StructuralError("form without an algebra");
    if (rows < 1 || cols < 1) throw StructuralError("form matrix shape must be positive");
  }

  static GradedForm constant(std::shared_ptr<const A> alg, int dim, const Matrix& m) {
    return monomial(std::move(alg), dim, Mask{0}, Freq{}, m);
  }

  static GradedForm monomial(std::shared_ptr<const A> alg, int dim, Mask mask, const Freq& k,
                             const Matrix& m) {
    GradedForm f(std::move(alg), dim, m.rows, m.cols);
    f.add_term(mask, k, m);
    f.canonicalize();
    return f;
  }

  static GradedForm identity(std::shared_ptr<const A> alg, int dim, int n) {
    auto id = mat_identity(*alg, n);
    return constant(std::move(alg), dim, id);
  }

  const A& algebra() const { return *alg_; }
  const std::shared_ptr<const A>& algebra_ptr() const { return alg_; }
  int dim() const { return dim_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::map<Mask, Series>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }

  std::size_t support_size() const {
    std::size_t n = 0;
    for (const auto& [m, s] : parts_) n += s.size();
    return n;
  }

  /// Coefficient matrix at (I, k), zero if absent.
  Matrix coefficient(Mask mask, const Freq& k) const {
    auto it = parts_.find(mask);
    if (it != parts_.end()) {
      auto jt = it->second.find(k);
      if (jt != it->second.end()) return jt->second;
    }
    return mat_zero(*alg_, rows_, cols_);
  }

  GradedForm homogeneous(int degree) const {
    GradedForm r(alg_, dim_, rows_, cols_);
    for (const auto& [m, s] : parts_)
      if (degree_of(m) == degree) r.parts_.emplace(m, s);
    return r;
  }

  /// Largest coefficient magnitude (algebra norm) over all terms.
  double max_abs() const {
    double n = 0.0;
    for (const auto& [m, s] : parts_)
      for (const auto& [k, c] : s) n = std::max(n, mat_norm(*alg_, c));
    return n;
  }

  /// Constant-in-x (frequency support {0}).
  bool is_constant() const {
    for (const auto& [m, s] : parts_)
      for (const auto& [k, c] : s)
        if (k != Freq{}) return false;
    return true;
  }

  void add_term(Mask mask, const Freq& k, const Matrix& m) {
    if (m.rows != rows_ || m.cols != cols_) throw StructuralError("term shape mismatch");
    if ((mask & ~full_mask(dim_)) != 0) throw StructuralError("multi-index exceeds torus dimension");
    for (int i = dim_; i < kMaxDim; ++i)
      if (k[i] != 0) throw StructuralError("frequency has components beyond the torus dimension");
    auto& series = parts_[mask];
    auto [it, inserted] = series.try_emplace(k, m);
    if (!inserted) it->second = mat_add(*alg_, it->second, m);
  }

  /// Prune tiny coefficients, drop empty entries, enforce the support cap.
  void canonicalize(double eps = kDropTolerance) {
    for (auto mit = parts_.begin(); mit != parts_.end();) {
      auto& series = mit->second;
      for (auto it = series.begin(); it != series.end();) {
        it->second = mat_prune(*alg_, it->second, eps);
        if (mat_is_zero(*alg_, it->second))
          it = series.erase(it);
        else
          ++it;
      }
      if (series.empty())
        mit = parts_.erase(mit);
      else
        ++mit;
    }
    check_support(support_size());
  }

  void require_compatible(const GradedForm& o) const {
    if (o.dim_ != dim_) throw StructuralError("form dimension mismatch");
    if (!same_algebra(alg_, o.alg_)) throw StructuralError("forms over different algebras");
  }

  GradedForm& operator+=(const GradedForm& o) {
    require_compatible(o);
    if (o.rows_ != rows_ || o.cols_ != cols_) throw StructuralError("form shape mismatch");
    for (const auto& [m, s] : o.parts_)
      for (const auto& [k, c] : s) add_term(m, k, c);
    canonicalize();
    return *this;
  }

  GradedForm& operator-=(const GradedForm& o) { return *this += cplx(-1.0) * o; }

  friend GradedForm operator+(GradedForm a, const GradedForm& b) { return a += b; }
  friend GradedForm operator-(GradedForm a, const GradedForm& b) { return a -= b; }
  friend GradedForm operator-(const GradedForm& a) { return cplx(-1.0) * a; }

  friend GradedForm operator*(cplx s, const GradedForm& a) {
    GradedForm r(a.alg_, a.dim_, a.rows_, a.cols_);
    if (s == 0.0) return r;
    for (const auto& [m, ser] : a.parts_)
      for (const auto& [k, c] : ser) r.add_term(m, k, mat_scale(*a.alg_, s, c));
    r.canonicalize();
    return r;
  }

 private:
  std::shared_ptr<const A> alg_;
  int dim_;
  int rows_;
  int cols_;
  std::map<Mask, Series> parts_;
};

/// Wedge product; coefficients multiply in written order.
template <TracedStarAlgebra A>
GradedForm<A> wedge(const GradedForm<A>& a, const GradedForm<A>& b) {
  a.require_compatible(b);
  if (a.cols() != b.rows()) throw StructuralError("wedge: matrix shapes not composable");
  const auto& alg = a.algebra();
  GradedForm<A> r(a.algebra_ptr(), a.dim(), a.rows(), b.cols());
  for (const auto& [ma, sa] : a.parts())
    for (const auto& [mb, sb] : b.parts()) {
      if (ma & mb) continue;
      const Mask m = static_cast<Mask>(ma | mb);
      const double sign = shuffle_sign(ma, mb);
      for (const auto& [ka, ca] : sa)
        for (const auto& [kb, cb] : sb) {
          auto p = mat_mul(alg, ca, cb);
          r.add_term(m, freq_add(ka, kb), sign > 0 ? p : mat_scale(alg, -1.0, p));
        }
    }
  r.canonicalize();
  return r;
}

/// k-fold wedge power (k >= 0; power 0 is the identity form).
template <TracedStarAlgebra A>
GradedForm<A> wedge_power(const GradedForm<A>& a, int k) {
  if (a.rows() != a.cols()) throw StructuralError("wedge power of a non-square form");
  auto r = GradedForm<A>::identity(a.algebra_ptr(), a.dim(), a.rows());
  for (int i = 0; i < k; ++i) r = wedge(r, a);
  return r;
}

/// Exterior derivative: d(e^{2 pi i k.x}) = 2 pi i sum_j k_j e^{2 pi i k.x} dx_j.
template <TracedStarAlgebra A>
GradedForm<A> exterior_derivative(const GradedForm<A>& a) {
  const auto& alg = a.algebra();
  GradedForm<A> r(a.algebra_ptr(), a.dim(), a.rows(), a.cols());
  for (const auto& [m, s] : a.parts())
    for (int j = 0; j < a.dim(); ++j) {
      const unsigned bit = 1u << j;
      if (m & bit) continue;
      const double sign = (std::popcount(static_cast<unsigned>(m) & (bit - 1u)) % 2) ? -1.0 : 1.0;
      for (const auto& [k, c] : s) {
        if (k[j] == 0) continue;
        r.add_term(static_cast<Mask>(m | bit), k, mat_scale(alg, sign * kTwoPiI * double(k[j]), c));
      }
    }
  r.canonicalize();
  return r;
}

/// Involution: (M e^{2 pi i k.x} dx_I)* = M* e^{-2 pi i k.x} dx_I.
/// Satisfies (a^b)* = (-1)^{|a||b|} b* ^ a*.
template <TracedStarAlgebra A>
GradedForm<A> star(const GradedForm<A>& a) {
  const auto& alg = a.algebra();
  GradedForm<A> r(a.algebra_ptr(), a.dim(), a.cols(), a.rows());
  for (const auto& [m, s] : a.parts())
    for (const auto& [k, c] : s) r.add_term(m, freq_neg(k), mat_star(alg, c));
  r.canonicalize();
  return r;
}

using ScalarForm = GradedForm<ScalarAlgebra>;

/// Apply the (unnormalized matrix) trace composed with the algebra trace.
template <TracedStarAlgebra A>
ScalarForm trace(const GradedForm<A>& a) {
  if (a.rows() != a.cols()) throw StructuralError("trace of a non-square form");
  const auto& alg = a.algebra();
  ScalarForm r(scalars(), a.dim(), 1, 1);
  for (const auto& [m, s] : a.parts())
    for (const auto& [k, c] : s) {
      const cplx t = mat_trace(alg, c);
      if (t != 0.0) r.add_term(m, k, Mat<cplx>(1, 1, t));
    }
  r.canonicalize();
  return r;
}

inline ScalarForm scalar_monomial(int dim, Mask mask, const Freq& k, cplx c) {
  return ScalarForm::monomial(scalars(), dim, mask, k, Mat<cplx>(1, 1, c));
}

/// Integral of a scalar form over the coordinate subtorus T^I through the
/// origin: the sum of coefficients c_k of the dx_I component with k_I = 0.
template <TracedStarAlgebra A>
cplx pair_with_cycle(const GradedForm<A>& a, Mask cycle) {
  if constexpr (!std::is_same_v<A, ScalarAlgebra>) {
    throw ContractError("pair_with_cycle needs scalar coefficients; apply trace first");
  } else {
    if (a.rows() != 1 || a.cols() != 1)
      throw ContractError("pair_with_cycle needs scalar coefficients; apply trace first");
    if ((cycle & ~full_mask(a.dim())) != 0) throw StructuralError("cycle exceeds torus dimension");
    auto it = a.parts().find(cycle);
    if (it == a.parts().end()) return 0.0;
    cplx s = 0.0;
    for (const auto& [k, c] : it->second) {
      bool on_cycle = true;
      for (int j = 0; j < a.dim(); ++j)
        if ((cycle & (1u << j)) && k[j] != 0) on_cycle = false;
      if (on_cycle) s += c(0, 0);
    }
    return s;
  }
}

/// Pairings with every coordinate cycle of the given parity.
using CyclePairing = std::map<Mask, cplx>;

inline CyclePairing cycle_pairings(const ScalarForm& a, bool odd) {
  CyclePairing p;
  for (unsigned m = 1; m <= full_mask(a.dim()); ++m)
    if ((degree_of(static_cast<Mask>(m)) % 2 == 1) == odd)
      p[static_cast<Mask>(m)] = pair_with_cycle(a, static_cast<Mask>(m));
  if (!odd) p[Mask{0}] = pair_with_cycle(a, Mask{0});
  return p;
}

inline double pairing_distance(const CyclePairing& a, const CyclePairing& b) {
  double d = 0.0;
  for (const auto& [m, v] : a) {
    auto it = b.find(m);
    d = std::max(d, std::abs(v - (it == b.end() ? cplx{} : it->second)));
  }
  for (const auto& [m, v] : b)
    if (!a.count(m)) d = std::max(d, std::abs(v));
  return d;
}

}  // namespace nccs
