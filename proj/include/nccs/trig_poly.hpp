#pragma once

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>

#include "nccs/algebra.hpp"

namespace nccs {

inline constexpr int kMaxDim = 4;

/// Frequency vector k in Z^d, padded with zeros up to kMaxDim.
using Freq = std::array<int, kMaxDim>;

inline Freq freq_add(const Freq& a, const Freq& b) {
  Freq r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = a[i] + b[i];
  return r;
}

inline Freq freq_neg(const Freq& a) {
  Freq r{};
  for (int i = 0; i < kMaxDim; ++i) r[i] = -a[i];
  return r;
}

inline void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw ContractError("torus dimension must lie in 1.." + std::to_string(kMaxDim));
}

inline void check_support(std::size_t size) {
  if (size > support_cap())
    throw ResourceError("Fourier support exceeds cap of " + std::to_string(support_cap()) +
                        " entries");
}

/// Trigonometric polynomial f(x) = sum_k c_k exp(2 pi i k.x) on T^d.
/// Zero coefficients are never stored.
class TrigPoly {
 public:
  TrigPoly() : TrigPoly(1) {}
  explicit TrigPoly(int dim) : dim_(dim) { check_dim(dim); }

  static TrigPoly constant(int dim, cplx c) { return monomial(dim, Freq{}, c); }

  static TrigPoly monomial(int dim, const Freq& k, cplx c = 1.0) {
    TrigPoly p(dim);
    for (int i = dim; i < kMaxDim; ++i)
      if (k[i] != 0) throw StructuralError("frequency has components beyond the torus dimension");
    if (c != 0.0) p.coeffs_[k] = c;
    return p;
  }

  int dim() const { return dim_; }
  const std::map<Freq, cplx>& coeffs() const { return coeffs_; }
  bool empty() const { return coeffs_.empty(); }

  cplx coeff(const Freq& k) const {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? cplx{} : it->second;
  }

  /// Integral over T^d.
  cplx mean() const { return coeff(Freq{}); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& [k, c] : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  /// Pointwise complex conjugate: c_k -> conj(c_{-k}).
  TrigPoly conj() const {
    TrigPoly r(dim_);
    for (const auto& [k, c] : coeffs_) r.coeffs_[freq_neg(k)] = std::conj(c);
    return r;
  }

  cplx operator()(std::span<const double> x) const {
    cplx s = 0.0;
    for (const auto& [k, c] : coeffs_) {
      double phase = 0.0;
      for (int i = 0; i < dim_; ++i) phase += k[i] * x[static_cast<std::size_t>(i)];
      s += c * std::exp(kTwoPiI * phase);
    }
    return s;
  }

  TrigPoly pruned(double eps = kDropTolerance) const {
    TrigPoly r(dim_);
    for (const auto& [k, c] : coeffs_)
      if (std::abs(c) >= eps) r.coeffs_.emplace(k, c);
    return r;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    require_same_dim(o);
    for (const auto& [k, c] : o.coeffs_) accumulate(k, c);
    return *this;
  }
  TrigPoly& operator-=(const TrigPoly& o) {
    require_same_dim(o);
    for (const auto& [k, c] : o.coeffs_) accumulate(k, -c);
    return *this;
  }

  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator-(const TrigPoly& a) { return cplx(-1.0) * a; }

  friend TrigPoly operator*(cplx s, const TrigPoly& a) {
    TrigPoly r(a.dim_);
    if (s == 0.0) return r;
    for (const auto& [k, c] : a.coeffs_) r.coeffs_.emplace(k, s * c);
    return r;
  }

  /// Product = convolution of coefficient maps.
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    a.require_same_dim(b);
    TrigPoly r(a.dim_);
    for (const auto& [k, c] : a.coeffs_)
      for (const auto& [l, e] : b.coeffs_) r.accumulate(freq_add(k, l), c * e);
    r = r.pruned();
    check_support(r.coeffs_.size());
    return r;
  }

  friend bool operator==(const TrigPoly&, const TrigPoly&) = default;

 private:
  void require_same_dim(const TrigPoly& o) const {
    if (o.dim_ != dim_) throw StructuralError("trig polynomial dimension mismatch");
  }

  void accumulate(const Freq& k, cplx c) {
    auto [it, inserted] = coeffs_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) coeffs_.erase(it);
    }
  }

  int dim_;
  std::map<Freq, cplx> coeffs_;
};

/// C(T^d) realized as trigonometric polynomials, traced by integration.
/// With d = 1 this is C(U_1), the base of the rotation algebra.
class TrigPolyAlgebra {
 public:
  using element = TrigPoly;

  explicit TrigPolyAlgebra(int dim) : dim_(dim) { check_dim(dim); }
  int dim() const { return dim_; }

  element zero() const { return TrigPoly(dim_); }
  element one() const { return TrigPoly::constant(dim_, 1.0); }
  element add(const element& a, const element& b) const { return a + b; }
  element mul(const element& a, const element& b) const { return a * b; }
  element scale(cplx c, const element& a) const { return c * a; }
  element star(const element& a) const { return a.conj(); }
  cplx trace(const element& a) const { return a.mean(); }
  double norm(const element& a) const { return a.max_abs(); }
  element prune(const element& a, double eps) const { return a.pruned(eps); }
  bool is_zero(const element& a) const { return a.empty(); }
  bool operator==(const TrigPolyAlgebra&) const = default;

 private:
  int dim_;
};

}  // namespace nccs
