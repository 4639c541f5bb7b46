#pragma once

#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>

#include "nccs/algebra.hpp"
#include "nccs/trig_poly.hpp"

namespace nccs {

/// Crossed product B x| Z by an action m -> rho_m of trace-preserving
/// automorphisms. Elements are finite sums sum_m f_m gamma^m with
///   (f gamma^m)(g gamma^n) = f rho_m(g) gamma^{m+n},
///   (f gamma^m)*           = rho_{-m}(f*) gamma^{-m},
///   tau(sum f_m gamma^m)   = tau_B(f_0).
template <TracedStarAlgebra Base>
class CrossedProduct {
 public:
  using base_type = Base;
  using base_element = typename Base::element;
  using element = std::map<int, base_element>;
  using Action = std::function<base_element(int, const base_element&)>;

  CrossedProduct(std::shared_ptr<const Base> base, Action action, int max_power = 64)
      : base_(std::move(base)), action_(std::move(action)), max_power_(max_power) {
    if (!base_ || !action_) throw StructuralError("crossed product needs a base and an action");
  }

  const Base& base() const { return *base_; }
  const std::shared_ptr<const Base>& base_ptr() const { return base_; }
  int max_power() const { return max_power_; }

  base_element act(int m, const base_element& b) const { return m == 0 ? b : action_(m, b); }

  element zero() const { return {}; }
  element one() const { return embed(base_->one()); }
  element embed(const base_element& b) const {
    element e;
    if (!base_->is_zero(b)) e.emplace(0, b);
    return e;
  }
  /// The unitary gamma^m.
  element generator(int m = 1) const {
    check_power(m);
    return element{{m, base_->one()}};
  }
  element term(const base_element& b, int m) const {
    check_power(m);
    element e;
    if (!base_->is_zero(b)) e.emplace(m, b);
    return e;
  }

  element add(const element& a, const element& b) const {
    element r = a;
    for (const auto& [m, g] : b) accumulate(r, m, g);
    return r;
  }

  element mul(const element& a, const element& b) const {
    element r;
    for (const auto& [m, f] : a)
      for (const auto& [n, g] : b) {
        check_power(m + n);
        accumulate(r, m + n, base_->mul(f, act(m, g)));
      }
    return r;
  }

  element scale(cplx c, const element& a) const {
    element r;
    if (c == 0.0) return r;
    for (const auto& [m, f] : a) r.emplace(m, base_->scale(c, f));
    return r;
  }

  element star(const element& a) const {
    element r;
    for (const auto& [m, f] : a) accumulate(r, -m, act(-m, base_->star(f)));
    return r;
  }

  cplx trace(const element& a) const {
    auto it = a.find(0);
    return it == a.end() ? cplx{} : base_->trace(it->second);
  }

  double norm(const element& a) const {
    double n = 0.0;
    for (const auto& [m, f] : a) n = std::max(n, base_->norm(f));
    return n;
  }

  element prune(const element& a, double eps) const {
    element r;
    for (const auto& [m, f] : a) {
      auto g = base_->prune(f, eps);
      if (!base_->is_zero(g)) r.emplace(m, std::move(g));
    }
    return r;
  }

  bool is_zero(const element& a) const { return a.empty(); }

 private:
  void check_power(int m) const {
    if (std::abs(m) > max_power_)
      throw ResourceError("crossed-product support exceeds |m| <= " + std::to_string(max_power_));
  }

  void accumulate(element& r, int m, const base_element& g) const {
    auto [it, inserted] = r.try_emplace(m, g);
    if (!inserted) it->second = base_->add(it->second, g);
    if (base_->is_zero(it->second)) r.erase(it);
  }

  std::shared_ptr<const Base> base_;
  Action action_;
  int max_power_;
};

/// Build a crossed product after checking on sample elements that every
/// rho_m, |m| <= 2, preserves the base trace to 1e-10.
template <TracedStarAlgebra Base>
std::shared_ptr<const CrossedProduct<Base>> build_crossed_product(
    std::shared_ptr<const Base> base, typename CrossedProduct<Base>::Action action,
    std::span<const typename Base::element> samples, int max_power = 64) {
  auto cp = std::make_shared<const CrossedProduct<Base>>(base, std::move(action), max_power);
  for (const auto& b : samples)
    for (int m : {-2, -1, 1, 2}) {
      const double drift = std::abs(base->trace(cp->act(m, b)) - base->trace(b));
      if (drift > 1e-10)
        throw ContractError("crossed product action does not preserve the trace (drift " +
                            std::to_string(drift) + ")");
    }
  return cp;
}

using RotationAlgebra = CrossedProduct<TrigPolyAlgebra>;

/// C(S^1) x|_theta Z: rho_m(u^k) = exp(2 pi i k m theta) u^k, hence
/// gamma u gamma^{-1} = exp(2 pi i theta) u.
inline std::shared_ptr<const RotationAlgebra> make_rotation_algebra(double theta) {
  auto base = std::make_shared<const TrigPolyAlgebra>(1);
  auto action = [theta](int m, const TrigPoly& f) {
    TrigPoly r(1);
    for (const auto& [k, c] : f.coeffs())
      r += TrigPoly::monomial(1, k, c * std::exp(kTwoPiI * (double(k[0]) * m * theta)));
    return r;
  };
  const TrigPoly samples[] = {TrigPoly::monomial(1, Freq{1}, 1.0) + TrigPoly::constant(1, 0.5),
                              TrigPoly::monomial(1, Freq{-2}, cplx(0.3, 0.7))};
  return build_crossed_product<TrigPolyAlgebra>(base, action, samples);
}

/// The inclusion function z -> z of U(1), i.e. the Fourier monomial k = 1.
inline RotationAlgebra::element rotation_u(const RotationAlgebra& alg, int power = 1) {
  return alg.embed(TrigPoly::monomial(1, Freq{power}, 1.0));
}

}  // namespace nccs
