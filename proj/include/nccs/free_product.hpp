#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "nccs/algebra.hpp"

namespace nccs {

/// A letter of a free-product word: either an element of A = M_n(C) or a
/// nonzero power z^k of the free unitary.
struct FreeLetter {
  bool is_z = false;
  int power = 0;
  Eigen::MatrixXcd a;

  static FreeLetter z(int k) { return FreeLetter{true, k, {}}; }
  static FreeLetter base(Eigen::MatrixXcd m) { return FreeLetter{false, 0, std::move(m)}; }
};

/// coeff * (letter_1 letter_2 ... letter_r), letters alternating between
/// A and the z side once canonical.
struct FreeTerm {
  cplx coeff = 1.0;
  std::vector<FreeLetter> letters;
};

/// Truncated free product A * C(S^1), A = M_n(C) with its normalized trace,
/// carrying the free-product trace tau_A * (Haar integral).
///
/// Elements are finite linear combinations of canonical alternating words.
/// Words longer than the configured cap raise TruncationError; nothing is
/// silently dropped.
class FreeProductAlgebra {
 public:
  using element = std::vector<FreeTerm>;

  FreeProductAlgebra(int n, int max_word_length = 32) : base_(n), max_len_(max_word_length) {
    if (max_word_length < 1) throw ContractError("free product word cap must be positive");
  }

  int n() const { return base_.n(); }
  int max_word_length() const { return max_len_; }
  const MatrixAlgebra& base() const { return base_; }

  element zero() const { return {}; }
  element one() const { return {FreeTerm{1.0, {}}}; }
  element embed(const Eigen::MatrixXcd& a) const {
    check_shape(a);
    return normalize({FreeTerm{1.0, {FreeLetter::base(a)}}});
  }
  element z(int k = 1) const { return normalize({FreeTerm{1.0, {FreeLetter::z(k)}}}); }
  element word(std::vector<FreeLetter> letters, cplx coeff = 1.0) const {
    for (const auto& l : letters)
      if (!l.is_z) check_shape(l.a);
    return normalize({FreeTerm{coeff, std::move(letters)}});
  }

  element add(const element& a, const element& b) const {
    element r = a;
    r.insert(r.end(), b.begin(), b.end());
    return combine(std::move(r));
  }

  element mul(const element& a, const element& b) const {
    element r;
    r.reserve(a.size() * b.size());
    for (const auto& s : a)
      for (const auto& t : b) {
        FreeTerm p{s.coeff * t.coeff, s.letters};
        p.letters.insert(p.letters.end(), t.letters.begin(), t.letters.end());
        r.push_back(std::move(p));
      }
    return normalize(std::move(r));
  }

  element scale(cplx c, const element& a) const {
    if (c == 0.0) return {};
    element r = a;
    for (auto& t : r) t.coeff *= c;
    return r;
  }

  element star(const element& a) const {
    element r;
    for (const auto& t : a) {
      FreeTerm s{std::conj(t.coeff), {}};
      for (auto it = t.letters.rbegin(); it != t.letters.rend(); ++it)
        s.letters.push_back(it->is_z ? FreeLetter::z(-it->power)
                                     : FreeLetter::base(it->a.adjoint()));
      r.push_back(std::move(s));
    }
    return normalize(std::move(r));
  }

  /// Free-product trace by the centering recursion.
  cplx trace(const element& a) const {
    cplx s = 0.0;
    for (const auto& t : a) s += t.coeff * word_trace(t.letters);
    return s;
  }

  double norm(const element& a) const {
    double n = 0.0;
    for (const auto& t : a) n = std::max(n, term_size(t));
    return n;
  }

  element prune(const element& a, double eps) const {
    element r;
    for (const auto& t : a)
      if (term_size(t) >= eps) r.push_back(t);
    return r;
  }

  bool is_zero(const element& a) const { return a.empty(); }

  bool operator==(const FreeProductAlgebra& o) const {
    return base_ == o.base_ && max_len_ == o.max_len_;
  }

  /// The endomorphism phi_u fixing A and sending z -> z u (so that
  /// phi_u o phi_v = phi_{uv}); u must be unitary.
  element phi(const element& a, const Eigen::MatrixXcd& u) const {
    check_shape(u);
    if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(n(), n())).cwiseAbs().maxCoeff() > 1e-12)
      throw ContractError("phi_u requires a unitary u");
    const Eigen::MatrixXcd u_inv = u.adjoint();
    element r;
    for (const auto& t : a) {
      FreeTerm s{t.coeff, {}};
      for (const auto& l : t.letters) {
        if (!l.is_z) {
          s.letters.push_back(l);
          continue;
        }
        for (int i = 0; i < std::abs(l.power); ++i) {
          if (l.power > 0) {
            s.letters.push_back(FreeLetter::z(1));
            s.letters.push_back(FreeLetter::base(u));
          } else {
            s.letters.push_back(FreeLetter::base(u_inv));
            s.letters.push_back(FreeLetter::z(-1));
          }
        }
      }
      r.push_back(std::move(s));
    }
    return normalize(std::move(r));
  }

  /// Canonical form of a single term; coefficient zero means the term vanished.
  FreeTerm canonical(FreeTerm t) const {
    std::vector<FreeLetter> out;
    out.reserve(t.letters.size());
    for (auto& l : t.letters) {
      if (!absorb(l, t.coeff)) continue;
      if (!out.empty() && out.back().is_z == l.is_z) {
        auto& top = out.back();
        if (l.is_z)
          top.power += l.power;
        else
          top.a = top.a * l.a;
        if (!absorb(top, t.coeff)) out.pop_back();
      } else {
        out.push_back(std::move(l));
      }
      if (t.coeff == 0.0) return FreeTerm{0.0, {}};
    }
    t.letters = std::move(out);
    return t;
  }

 private:
  void check_shape(const Eigen::MatrixXcd& a) const {
    if (a.rows() != n() || a.cols() != n())
      throw StructuralError("free product letter has the wrong matrix size");
  }

  // Returns false when the letter is a unit (absorbed into coeff).
  static bool absorb(FreeLetter& l, cplx& coeff) {
    if (l.is_z) return l.power != 0;
    const cplx c = l.a(0, 0);
    const double scale = std::max(1.0, std::abs(c));
    bool scalar = true;
    for (Eigen::Index i = 0; i < l.a.rows() && scalar; ++i)
      for (Eigen::Index j = 0; j < l.a.cols(); ++j) {
        const cplx expect = (i == j) ? c : cplx{};
        if (std::abs(l.a(i, j) - expect) > 1e-13 * scale) {
          scalar = false;
          break;
        }
      }
    if (!scalar) return true;
    coeff *= c;
    return false;
  }

  static double term_size(const FreeTerm& t) {
    double s = std::abs(t.coeff);
    for (const auto& l : t.letters)
      if (!l.is_z) s *= l.a.cwiseAbs().maxCoeff();
    return s;
  }

  element normalize(element terms) const {
    for (auto& t : terms) {
      t = canonical(std::move(t));
      if (static_cast<int>(t.letters.size()) > max_len_)
        throw TruncationError("free-product word of length " + std::to_string(t.letters.size()) +
                              " exceeds cap " + std::to_string(max_len_));
    }
    return combine(std::move(terms));
  }

  static bool letter_less(const FreeLetter& x, const FreeLetter& y) {
    if (x.is_z != y.is_z) return x.is_z < y.is_z;
    if (x.is_z) return x.power < y.power;
    for (Eigen::Index i = 0; i < x.a.size(); ++i) {
      const cplx p = x.a.data()[i], q = y.a.data()[i];
      if (p.real() != q.real()) return p.real() < q.real();
      if (p.imag() != q.imag()) return p.imag() < q.imag();
    }
    return false;
  }

  static bool word_less(const FreeTerm& s, const FreeTerm& t) {
    return std::lexicographical_compare(s.letters.begin(), s.letters.end(), t.letters.begin(),
                                        t.letters.end(), letter_less);
  }

  static bool word_equal(const FreeTerm& s, const FreeTerm& t) {
    return !word_less(s, t) && !word_less(t, s);
  }

  // Merge terms with identical words; drop vanishing coefficients.
  static element combine(element terms) {
    std::stable_sort(terms.begin(), terms.end(), word_less);
    element r;
    for (auto& t : terms) {
      if (!r.empty() && word_equal(r.back(), t))
        r.back().coeff += t.coeff;
      else
        r.push_back(std::move(t));
    }
    std::erase_if(r, [](const FreeTerm& t) { return std::abs(t.coeff) < kDropTolerance; });
    return r;
  }

  cplx word_trace(const std::vector<FreeLetter>& w) const {
    if (w.empty()) return 1.0;
    if (w.size() == 1) return w[0].is_z ? cplx{} : base_.trace(w[0].a);
    return centered_trace(w, 0);
  }

  // tau(w) where all A-letters before position `from` are already centered:
  // expand the next A-letter a as (a - tau(a)) + tau(a). A nonempty
  // alternating word of centered letters has trace zero.
  cplx centered_trace(std::vector<FreeLetter> w, std::size_t from) const {
    std::size_t p = from;
    while (p < w.size() && w[p].is_z) ++p;
    if (p >= w.size()) return 0.0;
    const cplx c = base_.trace(w[p].a);
    cplx result = 0.0;
    if (c != 0.0) {
      FreeTerm reduced{c, {}};
      for (std::size_t i = 0; i < w.size(); ++i)
        if (i != p) reduced.letters.push_back(w[i]);
      reduced = canonical(std::move(reduced));
      if (reduced.coeff != 0.0) result += reduced.coeff * word_trace(reduced.letters);
    }
    w[p].a.diagonal().array() -= c;
    if (!w[p].a.isZero(0.0)) result += centered_trace(std::move(w), p + 1);
    return result;
  }

  MatrixAlgebra base_;
  int max_len_;
};

}  // namespace nccs
