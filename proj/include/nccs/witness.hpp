#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nccs/characters.hpp"
#include "nccs/connections.hpp"
#include "nccs/crossed_product.hpp"
#include "nccs/free_product.hpp"
#include "nccs/haar.hpp"
#include "nccs/parallel.hpp"

namespace nccs {

/// A named residual computed along the way to the main identity.
struct ChainStep {
  std::string name;
  double residual = 0.0;
};

/// Flat bundle W over an operator algebra B together with the intertwiner
/// T between nabla_triv (x) nabla_W and nabla_V (x) nabla_W on the circle.
///
/// Working frame: the one in which nabla_V (x) nabla_W = d. Then
/// nabla_triv (x) nabla_W = d - X dx with X the log-holonomy of V, and
/// T = exp(x X) U with U the algebra unitary that conjugates the holonomy
/// of the first bundle into that of the second.
template <TracedStarAlgebra B>
struct WitnessData {
  std::shared_ptr<const B> algebra;
  Connection<B> triv_w;      // nabla_triv (x) nabla_W
  Connection<B> v_w;         // nabla_V (x) nabla_W
  GaugeTransform<B> t;       // the intertwiner
  double holonomy_residual;  // ||U h U* - gamma|| in the algebra
  double connection_residual = 0.0;
};

template <TracedStarAlgebra B>
double intertwining_residual(const WitnessData<B>& w) {
  return (gauge_transform(w.triv_w, w.t).omega() - w.v_w.omega()).max_abs();
}

/// Outcome of comparing the witness Chern character with the alpha pairing.
struct MainPropReport {
  cplx ch_pairing;
  cplx alpha_pairing;
  double residual = 0.0;
  double intertwining = 0.0;
  double holonomy_residual = 0.0;
  double unitarity_defect = 0.0;
  std::vector<ChainStep> chain;
};

// ---------------------------------------------------------------------------
// Rotation algebra, n = 1.

struct RotationWitness {
  double theta = 0.0;
  Connection<ScalarAlgebra> v;     // holonomy exp(2 pi i theta)
  Connection<ScalarAlgebra> triv;  // d
  Connection<RotationAlgebra> w;   // rank-one bundle over the rotation algebra
  WitnessData<RotationAlgebra> data;
};

/// Witness over C(U_1) x|_theta Z. The flat W has holonomy gamma; in the
/// working frame nabla_W = d - 2 pi i theta dx. U = u, the inclusion function,
/// satisfies u (exp(2 pi i theta) gamma) u* = gamma.
inline RotationWitness build_rotation_witness(double theta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ContractError("rotation angle must lie in [0, 1)");
  auto alg = make_rotation_algebra(theta);
  const cplx x = kTwoPiI * theta;
  auto s = scalars();
  auto v = Connection<ScalarAlgebra>(scalar_monomial(1, 1, Freq{}, x));
  auto triv = Connection<ScalarAlgebra>::trivial(s, 1, 1);

  Mat<RotationAlgebra::element> xw(1, 1, alg->scale(-x, alg->one()));
  auto w = Connection<RotationAlgebra>(GradedForm<RotationAlgebra>::monomial(alg, 1, 1, Freq{}, xw));

  Mat<RotationAlgebra::element> u(1, 1, rotation_u(*alg));
  Mat<RotationAlgebra::element> k(1, 1, alg->scale(x, alg->one()));
  GaugeTransform<RotationAlgebra> t(GradedForm<RotationAlgebra>::constant(alg, 1, u), {k}, 1e-10);

  const auto h = alg->scale(std::exp(x), alg->generator(1));
  const auto conj = alg->mul(alg->mul(rotation_u(*alg), h), rotation_u(*alg, -1));
  const double hol = alg->norm(alg->add(conj, alg->scale(-1.0, alg->generator(1))));

  WitnessData<RotationAlgebra> data{alg, tensor_connection(triv, w), tensor_connection(v, w), t,
                                    hol};
  return RotationWitness{theta, v, triv, w, std::move(data)};
}

/// Compare the pairing of ch_tau(T) with the alpha pairing of (V, triv), and
/// record the intermediate identities the comparison rests on.
inline MainPropReport main_prop_check(const RotationWitness& rw) {
  const auto& wd = rw.data;
  MainPropReport r;
  const auto ch = odd_chern_character(wd.t, wd.triv_w);
  r.ch_pairing = pair_with_cycle(ch, 1);
  r.alpha_pairing = alpha_invariant(rw.v, rw.triv).pairings.at(1);
  r.residual = std::abs(r.ch_pairing - r.alpha_pairing);
  r.intertwining = intertwining_residual(wd);
  r.holonomy_residual = wd.holonomy_residual;
  const auto& u = wd.t.periodic_part();
  r.unitarity_defect =
      (wedge(star(u), u) - GradedForm<RotationAlgebra>::identity(wd.algebra, 1, 1)).max_abs();

  const auto cs_vw = chern_simons_flat(gauge_transform(wd.triv_w, wd.t), wd.triv_w);
  r.chain.push_back({"odd character equals flat transgression",
                     pairing_distance(cycle_pairings(ch, true), cycle_pairings(cs_vw, true))});
  const cplx ch_w = pair_with_cycle(chern_character(rw.w), 0);
  const auto cs_tensor = chern_simons_flat(wd.v_w, wd.triv_w);
  r.chain.push_back({"tensor transgression with a flat factor",
                     std::abs(pair_with_cycle(cs_tensor, 1) - ch_w * r.alpha_pairing)});
  r.chain.push_back({"unit trace", std::abs(wd.algebra->trace(wd.algebra->one()) - 1.0)});
  return r;
}

// ---------------------------------------------------------------------------
// Free product (A * C(S^1)) x| Z with gamma acting by phi_psi.

using FreeCrossedAlgebra = CrossedProduct<FreeProductAlgebra>;

inline std::shared_ptr<const FreeCrossedAlgebra> make_free_crossed_algebra(
    std::shared_ptr<const FreeProductAlgebra> base, const Eigen::MatrixXcd& psi) {
  if (!is_unitary(psi)) throw ContractError("psi(1) must be unitary within 1e-12");
  const Eigen::MatrixXcd psi_inv = psi.adjoint();
  auto action = [b = base.get(), psi, psi_inv](int m, const FreeProductAlgebra::element& e) {
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(psi.rows(), psi.cols());
    for (int i = 0; i < std::abs(m); ++i) g = g * (m > 0 ? psi : psi_inv);
    return b->phi(e, g);
  };
  const std::vector<FreeProductAlgebra::element> samples = {
      base->z(1), base->mul(base->z(1), base->embed(psi)),
      base->mul(base->mul(base->z(-1), base->embed(psi)), base->z(2))};
  return build_crossed_product<FreeProductAlgebra>(base, action, samples);
}

struct FreeProductWitness {
  Eigen::MatrixXcd psi;
  Eigen::MatrixXcd log_psi;
  std::shared_ptr<const MatrixAlgebra> base;
  Connection<MatrixAlgebra> v;     // A-bundle with holonomy psi
  Connection<MatrixAlgebra> triv;  // d
  WitnessData<FreeCrossedAlgebra> data;
};

/// Witness over B = (A * C(S^1)) x| Z, A = M_n, with gamma z gamma^{-1} = z psi.
/// U = z and T = exp(x X) z with X the unit-interval logarithm of psi; the
/// identity z (psi gamma) z^{-1} = gamma holds in B.
inline FreeProductWitness build_freeproduct_witness(const Eigen::MatrixXcd& psi,
                                                    int max_word_length = 32) {
  const int n = static_cast<int>(psi.rows());
  auto fp = std::make_shared<const FreeProductAlgebra>(n, max_word_length);
  auto alg = make_free_crossed_algebra(fp, psi);
  const Eigen::MatrixXcd x = log_unitary(psi, LogBranch::unit_interval);

  auto base = std::make_shared<const MatrixAlgebra>(n);
  auto v = flat_from_generators<MatrixAlgebra>(base, 1, {x});
  auto triv = Connection<MatrixAlgebra>::trivial(base, 1, 1);

  const auto xb = alg->embed(fp->embed(x));
  Mat<FreeCrossedAlgebra::element> minus_x(1, 1, alg->scale(-1.0, xb));
  Connection<FreeCrossedAlgebra> triv_w(
      GradedForm<FreeCrossedAlgebra>::monomial(alg, 1, 1, Freq{}, minus_x));
  Connection<FreeCrossedAlgebra> v_w = Connection<FreeCrossedAlgebra>::trivial(alg, 1, 1);

  Mat<FreeCrossedAlgebra::element> z(1, 1, alg->embed(fp->z(1)));
  Mat<FreeCrossedAlgebra::element> k(1, 1, xb);
  GaugeTransform<FreeCrossedAlgebra> t(GradedForm<FreeCrossedAlgebra>::constant(alg, 1, z), {k},
                                       1e-10);

  const auto h = alg->mul(alg->embed(fp->embed(psi)), alg->generator(1));
  const auto conj = alg->mul(alg->mul(alg->embed(fp->z(1)), h), alg->embed(fp->z(-1)));
  const double hol = alg->norm(alg->add(conj, alg->scale(-1.0, alg->generator(1))));

  WitnessData<FreeCrossedAlgebra> data{alg, triv_w, v_w, t, hol};
  return FreeProductWitness{psi, x, base, v, triv, std::move(data)};
}

inline MainPropReport main_prop_check(const FreeProductWitness& fw) {
  const auto& wd = fw.data;
  MainPropReport r;
  const auto ch = odd_chern_character(wd.t, wd.triv_w);
  r.ch_pairing = pair_with_cycle(ch, 1);
  r.alpha_pairing = pair_with_cycle(alpha_invariant(fw.v, fw.triv).cs, 1);
  r.residual = std::abs(r.ch_pairing - r.alpha_pairing);
  r.intertwining = intertwining_residual(wd);
  r.holonomy_residual = wd.holonomy_residual;
  const auto& u = wd.t.periodic_part();
  r.unitarity_defect =
      (wedge(star(u), u) - GradedForm<FreeCrossedAlgebra>::identity(wd.algebra, 1, 1)).max_abs();
  const auto cs = chern_simons_flat(gauge_transform(wd.triv_w, wd.t), wd.triv_w);
  r.chain.push_back({"odd character equals flat transgression",
                     pairing_distance(cycle_pairings(ch, true), cycle_pairings(cs, true))});
  r.chain.push_back({"unit trace", std::abs(wd.algebra->trace(wd.algebra->one()) - 1.0)});
  return r;
}

// ---------------------------------------------------------------------------
// Trace invariance of phi_u on the free product.

struct Lemma33Case {
  Eigen::MatrixXcd u;
  cplx trace_u;
  double direct_residual = 0.0;    // max |tau(phi_u w) - tau(w)|
  double embedded_residual = 0.0;  // same for (u, -u) on A + A, when tau(u) != 0
  double embedding_trace_residual = 0.0;  // |tau(w') - tau(w)| for the embedded words
  bool embedded = false;
};

struct Lemma33Report {
  std::vector<Lemma33Case> cases;
  std::size_t words = 0;
  double max_residual() const {
    double m = 0.0;
    for (const auto& c : cases)
      m = std::max({m, c.direct_residual, c.embedded_residual, c.embedding_trace_residual});
    return m;
  }
};

/// Random alternating word of the given length: A-letters are Gaussian
/// complex matrices, z-letters are z^k with k in {-2, -1, 1, 2}.
inline std::vector<FreeLetter> random_free_word(int n, int length, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> power(0, 3);
  std::bernoulli_distribution coin(0.5);
  std::vector<FreeLetter> w;
  bool z_side = coin(rng);
  for (int i = 0; i < length; ++i, z_side = !z_side) {
    if (z_side) {
      const int p = power(rng);
      w.push_back(FreeLetter::z(p < 2 ? p - 2 : p - 1));
    } else {
      Eigen::MatrixXcd a(n, n);
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const double re = normal(rng);
        a.data()[j] = cplx(re, normal(rng));
      }
      w.push_back(FreeLetter::base(a));
    }
  }
  return w;
}

inline std::vector<FreeLetter> block_embed(const std::vector<FreeLetter>& w) {
  std::vector<FreeLetter> r;
  for (const auto& l : w) {
    if (l.is_z) {
      r.push_back(l);
      continue;
    }
    const auto n = l.a.rows();
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    b.topLeftCorner(n, n) = l.a;
    b.bottomRightCorner(n, n) = l.a;
    r.push_back(FreeLetter::base(b));
  }
  return r;
}

/// For each u, the largest trace drift of phi_u over random words of every
/// length 1..max_length (words_per_length each). When tau(u) != 0 the words
/// are also pushed into A + A, where u' = diag(u, -u) is traceless.
inline Lemma33Report lemma33_suite(const std::vector<Eigen::MatrixXcd>& unitaries, int max_length,
                                   int words_per_length, std::uint64_t seed, int threads = 1) {
  if (unitaries.empty()) throw ContractError("lemma33_suite needs at least one unitary");
  const int n = static_cast<int>(unitaries.front().rows());
  const int cap = 4 * max_length + 4;
  FreeProductAlgebra fp(n, cap);
  FreeProductAlgebra fp2(2 * n, cap);
  Lemma33Report report;
  report.cases.resize(unitaries.size());
  report.words = static_cast<std::size_t>(max_length * words_per_length);
  parallel_for(unitaries.size(), threads, [&](std::size_t i) {
    const auto& u = unitaries[i];
    Lemma33Case c{u, u.trace() / double(n)};
    c.embedded = std::abs(c.trace_u) > 1e-12;
    Eigen::MatrixXcd u2 = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    u2.topLeftCorner(n, n) = u;
    u2.bottomRightCorner(n, n) = -u;
    std::mt19937_64 rng(mix_seed(seed, i));
    for (int len = 1; len <= max_length; ++len)
      for (int k = 0; k < words_per_length; ++k) {
        const auto letters = random_free_word(n, len, rng);
        const auto w = fp.word(letters);
        const cplx tw = fp.trace(w);
        c.direct_residual = std::max(c.direct_residual, std::abs(fp.trace(fp.phi(w, u)) - tw));
        if (c.embedded) {
          const auto w2 = fp2.word(block_embed(letters));
          const cplx tw2 = fp2.trace(w2);
          c.embedding_trace_residual = std::max(c.embedding_trace_residual, std::abs(tw2 - tw));
          c.embedded_residual =
              std::max(c.embedded_residual, std::abs(fp2.trace(fp2.phi(w2, u2)) - tw2));
        }
      }
    report.cases[i] = std::move(c);
  });
  return report;
}

// ---------------------------------------------------------------------------
// C(U_n) x| Z with the Monte-Carlo Haar trace.

struct HaarWitnessReport {
  Eigen::MatrixXcd holonomy;
  std::vector<double> angles;  // eigenvalue angles in [0, 1)
  double alpha_total = 0.0;    // sum of angles
  double alpha_mod1 = 0.0;
  Estimate ch_pairing;         // Monte-Carlo pairing of ch_tau(T) with [S^1]
  double deviation = 0.0;      // |ch - alpha|
  std::vector<Estimate> diagonal;  // tau((u* X u)_ii), expected tr(X)/n
  double diagonal_expected = 0.0;
  double intertwining = 0.0;
  double holonomy_residual = 0.0;
  std::size_t samples = 0;
};

/// Haar route for a holonomy U in U(n): W is the rank-n bundle over
/// C(U_n) x| Z with holonomy gamma, T = exp(x X) u with u the inclusion
/// function U_n -> M_n, and gamma u gamma^{-1} = u U.
inline HaarWitnessReport haar_witness_check(const Eigen::MatrixXcd& holonomy, std::size_t samples,
                                            std::uint64_t seed, int threads = 1) {
  if (!is_unitary(holonomy)) throw ContractError("Haar witness holonomy must be unitary");
  const int n = static_cast<int>(holonomy.rows());
  if (n < 2) throw ContractError("Haar witness needs n >= 2");
  HaarWitnessReport r;
  r.holonomy = holonomy;
  r.samples = samples;

  const Eigen::MatrixXcd x = log_unitary(holonomy, LogBranch::unit_interval);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(x);
  for (Eigen::Index i = 0; i < n; ++i) r.angles.push_back(es.eigenvalues()(i).imag() / (2.0 * kPi));
  std::sort(r.angles.begin(), r.angles.end());
  for (double a : r.angles) r.alpha_total += a;
  r.alpha_mod1 = r.alpha_total - std::floor(r.alpha_total);

  auto base = std::make_shared<const HaarFunctionAlgebra>(n, samples, seed, threads);
  auto alg = make_haar_crossed_algebra(base, holonomy);

  Mat<HaarCrossedAlgebra::element> u(n, n, alg->zero());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) u(i, j) = alg->embed(base->entry(i, j));
  const auto xm = mat_from_scalars(*alg, x);
  Connection<HaarCrossedAlgebra> triv_w(
      GradedForm<HaarCrossedAlgebra>::monomial(alg, 1, 1, Freq{}, mat_scale(*alg, -1.0, xm)));
  auto v_w = Connection<HaarCrossedAlgebra>::trivial(alg, 1, n);
  GaugeTransform<HaarCrossedAlgebra> t(GradedForm<HaarCrossedAlgebra>::constant(alg, 1, u), {xm},
                                       1e-10);
  WitnessData<HaarCrossedAlgebra> wd{alg, triv_w, v_w, t, 0.0};
  r.intertwining = intertwining_residual(wd);

  // u (U gamma) u* = gamma, entrywise.
  auto h = mat_from_scalars(*alg, holonomy);
  for (auto& e : h.data) e = alg->mul(e, alg->generator(1));
  const auto conj = mat_mul(*alg, mat_mul(*alg, u, h), mat_star(*alg, u));
  auto gamma = mat_identity(*alg, n);
  for (auto& e : gamma.data)
    if (!alg->is_zero(e)) e = alg->generator(1);
  r.holonomy_residual = mat_norm(*alg, mat_add(*alg, conj, mat_scale(*alg, -1.0, gamma)));

  // Pairing of the degree-one part (1 / 2 pi i) tau(beta) with [S^1], with
  // its Monte-Carlo standard error.
  const auto beta = relative_form(t, triv_w).coefficient(1, Freq{});
  HaarPoly total;
  for (int i = 0; i < n; ++i) {
    auto it = beta(i, i).find(0);
    if (it != beta(i, i).end()) total = base->add(total, it->second);
  }
  const auto est = base->estimate(total);
  r.ch_pairing = {est.value / kTwoPiI, est.std_error / (2.0 * kPi)};
  r.deviation = std::abs(r.ch_pairing.value - r.alpha_total);

  const auto uxu = mat_mul(*alg, mat_star(*alg, u), mat_mul(*alg, xm, u));
  r.diagonal_expected = (x.trace() / kTwoPiI).real() / n;
  for (int i = 0; i < n; ++i) {
    const auto e = haar_trace(*alg, uxu(i, i));
    r.diagonal.push_back({e.value / kTwoPiI, e.std_error / (2.0 * kPi)});
  }
  return r;
}

}  // namespace nccs
