#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nccs/algebra.hpp"
#include "nccs/forms.hpp"

namespace nccs {

/// Connection d + omega on the trivialized rank-m bundle over T^d with
/// fibre A^m; omega is an m x m matrix of A-valued 1-forms.
template <TracedStarAlgebra A>
class Connection {
 public:
  using Form = GradedForm<A>;

  explicit Connection(Form omega) : omega_(std::move(omega)) {
    if (omega_.rows() != omega_.cols()) throw StructuralError("connection form must be square");
    for (const auto& [m, s] : omega_.parts())
      if (degree_of(m) != 1) throw StructuralError("connection form must be a 1-form");
  }

  static Connection trivial(std::shared_ptr<const A> alg, int dim, int rank) {
    return Connection(Form(std::move(alg), dim, rank, rank));
  }

  const Form& omega() const { return omega_; }
  int dim() const { return omega_.dim(); }
  int rank() const { return omega_.rows(); }
  const A& algebra() const { return omega_.algebra(); }
  const std::shared_ptr<const A>& algebra_ptr() const { return omega_.algebra_ptr(); }

 private:
  Form omega_;
};

/// F = d omega + omega ^ omega.
template <TracedStarAlgebra A>
GradedForm<A> curvature(const Connection<A>& c) {
  return exterior_derivative(c.omega()) + wedge(c.omega(), c.omega());
}

template <TracedStarAlgebra A>
bool is_flat(const Connection<A>& c, double tol = 1e-10) {
  return curvature(c).max_abs() <= tol;
}

/// True iff omega* = -omega within tol (unitary for the standard frame metric).
template <TracedStarAlgebra A>
bool unitarity_check(const Connection<A>& c, double tol = 1e-12) {
  return (star(c.omega()) + c.omega()).max_abs() <= tol;
}

/// Constant coefficient matrix X_j of omega = sum_j X_j dx_j.
template <TracedStarAlgebra A>
Mat<typename A::element> constant_component(const Connection<A>& c, int direction) {
  if (!c.omega().is_constant())
    throw UnsupportedError("holonomy requires a connection form that is constant in x");
  if (direction < 0 || direction >= c.dim()) throw StructuralError("direction out of range");
  return c.omega().coefficient(static_cast<Mask>(1u << direction), Freq{});
}

// ---------------------------------------------------------------------------
// Dense views for algebras whose matrices are ordinary complex matrices.

template <class A>
struct DenseView;

template <>
struct DenseView<ScalarAlgebra> {
  static Eigen::MatrixXcd to_dense(const ScalarAlgebra&, const Mat<cplx>& m) {
    Eigen::MatrixXcd r(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) r(i, j) = m(i, j);
    return r;
  }
  static Mat<cplx> from_dense(const ScalarAlgebra&, const Eigen::MatrixXcd& d) {
    Mat<cplx> r(static_cast<int>(d.rows()), static_cast<int>(d.cols()), 0.0);
    for (int i = 0; i < r.rows; ++i)
      for (int j = 0; j < r.cols; ++j) r(i, j) = d(i, j);
    return r;
  }
};

/// An m x m matrix over M_n(C) is viewed as an (m n) x (m n) block matrix.
template <>
struct DenseView<MatrixAlgebra> {
  static Eigen::MatrixXcd to_dense(const MatrixAlgebra& alg, const Mat<Eigen::MatrixXcd>& m) {
    const int n = alg.n();
    Eigen::MatrixXcd r(m.rows * n, m.cols * n);
    for (int i = 0; i < m.rows; ++i)
      for (int j = 0; j < m.cols; ++j) r.block(i * n, j * n, n, n) = m(i, j);
    return r;
  }
  static Mat<Eigen::MatrixXcd> from_dense(const MatrixAlgebra& alg, const Eigen::MatrixXcd& d) {
    const int n = alg.n();
    if (d.rows() % n || d.cols() % n) throw StructuralError("dense size is not a multiple of n");
    Mat<Eigen::MatrixXcd> r(static_cast<int>(d.rows() / n), static_cast<int>(d.cols() / n),
                            alg.zero());
    for (int i = 0; i < r.rows; ++i)
      for (int j = 0; j < r.cols; ++j) r(i, j) = d.block(i * n, j * n, n, n);
    return r;
  }
};

template <class A>
concept DenseRepresentable = requires(const A& alg, const Mat<typename A::element>& m) {
  { DenseView<A>::to_dense(alg, m) } -> std::convertible_to<Eigen::MatrixXcd>;
};

/// Logarithm branch for holonomy eigenvalues.
///  principal:     arguments in (-pi, pi]; eigenvalue -1 is rejected.
///  unit_interval: arguments in [0, 2 pi); each eigenvalue exp(2 pi i t)
///                 contributes t in [0, 1) to the alpha pairing.
enum class LogBranch { principal, unit_interval };

inline bool is_unitary(const Eigen::MatrixXcd& u, double tol = 1e-12) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <=
         tol;
}

/// Skew-Hermitian logarithm of a unitary, computed from its (diagonal)
/// Schur form.
inline Eigen::MatrixXcd log_unitary(const Eigen::MatrixXcd& u, LogBranch branch) {
  if (!is_unitary(u)) throw ContractError("log_unitary: input is not unitary within 1e-12");
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u);
  const Eigen::MatrixXcd& q = schur.matrixU();
  const Eigen::MatrixXcd& t = schur.matrixT();
  Eigen::VectorXcd angles(u.rows());
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const cplx lambda = t(i, i);
    double a = std::arg(lambda);
    if (std::abs(lambda - 1.0) < 1e-12) a = 0.0;
    if (branch == LogBranch::principal) {
      if (std::abs(lambda + 1.0) < 1e-9)
        throw BranchError(
            "holonomy has eigenvalue -1 on the principal branch cut; supply explicit generators "
            "(logarithms) or use the unit-interval branch");
    } else if (a < 0.0) {
      a += 2.0 * kPi;
    }
    angles(i) = cplx(0.0, a);
  }
  return q * angles.asDiagonal() * q.adjoint();
}

/// Holonomy matrices (U_1, ..., U_d) of a flat bundle over T^d, given as
/// dense matrices over the fibre (m x m over C, or (m n) x (m n) for M_n).
struct HolonomyData {
  std::vector<Eigen::MatrixXcd> matrices;
  bool commuting = false;
  bool unitary = false;

  static HolonomyData from_matrices(std::vector<Eigen::MatrixXcd> mats, double tol = 1e-12) {
    HolonomyData h{std::move(mats), true, true};
    for (std::size_t i = 0; i < h.matrices.size(); ++i) {
      h.unitary = h.unitary && is_unitary(h.matrices[i], tol);
      for (std::size_t j = i + 1; j < h.matrices.size(); ++j) {
        const auto& a = h.matrices[i];
        const auto& b = h.matrices[j];
        if ((a * b - b * a).cwiseAbs().maxCoeff() > tol) h.commuting = false;
      }
    }
    return h;
  }
};

/// Flat connection omega = sum_j X_j dx_j from pairwise commuting constant
/// generators; its holonomy is exp(X_j).
template <TracedStarAlgebra A>
  requires DenseRepresentable<A>
Connection<A> flat_from_generators(std::shared_ptr<const A> alg, int dim,
                                   const std::vector<Eigen::MatrixXcd>& generators,
                                   double tol = 1e-12) {
  if (static_cast<int>(generators.size()) != dim)
    throw StructuralError("need one generator per torus direction");
  for (std::size_t i = 0; i < generators.size(); ++i)
    for (std::size_t j = i + 1; j < generators.size(); ++j) {
      const auto& a = generators[i];
      const auto& b = generators[j];
      if ((a * b - b * a).cwiseAbs().maxCoeff() > tol)
        throw ContractError("flat connection needs pairwise commuting generators");
    }
  const auto first = DenseView<A>::from_dense(*alg, generators.front());
  GradedForm<A> omega(alg, dim, first.rows, first.cols);
  for (int j = 0; j < dim; ++j)
    omega.add_term(static_cast<Mask>(1u << j), Freq{},
                   DenseView<A>::from_dense(*alg, generators[static_cast<std::size_t>(j)]));
  omega.canonicalize();
  return Connection<A>(std::move(omega));
}

/// Flat connection with the given commuting unitary holonomies.
template <TracedStarAlgebra A>
  requires DenseRepresentable<A>
Connection<A> flat_from_holonomies(std::shared_ptr<const A> alg, const HolonomyData& h,
                                   LogBranch branch = LogBranch::principal) {
  if (h.matrices.empty()) throw StructuralError("holonomy data is empty");
  if (!h.unitary) throw ContractError("holonomies must be unitary; supply explicit generators");
  if (!h.commuting) throw ContractError("holonomies must commute pairwise");
  std::vector<Eigen::MatrixXcd> logs;
  for (const auto& u : h.matrices) logs.push_back(log_unitary(u, branch));
  return flat_from_generators(std::move(alg), static_cast<int>(h.matrices.size()), logs, 1e-10);
}

/// Holonomy exp(X_j) around the j-th circle of a constant connection.
template <TracedStarAlgebra A>
  requires DenseRepresentable<A>
Eigen::MatrixXcd holonomy(const Connection<A>& c, int direction) {
  const auto x = DenseView<A>::to_dense(c.algebra(), constant_component(c, direction));
  return x.exp();
}

/// True iff every holonomy is an isometry of the Hermitian form Q:
/// U_j* Q U_j = Q within tol.
inline bool isometry_form_check(const HolonomyData& h, const Eigen::MatrixXcd& q,
                                double tol = 1e-10) {
  if (q.rows() != q.cols()) throw StructuralError("form matrix must be square");
  if ((q - q.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw ContractError("sesquilinear form must be Hermitian");
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(q);
  if (!lu.isInvertible()) throw ContractError("sesquilinear form is degenerate");
  for (const auto& u : h.matrices) {
    if (u.rows() != q.rows()) throw StructuralError("holonomy and form sizes differ");
    if ((u.adjoint() * q * u - q).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Gauge transformations.

/// Bundle automorphism T(x) = exp(sum_j x_j K_j) U(x), where the K_j are
/// commuting constant matrices (a possibly quasi-periodic trivialization
/// factor) and U is a periodic unitary degree-0 form. T^{-1} d_nabla T is
/// periodic whenever the K_j commute with the connection form.
template <TracedStarAlgebra A>
class GaugeTransform {
 public:
  using Matrix = Mat<typename A::element>;

  explicit GaugeTransform(GradedForm<A> unitary, std::vector<Matrix> phase_generators = {},
                          double tol = 1e-12)
      : u_(std::move(unitary)), k_(std::move(phase_generators)) {
    const auto& alg = u_.algebra();
    if (u_.rows() != u_.cols()) throw StructuralError("gauge transformation must be square");
    for (const auto& [m, s] : u_.parts())
      if (m != 0) throw StructuralError("gauge transformation must be a 0-form");
    const auto id = GradedForm<A>::identity(u_.algebra_ptr(), u_.dim(), u_.rows());
    const double defect = std::max((wedge(star(u_), u_) - id).max_abs(),
                                   (wedge(u_, star(u_)) - id).max_abs());
    if (defect > tol)
      throw ContractError("gauge transformation is not unitary (defect " + std::to_string(defect) +
                          ")");
    if (!k_.empty() && static_cast<int>(k_.size()) != u_.dim())
      throw StructuralError("need one phase generator per torus direction");
    for (std::size_t i = 0; i < k_.size(); ++i) {
      if (k_[i].rows != u_.rows() || k_[i].cols != u_.cols())
        throw StructuralError("phase generator shape mismatch");
      for (std::size_t j = i + 1; j < k_.size(); ++j)
        if (mat_norm(alg, mat_commutator(alg, k_[i], k_[j])) > tol)
          throw ContractError("phase generators must commute");
    }
  }

  const GradedForm<A>& periodic_part() const { return u_; }
  const std::vector<Matrix>& phase_generators() const { return k_; }
  int dim() const { return u_.dim(); }

  /// sum_j K_j dx_j (zero when there is no phase factor).
  GradedForm<A> phase_form() const {
    GradedForm<A> f(u_.algebra_ptr(), u_.dim(), u_.rows(), u_.cols());
    for (std::size_t j = 0; j < k_.size(); ++j) f.add_term(static_cast<Mask>(1u << j), Freq{}, k_[j]);
    f.canonicalize();
    return f;
  }

 private:
  GradedForm<A> u_;
  std::vector<Matrix> k_;
};

/// The End(V)-valued 1-form T^{-1} d_nabla T : s -> T^{-1} nabla(T s) - nabla s,
///   = U* (sum K_j dx_j) U + U* dU + U* omega U - omega.
template <TracedStarAlgebra A>
GradedForm<A> relative_form(const GaugeTransform<A>& t, const Connection<A>& c,
                            double tol = 1e-12) {
  const auto& u = t.periodic_part();
  u.require_compatible(c.omega());
  for (const auto& k : t.phase_generators()) {
    const auto kf = GradedForm<A>::constant(c.algebra_ptr(), c.dim(), k);
    if ((wedge(kf, c.omega()) - wedge(c.omega(), kf)).max_abs() > tol)
      throw ContractError("phase generators must commute with the connection form");
  }
  const auto u_star = star(u);
  auto beta = wedge(u_star, exterior_derivative(u));
  if (!t.phase_generators().empty()) beta += wedge(wedge(u_star, t.phase_form()), u);
  beta += wedge(wedge(u_star, c.omega()), u);
  beta -= c.omega();
  return beta;
}

/// T^{-1} nabla T.
template <TracedStarAlgebra A>
Connection<A> gauge_transform(const Connection<A>& c, const GaugeTransform<A>& t) {
  return Connection<A>(c.omega() + relative_form(t, c));
}

// ---------------------------------------------------------------------------
// Direct sums and tensor products.

template <TracedStarAlgebra A>
GradedForm<A> block_diagonal(const GradedForm<A>& a, const GradedForm<A>& b) {
  a.require_compatible(b);
  const auto& alg = a.algebra();
  GradedForm<A> r(a.algebra_ptr(), a.dim(), a.rows() + b.rows(), a.cols() + b.cols());
  auto place = [&](const GradedForm<A>& f, int r0, int c0) {
    for (const auto& [m, s] : f.parts())
      for (const auto& [k, c] : s) {
        auto big = mat_zero(alg, r.rows(), r.cols());
        for (int i = 0; i < c.rows; ++i)
          for (int j = 0; j < c.cols; ++j) big(r0 + i, c0 + j) = c(i, j);
        r.add_term(m, k, big);
      }
  };
  place(a, 0, 0);
  place(b, a.rows(), a.cols());
  r.canonicalize();
  return r;
}

/// External product of a scalar-matrix form with an A-matrix form:
/// (f dx_I M) x (g dx_J N) = sign(I,J) f g dx_{I u J} (M kron N).
template <TracedStarAlgebra A>
GradedForm<A> kron_wedge(const ScalarForm& a, const GradedForm<A>& b) {
  if (a.dim() != b.dim()) throw StructuralError("form dimension mismatch");
  const auto& alg = b.algebra();
  GradedForm<A> r(b.algebra_ptr(), b.dim(), a.rows() * b.rows(), a.cols() * b.cols());
  for (const auto& [ma, sa] : a.parts())
    for (const auto& [mb, sb] : b.parts()) {
      if (ma & mb) continue;
      const double sign = shuffle_sign(ma, mb);
      for (const auto& [ka, ca] : sa)
        for (const auto& [kb, cb] : sb) {
          auto big = mat_zero(alg, r.rows(), r.cols());
          for (int i = 0; i < ca.rows; ++i)
            for (int j = 0; j < ca.cols; ++j) {
              if (ca(i, j) == 0.0) continue;
              for (int p = 0; p < cb.rows; ++p)
                for (int q = 0; q < cb.cols; ++q)
                  big(i * cb.rows + p, j * cb.cols + q) = alg.scale(sign * ca(i, j), cb(p, q));
            }
          r.add_term(static_cast<Mask>(ma | mb), freq_add(ka, kb), big);
        }
    }
  r.canonicalize();
  return r;
}

template <TracedStarAlgebra A>
Connection<A> direct_sum_connection(const Connection<A>& v, const Connection<A>& w) {
  return Connection<A>(block_diagonal(v.omega(), w.omega()));
}

/// nabla_V (x) 1 + 1 (x) nabla_W on V (x) W, for a complex bundle V and an
/// A-bundle W.
template <TracedStarAlgebra A>
Connection<A> tensor_connection(const Connection<ScalarAlgebra>& v, const Connection<A>& w) {
  if (v.dim() != w.dim()) throw StructuralError("tensor factors live on different tori");
  const auto id_v = ScalarForm::identity(scalars(), v.dim(), v.rank());
  const auto id_w = GradedForm<A>::identity(w.algebra_ptr(), w.dim(), w.rank());
  return Connection<A>(kron_wedge(v.omega(), id_w) + kron_wedge(id_v, w.omega()));
}

}  // namespace nccs
