#ifndef NILGEO_LIE_ALGEBRA_HPP
#define NILGEO_LIE_ALGEBRA_HPP

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "nilgeo/errors.hpp"
#include "nilgeo/quaternion.hpp"

namespace nilgeo {

using Cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

/// Matrix realization of a (anti)linear Lie algebra involution.
struct InvolutionRule {
  enum class Kind {
    NegTranspose,            ///< X -> -X^T (linear)
    Conjugation,             ///< X -> P X P^{-1} (linear)
    NegTransposeConjugation, ///< X -> -(P X P^{-1})^T (linear)
    Entrywise,               ///< X -> conj(X) (antilinear)
    NegAdjoint,              ///< X -> -P X^* P^{-1} (antilinear)
    EntrywiseConjugation     ///< X -> P conj(X) P^{-1} (antilinear)
  };

  Kind kind = Kind::NegTranspose;
  MatC matrix; // P where applicable

  bool antilinear() const {
    return kind == Kind::Entrywise || kind == Kind::NegAdjoint ||
           kind == Kind::EntrywiseConjugation;
  }

  MatC apply(const MatC& X) const {
    switch (kind) {
      case Kind::NegTranspose: return -X.transpose();
      case Kind::Conjugation: return matrix * X * matrix.inverse();
      case Kind::NegTransposeConjugation:
        return -(matrix * X * matrix.inverse()).transpose().eval();
      case Kind::Entrywise: return X.conjugate();
      case Kind::NegAdjoint: return -(matrix * X.adjoint() * matrix.inverse()).eval();
      case Kind::EntrywiseConjugation: return matrix * X.conjugate() * matrix.inverse();
    }
    throw ConfigInvalid("unhandled involution kind");
  }
};

struct ContextTolerances {
  double closure = 1e-12;      // bracket closure of the basis
  double involution = 1e-10;   // theta/nu algebraic identities
  double kappa = 1e-10;        // kappa-triple bracket relations
  double membership = 1e-10;   // coordinate round trips
  bool check_kappa_theta = true; // theta(kappa(w)) = kappa(sigma(w))
};

class LieAlgebraContext;
using ContextPtr = std::shared_ptr<const LieAlgebraContext>;

/// Complex matrix Lie algebra with a fixed basis of the compact real form,
/// Cartan involution theta, conjugation nu, and a so(3)-triple (e1,e2,e3).
///
/// The basis matrices span the compact form u over the reals and g over the
/// complexes, so an element's coordinate vector is complex in general and
/// real exactly when the element lies in u.
class LieAlgebraContext : public std::enable_shared_from_this<LieAlgebraContext> {
public:
  static ContextPtr create(std::string name, int n, std::vector<MatC> basis,
                           InvolutionRule theta, InvolutionRule nu,
                           std::array<MatC, 3> kappa,
                           ContextTolerances tol = {}) {
    auto ctx = std::shared_ptr<LieAlgebraContext>(new LieAlgebraContext());
    ctx->m_name = std::move(name);
    ctx->m_n = n;
    ctx->m_basis = std::move(basis);
    ctx->m_theta = std::move(theta);
    ctx->m_nu = std::move(nu);
    ctx->m_tol = tol;
    ctx->build(kappa);
    return ctx;
  }

  const std::string& name() const { return m_name; }
  int matrix_size() const { return m_n; }
  int dim() const { return static_cast<int>(m_basis.size()); }
  const std::vector<MatC>& basis() const { return m_basis; }
  const InvolutionRule& theta_rule() const { return m_theta; }
  const InvolutionRule& nu_rule() const { return m_nu; }

  /// Coordinates of X over the basis; throws when X is outside the span.
  VecC coords(const MatC& X, double* residual = nullptr) const {
    VecC v = vectorize(X);
    VecC c = m_basis_qr.solve(v);
    double r = (m_basis_mat * c - v).norm();
    if (residual) *residual = r;
    if (r > m_tol.membership * std::max(1.0, v.norm()))
      throw BasisClosureFailure("matrix lies outside the algebra span, residual " +
                                std::to_string(r));
    return c;
  }

  MatC matrix(const VecC& c) const {
    MatC X = MatC::Zero(m_n, m_n);
    for (int i = 0; i < dim(); ++i) X += c[i] * m_basis[i];
    return X;
  }

  /// Structure constants: [b_i, b_j] = sum_k c^k_{ij} b_k, exposed as the
  /// matrices C_k with (C_k)_{ij} = c^k_{ij}.
  const std::vector<Eigen::MatrixXd>& structure_constants() const { return m_struct; }

  VecC bracket_coords(const VecC& x, const VecC& y) const {
    VecC out(dim());
    for (int k = 0; k < dim(); ++k) out[k] = x.transpose() * m_struct[k].cast<Cplx>() * y;
    return out;
  }

  /// ad(x) as a dim x dim matrix acting on coordinates.
  MatC ad(const VecC& x) const {
    MatC A = MatC::Zero(dim(), dim());
    for (int k = 0; k < dim(); ++k)
      for (int j = 0; j < dim(); ++j) {
        Cplx s = 0;
        for (int i = 0; i < dim(); ++i) s += x[i] * m_struct[k](i, j);
        A(k, j) = s;
      }
    return A;
  }

  /// Killing form matrix K_{ij} = trace(ad b_i ad b_j).
  const Eigen::MatrixXd& killing_matrix() const { return m_killing; }

  Cplx killing(const VecC& x, const VecC& y) const {
    return x.transpose() * m_killing.cast<Cplx>() * y;
  }

  /// theta on coordinates (complex-linear matrix).
  const Eigen::MatrixXd& theta_coords() const { return m_theta_coords; }
  /// nu on coordinates: nu(c) = N * conj(c).
  const Eigen::MatrixXd& nu_coords() const { return m_nu_coords; }

  VecC apply_theta(const VecC& c) const { return m_theta_coords.cast<Cplx>() * c; }
  VecC apply_nu(const VecC& c) const { return m_nu_coords.cast<Cplx>() * c.conjugate(); }

  const std::array<VecC, 3>& kappa_coords() const { return m_kappa; }

  double validation_residual() const { return m_validation_residual; }

private:
  LieAlgebraContext() = default;

  VecC vectorize(const MatC& X) const {
    VecC v(m_n * m_n);
    for (int r = 0; r < m_n; ++r)
      for (int c = 0; c < m_n; ++c) v[r * m_n + c] = X(r, c);
    return v;
  }

  void build(const std::array<MatC, 3>& kappa) {
    const int m = dim();
    if (m == 0) throw ConfigInvalid("empty basis");
    m_basis_mat.resize(m_n * m_n, m);
    for (int i = 0; i < m; ++i) {
      if (m_basis[i].rows() != m_n || m_basis[i].cols() != m_n)
        throw ConfigInvalid("basis matrix with wrong dimensions");
      if (std::abs(m_basis[i].trace()) > m_tol.membership)
        throw ConfigInvalid("basis matrices must be traceless");
      if ((m_basis[i] + m_basis[i].adjoint()).norm() > m_tol.membership)
        throw ConfigInvalid("basis matrices must lie in the compact form (anti-Hermitian)");
      m_basis_mat.col(i) = vectorize(m_basis[i]);
    }
    m_basis_qr.compute(m_basis_mat);
    if (m_basis_qr.rank() < m) throw ConfigInvalid("basis matrices are linearly dependent");

    double worst = 0.0;

    // structure constants and bracket closure
    m_struct.assign(m, Eigen::MatrixXd::Zero(m, m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        MatC br = m_basis[i] * m_basis[j] - m_basis[j] * m_basis[i];
        double res = 0.0;
        VecC c = solve_coords(br, &res);
        if (res > m_tol.closure * std::max(1.0, br.norm()))
          throw BasisClosureFailure("basis not closed under bracket at pair (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
        worst = std::max(worst, res);
        for (int k = 0; k < m; ++k) {
          if (std::abs(c[k].imag()) > 1e-9)
            throw ConfigInvalid("structure constants of the compact-form basis must be real");
          m_struct[k](i, j) = c[k].real();
        }
      }

    // Killing form from ad
    m_killing.resize(m, m);
    std::vector<Eigen::MatrixXd> admats(m, Eigen::MatrixXd::Zero(m, m));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j) admats[i](k, j) = m_struct[k](i, j);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) m_killing(i, j) = (admats[i] * admats[j]).trace();

    // ad-invariance of the Killing form on all basis triples
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          double lhs = (admats[i].col(j).transpose() * m_killing * Eigen::VectorXd::Unit(m, k))(0);
          double rhs = (Eigen::VectorXd::Unit(m, j).transpose() * m_killing * admats[i].col(k))(0);
          worst = std::max(worst, std::abs(lhs + rhs));
        }
    if (worst > 1e-8) throw ConfigInvalid("Killing form failed ad-invariance check");

    // involutions on coordinates
    Eigen::MatrixXcd T(m, m), N(m, m);
    for (int i = 0; i < m; ++i) {
      T.col(i) = solve_coords(m_theta.apply(m_basis[i]), nullptr);
      N.col(i) = solve_coords(m_nu.apply(m_basis[i]), nullptr);
    }
    if (T.imag().norm() > m_tol.involution || N.imag().norm() > m_tol.involution)
      throw InvolutionInvalid("theta/nu must preserve the compact-form basis span over R");
    m_theta_coords = T.real();
    m_nu_coords = N.real();

    if ((m_theta_coords * m_theta_coords - Eigen::MatrixXd::Identity(m, m)).norm() >
        m_tol.involution)
      throw InvolutionInvalid("theta^2 != id");
    if ((m_nu_coords * m_nu_coords - Eigen::MatrixXd::Identity(m, m)).norm() > m_tol.involution)
      throw InvolutionInvalid("nu^2 != id");
    if ((m_theta_coords * m_nu_coords - m_nu_coords * m_theta_coords).norm() > m_tol.involution)
      throw InvolutionInvalid("theta and nu must commute");

    // theta is a Lie algebra homomorphism
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        VecC lhs = apply_theta(bracket_coords(unit(i), unit(j)));
        VecC rhs = bracket_coords(apply_theta(unit(i)), apply_theta(unit(j)));
        if ((lhs - rhs).norm() > m_tol.involution)
          throw InvolutionInvalid("theta is not a Lie algebra homomorphism");
      }

    // kappa triple
    for (int a = 0; a < 3; ++a) m_kappa[a] = solve_coords(kappa[a], nullptr);
    for (int a = 0; a < 3; ++a)
      if (m_kappa[a].imag().norm() > m_tol.kappa)
        throw ConfigInvalid("kappa triple must lie in the compact form");
    for (int a = 1; a <= 3; ++a) {
      int b = a % 3 + 1, c = b % 3 + 1; // (a,b,c) cyclic
      VecC lhs = bracket_coords(m_kappa[a - 1], m_kappa[b - 1]);
      VecC rhs = -2.0 * m_kappa[c - 1];
      if ((lhs - rhs).norm() > m_tol.kappa)
        throw NotInCkappa("kappa triple fails [e_a,e_b] = -2 eps e_c");
    }
    // theta(kappa(w)) = kappa(sigma(w)): fixes e2, negates e1 and e3
    if (m_tol.check_kappa_theta) {
      const double sgn[3] = {-1.0, 1.0, -1.0};
      for (int a = 0; a < 3; ++a)
        if ((apply_theta(m_kappa[a]) - sgn[a] * m_kappa[a]).norm() > m_tol.kappa)
          throw InvolutionInvalid("theta incompatible with kappa triple");
    }

    m_validation_residual = worst;
  }

  VecC unit(int i) const {
    VecC v = VecC::Zero(dim());
    v[i] = 1.0;
    return v;
  }

  VecC solve_coords(const MatC& X, double* residual) const {
    VecC v = vectorize(X);
    VecC c = m_basis_qr.solve(v);
    if (residual) *residual = (m_basis_mat * c - v).norm();
    return c;
  }

  std::string m_name;
  int m_n = 0;
  std::vector<MatC> m_basis;
  InvolutionRule m_theta, m_nu;
  ContextTolerances m_tol;

  Eigen::MatrixXcd m_basis_mat;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> m_basis_qr;
  std::vector<Eigen::MatrixXd> m_struct;
  Eigen::MatrixXd m_killing;
  Eigen::MatrixXd m_theta_coords, m_nu_coords;
  std::array<VecC, 3> m_kappa;
  double m_validation_residual = 0.0;
};

/// Element of a LieAlgebraContext stored by basis coordinates.
struct LieElement {
  ContextPtr ctx;
  VecC coords;

  LieElement() = default;
  LieElement(ContextPtr c, VecC v) : ctx(std::move(c)), coords(std::move(v)) {}

  static LieElement from_matrix(const ContextPtr& ctx, const MatC& X) {
    return LieElement(ctx, ctx->coords(X));
  }

  MatC matrix() const { return ctx->matrix(coords); }

  double norm() const { return coords.norm(); }

  bool is_real(double tol = 1e-10) const {
    return (ctx->apply_nu(coords) - coords).norm() <= tol * std::max(1.0, coords.norm());
  }

  LieElement theta() const { return {ctx, ctx->apply_theta(coords)}; }
  LieElement nu() const { return {ctx, ctx->apply_nu(coords)}; }

  LieElement operator+(const LieElement& o) const { return {ctx, coords + o.coords}; }
  LieElement operator-(const LieElement& o) const { return {ctx, coords - o.coords}; }
  LieElement operator-() const { return {ctx, -coords}; }
  LieElement operator*(Cplx s) const { return {ctx, (s * coords).eval()}; }
};

inline LieElement operator*(Cplx s, const LieElement& x) { return x * s; }
inline LieElement operator*(double s, const LieElement& x) { return x * Cplx(s, 0); }

inline void require_same_context(const LieElement& x, const LieElement& y) {
  if (x.ctx.get() != y.ctx.get())
    throw ContextMismatch("elements belong to different Lie algebra contexts");
}

/// Commutator, re-expressed in basis coordinates.
inline LieElement bracket(const LieElement& x, const LieElement& y) {
  require_same_context(x, y);
  return {x.ctx, x.ctx->bracket_coords(x.coords, y.coords)};
}

/// Complex Killing form trace(ad x ad y).
inline Cplx killing_form(const LieElement& x, const LieElement& y) {
  require_same_context(x, y);
  return x.ctx->killing(x.coords, y.coords);
}

/// KKS pairing (w,[x,y]): the symplectic form evaluated on the tangent pair
/// ([x,w],[y,w]) at w (real sigma for real data, holomorphic Sigma otherwise).
inline Cplx kks_pairing(const LieElement& w, const LieElement& x, const LieElement& y) {
  require_same_context(w, x);
  require_same_context(w, y);
  return killing_form(w, bracket(x, y));
}

/// Matrix nilpotency: ||w^n||_2 below tolerance (relative to ||w||_2^n).
inline bool is_nilpotent(const LieElement& w, double tol = 1e-10) {
  MatC P = w.matrix();
  const int n = w.ctx->matrix_size();
  double scale = std::max(1.0, P.jacobiSvd().singularValues()(0));
  MatC Q = P;
  for (int i = 1; i < n; ++i) Q = Q * P;
  double top = Q.jacobiSvd().singularValues()(0);
  return top <= tol * std::pow(scale, n);
}

/// Cartan eigenspace data: a = u^theta (= k_R) and b = u^{-theta}, with
/// p_R = i b.  Bases are real coordinate columns over the compact-form basis.
struct CartanSplit {
  ContextPtr ctx;
  Eigen::MatrixXd a_basis; // m x ka
  Eigen::MatrixXd b_basis; // m x kb
  Eigen::MatrixXd Pa, Pb;  // projectors onto a and b in real coordinates

  int dim_k() const { return static_cast<int>(a_basis.cols()); }
  int dim_p() const { return static_cast<int>(b_basis.cols()); }

  LieElement a_element(int i) const { return {ctx, a_basis.col(i).cast<Cplx>()}; }
  LieElement b_element(int i) const { return {ctx, b_basis.col(i).cast<Cplx>()}; }
  /// Basis of k_R = a.
  LieElement k_real_element(int i) const { return a_element(i); }
  /// Basis of p_R = i b.
  LieElement p_real_element(int i) const {
    return {ctx, (Cplx(0, 1) * b_basis.col(i).cast<Cplx>()).eval()};
  }
  /// Complex spans: k = a + ia and p = b + ib share the coordinate columns.
  LieElement k_complex_element(int i) const { return a_element(i); }
  LieElement p_complex_element(int i) const { return b_element(i); }

  /// Projection of complex coordinates onto k (complex span of a).
  VecC project_k(const VecC& c) const { return Pa.cast<Cplx>() * c; }
  VecC project_p(const VecC& c) const { return Pb.cast<Cplx>() * c; }
};

namespace detail {

// Column space of a projector: singular values cluster at 0 and 1, so an
// absolute 1/2 cutoff is the right rank decision.
inline Eigen::MatrixXd projector_column_space(const Eigen::MatrixXd& P) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(P, Eigen::ComputeThinU);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 0.5) ++r;
  return svd.matrixU().leftCols(r);
}

} // namespace detail

/// Eigenspace split of the compact form under theta, with bracket relations
/// [a,a] in a, [a,b] in b, [b,b] in a verified on basis pairs.
inline CartanSplit cartan_split(const ContextPtr& ctx) {
  const int m = ctx->dim();
  const Eigen::MatrixXd& T = ctx->theta_coords();
  if ((T * T - Eigen::MatrixXd::Identity(m, m)).norm() > 1e-9)
    throw InvolutionInvalid("theta^2 != id");

  CartanSplit s;
  s.ctx = ctx;
  s.Pa = 0.5 * (Eigen::MatrixXd::Identity(m, m) + T);
  s.Pb = 0.5 * (Eigen::MatrixXd::Identity(m, m) - T);
  s.a_basis = detail::projector_column_space(s.Pa);
  s.b_basis = detail::projector_column_space(s.Pb);

  if (s.dim_p() == 0)
    throw DegenerateSplit("theta fixes all of u: no noncompact part");
  if (s.dim_k() + s.dim_p() != m) throw InvolutionInvalid("split dimensions do not add up");

  auto in_subspace = [&](const VecC& c, const Eigen::MatrixXd& P) {
    return (P.cast<Cplx>() * c - c).norm() <= 1e-9 * std::max(1.0, c.norm());
  };
  for (int i = 0; i < s.dim_k(); ++i)
    for (int j = 0; j < s.dim_k(); ++j)
      if (!in_subspace(ctx->bracket_coords(s.a_basis.col(i).cast<Cplx>(),
                                           s.a_basis.col(j).cast<Cplx>()),
                       s.Pa))
        throw InvolutionInvalid("[a,a] not contained in a");
  for (int i = 0; i < s.dim_k(); ++i)
    for (int j = 0; j < s.dim_p(); ++j)
      if (!in_subspace(ctx->bracket_coords(s.a_basis.col(i).cast<Cplx>(),
                                           s.b_basis.col(j).cast<Cplx>()),
                       s.Pb))
        throw InvolutionInvalid("[a,b] not contained in b");
  for (int i = 0; i < s.dim_p(); ++i)
    for (int j = 0; j < s.dim_p(); ++j)
      if (!in_subspace(ctx->bracket_coords(s.b_basis.col(i).cast<Cplx>(),
                                           s.b_basis.col(j).cast<Cplx>()),
                       s.Pa))
        throw InvolutionInvalid("[b,b] not contained in a");
  return s;
}

/// Cartan projection of a real element onto k_R.
inline LieElement mu_project(const LieElement& w, const CartanSplit& split) {
  if (!w.is_real(1e-10)) throw NotReal("mu_project requires nu(w) = w");
  return {w.ctx, split.project_k(w.coords)};
}

/// p_R-component of a real element.
inline LieElement p_project(const LieElement& w, const CartanSplit& split) {
  if (!w.is_real(1e-10)) throw NotReal("p_project requires nu(w) = w");
  return {w.ctx, split.project_p(w.coords)};
}

/// Center element of k_R with ad x0 acting on p with eigenvalues exactly +-i,
/// plus bases of the two eigenspaces.  The sign of x0 is a free choice here;
/// consumers normalize it through positivity of the Kaehler potential.
struct HermitianCenter {
  LieElement x0;
  std::vector<VecC> p_plus;  // +i eigenspace of ad x0 on p (coordinate vectors)
  std::vector<VecC> p_minus; // -i eigenspace

  HermitianCenter flipped() const {
    HermitianCenter h;
    h.x0 = -x0;
    h.p_plus = p_minus;
    h.p_minus = p_plus;
    return h;
  }
};

inline HermitianCenter hermitian_center(const CartanSplit& split, double tol = 1e-10) {
  const auto& ctx = split.ctx;
  const int m = ctx->dim();
  const int ka = split.dim_k();
  const int kb = split.dim_p();

  // center of k_R: x in span(a_basis) with [x, a_j] = 0 for all j
  Eigen::MatrixXd M(m * ka, ka);
  for (int i = 0; i < ka; ++i) {
    for (int j = 0; j < ka; ++j) {
      VecC br = ctx->bracket_coords(split.a_basis.col(i).cast<Cplx>(),
                                    split.a_basis.col(j).cast<Cplx>());
      M.block(j * m, i, m, 1) = br.real();
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  int nullity = 0;
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) <= 1e-9 * std::max(1.0, smax)) ++nullity;
  if (ka > 0 && svd.singularValues().size() == 0) nullity = ka;
  if (nullity == 0) throw NotHermitian("Cent k_R = 0");

  // candidate directions in a-coordinates
  for (int c = 0; c < nullity; ++c) {
    Eigen::VectorXd dir = svd.matrixV().col(ka - 1 - c);
    Eigen::VectorXd x = split.a_basis * dir; // m real coords
    // ad(x) restricted to the complex span of b
    MatC adp(kb, kb);
    for (int j = 0; j < kb; ++j) {
      VecC br = ctx->bracket_coords(x.cast<Cplx>(), split.b_basis.col(j).cast<Cplx>());
      // express br in the b-basis (least squares; exact since [a,b] in b)
      VecC bc = split.b_basis.cast<Cplx>().colPivHouseholderQr().solve(br);
      adp.col(j) = bc;
    }
    Eigen::ComplexEigenSolver<MatC> es(adp);
    VecC ev = es.eigenvalues();
    double mag = 0.0;
    bool imaginary = true;
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i].real()) > 1e-8 * std::max(1.0, std::abs(ev[i])))
        imaginary = false;
      mag = std::max(mag, std::abs(ev[i].imag()));
    }
    if (!imaginary || mag <= 1e-12) continue;
    bool uniform = true;
    for (int i = 0; i < ev.size(); ++i)
      if (std::abs(std::abs(ev[i].imag()) - mag) > 1e-8 * mag) uniform = false;
    if (!uniform) continue;

    double t = 1.0 / mag;
    HermitianCenter h;
    h.x0 = LieElement(ctx, (t * x).cast<Cplx>());
    MatC adp_scaled = t * adp;
    Eigen::ComplexEigenSolver<MatC> es2(adp_scaled);
    for (int i = 0; i < es2.eigenvalues().size(); ++i) {
      Cplx lam = es2.eigenvalues()(i);
      if (std::abs(lam - Cplx(0, 1)) > 1e-8 && std::abs(lam - Cplx(0, -1)) > 1e-8)
        throw NotHermitian("ad x0 eigenvalues on p are not exactly +-i");
      VecC vb = es2.eigenvectors().col(i);
      VecC vm = split.b_basis.cast<Cplx>() * vb; // back to m-coordinates
      if (lam.imag() > 0)
        h.p_plus.push_back(vm);
      else
        h.p_minus.push_back(vm);
    }
    if (h.p_plus.size() != h.p_minus.size())
      throw NotHermitian("p+ and p- eigenspaces have unequal dimension");
    (void)tol;
    return h;
  }
  throw NotHermitian("no center direction acts on p with eigenvalues +-i");
}

} // namespace nilgeo

#endif
