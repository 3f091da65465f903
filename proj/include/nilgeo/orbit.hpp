#ifndef NILGEO_ORBIT_HPP
#define NILGEO_ORBIT_HPP

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "nilgeo/lie_algebra.hpp"
#include "nilgeo/quaternion.hpp"

namespace nilgeo {

/// Point on a nilpotent (co)adjoint orbit, with a nilpotency certificate and
/// a reality flag for points of the nu-fixed form.
struct OrbitPoint {
  LieElement w;
  bool real = false;

  static OrbitPoint make(const LieElement& w, double tol = 1e-10) {
    if (!is_nilpotent(w, tol)) throw TargetNotNilpotent("orbit points must be nilpotent");
    OrbitPoint p;
    p.w = w;
    p.real = w.is_real(1e-10);
    return p;
  }
};

/// Tangent vector [x, w] remembered together with its generator x, so
/// finite-difference stencils can follow the exact adjoint curve
/// t -> Ad_{exp(t x)} w without ever leaving the orbit.
struct OrbitTangent {
  LieElement generator;
  LieElement value;

  static OrbitTangent from_generator(const LieElement& x, const LieElement& w) {
    return {x, bracket(x, w)};
  }
};

enum class Subspace { G, GR, K, P };

namespace detail {

inline int stable_rank(const Eigen::VectorXd& sv, double rel = 1e-8) {
  if (sv.size() == 0) return 0;
  double smax = sv(0);
  if (smax <= 0) return 0;
  int ranks[3];
  int t = 0;
  for (double scale : {rel * 10, rel, rel / 10}) {
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > scale * smax) ++r;
    ranks[t++] = r;
  }
  if (ranks[0] != ranks[1] || ranks[1] != ranks[2])
    throw RankDeficiency("tangent rank unstable across a decade of thresholds");
  return ranks[1];
}

} // namespace detail

/// Numerically independent spanning set of [sub, w], obtained by
/// rank-revealing orthogonalization of the candidate brackets.
inline std::vector<OrbitTangent> tangent_basis(const OrbitPoint& p, Subspace sub,
                                               const CartanSplit* split = nullptr) {
  const auto& ctx = p.w.ctx;
  const int m = ctx->dim();

  std::vector<LieElement> gens;
  if (sub == Subspace::G) {
    for (int i = 0; i < m; ++i) gens.emplace_back(ctx, VecC::Unit(m, i));
  } else {
    if (!split) throw ConfigInvalid("tangent_basis needs a CartanSplit for GR/K/P");
    if (sub == Subspace::GR || sub == Subspace::K)
      for (int i = 0; i < split->dim_k(); ++i) gens.push_back(split->k_real_element(i));
    if (sub == Subspace::GR)
      for (int i = 0; i < split->dim_p(); ++i) gens.push_back(split->p_real_element(i));
    if (sub == Subspace::P)
      for (int i = 0; i < split->dim_p(); ++i) gens.push_back(split->p_complex_element(i));
    if (sub == Subspace::K && gens.empty())
      throw ConfigInvalid("empty k basis");
  }

  const int q = static_cast<int>(gens.size());
  MatC tangents(m, q);
  for (int i = 0; i < q; ++i) tangents.col(i) = ctx->bracket_coords(gens[i].coords, p.w.coords);

  // K and P tangents at a point of p: [k,e] stays in p, [p,e] stays in k
  if (split && (sub == Subspace::K || sub == Subspace::P)) {
    bool point_in_p = (split->project_p(p.w.coords) - p.w.coords).norm() <
                      1e-8 * std::max(1.0, p.w.coords.norm());
    if (point_in_p) {
      for (int i = 0; i < q; ++i) {
        const VecC t = tangents.col(i);
        const VecC proj = (sub == Subspace::K) ? split->project_p(t) : split->project_k(t);
        if ((proj - t).norm() > 1e-8 * std::max(1.0, t.norm()))
          throw RankDeficiency("bracket failed the [k,e] in p / [p,e] in k containment");
      }
    }
  }

  int rank = 0;
  std::vector<int> pivots;
  if (sub == Subspace::GR) {
    // real span: view complex coordinates as vectors in R^{2m}
    Eigen::MatrixXd M(2 * m, q);
    M.topRows(m) = tangents.real();
    M.bottomRows(m) = tangents.imag();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    rank = detail::stable_rank(svd.singularValues());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
    for (int i = 0; i < rank; ++i) pivots.push_back(qr.colsPermutation().indices()(i));
  } else {
    Eigen::JacobiSVD<MatC> svd(tangents);
    rank = detail::stable_rank(svd.singularValues());
    Eigen::ColPivHouseholderQR<MatC> qr(tangents);
    for (int i = 0; i < rank; ++i) pivots.push_back(qr.colsPermutation().indices()(i));
  }

  std::vector<OrbitTangent> out;
  out.reserve(rank);
  for (int idx : pivots)
    out.push_back({gens[idx], LieElement(ctx, tangents.col(idx))});
  return out;
}

/// Scalar field on the orbit with declared smoothness metadata.
struct ScalarField {
  std::function<Cplx(const LieElement&)> eval;
  double homogeneity = std::numeric_limits<double>::quiet_NaN();
  bool real_valued = false;

  Cplx operator()(const LieElement& w) const { return eval(w); }
};

enum class FieldKind { Real, Holomorphic };

/// phi^z(w) = (z, w): the Hamiltonian (or holomorphic-moment) linear field.
inline ScalarField hamiltonian_fn(const LieElement& z, FieldKind kind = FieldKind::Real) {
  ScalarField f;
  LieElement zz = z;
  f.eval = [zz](const LieElement& w) { return killing_form(zz, w); };
  f.homogeneity = 1.0;
  f.real_valued = (kind == FieldKind::Real);
  return f;
}

/// Point moved along the adjoint curve of the tangent generator.
inline LieElement adjoint_move(const LieElement& w, const LieElement& generator, double t) {
  MatC E = (t * generator.matrix()).exp();
  return LieElement::from_matrix(w.ctx, E * w.matrix() * E.inverse());
}

/// Central difference of f along the adjoint curve generated by v.generator.
inline Cplx fd_derivative(const ScalarField& f, const OrbitPoint& p, const OrbitTangent& v,
                          double h = 1e-5, int order = 2) {
  if (!(h > 1e-13)) throw StepUnderflow("finite-difference step too small");
  auto at = [&](double t) { return f(adjoint_move(p.w, v.generator, t)); };
  if (order == 4)
    return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
  return (at(h) - at(-h)) / (2.0 * h);
}

/// Two-scale derivative estimate: value at step h plus |D(h) - D(2h)|.
struct FdEstimate {
  Cplx value;
  double error;
};

inline FdEstimate fd_derivative_est(const ScalarField& f, const OrbitPoint& p,
                                    const OrbitTangent& v, double h = 1e-5, int order = 2) {
  Cplx d1 = fd_derivative(f, p, v, h, order);
  Cplx d2 = fd_derivative(f, p, v, 2 * h, order);
  return {d1, std::abs(d1 - d2)};
}

/// Exact algebraic evaluation of the (real or holomorphic) KKS form on
/// generator tangents: sigma(xi_x, xi_y)|_w = (w, [x, y]).
inline Cplx kks_sigma(const OrbitPoint& p, const OrbitTangent& u, const OrbitTangent& v) {
  return kks_pairing(p.w, u.generator, v.generator);
}

/// Complex structure provider: returns J applied to a tangent at an
/// arbitrary orbit point (value and generator).
using JOperator = std::function<OrbitTangent(const LieElement& point, const OrbitTangent&)>;

/// Solve [x, w] = value for a generator x in the span of `gens`; used to
/// re-express ambient tangent values as adjoint directions.
inline LieElement solve_generator(const LieElement& w, const LieElement& value,
                                  const std::vector<LieElement>& gens, double* residual = nullptr) {
  const auto& ctx = w.ctx;
  const int m = ctx->dim();
  const int q = static_cast<int>(gens.size());
  Eigen::MatrixXd M(2 * m, q);
  for (int i = 0; i < q; ++i) {
    VecC br = ctx->bracket_coords(gens[i].coords, w.coords);
    M.col(i).topRows(m) = br.real();
    M.col(i).bottomRows(m) = br.imag();
  }
  Eigen::VectorXd rhs(2 * m);
  rhs.topRows(m) = value.coords.real();
  rhs.bottomRows(m) = value.coords.imag();
  Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
  double res = (M * sol - rhs).norm();
  if (residual) *residual = res;
  VecC g = VecC::Zero(m);
  for (int i = 0; i < q; ++i) g += sol[i] * gens[i].coords;
  return {ctx, g};
}

/// dd^c of a scalar field evaluated on tangents u, v at p via second-order
/// mixed finite differences along adjoint curves; J must be supplied.
inline Cplx fd_ddc(const ScalarField& f, const OrbitPoint& p, const OrbitTangent& u,
                   const OrbitTangent& v, const JOperator& J, double h = 1e-3) {
  if (!J) throw JUnavailable("dd^c evaluation requested without a complex-structure provider");
  // G_y(q) = d^c f(xi_y)|_q = -(1/2) df_q(J_q [y, q])
  auto G = [&](const LieElement& q, const LieElement& ygen) -> Cplx {
    OrbitTangent yq = OrbitTangent::from_generator(ygen, q);
    OrbitPoint pq{q, false};
    OrbitTangent Jy = J(q, yq);
    ScalarField ff = f;
    return -0.5 * fd_derivative(ff, pq, Jy, h);
  };
  auto outer = [&](const LieElement& xgen, const LieElement& ygen) -> Cplx {
    LieElement qp = adjoint_move(p.w, xgen, h);
    LieElement qm = adjoint_move(p.w, xgen, -h);
    return (G(qp, ygen) - G(qm, ygen)) / (2.0 * h);
  };
  // d alpha(X,Y) = X(alpha(Y)) - Y(alpha(X)) - alpha([X,Y]) with
  // [xi_x, xi_y] = -xi_{[x,y]} for the adjoint fields
  Cplx term1 = outer(u.generator, v.generator);
  Cplx term2 = outer(v.generator, u.generator);
  Cplx term3 = G(p.w, bracket(u.generator, v.generator));
  return term1 - term2 + term3;
}

/// FD exterior derivative of a 1-form given as alpha(point, tangent).
inline Cplx fd_exterior_derivative(
    const std::function<Cplx(const LieElement&, const OrbitTangent&)>& alpha,
    const OrbitPoint& p, const OrbitTangent& u, const OrbitTangent& v, double h = 1e-3) {
  auto eval = [&](const LieElement& q, const LieElement& ygen) {
    return alpha(q, OrbitTangent::from_generator(ygen, q));
  };
  auto outer = [&](const LieElement& xgen, const LieElement& ygen) {
    LieElement qp = adjoint_move(p.w, xgen, h);
    LieElement qm = adjoint_move(p.w, xgen, -h);
    return (eval(qp, ygen) - eval(qm, ygen)) / (2.0 * h);
  };
  return outer(u.generator, v.generator) - outer(v.generator, u.generator) +
         eval(p.w, bracket(u.generator, v.generator));
}

/// Poisson bracket sigma(xi_f, xi_g) computed from finite-difference
/// differentials and the exact sigma Gram matrix on a tangent basis.
inline Cplx fd_poisson(const ScalarField& f, const ScalarField& g, const OrbitPoint& p,
                       const std::vector<OrbitTangent>& basis, double h = 1e-5) {
  const int d = static_cast<int>(basis.size());
  Eigen::MatrixXd gram(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Cplx s = kks_sigma(p, basis[i], basis[j]);
      if (std::abs(s.imag()) > 1e-7 * (1.0 + std::abs(s)))
        throw SigmaSingular("sigma Gram matrix is not real on this basis");
      gram(i, j) = s.real();
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double smin = svd.singularValues()(d - 1), smax = svd.singularValues()(0);
  if (!(smin > 0) || smax / smin > 1e10)
    throw SigmaSingular("sigma Gram matrix ill-conditioned beyond 1e10");

  VecC df(d), dg(d);
  for (int i = 0; i < d; ++i) {
    df[i] = fd_derivative(f, p, basis[i], h);
    dg[i] = fd_derivative(g, p, basis[i], h);
  }
  // xi_f solves sigma(xi_f, v_k) = -df_k
  VecC xi = svd.solve((-df.real()).eval()).cast<Cplx>() +
            Cplx(0, 1) * svd.solve((-df.imag()).eval()).cast<Cplx>();
  // {f,g} = xi_f(g) = dg(xi_f), a plain bilinear pairing
  return (dg.transpose() * xi)(0);
}

/// Two-to-one covering of the regular sl(2) nilpotent orbit by nonzero
/// quaternions: a+bi+cj+dk -> [[uv, -u^2],[v^2, -uv]], u = a+bi, v = c+di.
inline Eigen::Matrix2cd sl2_cover(const Quaternion& q) {
  if (q.norm2() == 0.0) throw ZeroQuaternion("sl2_cover requires q != 0");
  Cplx u(q.w, q.x), v(q.y, q.z);
  Eigen::Matrix2cd M;
  M << u * v, -u * u, v * v, -u * v;
  return M;
}

/// Membership in the positive real-orbit component: real entries and
/// u^2 + v^2 = M_21 - M_12 > 0.
inline bool sl2_cover_in_positive_component(const Eigen::Matrix2cd& M, double tol = 1e-10) {
  if (M.imag().norm() > tol) return false;
  return (M(1, 0).real() - M(0, 1).real()) > tol;
}

/// Inverse of the plane projection on the z > 0 sheet of the real cone
/// x^2 + y^2 = z^2.
inline std::array<double, 3> cone_fixture(double x, double y) {
  if (x == 0.0 && y == 0.0) throw OriginExcluded("the cone point over the origin is removed");
  return {x, y, std::sqrt(x * x + y * y)};
}

inline Cplx cone_project(const std::array<double, 3>& p) { return {p[0], p[1]}; }

} // namespace nilgeo

#endif
