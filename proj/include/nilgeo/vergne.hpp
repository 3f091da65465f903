#ifndef NILGEO_VERGNE_HPP
#define NILGEO_VERGNE_HPP

#include <optional>
#include <random>

#include "nilgeo/lie_algebra.hpp"
#include "nilgeo/nahm.hpp"
#include "nilgeo/orbit.hpp"
#include "nilgeo/report.hpp"

namespace nilgeo {

struct VergneMapResult {
  LieElement V;
  std::string method; // "hermitian-closed-form" | "nahm-solver"
  std::optional<LieElement> zeta1;
  double triple_sum_residual = 0.0;
  double p_membership_residual = 0.0;
  bool nilpotent = false;
};

/// Kaehler data on a real nilpotent orbit pulled back from the Vergne image:
/// complex structure J, the degree-1 potential rho0, and the circle generator
/// theta = J eta.  The Hermitian route is exact linear algebra; the solver
/// route goes through the boundary-value problem.
class KahlerProvider {
public:
  enum class Method { Hermitian, NahmSolver };

  static KahlerProvider hermitian(const ContextPtr& ctx, const CartanSplit& split,
                                  const LieElement& base_point) {
    KahlerProvider p(ctx, split, Method::Hermitian);
    HermitianCenter hc = hermitian_center(split);
    // normalize the sign of x0 by positivity of rho0 = phi^{x0} on the
    // component of the base point
    double rho = killing_form(hc.x0, base_point).real();
    if (std::abs(rho) < 1e-12)
      throw WrongChamber("base point pairs to zero against the center; cannot orient x0");
    if (rho < 0) hc = hc.flipped();
    p.m_center = hc;
    p.m_base = base_point;
    // chamber check: V(base) must be an eigenvector of ad x0 with value -i
    LieElement V = p.vergne(base_point);
    LieElement adv = bracket(p.m_center->x0, V);
    if ((adv.coords - Cplx(0, -1) * V.coords).norm() > 1e-8 * std::max(1.0, V.norm()))
      throw WrongChamber("Vergne image escapes the expected ad-x0 chamber");
    return p;
  }

  static KahlerProvider nahm_solver(const ContextPtr& ctx, const CartanSplit& split,
                                    const LieElement& base_point, const SolverConfig& cfg) {
    KahlerProvider p(ctx, split, Method::NahmSolver);
    p.m_cfg = cfg;
    p.m_base = base_point;
    return p;
  }

  Method method() const { return m_method; }
  const ContextPtr& context() const { return m_ctx; }
  const CartanSplit& split() const { return m_split; }

  /// Potential element x0 (Hermitian case): rho0 = phi^{x0} > 0 on the
  /// fixture component, KV flow = Ad_{exp(-t x0)}.
  const LieElement& x0() const {
    if (!m_center) throw NotHermitian("no Hermitian center available");
    return m_center->x0;
  }

  /// Basis of the chamber of p containing the Vergne image (the -i
  /// eigenspace of ad x0).
  const std::vector<VecC>& image_chamber() const {
    if (!m_center) throw NotHermitian("no Hermitian center available");
    return m_center->p_minus;
  }

  // --- Vergne map ---------------------------------------------------------

  /// Hermitian closed form: V = proj_p(w) + i [x0, proj_p(w)], the scaling of
  /// the eigenprojection that satisfies the triple sum identity exactly.
  LieElement vergne(const LieElement& w) const {
    if (m_method == Method::Hermitian) {
      LieElement proj(m_ctx, m_split.project_p(w.coords));
      return proj + Cplx(0, 1) * bracket(m_center->x0, proj);
    }
    SolveResult sol = solve_bvp(w, m_cfg);
    return LieElement(m_ctx, -sol.moments.zeta[0].coords + Cplx(0, 1) * sol.moments.zeta[2].coords);
  }

  VergneMapResult vergne_result(const LieElement& w) const {
    VergneMapResult r;
    if (m_method == Method::Hermitian) {
      r.V = vergne(w);
      r.method = "hermitian-closed-form";
    } else {
      SolveResult sol = solve_bvp(w, m_cfg);
      r.V = LieElement(m_ctx,
                       -sol.moments.zeta[0].coords + Cplx(0, 1) * sol.moments.zeta[2].coords);
      r.method = "nahm-solver";
      r.zeta1 = sol.moments.zeta[0];
      // membership of the moments: zeta_2 in k_R, zeta_1 and zeta_3 in b
      LieElement mu = mu_project(w, m_split);
      double mm = (sol.moments.zeta[1].coords - mu.coords).norm();
      if (mm > m_moment_tol * std::max(1.0, mu.norm()))
        throw MomentMismatch("solver zeta_2 disagrees with the Cartan projection");
    }
    LieElement mu = mu_project(w, m_split);
    LieElement recon = mu + 0.5 * (r.V + r.V.nu());
    r.triple_sum_residual = (recon.coords - w.coords).norm();
    r.p_membership_residual = (m_split.project_p(r.V.coords) - r.V.coords).norm();
    r.nilpotent = is_nilpotent(r.V, 1e-8);
    return r;
  }

  /// f^v(w) = (v, V(w)): J-holomorphic coordinate field indexed by v in p.
  ScalarField f_function(const LieElement& v) const {
    ScalarField f;
    const KahlerProvider* self = this;
    LieElement vv = v;
    f.eval = [self, vv](const LieElement& w) { return killing_form(vv, self->vergne(w)); };
    f.homogeneity = 1.0;
    return f;
  }

  // --- complex structure ---------------------------------------------------

  std::vector<OrbitTangent> tangent_basis_at(const LieElement& w) const {
    OrbitPoint p{w, true};
    return tangent_basis(p, Subspace::GR, &m_split);
  }

  /// J t: the real tangent whose Vergne image moves by i times that of t.
  OrbitTangent apply_J(const LieElement& point, const OrbitTangent& t) const {
    std::vector<OrbitTangent> basis = tangent_basis_at(point);
    const int d = static_cast<int>(basis.size());
    const int m = m_ctx->dim();
    Eigen::MatrixXd M(2 * m, d);
    for (int k = 0; k < d; ++k) {
      VecC img = dvergne(point, basis[k].value);
      M.col(k).topRows(m) = img.real();
      M.col(k).bottomRows(m) = img.imag();
    }
    VecC rhs_c = Cplx(0, 1) * dvergne(point, t.value);
    Eigen::VectorXd rhs(2 * m);
    rhs.topRows(m) = rhs_c.real();
    rhs.bottomRows(m) = rhs_c.imag();
    Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
    if ((M * sol - rhs).norm() > 1e-6 * std::max(1.0, rhs.norm()))
      throw JNotSquareMinusOne("i dV(t) is not in the image of dV on real tangents");
    VecC gen = VecC::Zero(m), val = VecC::Zero(m);
    for (int k = 0; k < d; ++k) {
      gen += sol[k] * basis[k].generator.coords;
      val += sol[k] * basis[k].value.coords;
    }
    return {LieElement(m_ctx, gen), LieElement(m_ctx, val)};
  }

  JOperator j_operator() const {
    const KahlerProvider* self = this;
    return [self](const LieElement& point, const OrbitTangent& t) {
      return self->apply_J(point, t);
    };
  }

  // --- cone fields and potentials ------------------------------------------

  /// Euler tangent at w: value w, generator solved within g_R.
  OrbitTangent euler_tangent(const LieElement& w) const {
    std::vector<LieElement> gens;
    for (int i = 0; i < m_split.dim_k(); ++i) gens.push_back(m_split.k_real_element(i));
    for (int i = 0; i < m_split.dim_p(); ++i) gens.push_back(m_split.p_real_element(i));
    double res = 0.0;
    LieElement gen = solve_generator(w, w, gens, &res);
    if (res > 1e-8 * std::max(1.0, w.norm()))
      throw RankDeficiency("Euler vector is not tangent to the orbit at this point");
    return {gen, w};
  }

  /// KV circle generator theta = J eta.
  OrbitTangent kv_generator(const LieElement& w) const { return apply_J(w, euler_tangent(w)); }

  /// Degree-1 Kaehler potential rho0 = sigma(eta, J eta); in the Hermitian
  /// case this equals phi^{x0}.
  double rho0(const LieElement& w) const {
    if (m_method == Method::Hermitian) return killing_form(m_center->x0, w).real();
    return rho0_general(w);
  }

  double rho0_general(const LieElement& w) const {
    OrbitTangent eta = euler_tangent(w);
    OrbitTangent jeta = apply_J(w, eta);
    OrbitPoint p{w, true};
    return kks_sigma(p, eta, jeta).real();
  }

  ScalarField rho0_field() const {
    ScalarField f;
    const KahlerProvider* self = this;
    f.eval = [self](const LieElement& w) { return Cplx(self->rho0(w), 0.0); };
    f.homogeneity = 1.0;
    f.real_valued = true;
    return f;
  }

  /// The ddbar potential: sigma = i ddbar (2 rho0); this is the restriction
  /// of the degree-two cone potential to the real orbit.
  ScalarField rho_potential_field() const {
    ScalarField f = rho0_field();
    const KahlerProvider* self = this;
    f.eval = [self](const LieElement& w) { return Cplx(2.0 * self->rho0(w), 0.0); };
    return f;
  }

private:
  KahlerProvider(const ContextPtr& ctx, const CartanSplit& split, Method m)
      : m_ctx(ctx), m_split(split), m_method(m) {}

  /// Differential of the Vergne map on a tangent value.
  VecC dvergne(const LieElement& point, const LieElement& tangent_value) const {
    if (m_method == Method::Hermitian) {
      VecC proj = m_split.project_p(tangent_value.coords);
      return proj + Cplx(0, 1) * m_ctx->bracket_coords(m_center->x0.coords, proj);
    }
    // finite differences of the solver-backed map along the adjoint curve
    std::vector<LieElement> gens;
    for (int i = 0; i < m_split.dim_k(); ++i) gens.push_back(m_split.k_real_element(i));
    for (int i = 0; i < m_split.dim_p(); ++i) gens.push_back(m_split.p_real_element(i));
    LieElement gen = solve_generator(point, tangent_value, gens, nullptr);
    double h = 1e-4;
    LieElement wp = adjoint_move(point, gen, h);
    LieElement wm = adjoint_move(point, gen, -h);
    return (vergne(wp).coords - vergne(wm).coords) / (2 * h);
  }

  ContextPtr m_ctx;
  CartanSplit m_split;
  Method m_method;
  std::optional<HermitianCenter> m_center;
  LieElement m_base;
  SolverConfig m_cfg;
  double m_moment_tol = 1e-5;
};

inline VergneMapResult vergne_hermitian(const KahlerProvider& provider, const LieElement& w) {
  if (provider.method() != KahlerProvider::Method::Hermitian)
    throw NotHermitian("provider was not built from a Hermitian center");
  if (!w.is_real(1e-8)) throw NotReal("the Vergne map is defined on the real orbit");
  return provider.vergne_result(w);
}

inline VergneMapResult vergne_general(const ContextPtr& ctx, const CartanSplit& split,
                                      const LieElement& w, const SolverConfig& cfg) {
  auto provider = KahlerProvider::nahm_solver(ctx, split, w, cfg);
  return provider.vergne_result(w);
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

using PointSampler = std::function<LieElement(std::mt19937_64&)>;

/// Random point on the positive component of the sl(2,R) orbit fixture.
inline PointSampler sl2r_sampler(const ContextPtr& ctx) {
  return [ctx](std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    double u = 0, v = 0;
    do {
      u = g(rng);
      v = g(rng);
    } while (u * u + v * v < 0.05);
    MatC w(2, 2);
    w << u * v, -u * u, v * v, -u * v;
    return LieElement::from_matrix(ctx, w);
  };
}

/// Random point on the real minimal orbit of su(2,1): adjoint moves plus
/// scaling of the base point.
inline PointSampler su21_sampler(const ContextPtr& ctx, const CartanSplit& split) {
  LieElement base(ctx, ctx->kappa_coords()[1] + Cplx(0, 1) * ctx->kappa_coords()[2]);
  CartanSplit sp = split;
  return [ctx, base, sp](std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 0.35);
    std::normal_distribution<double> gl(0.0, 0.4);
    VecC x = VecC::Zero(ctx->dim());
    for (int i = 0; i < sp.dim_k(); ++i) x += Cplx(g(rng), 0) * sp.k_real_element(i).coords;
    for (int i = 0; i < sp.dim_p(); ++i) x += Cplx(g(rng), 0) * sp.p_real_element(i).coords;
    MatC E = ctx->matrix(x).exp();
    double lam = std::exp(gl(rng));
    return LieElement::from_matrix(ctx, lam * E * base.matrix() * E.inverse());
  };
}

inline PointSampler orbit_sampler(const ContextPtr& ctx, const CartanSplit& split) {
  if (ctx->name() == "sl2R") return sl2r_sampler(ctx);
  if (ctx->name() == "su21") return su21_sampler(ctx, split);
  throw UnknownFixture("no orbit sampler for fixture '" + ctx->name() + "'");
}

/// Random real tangent at w as a combination of the tangent basis.
inline OrbitTangent random_tangent(const KahlerProvider& prov, const LieElement& w,
                                   std::mt19937_64& rng) {
  auto basis = prov.tangent_basis_at(w);
  std::normal_distribution<double> g(0.0, 1.0);
  VecC gen = VecC::Zero(w.ctx->dim());
  for (const auto& t : basis) gen += Cplx(g(rng), 0) * t.generator.coords;
  LieElement x(w.ctx, gen);
  return OrbitTangent::from_generator(x, w);
}

/// Triple sum, membership, injectivity, equivariance of the Vergne map.
inline VerificationReport vergne_suite(const KahlerProvider& prov, const PointSampler& sample,
                                       int n_points, std::uint64_t seed,
                                       double triple_tol = 1e-10) {
  VerificationReport rep;
  rep.suite = "vergne";
  rep.fixture = prov.context()->name();
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  double r_triple = 0, r_member = 0, r_equiv_k = 0, r_equiv_scale = 0, r_vanish = 0;
  double r_holo = 0;
  bool all_nilpotent = true;
  double min_separation = std::numeric_limits<double>::infinity();
  std::vector<LieElement> ws, vs;

  const auto& split = prov.split();
  std::normal_distribution<double> g(0.0, 0.5);

  for (int i = 0; i < n_points; ++i) {
    LieElement w = sample(rng);
    VergneMapResult res = prov.vergne_result(w);
    r_triple = std::max(r_triple, res.triple_sum_residual / std::max(1.0, w.norm()));
    r_member = std::max(r_member, res.p_membership_residual / std::max(1.0, res.V.norm()));
    all_nilpotent = all_nilpotent && res.nilpotent;
    ws.push_back(w);
    vs.push_back(res.V);

    // K_R equivariance on a random exp(x), x in k_R
    VecC xk = VecC::Zero(prov.context()->dim());
    for (int k = 0; k < split.dim_k(); ++k)
      xk += Cplx(g(rng), 0) * split.k_real_element(k).coords;
    MatC E = prov.context()->matrix(xk).exp();
    LieElement moved = LieElement::from_matrix(prov.context(), E * w.matrix() * E.inverse());
    LieElement lhs = prov.vergne(moved);
    LieElement rhs = LieElement::from_matrix(prov.context(), E * res.V.matrix() * E.inverse());
    r_equiv_k = std::max(r_equiv_k, (lhs.coords - rhs.coords).norm() / std::max(1.0, rhs.norm()));

    // scaling equivariance
    double lam = 0.3 + 2.0 * std::generate_canonical<double, 32>(rng);
    LieElement Vs = prov.vergne(lam * w);
    r_equiv_scale =
        std::max(r_equiv_scale, (Vs.coords - lam * res.V.coords).norm() / std::max(1.0, lam));

    // f-functions indexed by k vanish on the real orbit: (x, V(w)) = 0
    for (int k = 0; k < split.dim_k(); ++k) {
      Cplx val = killing_form(split.k_complex_element(k), res.V);
      r_vanish = std::max(r_vanish, std::abs(val) / std::max(1.0, res.V.norm()));
    }

    // Cauchy-Riemann check: df^v(J t) = i df^v(t) for a random tangent
    if (i < 8) {
      OrbitTangent t = random_tangent(prov, w, rng);
      OrbitTangent Jt = prov.apply_J(w, t);
      ScalarField fv = prov.f_function(split.p_complex_element(0));
      OrbitPoint p{w, true};
      Cplx d1 = fd_derivative(fv, p, Jt, 1e-5);
      Cplx d2 = fd_derivative(fv, p, t, 1e-5);
      r_holo = std::max(r_holo, std::abs(d1 - Cplx(0, 1) * d2) / std::max(1.0, std::abs(d2)));
    }
  }

  for (size_t i = 0; i < ws.size(); ++i)
    for (size_t j = i + 1; j < ws.size(); ++j) {
      double dw = (ws[i].coords - ws[j].coords).norm();
      if (dw < 1e-6) continue;
      min_separation = std::min(min_separation, (vs[i].coords - vs[j].coords).norm() / dw);
    }

  rep.add("triple_sum", anchor::triple_sum, r_triple, triple_tol);
  rep.add("p_membership", anchor::vergne_membership, r_member, 1e-8);
  rep.add_flag("images_nilpotent", anchor::vergne_membership, all_nilpotent);
  rep.add("k_equivariance", anchor::vergne_equivariance, r_equiv_k, 1e-8);
  rep.add("scaling_equivariance", anchor::vergne_equivariance, r_equiv_scale, 1e-8);
  rep.add("k_indexed_f_vanishing", anchor::vergne_injective, r_vanish, 1e-10);
  rep.add("cauchy_riemann_f", anchor::holomorphic_type, r_holo, 1e-5);
  rep.add("injectivity_separation", anchor::vergne_injective,
          min_separation > 1e-6 ? 0.0 : 1.0, 0.5);
  return rep;
}

/// Kaehler structure checks: J^2 = -1, sigma J-invariance, positivity, and
/// sigma = i ddbar of the restricted potential.
inline VerificationReport kahler_suite(const KahlerProvider& prov, const PointSampler& sample,
                                       int n_points, int pairs_per_point, std::uint64_t seed) {
  VerificationReport rep;
  rep.suite = "kahler";
  rep.fixture = prov.context()->name();
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  double r_j2 = 0, r_inv = 0, min_pos = std::numeric_limits<double>::infinity(), r_ddc = 0;
  JOperator J = prov.j_operator();
  ScalarField pot = prov.rho_potential_field();

  for (int i = 0; i < n_points; ++i) {
    LieElement w = sample(rng);
    OrbitPoint p{w, true};
    for (int k = 0; k < pairs_per_point; ++k) {
      OrbitTangent u = random_tangent(prov, w, rng);
      OrbitTangent v = random_tangent(prov, w, rng);
      OrbitTangent Ju = prov.apply_J(w, u);
      OrbitTangent Jv = prov.apply_J(w, v);
      OrbitTangent JJu = prov.apply_J(w, Ju);
      r_j2 = std::max(r_j2, (JJu.value.coords + u.value.coords).norm() /
                              std::max(1.0, u.value.norm()));
      Cplx s_uv = kks_sigma(p, u, v);
      Cplx s_JuJv = kks_sigma(p, Ju, Jv);
      r_inv = std::max(r_inv, std::abs(s_uv - s_JuJv) / std::max(1.0, std::abs(s_uv)));
      double pos = kks_sigma(p, u, Ju).real() / std::max(1e-12, u.value.coords.squaredNorm());
      min_pos = std::min(min_pos, pos);
    }
    if (i < 6) { // ddbar is the expensive check
      OrbitTangent u = random_tangent(prov, w, rng);
      OrbitTangent v = random_tangent(prov, w, rng);
      Cplx lhs = fd_ddc(pot, p, u, v, J, 1e-3);
      Cplx rhs = kks_sigma(p, u, v);
      r_ddc = std::max(r_ddc, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
  }
  rep.add("j_square_minus_one", anchor::j_square, r_j2, 1e-8);
  rep.add("sigma_j_invariance", anchor::j_invariance, r_inv, 1e-8);
  rep.add("kaehler_positivity", anchor::kaehler_positivity, min_pos > 0 ? 0.0 : 1.0, 0.5);
  rep.add("sigma_equals_i_ddbar_potential", anchor::potential_ddc, r_ddc, 1e-4);
  return rep;
}

/// KV circle checks: the moment identity, the bracket character on the
/// f-functions, and the Hermitian closed-form flow.
inline VerificationReport kv_suite(const KahlerProvider& prov, const PointSampler& sample,
                                   int n_points, std::uint64_t seed) {
  VerificationReport rep;
  rep.suite = "kv";
  rep.fixture = prov.context()->name();
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  const auto& split = prov.split();
  ScalarField rho = prov.rho0_field();
  double r_moment = 0, r_char = 0, r_flow = 0, r_homog = 0;

  for (int i = 0; i < n_points; ++i) {
    LieElement w = sample(rng);
    OrbitPoint p{w, true};
    auto basis = prov.tangent_basis_at(w);
    OrbitTangent theta = prov.kv_generator(w);

    // theta . sigma + d rho0 = 0 componentwise (FD differential)
    for (const auto& v : basis) {
      Cplx lhs = kks_sigma(p, theta, v) + fd_derivative(rho, p, v, 1e-5, 4);
      r_moment = std::max(r_moment, std::abs(lhs) / std::max(1.0, w.norm()));
    }

    // {rho0, f^v} = i f^v via the FD Poisson bracket
    for (int k = 0; k < split.dim_p(); ++k) {
      ScalarField fv = prov.f_function(split.p_complex_element(k));
      Cplx fval = fv(w);
      Cplx br = fd_poisson(rho, fv, p, basis, 1e-5);
      r_char = std::max(r_char, std::abs(br - Cplx(0, 1) * fval) / std::max(1.0, std::abs(fval)));
    }

    // homogeneity rho0(lam w) = lam rho0(w)
    double lam = 0.5 + std::generate_canonical<double, 32>(rng);
    r_homog = std::max(r_homog,
                       std::abs(prov.rho0(lam * w) - lam * prov.rho0(w)) /
                           std::max(1.0, std::abs(prov.rho0(w))));

    // Hermitian flow: V(Ad_{exp(-t x0)} w) = e^{it} V(w)
    if (prov.method() == KahlerProvider::Method::Hermitian) {
      LieElement V0 = prov.vergne(w);
      for (double t : {M_PI / 4, M_PI / 2, M_PI}) {
        MatC E = ((-t) * prov.x0().matrix()).exp();
        LieElement moved =
            LieElement::from_matrix(prov.context(), E * w.matrix() * E.inverse());
        LieElement Vt = prov.vergne(moved);
        Cplx phase(std::cos(t), std::sin(t));
        r_flow = std::max(r_flow,
                          (Vt.coords - phase * V0.coords).norm() / std::max(1.0, V0.norm()));
      }
    }
  }
  rep.add("kv_moment_identity", anchor::kv_moment, r_moment, 1e-5);
  rep.add("kv_bracket_character", anchor::kv_bracket, r_char, 1e-5);
  rep.add("rho0_homogeneous_degree1", anchor::homogeneity, r_homog, 1e-10);
  if (prov.method() == KahlerProvider::Method::Hermitian)
    rep.add("kv_flow_matches_center", anchor::kv_flow, r_flow, 1e-8);
  return rep;
}

/// phi^v = Re f^v, the holomorphic decomposition, and pluriharmonicity.
inline VerificationReport theorem94_suite(const KahlerProvider& prov, const PointSampler& sample,
                                          int n_points, int ddc_points, std::uint64_t seed) {
  VerificationReport rep;
  rep.suite = "theorem94";
  rep.fixture = prov.context()->name();
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  const auto& split = prov.split();
  ScalarField rho = prov.rho0_field();
  JOperator J = prov.j_operator();
  double r_re = 0, r_decomp = 0, r_pluri = 0;

  for (int i = 0; i < n_points; ++i) {
    LieElement w = sample(rng);
    OrbitPoint p{w, true};
    auto basis = prov.tangent_basis_at(w);
    for (int k = 0; k < split.dim_p(); ++k) {
      LieElement v = split.p_real_element(k);
      ScalarField fv = prov.f_function(v);
      Cplx fval = fv(w);
      double phival = killing_form(v, w).real();
      r_re = std::max(r_re, std::abs(phival - fval.real()) / std::max(1.0, std::abs(phival)));

      ScalarField phi = hamiltonian_fn(v, FieldKind::Real);
      Cplx br = fd_poisson(rho, phi, p, basis, 1e-5);
      Cplx decomp = Cplx(phival, 0) - Cplx(0, 1) * br;
      r_decomp =
          std::max(r_decomp, std::abs(decomp - fval) / std::max(1.0, std::abs(fval)));
    }
    if (i < ddc_points) {
      LieElement v = split.p_real_element(i % split.dim_p());
      ScalarField phi = hamiltonian_fn(v, FieldKind::Real);
      OrbitTangent tu = random_tangent(prov, w, rng);
      OrbitTangent tv = random_tangent(prov, w, rng);
      Cplx val = fd_ddc(phi, p, tu, tv, J, 1e-3);
      r_pluri = std::max(r_pluri, std::abs(val) /
                                    std::max(1.0, tu.value.norm() * tv.value.norm()));
    }
  }
  rep.add("phi_equals_re_f", anchor::real_part, r_re, 1e-10);
  rep.add("holomorphic_decomposition", anchor::holo_decomposition, r_decomp, 1e-5);
  rep.add("pluriharmonicity", anchor::pluriharmonic, r_pluri, 1e-4);
  return rep;
}

/// Cotangent-embedding data: beta = d^c of the restricted potential pairs to
/// mu against the K-action fields, annihilates their J-rotations, and has
/// exterior derivative sigma.
inline VerificationReport cotangent_suite(const KahlerProvider& prov, const PointSampler& sample,
                                          int n_points, std::uint64_t seed) {
  VerificationReport rep;
  rep.suite = "cotangent";
  rep.fixture = prov.context()->name();
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  const auto& split = prov.split();
  ScalarField rho = prov.rho0_field();
  double r_mu = 0, r_jzero = 0, r_dbeta = 0, r_euler = 0, r_moment_match = 0;

  // beta(q, t) = -(1/2) d(2 rho0)(J t) = -d rho0(J t)
  auto beta = [&](const LieElement& q, const OrbitTangent& t) -> Cplx {
    OrbitTangent Jt = prov.apply_J(q, t);
    OrbitPoint pq{q, true};
    return -fd_derivative(rho, pq, Jt, 1e-5, 4);
  };

  for (int i = 0; i < n_points; ++i) {
    LieElement w = sample(rng);
    OrbitPoint p{w, true};

    for (int k = 0; k < split.dim_k(); ++k) {
      LieElement xk = split.k_real_element(k);
      // eta^x is the Hamiltonian field of phi^x: generator -x
      OrbitTangent eta_x = OrbitTangent::from_generator(-xk, w);
      Cplx pairing = beta(w, eta_x);
      double mu_x = killing_form(xk, mu_project(w, split)).real();
      r_mu = std::max(r_mu, std::abs(pairing - Cplx(mu_x, 0)) / std::max(1.0, std::abs(mu_x)));

      OrbitTangent Jeta = prov.apply_J(w, eta_x);
      r_jzero = std::max(r_jzero, std::abs(beta(w, Jeta)) / std::max(1.0, w.norm()));
    }

    // d beta = sigma on random tangent pairs
    OrbitTangent u = random_tangent(prov, w, rng);
    OrbitTangent v = random_tangent(prov, w, rng);
    Cplx lhs = fd_exterior_derivative(beta, p, u, v, 1e-3);
    Cplx rhs = kks_sigma(p, u, v);
    r_dbeta = std::max(r_dbeta, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));

    // KV invariance of rho0: beta on the Euler tangent vanishes
    OrbitTangent eta = prov.euler_tangent(w);
    r_euler = std::max(r_euler, std::abs(beta(w, eta)) / std::max(1.0, prov.rho0(w)));

    // s = (V, mu) assembles with the moment compatibility mu = zeta_2,
    // i.e. the triple sum reconstructs w
    VergneMapResult res = prov.vergne_result(w);
    r_moment_match = std::max(r_moment_match, res.triple_sum_residual / std::max(1.0, w.norm()));
  }
  rep.add("beta_pairs_to_mu", anchor::beta_pairing, r_mu, 1e-5);
  rep.add("beta_kills_j_rotation", anchor::beta_j_pairing, r_jzero, 1e-5);
  rep.add("d_beta_equals_sigma", anchor::beta_exterior, r_dbeta, 1e-4);
  rep.add("beta_euler_pairing", anchor::kv_moment, r_euler, 1e-5);
  rep.add("moment_compatibility", anchor::moment_match, r_moment_match, 1e-8);
  return rep;
}

/// FD Poisson homomorphism {phi^x, phi^y} = phi^[x,y] and the moment map
/// identity on random data.
inline VerificationReport kks_suite(const KahlerProvider& prov, const PointSampler& sample,
                                    int n_triples, std::uint64_t seed) {
  VerificationReport rep;
  rep.suite = "kks";
  rep.fixture = prov.context()->name();
  rep.seed = seed;
  std::mt19937_64 rng(seed);

  const auto& split = prov.split();
  std::normal_distribution<double> g(0.0, 1.0);
  auto random_real_element = [&]() {
    VecC c = VecC::Zero(prov.context()->dim());
    for (int i = 0; i < split.dim_k(); ++i) c += Cplx(g(rng), 0) * split.k_real_element(i).coords;
    for (int i = 0; i < split.dim_p(); ++i) c += Cplx(g(rng), 0) * split.p_real_element(i).coords;
    return LieElement(prov.context(), c);
  };

  double r_hom = 0, r_mm = 0;
  for (int i = 0; i < n_triples; ++i) {
    LieElement w = sample(rng);
    OrbitPoint p{w, true};
    auto basis = prov.tangent_basis_at(w);
    LieElement x = random_real_element(), y = random_real_element();
    ScalarField fx = hamiltonian_fn(x), fy = hamiltonian_fn(y);
    Cplx br = fd_poisson(fx, fy, p, basis, 1e-5);
    Cplx expect = killing_form(bracket(x, y), w);
    r_hom = std::max(r_hom, std::abs(br - expect) / std::max(1.0, std::abs(expect)));

    // moment map identity: sigma(xi_{phi^x}, v) + d phi^x(v) = 0 with
    // xi_{phi^x} generated by -x
    for (const auto& v : basis) {
      Cplx lhs = kks_pairing(w, -x, v.generator) + fd_derivative(fx, p, v, 1e-5, 4);
      r_mm = std::max(r_mm, std::abs(lhs) / std::max(1.0, w.norm() * x.norm()));
    }
  }
  rep.add("poisson_homomorphism", anchor::kks_homomorphism, r_hom, 1e-6);
  rep.add("moment_map_identity", anchor::moment_map_identity, r_mm, 1e-6);
  return rep;
}

} // namespace nilgeo

#endif
