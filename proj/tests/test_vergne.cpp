#include <catch_amalgamated.hpp>

#include <random>

#include "nilgeo/fixtures.hpp"
#include "nilgeo/vergne.hpp"

using namespace nilgeo;
using Catch::Approx;

namespace {

MatC mat2(double a, double b, double c, double d) {
  MatC m(2, 2);
  m << a, b, c, d;
  return m;
}

struct Sl2rSetup {
  ContextPtr ctx;
  CartanSplit split;
  LieElement w;
  KahlerProvider prov;

  Sl2rSetup()
      : ctx(make_sl2r()),
        split(cartan_split(ctx)),
        w(LieElement::from_matrix(ctx, mat2(1, -1, 1, -1))),
        prov(KahlerProvider::hermitian(ctx, split, w)) {}
};

} // namespace

TEST_CASE("hermitian Vergne map on the sl2R fixture point") {
  Sl2rSetup s;
  auto res = vergne_hermitian(s.prov, s.w);

  // V = h - i s: the chamber consistent with rho0 = phi^{x0} > 0 and the
  // bracket character {rho0, f^v} = i f^v
  MatC expect = mat2(1, 0, 0, -1) - Cplx(0, 1) * mat2(0, 1, 1, 0);
  CHECK((res.V.matrix() - expect).norm() < 1e-12);
  CHECK(res.nilpotent);
  CHECK(res.p_membership_residual < 1e-12);
  CHECK(res.triple_sum_residual < 1e-12);

  // triple sum reconstructs w through mu(w) = [[0,-1],[1,0]]
  auto mu = mu_project(s.w, s.split);
  MatC recon = mu.matrix() + 0.5 * (res.V.matrix() + res.V.nu().matrix());
  CHECK((recon - s.w.matrix()).norm() < 1e-13);

  // scaling: V(l w) = l V(w)
  auto res2 = vergne_hermitian(s.prov, 2.5 * s.w);
  CHECK((res2.V.coords - 2.5 * res.V.coords).norm() < 1e-12);

  // x0 is the positivity-normalized one: rho0(w) = 4
  CHECK(s.prov.rho0(s.w) == Approx(4.0).margin(1e-12));
  MatC x0_expect = mat2(0, 0.5, -0.5, 0);
  CHECK((s.prov.x0().matrix() - x0_expect).norm() < 1e-12);

  // non-real inputs rejected
  LieElement bad(s.ctx, Cplx(0, 1) * s.w.coords);
  CHECK_THROWS_AS(vergne_hermitian(s.prov, bad), NotReal);
}

TEST_CASE("hermitian Vergne map on the model component") {
  // the model image w = (e2 + i e3)/2 lies on the other orbit component;
  // building a provider on that component flips the chamber
  auto ctx = make_sl2r();
  auto split = cartan_split(ctx);
  LieElement wm(ctx, 0.5 * (ctx->kappa_coords()[1] + Cplx(0, 1) * ctx->kappa_coords()[2]));
  auto prov = KahlerProvider::hermitian(ctx, split, wm);
  auto res = prov.vergne_result(wm);
  // V = (-e1 + i e3)/2, matching the instanton expression -zeta_1 + i zeta_3
  VecC expect = 0.5 * (-ctx->kappa_coords()[0] + Cplx(0, 1) * ctx->kappa_coords()[2]);
  CHECK((res.V.coords - expect).norm() < 1e-12);
  CHECK(res.triple_sum_residual < 1e-12);
  CHECK(prov.rho0(wm) > 0);
}

TEST_CASE("f functions on the sl2R fixture") {
  Sl2rSetup s;
  auto h = LieElement::from_matrix(s.ctx, mat2(1, 0, 0, -1));
  auto sm = LieElement::from_matrix(s.ctx, mat2(0, 1, 1, 0));

  auto fh = s.prov.f_function(h);
  CHECK(fh(s.w).real() == Approx(8.0).margin(1e-12));
  CHECK(std::abs(fh(s.w).imag()) < 1e-12);

  // f^s(w) = -8i: phi^s = 0 = Re f^s, and the decomposition
  // f^s = phi^s - i {rho0, phi^s} = -8i with {rho0, phi^s} = phi^{[x0,s]} = 8
  auto fs = s.prov.f_function(sm);
  CHECK(std::abs(fs(s.w) - Cplx(0, -8)) < 1e-10);
  double phis = killing_form(sm, s.w).real();
  CHECK(phis == Approx(0.0).margin(1e-12));
  // {rho0, phi^s} via the exact bracket homomorphism
  double br = killing_form(bracket(s.prov.x0(), sm), s.w).real();
  CHECK(br == Approx(8.0).margin(1e-10));

  // homogeneity
  CHECK(std::abs(fh(3.0 * s.w) - 3.0 * fh(s.w)) < 1e-10);
}

TEST_CASE("J operator squares to minus one and is compatible") {
  Sl2rSetup s;
  std::mt19937_64 rng(11);
  auto sampler = sl2r_sampler(s.ctx);
  for (int t = 0; t < 20; ++t) {
    LieElement w = sampler(rng);
    OrbitPoint p{w, true};
    OrbitTangent u = random_tangent(s.prov, w, rng);
    OrbitTangent Ju = s.prov.apply_J(w, u);
    OrbitTangent JJu = s.prov.apply_J(w, Ju);
    CHECK((JJu.value.coords + u.value.coords).norm() < 1e-9 * std::max(1.0, u.value.norm()));
    // positivity
    CHECK(kks_sigma(p, u, Ju).real() > 0);
  }
}

TEST_CASE("rho0 general formula matches the Hermitian closed form") {
  Sl2rSetup s;
  std::mt19937_64 rng(23);
  auto sampler = sl2r_sampler(s.ctx);
  for (int t = 0; t < 15; ++t) {
    LieElement w = sampler(rng);
    double a = s.prov.rho0(w);              // phi^{x0}
    double b = s.prov.rho0_general(w);      // sigma(eta, J eta)
    CHECK(a == Approx(b).margin(1e-8 * std::max(1.0, std::abs(a))));
    CHECK(a > 0);
  }
}

TEST_CASE("kv generator is the Hamiltonian direction of rho0") {
  Sl2rSetup s;
  // theta = J eta = -[x0, w] in the Hermitian case
  OrbitTangent theta = s.prov.kv_generator(s.w);
  LieElement expect = -bracket(s.prov.x0(), s.w);
  CHECK((theta.value.coords - expect.coords).norm() < 1e-9);
}

TEST_CASE("vergne suite passes on sl2r") {
  Sl2rSetup s;
  auto rep = vergne_suite(s.prov, sl2r_sampler(s.ctx), 60, 99, 1e-10);
  for (const auto& c : rep.checks) {
    INFO(c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("kahler suite passes on sl2r") {
  Sl2rSetup s;
  auto rep = kahler_suite(s.prov, sl2r_sampler(s.ctx), 12, 6, 7);
  for (const auto& c : rep.checks) {
    INFO(c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("kv suite passes on sl2r") {
  Sl2rSetup s;
  auto rep = kv_suite(s.prov, sl2r_sampler(s.ctx), 10, 13);
  for (const auto& c : rep.checks) {
    INFO(c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("theorem94 suite passes on sl2r") {
  Sl2rSetup s;
  auto rep = theorem94_suite(s.prov, sl2r_sampler(s.ctx), 12, 6, 17);
  for (const auto& c : rep.checks) {
    INFO(c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("cotangent suite passes on sl2r") {
  Sl2rSetup s;
  auto rep = cotangent_suite(s.prov, sl2r_sampler(s.ctx), 8, 19);
  for (const auto& c : rep.checks) {
    INFO(c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("kks suite passes on sl2r") {
  Sl2rSetup s;
  auto rep = kks_suite(s.prov, sl2r_sampler(s.ctx), 30, 29);
  for (const auto& c : rep.checks) {
    INFO(c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("su21 provider and suites") {
  auto ctx = make_su21();
  auto split = cartan_split(ctx);
  auto w = su21_base_point(ctx);
  auto prov = KahlerProvider::hermitian(ctx, split, w);

  // rho0(e2 + i e3) = 6 with the positivity-normalized center
  CHECK(prov.rho0(w) == Approx(6.0).margin(1e-10));

  // V(w) = -e1 + i e3 (the model-instanton expression at lambda = 2)
  auto res = prov.vergne_result(w);
  VecC expect = -ctx->kappa_coords()[0] + Cplx(0, 1) * ctx->kappa_coords()[2];
  CHECK((res.V.coords - expect).norm() < 1e-10);
  CHECK(res.triple_sum_residual < 1e-12);

  auto sampler = su21_sampler(ctx, split);
  auto repv = vergne_suite(prov, sampler, 40, 5, 1e-10);
  for (const auto& c : repv.checks) {
    INFO("vergne/" << c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
  auto repk = kahler_suite(prov, sampler, 8, 4, 5);
  for (const auto& c : repk.checks) {
    INFO("kahler/" << c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
  auto repkv = kv_suite(prov, sampler, 6, 5);
  for (const auto& c : repkv.checks) {
    INFO("kv/" << c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
  auto rep94 = theorem94_suite(prov, sampler, 8, 4, 5);
  for (const auto& c : rep94.checks) {
    INFO("t94/" << c.name << " residual " << c.residual << " tol " << c.tolerance);
    CHECK(c.pass);
  }
}

TEST_CASE("solver-backed Vergne map agrees with the closed form") {
  Sl2rSetup s;
  SolverConfig cfg;
  cfg.N = 200;
  cfg.T = 8.0;
  cfg.tol = 1e-8;
  auto res = vergne_general(s.ctx, s.split, s.w, cfg);
  CHECK(res.method == "nahm-solver");
  auto herm = vergne_hermitian(s.prov, s.w);
  CHECK((res.V.coords - herm.V.coords).norm() < 1e-4);
  CHECK(res.triple_sum_residual < 1e-4);
  REQUIRE(res.zeta1.has_value());
  // zeta_1 = i [[0,1],[1,0]]
  CHECK((res.zeta1->matrix() - Cplx(0, 1) * mat2(0, 1, 1, 0)).norm() < 1e-4);

  // the model point: V = (-e1 + i e3)/2 via the solver route as well
  LieElement wm(s.ctx, 0.5 * (s.ctx->kappa_coords()[1] + Cplx(0, 1) * s.ctx->kappa_coords()[2]));
  auto resm = vergne_general(s.ctx, s.split, wm, cfg);
  VecC expectm = 0.5 * (-s.ctx->kappa_coords()[0] + Cplx(0, 1) * s.ctx->kappa_coords()[2]);
  CHECK((resm.V.coords - expectm).norm() < 1e-6);
}
