#include <catch_amalgamated.hpp>

#include <random>

#include "nilgeo/fixtures.hpp"
#include "nilgeo/nahm.hpp"

using namespace nilgeo;
using Catch::Approx;

namespace {

std::mt19937_64 rng(31337ull);

MatC mat2(double a, double b, double c, double d) {
  MatC m(2, 2);
  m << a, b, c, d;
  return m;
}

} // namespace

TEST_CASE("fornberg weights reproduce standard stencils") {
  Eigen::VectorXd x(5);
  x << -2, -1, 0, 1, 2;
  Eigen::VectorXd w = fd_weights_first(0.0, x);
  Eigen::VectorXd expect(5);
  expect << 1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12;
  CHECK((w - expect).norm() < 1e-14);

  // exactness on polynomials up to degree 6 for the 7-point stencil
  Eigen::VectorXd x7(7);
  x7 << 0, 1, 2, 3, 4, 5, 6;
  Eigen::VectorXd w7 = fd_weights_first(0.0, x7);
  for (int deg = 0; deg <= 6; ++deg) {
    double acc = 0;
    for (int k = 0; k < 7; ++k) acc += w7[k] * std::pow(x7[k], deg);
    double expect_d = (deg == 1) ? 1.0 : 0.0;
    CHECK(std::abs(acc - expect_d) < 1e-10);
  }
}

TEST_CASE("model instanton values and residual") {
  auto ctx = make_sl2r();
  auto p = model_instanton(ctx, 400, 8.0);

  // A_a(0) = e_a / 2
  int mid = 200;
  CHECK(p.grid[mid] == Approx(0.0).margin(1e-14));
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd expect = 0.5 * ctx->kappa_coords()[a].real();
    CHECK((p.A[a].col(mid) - expect).norm() < 1e-14);
  }

  Eigen::VectorXd res = nahm_residual(p);
  CHECK(res.lpNorm<Eigen::Infinity>() < 1e-8);

  // zero path solves the system trivially
  InstantonPath zero = p;
  for (int a = 0; a < 3; ++a) zero.A[a].setZero();
  CHECK(nahm_residual(zero).lpNorm<Eigen::Infinity>() == 0.0);

  // perturbed model has residual of the size of the perturbation
  InstantonPath pert = p;
  std::normal_distribution<double> g(0.0, 1.0);
  for (int a = 0; a < 3; ++a)
    for (int i = 0; i < pert.nodes(); ++i)
      for (int k = 0; k < ctx->dim(); ++k) pert.A[a](k, i) += 1e-3 * g(rng);
  double rp = nahm_residual(pert).lpNorm<Eigen::Infinity>();
  CHECK(rp > 1e-4);
  CHECK(rp < 1.0);

  // invalid triple rejected
  std::array<Eigen::VectorXd, 3> bad;
  for (int a = 0; a < 3; ++a) bad[a] = 2.0 * ctx->kappa_coords()[a].real();
  CHECK_THROWS_AS(model_instanton(ctx, bad, 100, 8.0), NotInCkappa);
}

TEST_CASE("moment extraction of the model") {
  auto ctx = make_sl2r();
  auto p = model_instanton(ctx, 400, 10.0);
  auto mt = moment_extract(p, 5);
  for (int a = 0; a < 3; ++a) {
    Eigen::VectorXd expect = 0.5 * ctx->kappa_coords()[a].real();
    CHECK((mt.zeta[a].coords.real() - expect).norm() < 1e-8);
    CHECK(mt.zeta[a].coords.imag().norm() < 1e-14);
  }
  // Phi_1 = zeta_2 + i zeta_3 = (e2 + i e3)/2, nilpotent
  LieElement phi1 = assemble_phi(mt, 1);
  VecC expect = 0.5 * (ctx->kappa_coords()[1] + Cplx(0, 1) * ctx->kappa_coords()[2]);
  CHECK((phi1.coords - expect).norm() < 1e-8);
  CHECK(is_nilpotent(phi1));
  // Phi_2 = (e3 + i e1)/2
  LieElement phi2 = assemble_phi(mt, 2);
  VecC expect2 = 0.5 * (ctx->kappa_coords()[2] + Cplx(0, 1) * ctx->kappa_coords()[0]);
  CHECK((phi2.coords - expect2).norm() < 1e-8);

  // a non-decaying path raises TailDivergence
  InstantonPath bad = p;
  for (int i = 0; i < bad.nodes(); ++i)
    bad.A[0].col(i) = Eigen::Vector3d(0.5, 0, 0) * std::exp(-bad.grid[i]);
  CHECK_THROWS_AS(moment_extract(bad, 5), TailDivergence);
}

TEST_CASE("cyclic rotation permutes the triple and the moments") {
  auto ctx = make_sl2r();
  auto p = model_instanton(ctx, 300, 8.0);
  Eigen::Matrix3d R = cyclic_rotation();
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
  auto q = act_rotation(p, R, zero);
  // A'_1 = A_3, A'_2 = A_1, A'_3 = A_2
  CHECK((q.A[0] - p.A[2]).norm() == 0.0);
  CHECK((q.A[1] - p.A[0]).norm() == 0.0);
  CHECK((q.A[2] - p.A[1]).norm() == 0.0);
  auto mt = moment_extract(q, 5);
  CHECK((mt.zeta[0].coords.real() - 0.5 * ctx->kappa_coords()[2].real()).norm() < 1e-8);
}

TEST_CASE("group action equivariances of the moment map") {
  auto ctx = make_sl2r();
  auto p = model_instanton(ctx, 400, 8.0);
  auto mt0 = moment_extract(p, 5);

  SECTION("identity scaling") {
    auto q = act_scale(p, 1.0);
    for (int a = 0; a < 3; ++a) CHECK((q.A[a] - p.A[a]).norm() < 1e-12);
  }

  SECTION("scaling equivariance zeta(l diamond A) = l zeta(A)") {
    for (double lam : {0.5, 0.8, 1.31, 2.4}) {
      auto q = act_scale(p, lam);
      auto mt = moment_extract(q, 5);
      for (int a = 0; a < 3; ++a)
        CHECK((mt.zeta[a].coords - lam * mt0.zeta[a].coords).norm() < 1e-7 * std::max(1.0, lam));
    }
  }

  SECTION("quaternion equivariance zeta(h.A) = h*zeta(A)") {
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
      Quaternion h{g(rng), g(rng), g(rng), g(rng)};
      if (h.norm() < 0.4 || h.norm() > 1.6) continue; // keep the shift inside the window
      auto q = act_quaternion(p, h);
      auto mt = moment_extract(q, 5);
      Eigen::Matrix3d R = spin_rotation_matrix(h);
      for (int a = 0; a < 3; ++a) {
        VecC expect = VecC::Zero(3);
        for (int b = 0; b < 3; ++b) expect += h.norm2() * R(a, b) * mt0.zeta[b].coords;
        CHECK((mt.zeta[a].coords - expect).norm() < 1e-7 * std::max(1.0, h.norm2()));
      }
    }
  }

  SECTION("excessive shifts raise GridUnderflow") {
    CHECK_THROWS_AS(act_scale(p, 1e6), GridUnderflow);
  }
}

TEST_CASE("solver recovers the model instanton") {
  auto ctx = make_sl2r();
  SolverConfig cfg;
  cfg.N = 200;
  cfg.T = 8.0;
  cfg.tol = 1e-7;
  VecC target = 0.5 * (ctx->kappa_coords()[1] + Cplx(0, 1) * ctx->kappa_coords()[2]);
  auto sol = solve_bvp(LieElement(ctx, target), cfg);
  CHECK(sol.converged);
  CHECK(sol.ode_residual < 1e-7);
  // zeta_1 = e_1 / 2
  CHECK((sol.moments.zeta[0].coords - 0.5 * ctx->kappa_coords()[0]).norm() < 1e-6);

  // scaled target: solution equals the scaled model
  auto sol2 = solve_bvp(LieElement(ctx, (1.7 * target).eval()), cfg);
  CHECK((sol2.moments.zeta[0].coords - 1.7 * 0.5 * ctx->kappa_coords()[0]).norm() < 1e-6);
}

TEST_CASE("solver inverts the moment map on the sl2R fixture target") {
  auto ctx = make_sl2r();
  SolverConfig cfg; // defaults N=400, T=8
  cfg.tol = 1e-7;
  auto w = LieElement::from_matrix(ctx, mat2(1, -1, 1, -1));
  auto sol = solve_bvp(w, cfg);
  CHECK(sol.converged);
  CHECK(sol.ode_residual < 1e-6);
  CHECK(sol.target_residual < 1e-6);

  // Phi_1 of the solution equals the target
  LieElement phi1 = assemble_phi(sol.moments, 1);
  CHECK((phi1.matrix() - mat2(1, -1, 1, -1)).norm() < 1e-5);

  // zeta_1 = i [[0,1],[1,0]] = e_1 (exact group-theoretic value)
  MatC expect_z1 = Cplx(0, 1) * mat2(0, 1, 1, 0);
  CHECK((sol.moments.zeta[0].matrix() - expect_z1).norm() < 1e-4);

  // errors for bad targets
  auto h = LieElement::from_matrix(ctx, mat2(1, 0, 0, -1));
  CHECK_THROWS_AS(solve_bvp(h, cfg), TargetNotNilpotent);
  LieElement imagw(ctx, Cplx(0, 1) * w.coords);
  CHECK_THROWS_AS(solve_bvp(imagw, cfg), TargetNotReal);
}

TEST_CASE("solver converges from a perturbed initial guess") {
  auto ctx = make_sl2r();
  SolverConfig cfg;
  cfg.N = 200;
  cfg.T = 8.0;
  cfg.tol = 1e-8;
  cfg.init_noise = 0.05;
  cfg.seed = 7;
  auto w = LieElement::from_matrix(ctx, mat2(1, -1, 1, -1));
  auto sol = solve_bvp(w, cfg);
  CHECK(sol.converged);
  CHECK(sol.iterations >= 2); // the damped iteration actually worked
  MatC expect_z1 = Cplx(0, 1) * mat2(0, 1, 1, 0);
  CHECK((sol.moments.zeta[0].matrix() - expect_z1).norm() < 1e-6);
}

TEST_CASE("solver determinism") {
  auto ctx = make_sl2r();
  SolverConfig cfg;
  cfg.N = 120;
  cfg.T = 6.0;
  cfg.tol = 1e-6;
  auto w = LieElement::from_matrix(ctx, mat2(1, -1, 1, -1));
  auto a = solve_bvp(w, cfg);
  auto b = solve_bvp(w, cfg);
  for (int k = 0; k < 3; ++k) CHECK((a.path.A[k] - b.path.A[k]).norm() == 0.0);
}

TEST_CASE("path serialization round trip") {
  auto ctx = make_sl2r();
  auto p = model_instanton(ctx, 60, 6.0);
  nlohmann::json j = path_to_json(p);
  auto q = path_from_json(ctx, j);
  for (int a = 0; a < 3; ++a) CHECK((q.A[a] - p.A[a]).norm() == 0.0);
  CHECK((q.grid - p.grid).norm() == 0.0);
  CHECK(j.contains("residuals"));
}
