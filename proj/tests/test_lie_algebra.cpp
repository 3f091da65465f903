#include <catch_amalgamated.hpp>

#include <random>

#include "nilgeo/fixtures.hpp"
#include "nilgeo/lie_algebra.hpp"

using namespace nilgeo;
using Catch::Approx;

namespace {

std::mt19937_64 rng(77001ull);

LieElement random_element(const ContextPtr& ctx, bool real_form = false) {
  std::normal_distribution<double> g(0.0, 1.0);
  VecC c(ctx->dim());
  for (int i = 0; i < ctx->dim(); ++i) c[i] = Cplx(g(rng), real_form ? 0.0 : g(rng));
  LieElement x(ctx, c);
  if (real_form) { // project onto the nu-fixed form
    x.coords = 0.5 * (x.coords + ctx->apply_nu(x.coords));
  }
  return x;
}

} // namespace

TEST_CASE("sl2R fixture validates and reproduces structure") {
  auto ctx = make_sl2r();
  CHECK(ctx->dim() == 3);

  // structure constants reproduce the matrix commutator on all pairs
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      LieElement bi(ctx, VecC::Unit(3, i)), bj(ctx, VecC::Unit(3, j));
      MatC direct = bi.matrix() * bj.matrix() - bj.matrix() * bi.matrix();
      CHECK((bracket(bi, bj).matrix() - direct).norm() < 1e-12);
    }

  // kappa triple brackets [e_a, e_b] = -2 eps e_c
  auto e = ctx->kappa_coords();
  CHECK((ctx->bracket_coords(e[0], e[1]) + 2.0 * e[2]).norm() < 1e-12);
  CHECK((ctx->bracket_coords(e[1], e[2]) + 2.0 * e[0]).norm() < 1e-12);
  CHECK((ctx->bracket_coords(e[2], e[0]) + 2.0 * e[1]).norm() < 1e-12);
}

TEST_CASE("bracket of the sl(2) triple and error paths") {
  auto ctx = make_sl2r();
  MatC h(2, 2), eM(2, 2);
  h << 1, 0, 0, -1;
  eM << 0, 1, 0, 0;
  auto H = LieElement::from_matrix(ctx, h);
  auto E = LieElement::from_matrix(ctx, eM);
  CHECK((bracket(H, E).matrix() - 2.0 * eM).norm() < 1e-12);
  CHECK(bracket(H, H).norm() < 1e-14);

  auto other = make_sl2r();
  CHECK_THROWS_AS(bracket(H, LieElement(other, VecC::Unit(3, 0))), ContextMismatch);

  // matrices outside the span are rejected
  MatC not_traceless = MatC::Identity(2, 2);
  CHECK_THROWS(LieElement::from_matrix(ctx, not_traceless));
}

TEST_CASE("Killing form values and properties") {
  auto ctx = make_sl2r();
  MatC h(2, 2);
  h << 1, 0, 0, -1;
  auto H = LieElement::from_matrix(ctx, h);
  CHECK(killing_form(H, H).real() == Approx(8.0).margin(1e-10));
  CHECK(std::abs(killing_form(H, H).imag()) < 1e-12);

  // negative definite on u: killing(e1,e1) = -8
  LieElement e1(ctx, ctx->kappa_coords()[0]);
  CHECK(killing_form(e1, e1).real() == Approx(-8.0).margin(1e-10));

  // killing = 4 trace(XY) on sl(2): a consequence, not an assumption
  for (int t = 0; t < 40; ++t) {
    auto x = random_element(ctx), y = random_element(ctx);
    Cplx k = killing_form(x, y);
    Cplx tr = (x.matrix() * y.matrix()).trace();
    CHECK(std::abs(k - 4.0 * tr) < 1e-10 * (1.0 + std::abs(k)));
    CHECK(std::abs(k - killing_form(y, x)) < 1e-12 * (1.0 + std::abs(k)));
  }

  // ad-invariance on random triples
  for (int t = 0; t < 40; ++t) {
    auto x = random_element(ctx), y = random_element(ctx), z = random_element(ctx);
    Cplx lhs = killing_form(bracket(z, x), y) + killing_form(x, bracket(z, y));
    CHECK(std::abs(lhs) < 1e-9);
  }
}

TEST_CASE("su21 fixture Killing normalization") {
  auto ctx = make_su21();
  CHECK(ctx->dim() == 8);
  for (int t = 0; t < 20; ++t) {
    auto x = random_element(ctx), y = random_element(ctx);
    Cplx k = killing_form(x, y);
    Cplx tr = (x.matrix() * y.matrix()).trace();
    CHECK(std::abs(k - 6.0 * tr) < 1e-9 * (1.0 + std::abs(k)));
  }
}

TEST_CASE("nu fixes the real form and negates its i-rotation") {
  for (auto ctx : {make_sl2r(), make_su21()}) {
    auto split = cartan_split(ctx);
    for (int i = 0; i < split.dim_k(); ++i) {
      auto x = split.k_real_element(i);
      CHECK((ctx->apply_nu(x.coords) - x.coords).norm() < 1e-12);
      LieElement ix = Cplx(0, 1) * x;
      CHECK((ctx->apply_nu(ix.coords) + ix.coords).norm() < 1e-12);
    }
    for (int i = 0; i < split.dim_p(); ++i) {
      auto v = split.p_real_element(i);
      CHECK((ctx->apply_nu(v.coords) - v.coords).norm() < 1e-12);
      LieElement iv = Cplx(0, 1) * v;
      CHECK((ctx->apply_nu(iv.coords) + iv.coords).norm() < 1e-12);
    }
  }
}

TEST_CASE("cartan split of sl2R") {
  auto ctx = make_sl2r();
  auto split = cartan_split(ctx);
  CHECK(split.dim_k() == 1);
  CHECK(split.dim_p() == 2);

  // k_R is spanned by the rotation [[0,1],[-1,0]]
  MatC r(2, 2);
  r << 0, 1, -1, 0;
  MatC k0 = split.k_real_element(0).matrix();
  double align = std::abs((k0.adjoint() * r).trace()) / (k0.norm() * r.norm());
  CHECK(align == Approx(1.0).margin(1e-10));

  // p_R contains diag(1,-1) and [[0,1],[1,0]]
  MatC h(2, 2), s(2, 2);
  h << 1, 0, 0, -1;
  s << 0, 1, 1, 0;
  for (const MatC& target : {h, s}) {
    VecC c = ctx->coords(target);
    VecC back = split.project_p(c);
    CHECK((back - c).norm() < 1e-10);
    CHECK(split.project_k(c).norm() < 1e-12);
  }

  // dimension count and Killing signature
  CHECK(split.dim_k() + split.dim_p() == ctx->dim());
  // Killing negative definite on u
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ctx->killing_matrix());
  CHECK(es.eigenvalues().maxCoeff() < 0.0);
  // indefinite on g_R: positive on p_R, negative on k_R
  auto v = split.p_real_element(0);
  CHECK(killing_form(v, v).real() > 0.0);
  auto k = split.k_real_element(0);
  CHECK(killing_form(k, k).real() < 0.0);
}

TEST_CASE("compact case yields DegenerateSplit") {
  auto ctx = make_su2_compact();
  CHECK_THROWS_AS(cartan_split(ctx), DegenerateSplit);
}

TEST_CASE("mu projection on sl2R") {
  auto ctx = make_sl2r();
  auto split = cartan_split(ctx);
  MatC wmat(2, 2);
  wmat << 1, -1, 1, -1;
  auto w = LieElement::from_matrix(ctx, wmat);
  auto mu = mu_project(w, split);
  MatC expect(2, 2);
  expect << 0, -1, 1, 0;
  CHECK((mu.matrix() - expect).norm() < 1e-12);
  // w - mu(w) lies in p_R
  auto p = w - mu;
  CHECK((split.project_p(p.coords) - p.coords).norm() < 1e-12);

  // projection fixes k_R and kills p_R
  auto k = split.k_real_element(0);
  CHECK((mu_project(k, split).coords - k.coords).norm() < 1e-13);
  auto v = split.p_real_element(0);
  CHECK(mu_project(v, split).norm() < 1e-13);

  // non-real input rejected
  LieElement bad(ctx, Cplx(0, 1) * k.coords);
  CHECK_THROWS_AS(mu_project(bad, split), NotReal);
}

TEST_CASE("nilpotency test") {
  auto ctx = make_sl2r();
  MatC e(2, 2), h(2, 2);
  e << 0, 1, 0, 0;
  h << 1, 0, 0, -1;
  CHECK(is_nilpotent(LieElement::from_matrix(ctx, e)));
  CHECK_FALSE(is_nilpotent(LieElement::from_matrix(ctx, h)));
  // e2 + i e3 of the kappa triple is nilpotent
  auto kap = ctx->kappa_coords();
  CHECK(is_nilpotent(LieElement(ctx, kap[1] + Cplx(0, 1) * kap[2])));
}

TEST_CASE("hermitian center of sl2R") {
  auto ctx = make_sl2r();
  auto split = cartan_split(ctx);
  auto hc = hermitian_center(split);
  MatC x0 = hc.x0.matrix();
  MatC expect(2, 2);
  expect << 0, 0.5, -0.5, 0;
  CHECK(std::min((x0 - expect).norm(), (x0 + expect).norm()) < 1e-10);
  CHECK(hc.p_plus.size() == 1);
  CHECK(hc.p_minus.size() == 1);

  // eigenvector h + i s (up to sign of x0 and scale)
  MatC hmat(2, 2), smat(2, 2);
  hmat << 1, 0, 0, -1;
  smat << 0, 1, 1, 0;
  MatC plus = ctx->matrix(hc.p_plus[0]);
  Cplx ratio = (plus.adjoint() * (hmat + Cplx(0, 1) * smat)).trace();
  Cplx ratio2 = (plus.adjoint() * (hmat - Cplx(0, 1) * smat)).trace();
  double a1 = std::abs(ratio) / (plus.norm() * 2.0);
  double a2 = std::abs(ratio2) / (plus.norm() * 2.0);
  CHECK(std::max(a1, a2) == Approx(1.0).margin(1e-9)); // aligned with h +- i s
}

TEST_CASE("hermitian center of su21 and the non-Hermitian case") {
  auto su = make_su21();
  auto hc = hermitian_center(cartan_split(su));
  MatC x0 = hc.x0.matrix();
  MatC expect = MatC::Zero(3, 3);
  expect(0, 0) = Cplx(0, 1.0 / 3.0);
  expect(1, 1) = Cplx(0, 1.0 / 3.0);
  expect(2, 2) = Cplx(0, -2.0 / 3.0);
  CHECK(std::min((x0 - expect).norm(), (x0 + expect).norm()) < 1e-9);
  CHECK(hc.p_plus.size() == 2);

  // so(3,1)-type: k_R semisimple, center zero
  auto sl2c = make_sl2c_as_real();
  CHECK_THROWS_AS(hermitian_center(cartan_split(sl2c)), NotHermitian);
}

TEST_CASE("kks pairing values and properties") {
  auto ctx = make_sl2r();
  MatC wmat(2, 2), hmat(2, 2), smat(2, 2);
  wmat << 1, -1, 1, -1;
  hmat << 1, 0, 0, -1;
  smat << 0, 1, 1, 0;
  auto w = LieElement::from_matrix(ctx, wmat);
  auto h = LieElement::from_matrix(ctx, hmat);
  auto s = LieElement::from_matrix(ctx, smat);

  // direct matrix arithmetic oracle: (w,[h,s]) = 4 trace(w [h,s]),
  // [h,s] = [[0,2],[-2,0]], w[h,s] has trace 4, so the pairing is 16
  MatC br = hmat * smat - smat * hmat;
  Cplx oracle = 4.0 * (wmat * br).trace();
  CHECK(oracle.real() == Approx(16.0).margin(1e-12));
  CHECK(std::abs(kks_pairing(w, h, s) - oracle) < 1e-10);

  CHECK(std::abs(kks_pairing(w, h, h)) < 1e-12);
  for (int t = 0; t < 30; ++t) {
    auto x = random_element(ctx), y = random_element(ctx);
    CHECK(std::abs(kks_pairing(w, x, y) + kks_pairing(w, y, x)) < 1e-10);
  }
}

TEST_CASE("theta and nu interplay on fixtures") {
  for (auto ctx : {make_sl2r(), make_su21(), make_sl2c_as_real()}) {
    const int m = ctx->dim();
    for (int t = 0; t < 10; ++t) {
      auto x = random_element(ctx);
      // involutions square to the identity
      CHECK((ctx->apply_theta(ctx->apply_theta(x.coords)) - x.coords).norm() < 1e-10);
      CHECK((ctx->apply_nu(ctx->apply_nu(x.coords)) - x.coords).norm() < 1e-10);
      // commute
      CHECK((ctx->apply_theta(ctx->apply_nu(x.coords)) -
             ctx->apply_nu(ctx->apply_theta(x.coords)))
                .norm() < 1e-10);
    }
    (void)m;
  }
}
