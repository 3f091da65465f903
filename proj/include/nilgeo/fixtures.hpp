#ifndef NILGEO_FIXTURES_HPP
#define NILGEO_FIXTURES_HPP

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilgeo/lie_algebra.hpp"

namespace nilgeo {

namespace pauli {

inline MatC sigma1() {
  MatC s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}
inline MatC sigma2() {
  MatC s(2, 2);
  s << 0, Cplx(0, -1), Cplx(0, 1), 0;
  return s;
}
inline MatC sigma3() {
  MatC s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}

} // namespace pauli

/// g = sl(2,C), g_R = sl(2,R), u = su(2); kappa triple (i s1, i s2, i s3).
inline ContextPtr make_sl2r() {
  const Cplx I(0, 1);
  std::vector<MatC> basis = {I * pauli::sigma1(), I * pauli::sigma2(), I * pauli::sigma3()};
  InvolutionRule theta{InvolutionRule::Kind::NegTranspose, {}};
  InvolutionRule nu{InvolutionRule::Kind::Entrywise, {}};
  std::array<MatC, 3> kappa = {basis[0], basis[1], basis[2]};
  return LieAlgebraContext::create("sl2R", 2, basis, theta, nu, kappa);
}

/// g = sl(3,C), g_R = su(2,1) (Hermitian), u = su(3).
inline ContextPtr make_su21() {
  const Cplx I(0, 1);
  auto E = [](int p, int q) {
    MatC m = MatC::Zero(3, 3);
    m(p, q) = 1.0;
    return m;
  };
  std::vector<MatC> basis;
  basis.push_back(I * (E(0, 1) + E(1, 0)));
  basis.push_back(E(0, 1) - E(1, 0));
  basis.push_back(I * (E(0, 0) - E(1, 1)));
  basis.push_back(I * (E(0, 2) + E(2, 0)));
  basis.push_back(E(0, 2) - E(2, 0));
  basis.push_back(I * (E(1, 2) + E(2, 1)));
  basis.push_back(E(1, 2) - E(2, 1));
  basis.push_back(I * (E(0, 0) + E(1, 1) - 2.0 * E(2, 2)) / std::sqrt(3.0));

  MatC M = MatC::Identity(3, 3);
  M(2, 2) = -1.0;
  InvolutionRule theta{InvolutionRule::Kind::Conjugation, M};
  InvolutionRule nu{InvolutionRule::Kind::NegAdjoint, M};

  // e1 = i(E13+E31), e2 = i(E11-E33), e3 = E31-E13
  std::array<MatC, 3> kappa;
  kappa[0] = I * (E(0, 2) + E(2, 0));
  kappa[1] = I * (E(0, 0) - E(2, 2));
  kappa[2] = E(2, 0) - E(0, 2);
  return LieAlgebraContext::create("su21", 3, basis, theta, nu, kappa);
}

/// g = sl(2,C) x sl(2,C) realized block-diagonally; g_R = sl(2,C) viewed as a
/// real algebra (so(3,1)-type: k_R simple, not Hermitian).
inline ContextPtr make_sl2c_as_real() {
  const Cplx I(0, 1);
  auto emb = [](const MatC& X, int block) {
    MatC m = MatC::Zero(4, 4);
    m.block(2 * block, 2 * block, 2, 2) = X;
    return m;
  };
  std::vector<MatC> basis;
  for (auto s : {pauli::sigma1(), pauli::sigma2(), pauli::sigma3()})
    basis.push_back(emb(I * s, 0));
  for (auto s : {pauli::sigma1(), pauli::sigma2(), pauli::sigma3()})
    basis.push_back(emb(I * s, 1));

  MatC S = MatC::Zero(4, 4);
  S.block(0, 2, 2, 2) = MatC::Identity(2, 2);
  S.block(2, 0, 2, 2) = MatC::Identity(2, 2);
  InvolutionRule theta{InvolutionRule::Kind::NegTransposeConjugation, S};
  InvolutionRule nu{InvolutionRule::Kind::EntrywiseConjugation, S};

  std::array<MatC, 3> kappa;
  for (int a = 0; a < 3; ++a) kappa[a] = basis[a] + basis[3 + a];
  return LieAlgebraContext::create("sl2C_as_real", 4, basis, theta, nu, kappa);
}

/// su(2) with theta = id and nu fixing all of u: the compact edge case whose
/// Cartan split has no noncompact part.
inline ContextPtr make_su2_compact() {
  const Cplx I(0, 1);
  std::vector<MatC> basis = {I * pauli::sigma1(), I * pauli::sigma2(), I * pauli::sigma3()};
  InvolutionRule theta{InvolutionRule::Kind::Conjugation, MatC::Identity(2, 2)};
  InvolutionRule nu{InvolutionRule::Kind::NegAdjoint, MatC::Identity(2, 2)};
  std::array<MatC, 3> kappa = {basis[0], basis[1], basis[2]};
  ContextTolerances tol;
  tol.check_kappa_theta = false; // theta = id cannot intertwine the sign flip
  return LieAlgebraContext::create("su2_compact", 2, basis, theta, nu, kappa, tol);
}

/// Base nilpotent points of the shipped orbit fixtures.
inline LieElement sl2r_orbit_point(const ContextPtr& ctx, double u, double v) {
  MatC w(2, 2);
  w << u * v, -u * u, v * v, -u * v;
  return LieElement::from_matrix(ctx, w);
}

inline LieElement sl2r_base_point(const ContextPtr& ctx) { return sl2r_orbit_point(ctx, 1, 1); }

inline LieElement su21_base_point(const ContextPtr& ctx) {
  const auto& k = ctx->kappa_coords();
  return LieElement(ctx, k[1] + Cplx(0, 1) * k[2]);
}

// ---------------------------------------------------------------------------
// JSON fixture format:
// { "name", "n", "basis": [matrix...],
//   "theta": {"kind": ...[, "matrix": ...]}, "nu": {...},
//   "kappa": [e1, e2, e3] }
// with matrices as row-major nested arrays of [re, im] pairs.
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const MatC& X) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < X.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < X.cols(); ++c)
      row.push_back({X(r, c).real(), X(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

inline MatC matrix_from_json(const nlohmann::json& j) {
  int rows = static_cast<int>(j.size());
  if (rows == 0) throw ConfigInvalid("empty matrix in fixture file");
  int cols = static_cast<int>(j[0].size());
  MatC X(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) throw ConfigInvalid("ragged matrix rows");
    for (int c = 0; c < cols; ++c)
      X(r, c) = Cplx(j[r][c][0].get<double>(), j[r][c][1].get<double>());
  }
  return X;
}

inline nlohmann::json involution_to_json(const InvolutionRule& r) {
  nlohmann::json j;
  switch (r.kind) {
    case InvolutionRule::Kind::NegTranspose: j["kind"] = "negtranspose"; break;
    case InvolutionRule::Kind::Conjugation: j["kind"] = "conjugation"; break;
    case InvolutionRule::Kind::NegTransposeConjugation:
      j["kind"] = "negtranspose_conjugation";
      break;
    case InvolutionRule::Kind::Entrywise: j["kind"] = "entrywise"; break;
    case InvolutionRule::Kind::NegAdjoint: j["kind"] = "negadjoint"; break;
    case InvolutionRule::Kind::EntrywiseConjugation:
      j["kind"] = "entrywise_conjugation";
      break;
  }
  if (r.matrix.size() > 0) j["matrix"] = matrix_to_json(r.matrix);
  return j;
}

inline InvolutionRule involution_from_json(const nlohmann::json& j) {
  InvolutionRule r;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "negtranspose") r.kind = InvolutionRule::Kind::NegTranspose;
  else if (kind == "conjugation") r.kind = InvolutionRule::Kind::Conjugation;
  else if (kind == "negtranspose_conjugation")
    r.kind = InvolutionRule::Kind::NegTransposeConjugation;
  else if (kind == "entrywise") r.kind = InvolutionRule::Kind::Entrywise;
  else if (kind == "negadjoint") r.kind = InvolutionRule::Kind::NegAdjoint;
  else if (kind == "entrywise_conjugation")
    r.kind = InvolutionRule::Kind::EntrywiseConjugation;
  else throw ConfigInvalid("unknown involution kind: " + kind);
  if (j.contains("matrix")) r.matrix = matrix_from_json(j["matrix"]);
  return r;
}

inline nlohmann::json context_to_json(const ContextPtr& ctx) {
  nlohmann::json j;
  j["name"] = ctx->name();
  j["n"] = ctx->matrix_size();
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& b : ctx->basis()) basis.push_back(matrix_to_json(b));
  j["basis"] = basis;
  j["theta"] = involution_to_json(ctx->theta_rule());
  j["nu"] = involution_to_json(ctx->nu_rule());
  nlohmann::json kappa = nlohmann::json::array();
  for (int a = 0; a < 3; ++a) kappa.push_back(matrix_to_json(ctx->matrix(ctx->kappa_coords()[a])));
  j["kappa"] = kappa;
  return j;
}

inline ContextPtr context_from_json(const nlohmann::json& j) {
  std::string name = j.at("name").get<std::string>();
  int n = j.at("n").get<int>();
  std::vector<MatC> basis;
  for (const auto& b : j.at("basis")) basis.push_back(matrix_from_json(b));
  InvolutionRule theta = involution_from_json(j.at("theta"));
  InvolutionRule nu = involution_from_json(j.at("nu"));
  if (j.at("kappa").size() != 3) throw ConfigInvalid("kappa must hold three matrices");
  std::array<MatC, 3> kappa = {matrix_from_json(j["kappa"][0]),
                               matrix_from_json(j["kappa"][1]),
                               matrix_from_json(j["kappa"][2])};
  return LieAlgebraContext::create(name, n, basis, theta, nu, kappa);
}

inline ContextPtr fixture_by_name(const std::string& name) {
  if (name == "sl2r" || name == "sl2R") return make_sl2r();
  if (name == "su21") return make_su21();
  if (name == "sl2c_as_real" || name == "sl2C_as_real") return make_sl2c_as_real();
  throw UnknownFixture("no built-in fixture named '" + name + "'");
}

} // namespace nilgeo

#endif
