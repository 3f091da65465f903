#ifndef NILGEO_REPORT_HPP
#define NILGEO_REPORT_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "nilgeo/errors.hpp"
#include "nilgeo/version.hpp"

namespace nilgeo {

/// Static table of identity names used as check anchors in reports, so a
/// failing residual is traceable to the geometric statement it verifies.
namespace anchor {
inline constexpr const char* quaternion_relations = "quaternion relations J_a J_b = eps J_c";
inline constexpr const char* kaehler_compat = "metric-form compatibility g = omega(.,J.)";
inline constexpr const char* form_recovery = "omega_c = eps omega_a(J_b .,.)";
inline constexpr const char* holomorphic_type = "Omega_a is (2,0) for J_a";
inline constexpr const char* cone_weight = "cone weight two (L_eta omega = 2 omega)";
inline constexpr const char* cone_rotation = "sphere rotation (L_theta_a omega_b = -2 eps omega_c)";
inline constexpr const char* cone_metric = "metric scaling (L_eta g = 2g)";
inline constexpr const char* hk_potential = "hyperkaehler potential dd^c_q rho = omega_q";
inline constexpr const char* euler_gradient = "Euler field eta = grad rho";
inline constexpr const char* nahm_equations = "Nahm system dA_a/dt = -2A_a - [A_b,A_c]";
inline constexpr const char* moment_tail = "moment extraction zeta_a = lim e^{2t} A_a / 2";
inline constexpr const char* scaling_equivariance = "scaling equivariance zeta(l*A) = l zeta(A)";
inline constexpr const char* spin_equivariance = "quaternion equivariance zeta(h.A) = h*zeta(A)";
inline constexpr const char* phi_nilpotent = "holomorphic moments land on the nilpotent orbit";
inline constexpr const char* triple_sum = "triple sum w = mu(w) + (V(w)+conj V(w))/2";
inline constexpr const char* vergne_membership = "Vergne image lies in p and is nilpotent";
inline constexpr const char* vergne_equivariance = "Vergne map K_R x R+ equivariance";
inline constexpr const char* vergne_injective = "Vergne map separates points";
inline constexpr const char* moment_match = "zeta_2 equals the Cartan projection mu";
inline constexpr const char* kks_homomorphism = "Poisson bracket {phi^x,phi^y} = phi^[x,y]";
inline constexpr const char* moment_map_identity = "moment map identity xi_phi . sigma + d phi = 0";
inline constexpr const char* j_square = "complex structure J^2 = -id";
inline constexpr const char* j_invariance = "sigma(Ju,Jv) = sigma(u,v)";
inline constexpr const char* kaehler_positivity = "Kaehler positivity sigma(u,Ju) > 0";
inline constexpr const char* potential_ddc = "sigma = i ddbar of the restricted potential";
inline constexpr const char* kv_moment = "KV moment map theta . sigma + d rho_0 = 0";
inline constexpr const char* kv_bracket = "KV character {rho_0, f^v} = i f^v";
inline constexpr const char* kv_flow = "KV flow matches the central one-parameter group";
inline constexpr const char* real_part = "phi^v is the real part of f^v";
inline constexpr const char* holo_decomposition = "f^v = phi^v - i {rho_0, phi^v}";
inline constexpr const char* pluriharmonic = "phi^v is pluriharmonic";
inline constexpr const char* beta_pairing = "symplectic potential pairing <beta,eta^x> = mu^x";
inline constexpr const char* beta_j_pairing = "<beta, J eta^x> = 0";
inline constexpr const char* beta_exterior = "d beta = sigma";
inline constexpr const char* lagrangian_split = "Sigma vanishes on [k,e] x [k,e] and [p,e] x [p,e]";
inline constexpr const char* covering_map = "two-to-one covering onto the sl(2) orbit";
inline constexpr const char* cone_double_cover = "real cone double cover round trip";
inline constexpr const char* solver_convergence = "boundary value solver residuals";
inline constexpr const char* homogeneity = "homogeneity under Euler scaling";
inline constexpr const char* plumbing = "artifact plumbing";
} // namespace anchor

struct CheckRecord {
  std::string name;
  std::string anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string suite;
  std::string fixture;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<CheckRecord> checks;

  /// Residual-vs-tolerance check; returns pass so call sites can branch.
  bool add(const std::string& name, const std::string& anchor_, double residual,
           double tolerance) {
    CheckRecord r;
    r.name = name;
    r.anchor = anchor_;
    r.residual = residual;
    r.tolerance = tolerance;
    r.pass = std::isfinite(residual) && residual <= tolerance;
    checks.push_back(r);
    return r.pass;
  }

  /// Boolean check recorded as residual 0/1 against tolerance 1/2.
  bool add_flag(const std::string& name, const std::string& anchor_, bool ok) {
    return add(name, anchor_, ok ? 0.0 : 1.0, 0.5);
  }

  void absorb(const VerificationReport& other, const std::string& prefix = "") {
    for (auto c : other.checks) {
      c.name = prefix.empty() ? c.name : prefix + "/" + c.name;
      checks.push_back(c);
    }
  }

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckRecord& c) { return c.pass; });
  }

  double worst_residual_ratio() const {
    double worst = 0.0;
    for (const auto& c : checks)
      if (c.tolerance > 0) worst = std::max(worst, c.residual / c.tolerance);
    return worst;
  }

  void sort_checks() {
    std::stable_sort(checks.begin(), checks.end(),
                     [](const CheckRecord& a, const CheckRecord& b) { return a.name < b.name; });
  }
};

inline nlohmann::json report_to_json(const VerificationReport& rep) {
  VerificationReport r = rep;
  r.sort_checks();
  nlohmann::json j;
  j["suite"] = r.suite;
  j["fixture"] = r.fixture;
  nlohmann::json env;
  env["seed"] = r.seed;
  env["config_hash"] = r.config_hash;
  env["version"] = version_string;
  j["environment"] = env;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json cj;
    cj["name"] = c.name;
    cj["anchor"] = c.anchor;
    cj["residual"] = c.residual;
    cj["tolerance"] = c.tolerance;
    cj["pass"] = c.pass;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["all_pass"] = r.all_pass();
  return j;
}

struct ReportDiffEntry {
  std::string name;
  double residual_a = 0.0;
  double residual_b = 0.0;
  double delta = 0.0;
  bool pass_changed = false;
};

/// Per-check residual deltas between two reports of the same suite.
inline std::vector<ReportDiffEntry> report_diff(const nlohmann::json& a, const nlohmann::json& b) {
  if (a.at("suite") != b.at("suite") || a.at("fixture") != b.at("fixture"))
    throw SuiteMismatch("reports come from different suites");
  std::vector<ReportDiffEntry> out;
  for (const auto& ca : a.at("checks")) {
    for (const auto& cb : b.at("checks")) {
      if (ca.at("name") != cb.at("name")) continue;
      ReportDiffEntry e;
      e.name = ca.at("name").get<std::string>();
      e.residual_a = ca.at("residual").get<double>();
      e.residual_b = cb.at("residual").get<double>();
      e.delta = e.residual_b - e.residual_a;
      e.pass_changed = ca.at("pass").get<bool>() != cb.at("pass").get<bool>();
      if (e.delta != 0.0 || e.pass_changed) out.push_back(e);
    }
  }
  return out;
}

} // namespace nilgeo

#endif
