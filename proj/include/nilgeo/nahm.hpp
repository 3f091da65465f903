#ifndef NILGEO_NAHM_HPP
#define NILGEO_NAHM_HPP

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include <json.hpp>

#include "nilgeo/lie_algebra.hpp"
#include "nilgeo/quaternion.hpp"

namespace nilgeo {

struct SolverWeights {
  double ode = 1.0;
  double boundary = 1.0;
  double tail = 1.0;
  double target = 1.0;
};

struct SolverConfig {
  int N = 400;
  double T = 8.0;
  double tol = 1e-8;
  int max_iter = 80;
  double damping = 1e-3; // initial Levenberg-Marquardt lambda
  SolverWeights weights;
  std::uint64_t seed = 0;
  int tail_nodes = 3;    // nodes tied to the decaying tail profile
  int extract_nodes = 5; // nodes used by moment extrapolation
  double shift_limit = 0.5; // max |shift| as a fraction of T for the scaling action
  double init_noise = 0.0;  // seeded perturbation of the initial guess (tests)
};

inline nlohmann::json solver_config_to_json(const SolverConfig& c) {
  nlohmann::json j;
  j["N"] = c.N;
  j["T"] = c.T;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["damping"] = c.damping;
  j["weights"] = {{"ode", c.weights.ode},
                  {"boundary", c.weights.boundary},
                  {"tail", c.weights.tail},
                  {"target", c.weights.target}};
  j["seed"] = c.seed;
  return j;
}

inline SolverConfig solver_config_from_json(const nlohmann::json& j) {
  SolverConfig c;
  if (j.contains("N")) c.N = j["N"].get<int>();
  if (j.contains("T")) c.T = j["T"].get<double>();
  if (j.contains("tol")) c.tol = j["tol"].get<double>();
  if (j.contains("max_iter")) c.max_iter = j["max_iter"].get<int>();
  if (j.contains("damping")) c.damping = j["damping"].get<double>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    if (w.contains("ode")) c.weights.ode = w["ode"].get<double>();
    if (w.contains("boundary")) c.weights.boundary = w["boundary"].get<double>();
    if (w.contains("tail")) c.weights.tail = w["tail"].get<double>();
    if (w.contains("target")) c.weights.target = w["target"].get<double>();
  }
  if (c.N < 8 || c.T <= 0 || c.tol <= 0) throw ConfigInvalid("bad solver configuration");
  return c;
}

/// Finite-difference weights for the first derivative at z over the given
/// nodes (Fornberg's recursion).
inline Eigen::VectorXd fd_weights_first(double z, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const int m = 1;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0, c4 = x[0] - z;
  C(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          C(i, k) = c1 * (k * C(i - 1, k - 1) - c5 * C(i - 1, k)) / c2;
        C(i, 0) = -c1 * c5 * C(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) C(j, k) = (c4 * C(j, k) - k * C(j, k - 1)) / c3;
      C(j, 0) = c4 * C(j, 0) / c3;
    }
    c1 = c2;
  }
  return C.col(m);
}

/// Real bracket in compact-form coordinates (structure constants are real).
inline Eigen::VectorXd bracket_real(const ContextPtr& ctx, const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& y) {
  const auto& C = ctx->structure_constants();
  Eigen::VectorXd out(ctx->dim());
  for (int k = 0; k < ctx->dim(); ++k) out[k] = x.dot(C[k] * y);
  return out;
}

/// Ad_{exp(u)} as a real matrix on compact-form coordinates.
inline Eigen::MatrixXd adjoint_matrix_real(const ContextPtr& ctx, const Eigen::VectorXd& u) {
  const int m = ctx->dim();
  MatC E = ctx->matrix(u.cast<Cplx>()).exp();
  MatC Einv = E.inverse();
  Eigen::MatrixXd M(m, m);
  for (int i = 0; i < m; ++i) {
    VecC col = ctx->coords(E * ctx->basis()[i] * Einv);
    M.col(i) = col.real();
  }
  return M;
}

/// Discretized instanton path: values of (A_1, A_2, A_3) in compact-form
/// coordinates on a uniform grid over [-T, T].
struct InstantonPath {
  ContextPtr ctx;
  Eigen::VectorXd grid;
  std::array<Eigen::MatrixXd, 3> A; // dim x (N+1) each

  int nodes() const { return static_cast<int>(grid.size()); }
  double step() const { return grid[1] - grid[0]; }

  LieElement element(int a, int i) const {
    return {ctx, A[a].col(i).cast<Cplx>()};
  }

  /// Sample component a at arbitrary time.  Interpolation acts on the
  /// normalized values C(t) = (1 + e^{2t}) A(t), which are slowly varying
  /// (constant for model instantons), so the decaying tail keeps full
  /// relative accuracy; beyond the grid the asymptotic-model expansion of C
  /// in e^{+-2t} is fitted on the three outermost nodes.
  Eigen::VectorXd sample(int a, double t) const {
    const int n = nodes();
    const int m = ctx->dim();
    const double gt = 1.0 / (1.0 + std::exp(2.0 * t));
    auto C = [&](int i) -> Eigen::VectorXd {
      return (1.0 + std::exp(2.0 * grid[i])) * A[a].col(i);
    };
    if (t >= grid[0] && t <= grid[n - 1]) {
      int i = static_cast<int>(std::floor((t - grid[0]) / step()));
      int lo = std::clamp(i - 1, 0, n - 4);
      Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
      for (int k = 0; k < 4; ++k) {
        double num = 1.0, den = 1.0;
        for (int l = 0; l < 4; ++l) {
          if (l == k) continue;
          num *= t - grid[lo + l];
          den *= grid[lo + k] - grid[lo + l];
        }
        out += (num / den) * C(lo + k);
      }
      return gt * out;
    }
    // C(t) = c0 + c1 z + c2 z^2 in the normalized exponential variable
    // z = e^{2(t - t_ref)} (left) or e^{-2(t - t_ref)} (right)
    bool left = t < grid[0];
    int base = left ? 0 : n - 3;
    double tref = grid[left ? 0 : n - 1];
    double sgn = left ? 2.0 : -2.0;
    Eigen::Matrix3d V;
    for (int r = 0; r < 3; ++r) {
      double z = std::exp(sgn * (grid[base + r] - tref));
      V(r, 0) = 1.0;
      V(r, 1) = z;
      V(r, 2) = z * z;
    }
    Eigen::Matrix3d Vi = V.inverse();
    double z = std::exp(sgn * (t - tref));
    Eigen::Vector3d mono(1.0, z, z * z);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
    for (int r = 0; r < 3; ++r) out += (Vi.transpose() * mono)[r] * C(base + r);
    return gt * out;
  }
};

inline Eigen::VectorXd uniform_grid(int N, double T) {
  Eigen::VectorXd g(N + 1);
  for (int i = 0; i <= N; ++i) g[i] = -T + 2.0 * T * i / N;
  return g;
}

/// Validate that a triple lies in C(kappa): the model bracket relations and
/// the Killing data of the reference triple.
inline void require_in_ckappa(const ContextPtr& ctx, const std::array<Eigen::VectorXd, 3>& d,
                              double tol = 1e-8) {
  const auto& e = ctx->kappa_coords();
  for (int a = 0; a < 3; ++a) {
    int b = (a + 1) % 3, c = (a + 2) % 3;
    Eigen::VectorXd lhs = bracket_real(ctx, d[a], d[b]);
    if ((lhs + 2.0 * d[c]).norm() > tol * std::max(1.0, d[c].norm()))
      throw NotInCkappa("triple fails [d_a,d_b] = -2 eps d_c");
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Cplx kd = ctx->killing(d[a].cast<Cplx>(), d[b].cast<Cplx>());
      Cplx ke = ctx->killing(e[a], e[b]);
      if (std::abs(kd - ke) > 1e-6 * (1.0 + std::abs(ke)))
        throw NotInCkappa("triple has wrong Killing data for C(kappa)");
    }
}

/// Model instanton D(t) = (1 + e^{2t})^{-1} (d_1, d_2, d_3).
inline InstantonPath model_instanton(const ContextPtr& ctx,
                                     const std::array<Eigen::VectorXd, 3>& d, int N, double T) {
  require_in_ckappa(ctx, d);
  InstantonPath p;
  p.ctx = ctx;
  p.grid = uniform_grid(N, T);
  for (int a = 0; a < 3; ++a) {
    p.A[a].resize(ctx->dim(), N + 1);
    for (int i = 0; i <= N; ++i) p.A[a].col(i) = d[a] / (1.0 + std::exp(2.0 * p.grid[i]));
  }
  return p;
}

inline InstantonPath model_instanton(const ContextPtr& ctx, int N, double T) {
  std::array<Eigen::VectorXd, 3> d;
  for (int a = 0; a < 3; ++a) d[a] = ctx->kappa_coords()[a].real();
  return model_instanton(ctx, d, N, T);
}

/// Per-node norm of dA_a/dt + 2 A_a + [A_b, A_c], with sixth-order stencils
/// (one-sided near the ends).
inline Eigen::VectorXd nahm_residual(const InstantonPath& p) {
  const int n = p.nodes();
  const int m = p.ctx->dim();
  if (n < 8) throw ConfigInvalid("need at least 8 nodes for the residual stencil");
  Eigen::VectorXd out(n);
  const int W = 7;
  for (int i = 0; i < n; ++i) {
    int lo = std::clamp(i - 3, 0, n - W);
    Eigen::VectorXd w = fd_weights_first(p.grid[i], p.grid.segment(lo, W));
    double norm2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      int b = (a + 1) % 3, c = (a + 2) % 3;
      Eigen::VectorXd dA = Eigen::VectorXd::Zero(m);
      for (int k = 0; k < W; ++k) dA += w[k] * p.A[a].col(lo + k);
      Eigen::VectorXd r = dA + 2.0 * p.A[a].col(i) +
                          bracket_real(p.ctx, p.A[b].col(i), p.A[c].col(i));
      norm2 += r.squaredNorm();
    }
    out[i] = std::sqrt(norm2);
  }
  return out;
}

/// (tau, u)-action: A'_a(t) = Ad_{exp u} sum_b R_{ab} A_b(t); exact on the grid.
inline InstantonPath act_rotation(const InstantonPath& p, const Eigen::Matrix3d& R,
                                  const Eigen::VectorXd& u_coords) {
  InstantonPath q;
  q.ctx = p.ctx;
  q.grid = p.grid;
  bool trivial_u = u_coords.norm() == 0.0;
  Eigen::MatrixXd Ad;
  if (!trivial_u) Ad = adjoint_matrix_real(p.ctx, u_coords);
  for (int a = 0; a < 3; ++a) {
    q.A[a].resizeLike(p.A[a]);
    q.A[a].setZero();
    for (int b = 0; b < 3; ++b)
      if (R(a, b) != 0.0) q.A[a] += R(a, b) * p.A[b];
    if (!trivial_u) q.A[a] = Ad * q.A[a];
  }
  return q;
}

/// Scaling action (lambda diamond A)(t) = A(t - log(lambda)/2), resampled
/// onto the original grid with tail extensions.
inline InstantonPath act_scale(const InstantonPath& p, double lambda,
                               double shift_limit_fraction = 0.5) {
  if (!(lambda > 0)) throw ConfigInvalid("scaling requires lambda > 0");
  double shift = 0.5 * std::log(lambda);
  double T = -p.grid[0];
  if (std::abs(shift) > shift_limit_fraction * T)
    throw GridUnderflow("scaling shift exceeds the tail-model validity window");
  InstantonPath q;
  q.ctx = p.ctx;
  q.grid = p.grid;
  for (int a = 0; a < 3; ++a) {
    q.A[a].resizeLike(p.A[a]);
    for (int i = 0; i < p.nodes(); ++i) q.A[a].col(i) = p.sample(a, p.grid[i] - shift);
  }
  return q;
}

/// Left quaternion action h . A = |h|^2 diamond A_{h^{-1} w h}.
inline InstantonPath act_quaternion(const InstantonPath& p, const Quaternion& h,
                                    double shift_limit_fraction = 0.5) {
  if (h.norm2() == 0.0) throw ZeroQuaternion("quaternion action requires h != 0");
  Eigen::Matrix3d R = spin_rotation_matrix(h);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.ctx->dim());
  InstantonPath rotated = act_rotation(p, R, zero);
  return act_scale(rotated, h.norm2(), shift_limit_fraction);
}

struct MomentTriple {
  std::array<LieElement, 3> zeta;
  double uncertainty = 0.0;

  LieElement phi(int a) const {
    // Phi_a = zeta_b + i zeta_c for (abc) cyclic, indices 1..3
    if (a < 1 || a > 3) throw IndexOutOfRange("phi index in {1,2,3}");
    int b = a % 3, c = (a + 1) % 3;
    return {zeta[0].ctx, zeta[b].coords + Cplx(0, 1) * zeta[c].coords};
  }
};

inline LieElement assemble_phi(const MomentTriple& mt, int a) { return mt.phi(a); }

/// zeta_a = lim (1/2) e^{2t} A_a(t), Richardson-extrapolated in e^{-2t}
/// over the last `nodes` grid points.
inline MomentTriple moment_extract(const InstantonPath& p, int nodes = 5) {
  const int n = p.nodes();
  const int m = p.ctx->dim();
  nodes = std::clamp(nodes, 2, n);
  const double q = std::exp(-2.0 * p.step()); // ratio of successive e^{-2t}

  MomentTriple mt;
  double unc = 0.0;
  for (int a = 0; a < 3; ++a) {
    Eigen::MatrixXd v(m, nodes);
    for (int k = 0; k < nodes; ++k) {
      int i = n - nodes + k;
      v.col(k) = 0.5 * std::exp(2.0 * p.grid[i]) * p.A[a].col(i);
    }
    double head = v.col(0).norm(), tail = v.col(nodes - 1).norm();
    if (tail > 3.0 * head + 1e-9)
      throw TailDivergence("tail values do not stabilize; path does not decay");
    // a stabilizing sequence has shrinking successive differences
    double d_first = (v.col(1) - v.col(0)).norm();
    double d_last = (v.col(nodes - 1) - v.col(nodes - 2)).norm();
    if (d_last > d_first + 1e-12 * std::max(1.0, tail))
      throw TailDivergence("tail differences grow; extrapolation unreliable");

    Eigen::VectorXd prev_level = v.col(nodes - 1);
    for (int j = 1; j < nodes; ++j) {
      double qj = std::pow(q, j);
      if (j == nodes - 1) prev_level = v.col(nodes - 1);
      for (int i = nodes - 1; i >= j; --i)
        v.col(i) = (v.col(i) - qj * v.col(i - 1)) / (1.0 - qj);
    }
    // uncertainty: difference between the last two extrapolation levels
    Eigen::MatrixXd v2(m, nodes - 1);
    {
      for (int k = 0; k < nodes - 1; ++k) {
        int i = n - nodes + k;
        v2.col(k) = 0.5 * std::exp(2.0 * p.grid[i]) * p.A[a].col(i);
      }
      for (int j = 1; j < nodes - 1; ++j) {
        double qj = std::pow(q, j);
        for (int i = nodes - 2; i >= j; --i)
          v2.col(i) = (v2.col(i) - qj * v2.col(i - 1)) / (1.0 - qj);
      }
    }
    unc = std::max(unc, (v.col(nodes - 1) - v2.col(nodes - 2)).norm());
    mt.zeta[a] = LieElement(p.ctx, v.col(nodes - 1).cast<Cplx>());
  }
  mt.uncertainty = unc;
  return mt;
}

// ---------------------------------------------------------------------------
// Boundary value solver
// ---------------------------------------------------------------------------

struct SolveResult {
  InstantonPath path;
  MomentTriple moments;
  Eigen::VectorXd u_param; // U-conjugator at the left end (exp coordinates)
  double ode_residual = 0.0;
  double boundary_residual = 0.0;
  double tail_residual = 0.0;
  double target_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

/// Gauss-Newton fit of (log-scale s, u) so that (e^s/2) Ad_{exp u}(e2 + i e3)
/// matches the target; seeds the boundary-value iteration.
struct ModelFit {
  double lambda = 1.0;
  Eigen::VectorXd u;
  double residual = 0.0;
};

inline ModelFit fit_transported_model(const ContextPtr& ctx, const VecC& target,
                                      std::uint64_t seed) {
  const int m = ctx->dim();
  const auto& kap = ctx->kappa_coords();
  VecC base = kap[1] + Cplx(0, 1) * kap[2];

  auto value = [&](double s, const Eigen::VectorXd& u) -> VecC {
    Eigen::MatrixXd Ad = adjoint_matrix_real(ctx, u);
    VecC moved = Ad.cast<Cplx>() * base;
    return (0.5 * std::exp(s)) * moved - target;
  };

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> g(0.0, 0.7);

  ModelFit best;
  best.residual = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 12; ++attempt) {
    double s = std::log(std::max(1e-8, 2.0 * target.norm() / base.norm()));
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    if (attempt > 0)
      for (int i = 0; i < m; ++i) u[i] = g(rng);

    for (int it = 0; it < 60; ++it) {
      VecC r = value(s, u);
      double rn = r.norm();
      if (rn < 1e-12 * std::max(1.0, target.norm())) break;
      // numeric Jacobian over (s, u)
      Eigen::MatrixXd J(2 * m, m + 1);
      double h = 1e-6;
      {
        VecC rp = value(s + h, u), rm = value(s - h, u);
        VecC col = (rp - rm) / (2 * h);
        J.col(0).topRows(m) = col.real();
        J.col(0).bottomRows(m) = col.imag();
      }
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXd up = u, um = u;
        up[j] += h;
        um[j] -= h;
        VecC col = (value(s, up) - value(s, um)) / (2 * h);
        J.col(j + 1).topRows(m) = col.real();
        J.col(j + 1).bottomRows(m) = col.imag();
      }
      Eigen::VectorXd rr(2 * m);
      rr.topRows(m) = r.real();
      rr.bottomRows(m) = r.imag();
      Eigen::VectorXd step =
          (J.transpose() * J + 1e-12 * Eigen::MatrixXd::Identity(m + 1, m + 1))
              .ldlt()
              .solve(-J.transpose() * rr);
      double scale = 1.0;
      for (int ls = 0; ls < 12; ++ls) {
        double s2 = s + scale * step[0];
        Eigen::VectorXd u2 = u + scale * step.tail(m);
        if (value(s2, u2).norm() < rn) {
          s = s2;
          u = u2;
          break;
        }
        scale *= 0.5;
        if (ls == 11) it = 1000; // stalled
      }
    }
    double rn = value(s, u).norm();
    if (rn < best.residual) {
      best.residual = rn;
      best.lambda = std::exp(s);
      best.u = u;
    }
    if (best.residual < 1e-10 * std::max(1.0, target.norm())) break;
  }
  return best;
}

} // namespace detail

namespace detail {

struct BvpAttempt {
  SolveResult result;
  Eigen::VectorXd x;
  bool ok = false;
  double final_residual = 0.0;
};

/// One damped Gauss-Newton (Levenberg-Marquardt) pass at the truncated
/// boundary value problem with a free U-conjugator at the left end, a
/// decaying model tail at the right end, and the holomorphic-moment target
/// Phi_1 = w as penalty rows.
///
/// Internally the iteration works on the normalized variables
/// C(t) = (1 + e^{2t}) A(t), which stay O(1) across the grid (constant for
/// model instantons), so the tail keeps full relative accuracy and the
/// normal equations stay well conditioned.  The system solved is
///   C'_a + 2 g C_a + g [C_b, C_c] = 0,  g(t) = (1 + e^{2t})^{-1}.
inline BvpAttempt solve_bvp_once(const LieElement& target, const SolverConfig& cfg,
                                 const Eigen::VectorXd* warm_start) {
  const auto& ctx = target.ctx;
  const int m = ctx->dim();
  const int N = cfg.N;
  const int n = N + 1;
  const int K = cfg.tail_nodes;

  // initial transported model
  detail::ModelFit fit = detail::fit_transported_model(ctx, target.coords, cfg.seed);
  std::array<Eigen::VectorXd, 3> d;
  Eigen::MatrixXd Ad0 = adjoint_matrix_real(ctx, fit.u);
  for (int a = 0; a < 3; ++a) d[a] = Ad0 * ctx->kappa_coords()[a].real();

  Eigen::VectorXd grid = uniform_grid(N, cfg.T);
  const double lam0 = fit.lambda;

  Eigen::VectorXd gfun(n); // (1 + e^{2t})^{-1}
  for (int i = 0; i < n; ++i) gfun[i] = 1.0 / (1.0 + std::exp(2.0 * grid[i]));

  // unknown layout: C (3 m n), u (m), eps (1), zeta~ (3 m), lamR (1)
  const int off_u = 3 * m * n;
  const int off_eps = off_u + m;
  const int off_zt = off_eps + 1;
  const int off_lamR = off_zt + 3 * m;
  const int nx = off_lamR + 1;

  Eigen::VectorXd x(nx);
  if (warm_start && warm_start->size() == nx) {
    x = *warm_start;
  } else {
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < n; ++i)
        x.segment((i * 3 + a) * m, m) =
            lam0 * d[a] * (1.0 + std::exp(2.0 * grid[i])) / (lam0 + std::exp(2.0 * grid[i]));
    x.segment(off_u, m) = fit.u;
    x[off_eps] = std::exp(-2.0 * cfg.T) / lam0;
    for (int a = 0; a < 3; ++a) x.segment(off_zt + a * m, m) = 0.5 * lam0 * d[a];
    x[off_lamR] = lam0;
    if (cfg.init_noise > 0) {
      std::mt19937_64 nrng(cfg.seed + 1);
      std::normal_distribution<double> ng(0.0, cfg.init_noise);
      for (int i = 0; i < 3 * m * n; ++i) x[i] += ng(nrng);
    }
  }

  // stencils
  const int W = 7;
  std::vector<int> stencil_lo(n);
  std::vector<Eigen::VectorXd> stencil_w(n);
  for (int i = 0; i < n; ++i) {
    int lo = std::clamp(i - 3, 0, n - W);
    stencil_lo[i] = lo;
    stencil_w[i] = fd_weights_first(grid[i], grid.segment(lo, W));
  }

  const int rows_ode = 3 * m * n;
  const int rows_bnd = 3 * m;
  const int rows_tail = 3 * m * K;
  const int rows_tgt = 2 * m;
  const int nr = rows_ode + rows_bnd + rows_tail + rows_tgt;

  const auto& e = ctx->kappa_coords();
  Eigen::VectorXd target_re = target.coords.real();
  Eigen::VectorXd target_im = target.coords.imag();
  const double left_cap = 1.0 + std::exp(-2.0 * cfg.T);

  auto residual = [&](const Eigen::VectorXd& xv) -> Eigen::VectorXd {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(nr);
    auto Ccol = [&](int a, int i) { return xv.segment((i * 3 + a) * m, m); };
    // ODE rows: C' + 2 g C + g [C_b, C_c] = 0
    for (int i = 0; i < n; ++i) {
      int lo = stencil_lo[i];
      const Eigen::VectorXd& w = stencil_w[i];
      for (int a = 0; a < 3; ++a) {
        int b = (a + 1) % 3, c = (a + 2) % 3;
        Eigen::VectorXd dC = Eigen::VectorXd::Zero(m);
        for (int k = 0; k < W; ++k) dC += w[k] * Ccol(a, lo + k);
        r.segment((i * 3 + a) * m, m) =
            cfg.weights.ode * (dC + 2.0 * gfun[i] * Ccol(a, i) +
                               gfun[i] * bracket_real(ctx, Ccol(b, i), Ccol(c, i)));
      }
    }
    // boundary rows: C(-T) = (1 + e^{-2T}) (1+eps)^{-1} Ad_{exp u} e_a
    Eigen::MatrixXd Ad = adjoint_matrix_real(ctx, xv.segment(off_u, m));
    double s = left_cap / (1.0 + xv[off_eps]);
    for (int a = 0; a < 3; ++a)
      r.segment(rows_ode + a * m, m) =
          cfg.weights.boundary * (Ccol(a, 0) - s * (Ad * e[a].real()));
    // tail rows: C_a(t_i) = 2 zt_a (1 + e^{-2t_i}) / (1 + lamR e^{-2t_i})
    double lamR = xv[off_lamR];
    for (int k = 0; k < K; ++k) {
      int i = n - K + k;
      double y = std::exp(-2.0 * grid[i]);
      double gfac = 2.0 * (1.0 + y) / (1.0 + lamR * y);
      for (int a = 0; a < 3; ++a)
        r.segment(rows_ode + rows_bnd + (k * 3 + a) * m, m) =
            cfg.weights.tail * (Ccol(a, i) - gfac * xv.segment(off_zt + a * m, m));
    }
    // target rows: zt_2 + i zt_3 = w
    r.segment(rows_ode + rows_bnd + rows_tail, m) =
        cfg.weights.target * (xv.segment(off_zt + 1 * m, m) - target_re);
    r.segment(rows_ode + rows_bnd + rows_tail + m, m) =
        cfg.weights.target * (xv.segment(off_zt + 2 * m, m) - target_im);
    return r;
  };

  auto jacobian = [&](const Eigen::VectorXd& xv) -> Eigen::SparseMatrix<double> {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(nr) * 16);
    auto Ccol = [&](int a, int i) { return xv.segment((i * 3 + a) * m, m); };
    const auto& C = ctx->structure_constants();
    for (int i = 0; i < n; ++i) {
      int lo = stencil_lo[i];
      const Eigen::VectorXd& w = stencil_w[i];
      for (int a = 0; a < 3; ++a) {
        int b = (a + 1) % 3, c = (a + 2) % 3;
        int row0 = (i * 3 + a) * m;
        for (int k = 0; k < W; ++k)
          for (int comp = 0; comp < m; ++comp)
            trip.emplace_back(row0 + comp, ((lo + k) * 3 + a) * m + comp,
                              cfg.weights.ode * w[k]);
        for (int comp = 0; comp < m; ++comp)
          trip.emplace_back(row0 + comp, (i * 3 + a) * m + comp,
                            cfg.weights.ode * 2.0 * gfun[i]);
        // bracket terms at node i
        Eigen::VectorXd Cb = Ccol(b, i), Cc = Ccol(c, i);
        for (int k = 0; k < m; ++k) {
          Eigen::VectorXd db = C[k] * Cc;             // d/dC_b
          Eigen::VectorXd dc = C[k].transpose() * Cb; // d/dC_c
          for (int comp = 0; comp < m; ++comp) {
            if (db[comp] != 0.0)
              trip.emplace_back(row0 + k, (i * 3 + b) * m + comp,
                                cfg.weights.ode * gfun[i] * db[comp]);
            if (dc[comp] != 0.0)
              trip.emplace_back(row0 + k, (i * 3 + c) * m + comp,
                                cfg.weights.ode * gfun[i] * dc[comp]);
          }
        }
      }
    }
    // boundary rows
    Eigen::VectorXd u = xv.segment(off_u, m);
    double eps = xv[off_eps];
    double s = left_cap / (1.0 + eps);
    Eigen::MatrixXd Ad = adjoint_matrix_real(ctx, u);
    for (int a = 0; a < 3; ++a) {
      int row0 = rows_ode + a * m;
      for (int comp = 0; comp < m; ++comp)
        trip.emplace_back(row0 + comp, (0 * 3 + a) * m + comp, cfg.weights.boundary);
      Eigen::VectorXd base = Ad * e[a].real();
      for (int comp = 0; comp < m; ++comp)
        trip.emplace_back(row0 + comp, off_eps,
                          cfg.weights.boundary * s / (1.0 + eps) * base[comp]);
    }
    // u columns by central differences (only boundary rows depend on u)
    {
      double h = 1e-6;
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXd up = u, um = u;
        up[j] += h;
        um[j] -= h;
        Eigen::MatrixXd Adp = adjoint_matrix_real(ctx, up);
        Eigen::MatrixXd Adm = adjoint_matrix_real(ctx, um);
        for (int a = 0; a < 3; ++a) {
          Eigen::VectorXd col = -s * ((Adp - Adm) * e[a].real()) / (2 * h);
          int row0 = rows_ode + a * m;
          for (int comp = 0; comp < m; ++comp)
            trip.emplace_back(row0 + comp, off_u + j, cfg.weights.boundary * col[comp]);
        }
      }
    }
    // tail rows
    double lamR = xv[off_lamR];
    for (int k = 0; k < K; ++k) {
      int i = n - K + k;
      double y = std::exp(-2.0 * grid[i]);
      double denom = 1.0 + lamR * y;
      double gfac = 2.0 * (1.0 + y) / denom;
      double dg_dlam = -2.0 * (1.0 + y) * y / (denom * denom);
      for (int a = 0; a < 3; ++a) {
        int row0 = rows_ode + rows_bnd + (k * 3 + a) * m;
        for (int comp = 0; comp < m; ++comp) {
          trip.emplace_back(row0 + comp, (i * 3 + a) * m + comp, cfg.weights.tail);
          trip.emplace_back(row0 + comp, off_zt + a * m + comp, -cfg.weights.tail * gfac);
          double zt = xv[off_zt + a * m + comp];
          trip.emplace_back(row0 + comp, off_lamR, -cfg.weights.tail * zt * dg_dlam);
        }
      }
    }
    // target rows
    for (int comp = 0; comp < m; ++comp) {
      trip.emplace_back(rows_ode + rows_bnd + rows_tail + comp, off_zt + 1 * m + comp,
                        cfg.weights.target);
      trip.emplace_back(rows_ode + rows_bnd + rows_tail + m + comp, off_zt + 2 * m + comp,
                        cfg.weights.target);
    }
    Eigen::SparseMatrix<double> J(nr, nx);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  };

  // Levenberg-Marquardt iteration
  double lm = cfg.damping;
  Eigen::VectorXd r = residual(x);
  double rn = r.norm();
  int it = 0;
  bool converged = false;
  for (; it < cfg.max_iter; ++it) {
    if (r.lpNorm<Eigen::Infinity>() <= cfg.tol) {
      converged = true;
      break;
    }
    Eigen::SparseMatrix<double> J = jacobian(x);
    Eigen::SparseMatrix<double> JtJ = Eigen::SparseMatrix<double>(J.transpose()) * J;
    Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    for (int inner = 0; inner < 10; ++inner) {
      Eigen::SparseMatrix<double> H = JtJ;
      for (int i = 0; i < nx; ++i) H.coeffRef(i, i) += lm * (1.0 + JtJ.coeff(i, i));
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
      if (ldlt.info() != Eigen::Success) {
        lm *= 10;
        continue;
      }
      Eigen::VectorXd step = ldlt.solve(-g);
      Eigen::VectorXd x2 = x + step;
      Eigen::VectorXd r2 = residual(x2);
      if (r2.norm() < rn) {
        x = x2;
        r = r2;
        rn = r2.norm();
        lm = std::max(1e-14, lm / 3.0);
        accepted = true;
        break;
      }
      lm *= 5.0;
    }
    if (!accepted) break;
  }
  if (!converged && r.lpNorm<Eigen::Infinity>() <= cfg.tol) converged = true;

  BvpAttempt att;
  att.x = x;
  att.ok = converged;
  att.final_residual = rn;
  SolveResult& out = att.result;
  out.iterations = it;
  out.converged = converged;
  out.path.ctx = ctx;
  out.path.grid = grid;
  for (int a = 0; a < 3; ++a) {
    out.path.A[a].resize(m, n);
    for (int i = 0; i < n; ++i)
      out.path.A[a].col(i) = gfun[i] * x.segment((i * 3 + a) * m, m);
  }
  out.u_param = x.segment(off_u, m);
  Eigen::VectorXd rfin = residual(x);
  out.ode_residual = rfin.segment(0, rows_ode).lpNorm<Eigen::Infinity>();
  out.boundary_residual = rfin.segment(rows_ode, rows_bnd).lpNorm<Eigen::Infinity>();
  out.tail_residual = rfin.segment(rows_ode + rows_bnd, rows_tail).lpNorm<Eigen::Infinity>();
  out.target_residual = rfin.segment(rows_ode + rows_bnd + rows_tail, rows_tgt)
                            .lpNorm<Eigen::Infinity>();
  if (converged) out.moments = moment_extract(out.path, cfg.extract_nodes);
  return att;
}

} // namespace detail

/// Solve the truncated boundary value problem for the instanton with
/// Phi_1 = target.  A direct attempt from the transported-model seed is
/// followed, if needed, by continuation along a family of intermediate
/// targets with warm starts.
inline SolveResult solve_bvp(const LieElement& target, const SolverConfig& cfg) {
  const auto& ctx = target.ctx;
  if (!target.is_real(1e-8)) throw TargetNotReal("target must satisfy nu(w) = w");
  if (!is_nilpotent(target, 1e-8)) throw TargetNotNilpotent("target must be nilpotent");

  detail::BvpAttempt att = detail::solve_bvp_once(target, cfg, nullptr);
  if (att.ok) return att.result;

  // continuation from the image of the fitted transported model toward the
  // requested target
  detail::ModelFit fit = detail::fit_transported_model(ctx, target.coords, cfg.seed);
  Eigen::MatrixXd Ad0 = adjoint_matrix_real(ctx, fit.u);
  const auto& e = ctx->kappa_coords();
  VecC proxy = 0.5 * fit.lambda *
               (Ad0.cast<Cplx>() * (e[1] + Cplx(0, 1) * e[2]));
  Eigen::VectorXd warm = att.x;
  for (double s : {0.25, 0.5, 0.75, 1.0}) {
    VecC mix = (1.0 - s) * proxy + s * target.coords;
    LieElement stage(ctx, mix);
    SolverConfig scfg = cfg;
    scfg.init_noise = 0.0;
    if (s < 1.0) {
      scfg.tol = std::max(cfg.tol, 1e-5);
      scfg.max_iter = std::max(10, cfg.max_iter / 2);
    }
    detail::BvpAttempt stage_att = detail::solve_bvp_once(stage, scfg, &warm);
    warm = stage_att.x;
    if (s == 1.0) {
      if (stage_att.ok) return stage_att.result;
      throw NoConvergence("boundary value iteration stalled at residual " +
                          std::to_string(stage_att.final_residual));
    }
  }
  throw NoConvergence("continuation failed"); // unreachable
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline nlohmann::json path_to_json(const InstantonPath& p) {
  nlohmann::json j;
  j["context"] = p.ctx->name();
  j["grid"] = std::vector<double>(p.grid.data(), p.grid.data() + p.grid.size());
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < p.nodes(); ++i) {
    nlohmann::json triple = nlohmann::json::array();
    for (int a = 0; a < 3; ++a) {
      nlohmann::json coords = nlohmann::json::array();
      for (int k = 0; k < p.ctx->dim(); ++k) coords.push_back(p.A[a](k, i));
      triple.push_back(coords);
    }
    nodes.push_back(triple);
  }
  j["A"] = nodes;
  Eigen::VectorXd res = nahm_residual(p);
  j["residuals"] = {{"ode_max", res.lpNorm<Eigen::Infinity>()},
                    {"ode_mean", res.mean()}};
  return j;
}

inline InstantonPath path_from_json(const ContextPtr& ctx, const nlohmann::json& j) {
  InstantonPath p;
  p.ctx = ctx;
  std::vector<double> g = j.at("grid").get<std::vector<double>>();
  p.grid = Eigen::Map<Eigen::VectorXd>(g.data(), g.size());
  const auto& nodes = j.at("A");
  const int n = static_cast<int>(nodes.size());
  const int m = ctx->dim();
  if (n != static_cast<int>(g.size())) throw ConfigInvalid("grid/value size mismatch");
  for (int a = 0; a < 3; ++a) p.A[a].resize(m, n);
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < 3; ++a)
      for (int k = 0; k < m; ++k) p.A[a](k, i) = nodes[i][a][k].get<double>();
  return p;
}

} // namespace nilgeo

#endif
