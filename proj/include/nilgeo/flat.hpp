#ifndef NILGEO_FLAT_HPP
#define NILGEO_FLAT_HPP

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "nilgeo/quaternion.hpp"
#include "nilgeo/report.hpp"

namespace nilgeo {

/// Flat hyperkaehler space H^n = R^{4n}, coordinates x^r_s ordered
/// (x^0_1, x^1_1, x^2_1, x^3_1, x^0_2, ...).  All tensors are constant
/// coefficient; the verification deliberately re-derives the cone axioms by
/// finite differences so the flat model calibrates the curved-case machinery.
class FlatModel {
public:
  explicit FlatModel(int n) : m_n(n) {
    for (int a = 1; a <= 3; ++a) {
      m_J[a - 1] = Eigen::MatrixXd::Zero(4 * n, 4 * n);
      m_W[a - 1] = Eigen::MatrixXd::Zero(4 * n, 4 * n);
      int b = a % 3 + 1, c = b % 3 + 1;
      for (int s = 0; s < n; ++s) {
        int o = 4 * s;
        // J_a: d/dx^0 -> d/dx^a, d/dx^b -> d/dx^c (and squares to -1)
        m_J[a - 1](o + a, o + 0) = 1;
        m_J[a - 1](o + 0, o + a) = -1;
        m_J[a - 1](o + c, o + b) = 1;
        m_J[a - 1](o + b, o + c) = -1;
        // omega_a = dx^0 ^ dx^a + dx^b ^ dx^c
        m_W[a - 1](o + 0, o + a) = 1;
        m_W[a - 1](o + a, o + 0) = -1;
        m_W[a - 1](o + b, o + c) = 1;
        m_W[a - 1](o + c, o + b) = -1;
      }
    }
  }

  int n() const { return m_n; }
  int dim() const { return 4 * m_n; }

  const Eigen::MatrixXd& J(int a) const {
    if (a < 1 || a > 3) throw IndexOutOfRange("complex structure index in {1,2,3}");
    return m_J[a - 1];
  }

  Eigen::MatrixXd J(const SphereLabel& q) const {
    return q.a * m_J[0] + q.b * m_J[1] + q.c * m_J[2];
  }

  Eigen::VectorXd apply_J(int a, const Eigen::VectorXd& v) const { return J(a) * v; }
  Eigen::VectorXd apply_J(const SphereLabel& q, const Eigen::VectorXd& v) const {
    return J(q) * v;
  }

  double omega(int a, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    if (a < 1 || a > 3) throw IndexOutOfRange("form index in {1,2,3}");
    return u.dot(m_W[a - 1] * v);
  }

  double omega(const SphereLabel& q, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return q.a * omega(1, u, v) + q.b * omega(2, u, v) + q.c * omega(3, u, v);
  }

  double metric(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const { return u.dot(v); }

  /// Omega_a = omega_b + i omega_c for (abc) cyclic.
  std::complex<double> holomorphic_form(int a, const Eigen::VectorXd& u,
                                        const Eigen::VectorXd& v) const {
    int b = a % 3 + 1, c = b % 3 + 1;
    return {omega(b, u, v), omega(c, u, v)};
  }

  double potential_rho(const Eigen::VectorXd& p) const { return 0.5 * p.squaredNorm(); }

  /// Euler field and its three rotations theta_a = J_a eta at p.
  struct ConeFields {
    Eigen::VectorXd eta;
    std::array<Eigen::VectorXd, 3> theta;
  };

  ConeFields cone_fields(const Eigen::VectorXd& p) const {
    ConeFields f;
    f.eta = p;
    for (int a = 1; a <= 3; ++a) f.theta[a - 1] = J(a) * p;
    return f;
  }

  /// Right multiplication by a quaternion on H^n (commutes with the left
  /// J_1, J_2, J_3 action; isometric for unit norm).
  Eigen::MatrixXd right_mult(const Quaternion& q) const {
    Eigen::Matrix4d R;
    // (w + xi + yj + zk)(qw + qxi + qyj + qzk): columns are images of 1,i,j,k.
    R << q.w, -q.x, -q.y, -q.z,
         q.x, q.w, q.z, -q.y,
         q.y, -q.z, q.w, q.x,
         q.z, q.y, -q.x, q.w;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim(), dim());
    for (int s = 0; s < m_n; ++s) M.block(4 * s, 4 * s, 4, 4) = R;
    return M;
  }

  /// Finite-difference check of the cone structure at `samples` random points
  /// with `labels` sphere labels: weight-2 Lie derivatives, rotation rules,
  /// and dd^c_q rho = omega_q.  Exact flows are used (scaling and the
  /// one-parameter rotation groups exp(t J_a)).
  VerificationReport verify_cone_axioms(int samples, double h, int labels,
                                        std::uint64_t seed) const {
    VerificationReport rep;
    rep.suite = "flat-cone-axioms";
    rep.fixture = "H^" + std::to_string(m_n);
    rep.seed = seed;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_vec = [&]() {
      Eigen::VectorXd v(dim());
      for (int i = 0; i < dim(); ++i) v[i] = gauss(rng);
      return v;
    };

    double r_weight_eta = 0, r_rot = 0, r_metric = 0, r_ddc = 0, r_theta_same = 0;
    double r_weight_fit = 0, r_euler_grad = 0, r_ddc_shift = 0;

    auto lie_derivative_omega = [&](int a, const Eigen::MatrixXd& flow_gen, double weight_h,
                                    int b, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
      // (L_X omega_b)(u,v) by central difference of pullbacks along exp(t X)
      Eigen::MatrixXd Fp, Fm;
      if (a == 0) { // eta: flow is e^t * id
        double ep = std::exp(weight_h), em = std::exp(-weight_h);
        Fp = ep * Eigen::MatrixXd::Identity(dim(), dim());
        Fm = em * Eigen::MatrixXd::Identity(dim(), dim());
      } else { // theta_a: flow exp(t J_a) = cos t + sin t J_a
        Fp = std::cos(weight_h) * Eigen::MatrixXd::Identity(dim(), dim()) +
             std::sin(weight_h) * flow_gen;
        Fm = std::cos(weight_h) * Eigen::MatrixXd::Identity(dim(), dim()) -
             std::sin(weight_h) * flow_gen;
      }
      double wp = omega(b, (Fp * u).eval(), (Fp * v).eval());
      double wm = omega(b, (Fm * u).eval(), (Fm * v).eval());
      return (wp - wm) / (2 * weight_h);
    };

    auto labels_list = fibonacci_sphere(labels, seed);

    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd u = rand_vec(), v = rand_vec(), p = rand_vec();
      while (p.norm() < 0.2) p = rand_vec();

      // L_eta omega_a = 2 omega_a; L_eta g = 2 g
      for (int a = 1; a <= 3; ++a) {
        double ld = lie_derivative_omega(0, {}, h, a, u, v);
        r_weight_eta = std::max(r_weight_eta, std::abs(ld - 2 * omega(a, u, v)));
      }
      {
        double gp = std::exp(2 * h) * metric(u, v);
        double gm = std::exp(-2 * h) * metric(u, v);
        double ld = (gp - gm) / (2 * h);
        r_metric = std::max(r_metric, std::abs(ld - 2 * metric(u, v)));
      }

      // L_theta_a omega_b = -2 eps_abc omega_c (zero when a = b)
      for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b) {
          double ld = lie_derivative_omega(a, m_J[a - 1], h, b, u, v);
          double expect = 0.0;
          for (int c = 1; c <= 3; ++c)
            if (epsilon(a, b, c) != 0) expect += -2.0 * epsilon(a, b, c) * omega(c, u, v);
          if (a == b)
            r_theta_same = std::max(r_theta_same, std::abs(ld));
          else
            r_rot = std::max(r_rot, std::abs(ld - expect));
        }

      // eta . g = d rho by finite-difference gradient
      {
        Eigen::VectorXd grad(dim());
        for (int i = 0; i < dim(); ++i) {
          Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
          e[i] = h;
          grad[i] = (potential_rho(p + e) - potential_rho(p - e)) / (2 * h);
        }
        r_euler_grad = std::max(r_euler_grad, (grad - p).norm());
      }

      // dd^c_q rho = omega_q on random labels, via FD Hessian:
      // dd^c rho(u,v) = -(1/2) [u^T H J_q v - v^T H J_q u]
      for (const auto& q : labels_list) {
        Eigen::MatrixXd Jq = J(q);
        auto ddc = [&](double(FlatModel::*field)(const Eigen::VectorXd&) const, double shift) {
          Eigen::VectorXd Ju = Jq * u, Jv = Jq * v;
          auto dir2 = [&](const Eigen::VectorXd& d1, const Eigen::VectorXd& d2) {
            double fpp = (this->*field)(p + h * d1 + h * d2) + shift;
            double fpm = (this->*field)(p + h * d1 - h * d2) + shift;
            double fmp = (this->*field)(p - h * d1 + h * d2) + shift;
            double fmm = (this->*field)(p - h * d1 - h * d2) + shift;
            return (fpp - fpm - fmp + fmm) / (4 * h * h);
          };
          return -0.5 * (dir2(u, Jv) - dir2(v, Ju));
        };
        double val = ddc(&FlatModel::potential_rho, 0.0);
        r_ddc = std::max(r_ddc, std::abs(val - omega(q, u, v)));
        double val_shift = ddc(&FlatModel::potential_rho, 3.25);
        r_ddc_shift = std::max(r_ddc_shift, std::abs(val_shift - val));
      }
    }

    // least-squares fit of k in L_eta omega_a = k omega_a from FD pullback
    // derivatives, Richardson-extrapolated across two step sizes
    {
      auto fit_at = [&](double hw, std::mt19937_64& gen) {
        std::normal_distribution<double> g2(0.0, 1.0);
        auto rv = [&]() {
          Eigen::VectorXd v(dim());
          for (int i = 0; i < dim(); ++i) v[i] = g2(gen);
          return v;
        };
        double num = 0.0, den = 0.0;
        for (int s = 0; s < std::max(8, samples / 4); ++s) {
          Eigen::VectorXd u = rv(), v = rv();
          for (int a = 1; a <= 3; ++a) {
            double w0 = omega(a, u, v);
            double wp = omega(a, (std::exp(hw) * u).eval(), (std::exp(hw) * v).eval());
            double wm = omega(a, (std::exp(-hw) * u).eval(), (std::exp(-hw) * v).eval());
            double ld = (wp - wm) / (2 * hw);
            num += ld * w0;
            den += w0 * w0;
          }
        }
        return num / den;
      };
      std::mt19937_64 g1(seed + 17), g1b(seed + 17);
      double k_h = fit_at(1e-3, g1);
      double k_h2 = fit_at(5e-4, g1b);
      double k = (4.0 * k_h2 - k_h) / 3.0; // Richardson: kills the O(h^2) term
      r_weight_fit = std::abs(k - 2.0);
    }

    rep.add("lie_eta_omega_weight2", anchor::cone_weight, r_weight_eta, 1e-6);
    rep.add("lie_theta_rotation", anchor::cone_rotation, r_rot, 1e-6);
    rep.add("lie_theta_fixes_own_form", anchor::cone_rotation, r_theta_same, 1e-6);
    rep.add("lie_eta_metric_weight2", anchor::cone_metric, r_metric, 1e-6);
    rep.add("ddc_rho_equals_omega", anchor::hk_potential, r_ddc, 1e-6);
    rep.add("ddc_constant_shift_invariant", anchor::hk_potential, r_ddc_shift, 1e-6);
    rep.add("euler_field_gradient", anchor::euler_gradient, r_euler_grad, 1e-6);
    rep.add("weight_fit_k_equals_2", anchor::cone_weight, r_weight_fit, 1e-8);
    return rep;
  }

private:
  int m_n;
  std::array<Eigen::MatrixXd, 3> m_J;
  std::array<Eigen::MatrixXd, 3> m_W;
};

} // namespace nilgeo

#endif
