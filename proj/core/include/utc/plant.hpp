#pragma once

#include <functional>
#include <string>
#include <utility>

#include "utc/linalg.hpp"

namespace utc {

/// Pitch guard for the Euler-rate map; |theta| must stay below
/// pi/2 - kThetaGuard or GimbalLockError is raised.
inline constexpr double kThetaGuard = 1e-3;

/// A state nonlinearity with a known global norm bound:
/// ||evaluate(x)||_2 <= bound for all x.
struct BoundedNonlinearity {
    std::function<Vec(const Vec&)> evaluate;  // empty means identically zero
    double bound = 0.0;
    std::string description;

    /// Evaluates f(x); an empty function is the zero map.
    Vec operator()(const Vec& x) const {
        if (!evaluate) return Vec::Zero(x.size());
        return evaluate(x);
    }
};

/// Componentwise sinusoid f_i(x) = gain_i * sin(freq_i * x_i), with the
/// exact global bound ||gain||_2.
BoundedNonlinearity sinusoidal_nonlinearity(const Vec& gain, const Vec& freq);

/// Generic discrete-time plant interface: a state transition map, an
/// output map, and the three dimensions. Evaluation maps must be pure.
struct NonlinearPlant {
    int n = 0;  // state dimension
    int m = 0;  // input dimension
    int p = 0;  // output dimension
    std::function<Vec(const Vec&, const Vec&)> step;
    std::function<Vec(const Vec&)> output;
};

/// Discrete-time linear plant augmented with a bounded state nonlinearity:
///   x_{k+1} = A x_k + B u_k + f(x_k),   y_k = C x_k.
struct LtiPlant {
    Mat A;  // n x n
    Mat B;  // n x m
    Mat C;  // p x n
    BoundedNonlinearity f;
    double dt = 0.0;  // discretization step metadata; 0 when natively discrete

    LtiPlant(Mat A_, Mat B_, Mat C_, BoundedNonlinearity f_ = {}, double dt_ = 0.0);

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }
    int output_dim() const { return static_cast<int>(C.rows()); }

    Vec step(const Vec& x, const Vec& u) const;
    Vec output(const Vec& x) const;

    /// Adapts to the generic plant interface.
    NonlinearPlant as_nonlinear() const;
};

/// Forward-Euler discretization of continuous-time (A_c, B_c):
/// returns (I + dt*A_c, dt*B_c). Throws NonPositiveStepError for dt <= 0.
std::pair<Mat, Mat> euler_discretize(const Mat& A_c, const Mat& B_c, double dt);

/// Continuous-time matrices of the ADMIRE attitude subsystem
/// (roll/pitch/yaw rates driven by four control surfaces).
std::pair<Mat, Mat> admire_matrices();

/// ADMIRE attitude model discretized with step dt, full-state measurement,
/// and a per-component sinusoidal perturbation beta_i*sin(alpha_i*x_i)
/// scaled by dt, consistent with Euler discretization of a continuous
/// disturbance. The bound is dt*||beta||_2 (exact for sinusoids).
LtiPlant make_admire(double dt, const Vec& beta, const Vec& alpha);

/// Inertia and rotor constants of the quadcopter attitude model.
/// All strictly positive.
struct QuadcopterParams {
    double I_xx = 4.856e-3;  // kg m^2
    double I_yy = 4.856e-3;  // kg m^2
    double I_zz = 8.801e-3;  // kg m^2
    double J_r = 3.357e-5;   // rotor inertia, kg m^2
    double k_t = 2.98e-6;    // thrust coefficient, N s^2
    double k_b = 1.14e-7;    // drag/torque coefficient, N m s^2
    double L = 0.225;        // arm length, m
    double dt = 0.01;        // integration step, s

    void validate() const;
};

/// Body angular acceleration [pdot, qdot, rdot] for body rates v = [p,q,r]
/// and rotor speeds u = [w1..w4]: rigid-body bilinear terms, the rotor
/// gyroscopic term with relative speed w_r = -w1+w2-w3+w4, and body torques
///   tau_phi   = L k_t (-w2^2 + w4^2)
///   tau_theta = L k_t (-w1^2 + w3^2)
///   tau_psi   = k_b (-w1^2 + w2^2 - w3^2 + w4^2).
Vec quad_body_rates_deriv(const Vec& v, const Vec& u, const QuadcopterParams& params);

/// Euler-angle rates zdot = R(phi,theta,psi) v mapping body rates into the
/// inertial frame. Throws GimbalLockError when |theta| >= pi/2 - kThetaGuard.
Vec quad_euler_rates(const Vec& z, const Vec& v);

/// Quadcopter attitude plant: state x = [z; v] (Euler angles and body
/// rates, n=6), input u = rotor speeds (m=4), output y = v (p=3).
/// One step is a forward-Euler integration of the attitude dynamics
/// over params.dt.
NonlinearPlant make_quadcopter(const QuadcopterParams& params);

}  // namespace utc
