#include "utc/plant.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace utc {

BoundedNonlinearity sinusoidal_nonlinearity(const Vec& gain, const Vec& freq) {
    if (gain.size() != freq.size()) {
        throw Error("sinusoidal_nonlinearity: gain and freq must have equal length");
    }
    BoundedNonlinearity f;
    const Vec g = gain;
    const Vec w = freq;
    f.evaluate = [g, w](const Vec& x) {
        Vec out(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = g(i) * std::sin(w(i) * x(i));
        return out;
    };
    f.bound = gain.norm();
    f.description = "componentwise sinusoid";
    return f;
}

LtiPlant::LtiPlant(Mat A_, Mat B_, Mat C_, BoundedNonlinearity f_, double dt_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), f(std::move(f_)), dt(dt_) {
    require_finite(A, "LtiPlant A");
    require_finite(B, "LtiPlant B");
    require_finite(C, "LtiPlant C");
    if (A.rows() != A.cols()) throw Error("LtiPlant: A must be square");
    if (B.rows() != A.rows()) throw Error("LtiPlant: B row count must match the state dimension");
    if (C.cols() != A.rows()) throw Error("LtiPlant: C column count must match the state dimension");
    if (f.bound < 0.0) throw Error("LtiPlant: nonlinearity bound must be nonnegative");
}

Vec LtiPlant::step(const Vec& x, const Vec& u) const { return A * x + B * u + f(x); }

Vec LtiPlant::output(const Vec& x) const { return C * x; }

NonlinearPlant LtiPlant::as_nonlinear() const {
    NonlinearPlant plant;
    plant.n = state_dim();
    plant.m = input_dim();
    plant.p = output_dim();
    LtiPlant self = *this;
    plant.step = [self](const Vec& x, const Vec& u) { return self.step(x, u); };
    plant.output = [self](const Vec& x) { return self.output(x); };
    return plant;
}

std::pair<Mat, Mat> euler_discretize(const Mat& A_c, const Mat& B_c, double dt) {
    if (!(dt > 0.0)) {
        throw NonPositiveStepError("euler_discretize: dt must be > 0, got " + std::to_string(dt));
    }
    require_finite(A_c, "euler_discretize A_c");
    require_finite(B_c, "euler_discretize B_c");
    if (A_c.rows() != A_c.cols()) throw Error("euler_discretize: A_c must be square");
    return {Mat::Identity(A_c.rows(), A_c.cols()) + dt * A_c, dt * B_c};
}

std::pair<Mat, Mat> admire_matrices() {
    Mat A(3, 3);
    A << -0.9967, 0.0, 0.6176,
          0.0, -0.5057, 0.0,
         -0.0939, 0.0, -0.2127;
    Mat B(3, 4);
    B << 0.0, -4.2423, 4.2423, 1.4871,
         1.6532, -1.2735, -1.2735, 0.0024,
         0.0, -0.2805, 0.2805, -0.8823;
    return {A, B};
}

LtiPlant make_admire(double dt, const Vec& beta, const Vec& alpha) {
    if (!(dt > 0.0)) {
        throw NonPositiveStepError("make_admire: dt must be > 0, got " + std::to_string(dt));
    }
    if (beta.size() != 3 || alpha.size() != 3) {
        throw Error("make_admire: beta and alpha must have length 3");
    }
    const auto [A_c, B_c] = admire_matrices();
    const auto [A, B] = euler_discretize(A_c, B_c, dt);
    BoundedNonlinearity f = sinusoidal_nonlinearity(dt * beta, alpha);
    f.description = "dt-scaled sinusoidal state perturbation";
    return LtiPlant(A, B, Mat::Identity(3, 3), std::move(f), dt);
}

void QuadcopterParams::validate() const {
    const auto check = [](double v, const char* name) {
        if (!(v > 0.0)) {
            throw Error(std::string("QuadcopterParams: ") + name + " must be > 0");
        }
    };
    check(I_xx, "I_xx");
    check(I_yy, "I_yy");
    check(I_zz, "I_zz");
    check(J_r, "J_r");
    check(k_t, "k_t");
    check(k_b, "k_b");
    check(L, "L");
    check(dt, "dt");
}

Vec quad_body_rates_deriv(const Vec& v, const Vec& u, const QuadcopterParams& params) {
    params.validate();
    if (v.size() != 3) throw Error("quad_body_rates_deriv: v must have length 3");
    if (u.size() != 4) throw Error("quad_body_rates_deriv: u must have length 4");

    const double p = v(0), q = v(1), r = v(2);
    const double w1 = u(0), w2 = u(1), w3 = u(2), w4 = u(3);

    const double w_r = -w1 + w2 - w3 + w4;
    const double tau_phi = params.L * params.k_t * (-w2 * w2 + w4 * w4);
    const double tau_theta = params.L * params.k_t * (-w1 * w1 + w3 * w3);
    const double tau_psi = params.k_b * (-w1 * w1 + w2 * w2 - w3 * w3 + w4 * w4);

    Vec dv(3);
    dv(0) = (params.I_yy - params.I_zz) * q * r / params.I_xx -
            params.J_r * (q / params.I_xx) * w_r + tau_phi / params.I_xx;
    dv(1) = (params.I_zz - params.I_xx) * p * r / params.I_yy -
            params.J_r * (-p / params.I_yy) * w_r + tau_theta / params.I_yy;
    dv(2) = (params.I_xx - params.I_yy) * p * q / params.I_zz + tau_psi / params.I_zz;
    return dv;
}

Vec quad_euler_rates(const Vec& z, const Vec& v) {
    if (z.size() != 3 || v.size() != 3) {
        throw Error("quad_euler_rates: z and v must have length 3");
    }
    const double phi = z(0), theta = z(1);
    if (std::abs(theta) >= std::numbers::pi / 2.0 - kThetaGuard) {
        throw GimbalLockError("quad_euler_rates: |pitch| = " + std::to_string(std::abs(theta)) +
                              " too close to pi/2");
    }
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double tt = std::tan(theta), ct = std::cos(theta);

    Mat R(3, 3);
    R << 1.0, sp * tt, cp * tt,
         0.0, cp, -sp,
         0.0, sp / ct, cp / ct;
    return R * v;
}

NonlinearPlant make_quadcopter(const QuadcopterParams& params) {
    params.validate();
    NonlinearPlant plant;
    plant.n = 6;
    plant.m = 4;
    plant.p = 3;
    const QuadcopterParams prm = params;
    plant.step = [prm](const Vec& x, const Vec& u) {
        if (x.size() != 6) throw Error("quadcopter step: state must have length 6");
        if (u.size() != 4) throw Error("quadcopter step: input must have length 4");
        const Vec z = x.head(3);
        const Vec v = x.tail(3);
        Vec next(6);
        next.head(3) = z + prm.dt * quad_euler_rates(z, v);
        next.tail(3) = v + prm.dt * quad_body_rates_deriv(v, u, prm);
        return next;
    };
    plant.output = [](const Vec& x) {
        if (x.size() != 6) throw Error("quadcopter output: state must have length 6");
        return Vec(x.tail(3));
    };
    return plant;
}

}  // namespace utc
