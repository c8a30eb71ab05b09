#include "utc/stability.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "utc/errors.hpp"

namespace utc {

ClosedLoop build_closed_loop(const LtiPlant& plant, const Mat& K, int N) {
    const int n = plant.state_dim();
    const int m = plant.input_dim();
    const int p = plant.output_dim();
    if (K.rows() != m || K.cols() != p) {
        throw Error("build_closed_loop: K must be " + std::to_string(m) + "x" +
                    std::to_string(p));
    }

    ClosedLoop cl{Mat(), K, unroll(plant.A, N, 1.0), plant, N};
    const Mat& F = cl.unroll.F;
    const Mat& G = cl.unroll.G;
    const Mat& A = plant.A;
    const Mat& B = plant.B;
    const Mat KC = K * plant.C;

    cl.Z.resize(n + m, n + m);
    cl.Z.topLeftCorner(n, n) = A - B * KC * F;
    cl.Z.topRightCorner(n, m) = (Mat::Identity(n, n) - B * KC * G) * B;
    cl.Z.bottomLeftCorner(m, n) = -KC * F;
    cl.Z.bottomRightCorner(m, m) = Mat::Identity(m, m) - KC * G * B;
    return cl;
}

double radius_bound(double D_bar, double Z_norm, double p_max) {
    return D_bar * (Z_norm * p_max + std::sqrt(Z_norm * Z_norm * p_max * p_max + p_max));
}

StabilityCertificate certify(const ClosedLoop& cl, double f_bar) {
    if (f_bar < 0.0) throw Error("certify: f_bar must be >= 0");

    StabilityCertificate cert;
    cert.spectral_radius = utc::spectral_radius(cl.Z);
    cert.Z_norm = spectral_norm(cl.Z);
    // cl.unroll was built with unit bound, so g_bound is the bare norm sum.
    cert.g_bar = f_bar * cl.unroll.g_bound;

    const Mat BKC = cl.plant.B * cl.K_fixed * cl.plant.C;
    const Mat KC = cl.K_fixed * cl.plant.C;
    const double dx = f_bar + spectral_norm(BKC) * cert.g_bar;
    const double dv = spectral_norm(KC) * cert.g_bar;
    cert.D_bar = std::sqrt(dx * dx + dv * dv);

    if (cert.spectral_radius >= 1.0 - kSchurMargin) {
        cert.schur = false;
        return cert;
    }

    cert.schur = true;
    const int d = static_cast<int>(cl.Z.rows());
    cert.P = solve_stein(cl.Z, Mat::Identity(d, d));
    const auto [lo, hi] = eig_extrema_sym(cert.P);
    cert.p_min = lo;
    cert.p_max = hi;
    cert.stein_residual =
        (cl.Z.transpose() * cert.P * cl.Z - cert.P + Mat::Identity(d, d)).norm();
    cert.radius = radius_bound(cert.D_bar, cert.Z_norm, cert.p_max);
    return cert;
}

std::string format_certificate(const StabilityCertificate& cert) {
    std::ostringstream out;
    out.precision(12);
    auto line = [&out](const char* key, auto value) { out << key << " = " << value << "\n"; };
    line("schur", cert.schur ? "true" : "false");
    line("spectral_radius", cert.spectral_radius);
    line("Z_norm", cert.Z_norm);
    line("g_bar", cert.g_bar);
    line("D_bar", cert.D_bar);
    if (cert.schur) {
        line("p_min", cert.p_min);
        line("p_max", cert.p_max);
        line("R", *cert.radius);
        line("stein_residual", cert.stein_residual);
    } else {
        line("p_min", "none");
        line("p_max", "none");
        line("R", "none");
        line("stein_residual", "none");
    }
    return out.str();
}

FalsifyReport falsify(const StabilityCertificate& cert, const ClosedLoop& cl,
                      const BoundedNonlinearity& f, const FalsifyOptions& opts) {
    if (!cert.schur) throw Error("falsify requires a Schur-stable certificate");
    if (opts.trials < 1 || opts.steps < 1) {
        throw Error("falsify: trials and steps must be >= 1");
    }
    if (!(opts.tail_fraction > 0.0 && opts.tail_fraction <= 1.0)) {
        throw Error("falsify: tail_fraction must lie in (0,1]");
    }

    const int n = cl.plant.state_dim();
    const int m = cl.plant.input_dim();
    const int N = cl.prediction_steps;
    const Mat& A = cl.plant.A;
    const Mat& B = cl.plant.B;
    const Mat BKC = B * cl.K_fixed * cl.plant.C;
    const Mat KC = cl.K_fixed * cl.plant.C;
    const double R = *cert.radius;

    // Powers of A for the g(x, N) sum: powA[j] = A^j, j = 0..N-1.
    std::vector<Mat> powA;
    powA.reserve(N);
    powA.push_back(Mat::Identity(n, n));
    for (int j = 1; j < N; ++j) powA.push_back(A * powA.back());

    FalsifyReport rep;
    rep.trials = opts.trials;
    rep.steps = opts.steps;
    rep.radius = R;

    const int tail_len =
        std::max(1, static_cast<int>(std::ceil(opts.tail_fraction * opts.steps)));
    const int tail_start = opts.steps - tail_len + 1;  // indices 1..steps hold a_1..a_steps

    for (int trial = 0; trial < opts.trials; ++trial) {
        // Independent per-trial stream so trials stay order-free.
        std::mt19937_64 rng(opts.seed ^ (0x9E3779B97F4A7C15ULL * (trial + 1)));
        std::uniform_real_distribution<double> box(-opts.x0_halfwidth, opts.x0_halfwidth);

        Vec a(n + m);
        for (int i = 0; i < a.size(); ++i) a(i) = box(rng);

        bool entered = a.norm() <= R;
        double tail_max = 0.0;

        for (int k = 0; k < opts.steps; ++k) {
            const Vec x = a.head(n);
            const Vec v = a.tail(m);

            // g(x_k, N): open-loop recursion under the held input v.
            Vec g = Vec::Zero(n);
            Vec xt = x;
            for (int i = 0; i < N; ++i) {
                const Vec fx = f(xt);
                g += powA[N - 1 - i] * fx;
                if (i + 1 < N) xt = A * xt + B * v + fx;
            }

            Vec D(n + m);
            D.head(n) = f(x) - BKC * g;
            D.tail(m) = -KC * g;
            rep.max_d_norm = std::max(rep.max_d_norm, D.norm());
            rep.max_g_norm = std::max(rep.max_g_norm, g.norm());

            const Vec a_next = cl.Z * a + D;
            if (a.norm() > R + opts.ball_tol) {
                const double Vk = a.dot(cert.P * a);
                const double Vk1 = a_next.dot(cert.P * a_next);
                if (!(Vk1 < Vk)) ++rep.lyapunov_violations;
            }
            a = a_next;
            if (a.norm() <= R + opts.ball_tol) entered = true;
            if (k + 1 >= tail_start) tail_max = std::max(tail_max, a.norm());
        }

        rep.max_tail_norm = std::max(rep.max_tail_norm, tail_max);
        if (tail_max > R + opts.ball_tol) ++rep.tail_violations;
        if (!entered) rep.all_entered_ball = false;
    }

    // The bound chain is a theorem for exact arithmetic; allow only
    // rounding-level slack on the inequalities.
    const double slack = 1.0 + 1e-9;
    rep.passed = rep.tail_violations == 0 && rep.lyapunov_violations == 0 &&
                 rep.max_d_norm <= cert.D_bar * slack + 1e-15 &&
                 rep.max_g_norm <= cert.g_bar * slack + 1e-15;
    return rep;
}

}  // namespace utc
