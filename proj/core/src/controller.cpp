#include "utc/controller.hpp"

#include <cmath>
#include <string>

#include "utc/errors.hpp"

namespace utc {

void UtcParams::validate(int m, int p) const {
    if (prediction_steps < 1) {
        throw ConfigError("prediction_steps must be >= 1, got " +
                          std::to_string(prediction_steps));
    }
    if (!(w0 > 0.0 && w0 < 1.0)) {
        throw ConfigError("W0 must lie in (0,1)");
    }
    if (Q_u.rows() != m || Q_u.cols() != m) {
        throw ConfigError("Q_u must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    if (P_err.rows() != p || P_err.cols() != p) {
        throw ConfigError("P_err must be " + std::to_string(p) + "x" + std::to_string(p));
    }
    if (!Q_u.isApprox(Q_u.transpose(), 0.0) &&
        (Q_u - Q_u.transpose()).cwiseAbs().maxCoeff() > default_sym_tol(Q_u)) {
        throw NotSymmetricError("Q_u must be symmetric");
    }
    if ((P_err - P_err.transpose()).cwiseAbs().maxCoeff() > default_sym_tol(P_err)) {
        throw NotSymmetricError("P_err must be symmetric");
    }
    if (sigma_scale_dim && *sigma_scale_dim < 1) {
        throw ConfigError("sigma_scale_dim must be >= 1");
    }
    if (propagation == PropagationMode::feedback && !feedback) {
        throw ConfigError("feedback propagation mode requires a feedback law");
    }
    if (input_bounds) {
        const auto& [lo, hi] = *input_bounds;
        if (lo.size() != m || hi.size() != m) {
            throw ConfigError("input bounds must have dimension " + std::to_string(m));
        }
        if ((hi - lo).minCoeff() < 0.0) {
            throw ConfigError("input bounds must satisfy lo <= hi componentwise");
        }
    }
    if (psd_clamp_budget < 0.0) {
        throw ConfigError("psd_clamp_budget must be >= 0");
    }
}

NStepUnroll unroll(const Mat& A, int N, double f_bar) {
    if (N < 1) throw NonPositiveStepError("prediction horizon must be >= 1");
    if (A.rows() != A.cols()) throw Error("unroll: A must be square");

    const int n = static_cast<int>(A.rows());
    NStepUnroll out;
    out.F = Mat::Identity(n, n);
    out.G = Mat::Zero(n, n);
    out.g_bound = 0.0;
    // Accumulate A^j for j = 0..N-1 into G and the norm sum, then one more
    // multiply gives F = A^N.
    for (int j = 0; j < N; ++j) {
        out.G += out.F;
        out.g_bound += spectral_norm(out.F);
        out.F = A * out.F;
    }
    out.g_bound *= f_bar;
    return out;
}

Vec propagate_prior(const UtcState& state, const Vec& x, const UtcParams& params,
                    std::mt19937_64& rng) {
    switch (params.propagation) {
        case PropagationMode::hold:
            return state.u;
        case PropagationMode::noise: {
            // w ~ N(0, Q_u) via the PSD square root of Q_u.
            const Mat S = psd_sqrt(params.Q_u);
            std::normal_distribution<double> unit(0.0, 1.0);
            Vec z(state.u.size());
            for (int i = 0; i < z.size(); ++i) z(i) = unit(rng);
            return state.u + S * z;
        }
        case PropagationMode::feedback:
            if (!params.feedback) {
                throw ConfigError("feedback propagation mode requires a feedback law");
            }
            return params.feedback(x, state.u);
    }
    throw Error("propagate_prior: unknown propagation mode");
}

SigmaSet generate_sigma_points(const Vec& u_minus, const Mat& P, const UtcParams& params) {
    const int m = static_cast<int>(u_minus.size());
    if (P.rows() != m || P.cols() != m) {
        throw Error("generate_sigma_points: P must match the control dimension");
    }
    if (!(params.w0 > 0.0 && params.w0 < 1.0)) {
        throw ConfigError("W0 must lie in (0,1)");
    }

    const double scale = std::sqrt(params.effective_scale_dim(m) / (1.0 - params.w0));
    const Mat S = psd_sqrt(P);

    SigmaSet set;
    set.points.reserve(2 * m + 1);
    set.weights.reserve(2 * m + 1);

    set.points.push_back(u_minus);
    set.weights.push_back(params.w0);

    const double wi = (1.0 - params.w0) / (2.0 * m);
    for (int j = 0; j < m; ++j) {
        const Vec offset = scale * S.col(j);
        set.points.push_back(u_minus + offset);
        set.weights.push_back(wi);
        set.points.push_back(u_minus - offset);
        set.weights.push_back(wi);
    }

    if (params.input_bounds) {
        const auto& [lo, hi] = *params.input_bounds;
        for (auto& pt : set.points) {
            pt = pt.cwiseMax(lo).cwiseMin(hi);
        }
    }
    return set;
}

Vec propagate_sigma_n_step(const NonlinearPlant& plant, Vec x, const Vec& U, int N) {
    if (N < 1) throw NonPositiveStepError("prediction horizon must be >= 1");
    for (int i = 0; i < N; ++i) {
        x = plant.step(x, U);
    }
    return plant.output(x);
}

Vec propagate_sigma_n_step(const LtiPlant& plant, Vec x, const Vec& U, int N) {
    if (N < 1) throw NonPositiveStepError("prediction horizon must be >= 1");
    for (int i = 0; i < N; ++i) {
        x = plant.step(x, U);
    }
    return plant.output(x);
}

namespace {

UpdateResult update_impl(const UtcState& state, const Vec& x, const Vec& r,
                         const std::function<Vec(const Vec&, const Vec&, int)>& propagate,
                         const UtcParams& params, std::mt19937_64& rng) {
    const int m = static_cast<int>(state.u.size());
    const int p = static_cast<int>(r.size());

    require_finite(state.u, "u");
    require_finite(state.P, "P");
    require_finite(x, "x");
    require_finite(r, "r");

    const Vec u_minus = propagate_prior(state, x, params, rng);
    const SigmaSet sigma = generate_sigma_points(u_minus, state.P, params);

    std::vector<Vec> outputs;
    outputs.reserve(sigma.points.size());
    for (const Vec& U : sigma.points) {
        outputs.push_back(propagate(x, U, params.prediction_steps));
    }

    UpdateResult res;
    res.u_pred = Vec::Zero(m);
    for (int i = 0; i < sigma.count(); ++i) {
        res.u_pred += sigma.weights[i] * sigma.points[i];
    }
    res.y_pred = Vec::Zero(p);
    for (int i = 0; i < sigma.count(); ++i) {
        res.y_pred += sigma.weights[i] * outputs[i];
    }

    res.P_pred = params.Q_u;
    for (int i = 0; i < sigma.count(); ++i) {
        const Vec du = sigma.points[i] - res.u_pred;
        res.P_pred += sigma.weights[i] * (du * du.transpose());
    }

    res.P_y = params.P_err;
    res.P_uy = Mat::Zero(m, p);
    for (int i = 0; i < sigma.count(); ++i) {
        const Vec dy = outputs[i] - res.y_pred;
        res.P_y += sigma.weights[i] * (dy * dy.transpose());
        const Vec du = sigma.points[i] - res.u_pred;
        res.P_uy += sigma.weights[i] * (du * dy.transpose());
    }

    // K = P_uy P_y^{-1}, computed as the solution of P_y^T K^T = P_uy^T.
    res.K = solve_linear(res.P_y.transpose(), res.P_uy.transpose()).transpose();

    res.u_next = res.u_pred + res.K * (r - res.y_pred);
    if (params.input_bounds) {
        const auto& [lo, hi] = *params.input_bounds;
        res.u_next = res.u_next.cwiseMax(lo).cwiseMin(hi);
    }

    Mat P_next = res.P_pred - res.K * res.P_y * res.K.transpose();
    P_next = 0.5 * (P_next + P_next.transpose()).eval();

    // Repair small negative eigenvalues introduced by the subtraction.
    // Anything beyond the budget means the update itself is broken, not
    // floating-point noise, so fail loudly.
    Vec evals;
    Mat evecs;
    eig_sym(P_next, evals, evecs);
    double clamp = 0.0;
    for (int i = 0; i < evals.size(); ++i) {
        if (evals(i) < 0.0) {
            clamp = std::max(clamp, -evals(i));
            evals(i) = 0.0;
        }
    }
    if (clamp > params.psd_clamp_budget) {
        throw NotPsdError("posterior covariance repair " + std::to_string(clamp) +
                          " exceeds the admissible budget " +
                          std::to_string(params.psd_clamp_budget));
    }
    if (clamp > 0.0) {
        P_next = evecs * evals.asDiagonal() * evecs.transpose();
        P_next = 0.5 * (P_next + P_next.transpose()).eval();
    }
    res.P_next = std::move(P_next);
    res.psd_clamp = clamp;
    return res;
}

}  // namespace

UpdateResult update(const UtcState& state, const Vec& x, const Vec& r,
                    const NonlinearPlant& plant, const UtcParams& params,
                    std::mt19937_64& rng) {
    params.validate(plant.m, plant.p);
    if (state.u.size() != plant.m) throw Error("update: control dimension mismatch");
    if (x.size() != plant.n) throw Error("update: state dimension mismatch");
    if (r.size() != plant.p) throw Error("update: reference dimension mismatch");
    auto prop = [&plant](const Vec& x0, const Vec& U, int N) {
        return propagate_sigma_n_step(plant, x0, U, N);
    };
    return update_impl(state, x, r, prop, params, rng);
}

UpdateResult update(const UtcState& state, const Vec& x, const Vec& r, const LtiPlant& plant,
                    const UtcParams& params, std::mt19937_64& rng) {
    return update(state, x, r, plant.as_nonlinear(), params, rng);
}

}  // namespace utc
