#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "utc/linalg.hpp"
#include "utc/plant.hpp"

namespace utc {

/// How the prior control u- for the next step is produced.
///   hold:     u- = u_k (deterministic; the default)
///   noise:    u- = u_k + w_k with w_k ~ N(0, Q_u) from the seeded stream
///   feedback: u- = h(x_k, u_k) for a user-supplied law h
enum class PropagationMode { hold, noise, feedback };

/// Tuning parameters of the controller.
///
/// Q_u plays three roles with one matrix: prior-noise covariance in noise
/// mode, the additive term of the predicted input covariance, and the
/// initial covariance P_{0|0}.
///
/// sigma_scale_dim is the dimension inside the sigma-point scale factor
/// sqrt(dim / (1 - W0)). Unset means the input dimension m (the dimension
/// of the sampled variable, standard unscented practice); setting it to
/// the state dimension reproduces the alternative convention.
struct UtcParams {
    int prediction_steps = 1;  // N >= 1
    double w0 = 0.5;           // center weight, in (0,1)
    Mat Q_u;                   // m x m controller process covariance
    Mat P_err;                 // p x p output covariance floor
    std::optional<int> sigma_scale_dim;
    PropagationMode propagation = PropagationMode::hold;
    std::function<Vec(const Vec&, const Vec&)> feedback;  // h(x, u), feedback mode only
    std::optional<std::pair<Vec, Vec>> input_bounds;      // componentwise [lo, hi]
    std::uint64_t rng_seed = 0;
    double psd_clamp_budget = 1e-8;  // admissible posterior-covariance repair per step

    int effective_scale_dim(int m) const { return sigma_scale_dim.value_or(m); }

    /// Validates against the plant dimensions. Throws Error (or a subclass)
    /// naming the violated constraint.
    void validate(int m, int p) const;
};

/// 2m+1 deterministically placed control samples and their weights.
/// Weights sum to one by construction; all non-center weights are equal.
struct SigmaSet {
    std::vector<Vec> points;
    std::vector<double> weights;

    int count() const { return static_cast<int>(points.size()); }
};

/// Controller state carried between steps: the current control and its
/// covariance P_{k|k}.
struct UtcState {
    Vec u;
    Mat P;
};

/// Everything one update step produces.
struct UpdateResult {
    Vec u_pred;   // weighted sigma mean u_{k+1|k}
    Vec y_pred;   // predicted output
    Mat P_pred;   // predicted input covariance P_{k+1|k}
    Mat P_y;      // output covariance (with the P_err floor)
    Mat P_uy;     // input-output cross covariance
    Mat K;        // gain
    Vec u_next;   // control for the next step
    Mat P_next;   // posterior covariance P_{k+1|k+1}, symmetrized and clamped
    double psd_clamp = 0.0;  // magnitude of the most negative eigenvalue removed
};

/// N-step unrolled propagation matrices for a linear plant:
/// F = A^N, G = A^{N-1} + ... + A + I, and the accumulated nonlinearity
/// bound g_bound = f_bar * sum_{j=0}^{N-1} ||A^j||_2.
/// For N = 1 these reduce to A, I, f_bar.
struct NStepUnroll {
    Mat F;
    Mat G;
    double g_bound = 0.0;
};

NStepUnroll unroll(const Mat& A, int N, double f_bar);

/// Produces the prior control u- from the current state and control.
/// Only noise mode consumes the generator.
Vec propagate_prior(const UtcState& state, const Vec& x, const UtcParams& params,
                    std::mt19937_64& rng);

/// Places the 2m+1 sigma points around u_minus along the columns of the
/// PSD square root of P, scaled by sqrt(scale_dim / (1 - W0)). When input
/// bounds are set, every point is clamped componentwise after generation.
SigmaSet generate_sigma_points(const Vec& u_minus, const Mat& P, const UtcParams& params);

/// Drives the plant forward N steps holding the candidate control U fixed,
/// each candidate along its own state trajectory, and returns the output
/// of the final state.
Vec propagate_sigma_n_step(const NonlinearPlant& plant, Vec x, const Vec& U, int N);
Vec propagate_sigma_n_step(const LtiPlant& plant, Vec x, const Vec& U, int N);

/// One full controller step: prior, sigma points, N-step propagation of
/// every point, predicted output and control, covariances, gain, control
/// update, and the symmetrized/PSD-clamped posterior covariance.
/// Pure given (state, x, r, plant, params, rng stream).
UpdateResult update(const UtcState& state, const Vec& x, const Vec& r,
                    const NonlinearPlant& plant, const UtcParams& params, std::mt19937_64& rng);
UpdateResult update(const UtcState& state, const Vec& x, const Vec& r, const LtiPlant& plant,
                    const UtcParams& params, std::mt19937_64& rng);

}  // namespace utc
