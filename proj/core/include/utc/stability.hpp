#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "utc/controller.hpp"
#include "utc/linalg.hpp"
#include "utc/plant.hpp"

namespace utc {

/// Augmented closed loop a_{k+1} = Z a_k + D_k for a fixed gain K, where
/// a = [x; v] stacks the plant state with the previous control. The stored
/// unroll carries F = A^N, G = sum of A^j, and the norm sum
/// sum_{j=0}^{N-1} ||A^j||_2 (its g_bound evaluated at unit nonlinearity
/// bound, so certify can scale it by any f_bar).
struct ClosedLoop {
    Mat Z;
    Mat K_fixed;
    NStepUnroll unroll;
    LtiPlant plant;
    int prediction_steps = 1;
};

/// Z = [[A - BKCF, (I - BKCG)B], [-KCF, I - KCGB]].
ClosedLoop build_closed_loop(const LtiPlant& plant, const Mat& K, int N);

/// Convergence-ball certificate. When Z is not Schur-stable there is no
/// certificate: schur is false, radius is empty, and the P-dependent
/// fields are zero. Never a numeric sentinel for "infinite".
struct StabilityCertificate {
    bool schur = false;
    double spectral_radius = 0.0;
    Mat P;                // Stein solution of Z^T P Z - P = -I
    double p_min = 0.0;
    double p_max = 0.0;
    double Z_norm = 0.0;  // spectral norm
    double g_bar = 0.0;
    double D_bar = 0.0;
    std::optional<double> radius;
    double stein_residual = 0.0;  // Frobenius norm of Z^T P Z - P + I
};

/// R = D_bar * (||Z|| p_max + sqrt(||Z||^2 p_max^2 + p_max)).
double radius_bound(double D_bar, double Z_norm, double p_max);

/// Solves the Stein equation for the augmented loop and evaluates the
/// full bound chain: g_bar from the unroll norm sum, D_bar from the
/// disturbance block norms, and the ball radius R. Requires f_bar >= 0.
StabilityCertificate certify(const ClosedLoop& cl, double f_bar);

/// Flat key-value text block for reports. Missing quantities (no
/// certificate) print as "none".
std::string format_certificate(const StabilityCertificate& cert);

struct FalsifyOptions {
    int trials = 100;
    int steps = 500;
    std::uint64_t seed = 0;
    double x0_halfwidth = 1.0;   // initial conditions uniform in a box
    double tail_fraction = 0.1;  // portion of the horizon treated as "tail"
    double ball_tol = 1e-9;      // absolute slack on the R comparisons, so a
                                 // certificate with R = 0 tolerates trajectories
                                 // that decay to rounding level instead of zero
};

struct FalsifyReport {
    int trials = 0;
    int steps = 0;
    double radius = 0.0;
    double max_tail_norm = 0.0;   // worst limsup of ||a_k|| over the tail
    double max_d_norm = 0.0;      // worst ||D_k|| seen (must stay <= D_bar)
    double max_g_norm = 0.0;      // worst ||g(x_k, N)|| seen (must stay <= g_bar)
    int tail_violations = 0;      // trials whose tail exceeded R
    int lyapunov_violations = 0;  // steps with ||a|| > R but V not decreasing
    bool all_entered_ball = true;
    bool passed = false;
};

/// Monte-carlo attempt to break the certificate: simulates the exact
/// augmented recursion with D_k assembled from f along each trajectory,
/// then checks the tail radius, the pointwise Lyapunov decrease outside
/// the ball, and the ||D_k|| <= D_bar, ||g|| <= g_bar bound chain.
/// Violations are reported, not thrown. Requires cert.schur.
FalsifyReport falsify(const StabilityCertificate& cert, const ClosedLoop& cl,
                      const BoundedNonlinearity& f, const FalsifyOptions& opts);

}  // namespace utc
