#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "utc/controller.hpp"
#include "utc/linalg.hpp"
#include "utc/plant.hpp"

namespace utc {

/// Reference signal, one channel per plant output. Sinusoid channels are
/// amplitude_i * sin(2*pi*frequency_hz_i * k*dt + phase_i).
struct Reference {
    enum class Kind { zero, sinusoid };
    Kind kind = Kind::zero;
    Vec amplitude;
    Vec frequency_hz;
    Vec phase;

    Vec value(int k, double dt, int p) const;
    void validate(int p) const;
};

/// Everything one closed-loop run needs. The optional LTI view is set when
/// the plant has the affine-plus-perturbation form; certification and the
/// exactness checks use it, the run loop itself does not.
struct Scenario {
    NonlinearPlant plant;
    std::optional<LtiPlant> lti;
    double dt = 0.01;
    UtcParams params;
    int horizon = 1000;
    Vec x0_halfwidth;  // per-component uniform box half-widths
    std::uint64_t seed = 0;
    Reference reference;
    Vec u0;                  // empty picks zero
    std::optional<Mat> P0;   // empty picks Q_u

    void validate() const;
};

/// Scenario with an LTI plant attached to both views.
Scenario make_scenario(const LtiPlant& plant, double dt);

struct TrajectoryRecord {
    int k = 0;
    Vec x;
    Vec u;
    Vec y;
    Vec r;
    Vec y_pred;
    double err_norm = 0.0;  // ||r - y|| at this step
    double K_fro = 0.0;
    double P_trace = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;  // horizon + 1 entries
    Mat final_K;
    Mat final_P;
    double max_psd_clamp = 0.0;
    double dt = 0.0;

    int horizon() const { return static_cast<int>(records.size()) - 1; }
};

/// Runs the closed loop: draw x0 from the seeded box, then per step apply
/// the current control to the plant and update the controller against the
/// current reference. Controller and plant failures are rethrown as
/// SimStepError carrying the step index. Deterministic for a fixed seed.
Trajectory run(const Scenario& scn);

/// First step index after which the error norm stays within the band for
/// the rest of the horizon; horizon + 1 when it never does.
int settling_time(const Trajectory& traj, double band);

/// Max error norm over the final tail_fraction of the records.
double error_limsup(const Trajectory& traj, double tail_fraction = 0.1);

/// Max error norm over the whole trajectory (transient peak).
double error_peak(const Trajectory& traj);

/// Header row then one row per record:
/// k, x_0.., u_0.., y_0.., r_0.., err_norm, K_fro, P_trace
/// with 15 significant digits, newline-terminated.
void export_csv(const Trajectory& traj, const std::string& path);

}  // namespace utc
