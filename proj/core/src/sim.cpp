#include "utc/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "utc/errors.hpp"

namespace utc {

Vec Reference::value(int k, double dt, int p) const {
    if (kind == Kind::zero) return Vec::Zero(p);
    Vec r(p);
    const double t = k * dt;
    for (int i = 0; i < p; ++i) {
        r(i) = amplitude(i) *
               std::sin(2.0 * std::numbers::pi * frequency_hz(i) * t + phase(i));
    }
    return r;
}

void Reference::validate(int p) const {
    if (kind == Kind::zero) return;
    if (amplitude.size() != p || frequency_hz.size() != p || phase.size() != p) {
        throw ConfigError("sinusoid reference needs amplitude/frequency/phase per output");
    }
    if (frequency_hz.minCoeff() < 0.0) {
        throw ConfigError("sinusoid frequencies must be >= 0");
    }
}

void Scenario::validate() const {
    if (!plant.step || !plant.output) throw ConfigError("scenario has no plant");
    params.validate(plant.m, plant.p);
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(dt > 0.0)) throw NonPositiveStepError("dt must be > 0");
    if (x0_halfwidth.size() != plant.n) {
        throw ConfigError("x0 half-widths must have dimension " + std::to_string(plant.n));
    }
    if (x0_halfwidth.size() > 0 && x0_halfwidth.minCoeff() < 0.0) {
        throw ConfigError("x0 half-widths must be >= 0");
    }
    reference.validate(plant.p);
    if (u0.size() != 0 && u0.size() != plant.m) {
        throw ConfigError("u0 must have dimension " + std::to_string(plant.m));
    }
    if (P0) {
        if (P0->rows() != plant.m || P0->cols() != plant.m) {
            throw ConfigError("P0 must be " + std::to_string(plant.m) + "x" +
                              std::to_string(plant.m));
        }
        if ((*P0 - P0->transpose()).cwiseAbs().maxCoeff() > default_sym_tol(*P0)) {
            throw NotSymmetricError("P0 must be symmetric");
        }
        const auto [lo, hi] = eig_extrema_sym(*P0);
        (void)hi;
        if (lo < -default_sym_tol(*P0)) throw NotPsdError("P0 must be PSD");
    }
}

Scenario make_scenario(const LtiPlant& plant, double dt) {
    Scenario scn;
    scn.plant = plant.as_nonlinear();
    scn.lti = plant;
    scn.dt = dt;
    scn.x0_halfwidth = Vec::Zero(plant.state_dim());
    return scn;
}

Trajectory run(const Scenario& scn) {
    scn.validate();

    const int n = scn.plant.n;
    const int m = scn.plant.m;
    const int p = scn.plant.p;

    std::mt19937_64 rng(scn.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    Vec x(n);
    for (int i = 0; i < n; ++i) x(i) = scn.x0_halfwidth(i) * unit(rng);

    UtcState state;
    state.u = scn.u0.size() == m ? scn.u0 : Vec::Zero(m);
    state.P = scn.P0 ? *scn.P0 : scn.params.Q_u;

    Trajectory traj;
    traj.dt = scn.dt;
    traj.records.reserve(scn.horizon + 1);
    traj.final_K = Mat::Zero(m, p);
    traj.final_P = state.P;

    auto record = [&](int k, const Vec& y, const Vec& r, const Vec& y_pred, double K_fro) {
        TrajectoryRecord rec;
        rec.k = k;
        rec.x = x;
        rec.u = state.u;
        rec.y = y;
        rec.r = r;
        rec.y_pred = y_pred;
        rec.err_norm = (r - y).norm();
        rec.K_fro = K_fro;
        rec.P_trace = state.P.trace();
        traj.records.push_back(std::move(rec));
    };

    {
        const Vec y0 = scn.plant.output(x);
        const Vec r0 = scn.reference.value(0, scn.dt, p);
        record(0, y0, r0, y0, 0.0);
    }

    for (int k = 0; k < scn.horizon; ++k) {
        try {
            x = scn.plant.step(x, state.u);
            const Vec r = scn.reference.value(k, scn.dt, p);
            const UpdateResult res = update(state, x, r, scn.plant, scn.params, rng);
            state.u = res.u_next;
            state.P = res.P_next;
            traj.final_K = res.K;
            traj.max_psd_clamp = std::max(traj.max_psd_clamp, res.psd_clamp);

            const Vec y = scn.plant.output(x);
            const Vec r_next = scn.reference.value(k + 1, scn.dt, p);
            record(k + 1, y, r_next, res.y_pred, res.K.norm());
        } catch (const SimStepError&) {
            throw;
        } catch (const std::exception& e) {
            throw SimStepError(k, e.what());
        }
    }

    traj.final_P = state.P;
    return traj;
}

int settling_time(const Trajectory& traj, double band) {
    if (!(band > 0.0)) throw Error("settling_time: band must be > 0");
    const int H = traj.horizon();
    int settled = H + 1;
    for (int k = H; k >= 0; --k) {
        if (traj.records[k].err_norm <= band) {
            settled = k;
        } else {
            break;
        }
    }
    return settled;
}

double error_limsup(const Trajectory& traj, double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw Error("error_limsup: tail_fraction must lie in (0,1]");
    }
    const int count = static_cast<int>(traj.records.size());
    const int tail = std::max(1, static_cast<int>(std::ceil(tail_fraction * count)));
    double worst = 0.0;
    for (int k = count - tail; k < count; ++k) {
        worst = std::max(worst, traj.records[k].err_norm);
    }
    return worst;
}

double error_peak(const Trajectory& traj) {
    double worst = 0.0;
    for (const auto& rec : traj.records) worst = std::max(worst, rec.err_norm);
    return worst;
}

namespace {

void put(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    out += buf;
}

}  // namespace

void export_csv(const Trajectory& traj, const std::string& path) {
    if (traj.records.empty()) throw Error("export_csv: empty trajectory");

    const auto& first = traj.records.front();
    std::string out;
    out.reserve(traj.records.size() * 160);

    out += "k";
    for (int i = 0; i < first.x.size(); ++i) out += ",x_" + std::to_string(i);
    for (int i = 0; i < first.u.size(); ++i) out += ",u_" + std::to_string(i);
    for (int i = 0; i < first.y.size(); ++i) out += ",y_" + std::to_string(i);
    for (int i = 0; i < first.r.size(); ++i) out += ",r_" + std::to_string(i);
    out += ",err_norm,K_fro,P_trace\n";

    for (const auto& rec : traj.records) {
        out += std::to_string(rec.k);
        for (int i = 0; i < rec.x.size(); ++i) { out += ','; put(out, rec.x(i)); }
        for (int i = 0; i < rec.u.size(); ++i) { out += ','; put(out, rec.u(i)); }
        for (int i = 0; i < rec.y.size(); ++i) { out += ','; put(out, rec.y(i)); }
        for (int i = 0; i < rec.r.size(); ++i) { out += ','; put(out, rec.r(i)); }
        out += ','; put(out, rec.err_norm);
        out += ','; put(out, rec.K_fro);
        out += ','; put(out, rec.P_trace);
        out += '\n';
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path + " for writing");
    file << out;
    if (!file) throw IoError("write failed for " + path);
}

}  // namespace utc
