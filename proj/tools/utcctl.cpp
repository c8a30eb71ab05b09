#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "utc/config.hpp"
#include "utc/errors.hpp"
#include "utc/sim.hpp"
#include "utc/stability.hpp"

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kSummaryBand = 0.05;  // settling band used by summaries

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<int> n_steps;
    std::optional<std::string> output;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario config file")->required();
    cmd->add_option("--seed", args.seed, "override the scenario seed");
    cmd->add_option("--steps", args.steps, "override the simulation horizon");
    cmd->add_option("--n-steps", args.n_steps, "override the prediction horizon N");
    cmd->add_option("--output", args.output, "output directory (overrides the config)");
}

utc::ConfigOverrides to_overrides(const CommonArgs& args) {
    utc::ConfigOverrides ov;
    ov.seed = args.seed;
    ov.horizon = args.steps;
    ov.prediction_steps = args.n_steps;
    ov.output_dir = args.output;
    return ov;
}

void write_run_log(const utc::LoadedConfig& cfg, const std::string& command) {
    const fs::path path = fs::path(cfg.output_dir) / "run.log";
    std::ofstream log(path, std::ios::binary);
    if (!log) throw utc::IoError("cannot open " + path.string() + " for writing");
    log << "utcontrol " << kVersion << "\n"
        << "command = " << command << "\n"
        << "config_hash = " << utc::config_hash(cfg.identity_json) << "\n"
        << "seed = " << cfg.scenario.seed << "\n"
        << "effective config:\n"
        << cfg.canonical_json;
    if (!log) throw utc::IoError("write failed for " + path.string());
}

void print_summary(const utc::Trajectory& traj) {
    std::cout.precision(12);
    std::cout << "steps = " << traj.horizon() << "\n"
              << "settling_steps(band=" << kSummaryBand
              << ") = " << utc::settling_time(traj, kSummaryBand) << "\n"
              << "error_limsup(tail=0.1) = " << utc::error_limsup(traj, 0.1) << "\n"
              << "error_peak = " << utc::error_peak(traj) << "\n"
              << "final_K_fro = " << traj.final_K.norm() << "\n"
              << "max_psd_clamp = " << traj.max_psd_clamp << "\n";
}

int cmd_simulate(const CommonArgs& args) {
    utc::LoadedConfig cfg;
    try {
        cfg = utc::load_config(args.config_path, to_overrides(args));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        fs::create_directories(cfg.output_dir);
        write_run_log(cfg, "simulate");
        const utc::Trajectory traj = utc::run(cfg.scenario);
        const fs::path csv = fs::path(cfg.output_dir) / "trajectory.csv";
        utc::export_csv(traj, csv.string());
        std::cout << "wrote " << csv.string() << "\n";
        print_summary(traj);
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_certify(const CommonArgs& args) {
    utc::LoadedConfig cfg;
    try {
        cfg = utc::load_config(args.config_path, to_overrides(args));
        if (!cfg.lti_certifiable) {
            throw utc::ConfigError(
                "certify needs an LTI plant model (admire or custom-lti); the "
                "quadcopter is outside the certified class");
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        fs::create_directories(cfg.output_dir);
        write_run_log(cfg, "certify");

        utc::Mat K;
        std::string gain_source;
        if (cfg.certify_gain) {
            K = *cfg.certify_gain;
            gain_source = "config";
        } else {
            const utc::Trajectory traj = utc::run(cfg.scenario);
            K = traj.final_K;
            gain_source = "simulation";
        }

        const utc::ClosedLoop cl = utc::build_closed_loop(
            *cfg.scenario.lti, K, cfg.scenario.params.prediction_steps);
        const utc::StabilityCertificate cert = utc::certify(cl, cfg.f_bar);

        std::ostringstream block;
        block << "gain_source = " << gain_source << "\n"
              << "f_bar = " << cfg.f_bar << "\n"
              << utc::format_certificate(cert);
        std::cout << block.str();

        const fs::path path = fs::path(cfg.output_dir) / "certificate.txt";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw utc::IoError("cannot open " + path.string() + " for writing");
        out << block.str();

        return cert.schur ? 0 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const CommonArgs& args, const std::vector<int>& n_list) {
    utc::LoadedConfig cfg;
    try {
        if (n_list.empty()) throw utc::ConfigError("--n-list needs at least one value");
        std::set<int> seen;
        for (int n : n_list) {
            if (n < 1) throw utc::ConfigError("--n-list values must be >= 1");
            if (!seen.insert(n).second) {
                throw utc::ConfigError("--n-list has duplicate value " + std::to_string(n));
            }
        }
        cfg = utc::load_config(args.config_path, to_overrides(args));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        fs::create_directories(cfg.output_dir);
        write_run_log(cfg, "sweep");

        std::cout << "N,settling_steps,error_limsup,error_peak,wall_ms\n";
        std::cout.precision(12);
        for (int n : n_list) {
            utc::Scenario scn = cfg.scenario;
            scn.params.prediction_steps = n;

            const auto t0 = std::chrono::steady_clock::now();
            const utc::Trajectory traj = utc::run(scn);
            const auto t1 = std::chrono::steady_clock::now();
            const double wall_ms =
                std::chrono::duration<double, std::milli>(t1 - t0).count();

            const fs::path csv =
                fs::path(cfg.output_dir) / ("sweep_n" + std::to_string(n) + ".csv");
            utc::export_csv(traj, csv.string());

            std::cout << n << "," << utc::settling_time(traj, kSummaryBand) << ","
                      << utc::error_limsup(traj, 0.1) << "," << utc::error_peak(traj)
                      << "," << wall_ms << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"unscented transform controller toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    CommonArgs sim_args;
    CLI::App* simulate = app.add_subcommand("simulate", "run a closed-loop scenario");
    add_common_flags(simulate, sim_args);

    CommonArgs cert_args;
    CLI::App* certify = app.add_subcommand("certify", "compute the convergence-ball certificate");
    add_common_flags(certify, cert_args);

    CommonArgs sweep_args;
    std::vector<int> n_list;
    CLI::App* sweep = app.add_subcommand("sweep", "compare prediction horizons");
    add_common_flags(sweep, sweep_args);
    sweep->add_option("--n-list", n_list, "comma-separated prediction horizons")
        ->delimiter(',')
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (certify->parsed()) return cmd_certify(cert_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, n_list);
    return 2;
}
