#include "utc/config.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "utc/errors.hpp"
#include "utc/plant.hpp"

using nlohmann::json;

namespace utc {
namespace {

[[noreturn]] void fail(const std::string& section, const std::string& what) {
    throw ConfigError(section + ": " + what);
}

const json& require_object(const json& root, const char* key) {
    if (!root.contains(key)) fail(key, "section missing");
    const json& j = root.at(key);
    if (!j.is_object()) fail(key, "section must be an object");
    return j;
}

void check_keys(const json& obj, const char* section,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) fail(section, "unknown key '" + it.key() + "'");
    }
}

double get_number(const json& obj, const char* section, const char* key) {
    if (!obj.contains(key)) fail(section, std::string("missing key '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(section, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const char* section, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(section, std::string("'") + key + "' must be a number");
    return v.get<double>();
}

int get_int_or(const json& obj, const char* section, const char* key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(section, std::string("'") + key + "' must be an integer");
    return v.get<int>();
}

std::string get_string(const json& obj, const char* section, const char* key) {
    if (!obj.contains(key)) fail(section, std::string("missing key '") + key + "'");
    const json& v = obj.at(key);
    if (!v.is_string()) fail(section, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

/// Scalar shorthand expands to a constant vector.
Vec parse_vec(const json& v, int dim, const char* section, const char* key) {
    if (v.is_number()) return Vec::Constant(dim, v.get<double>());
    if (!v.is_array()) fail(section, std::string("'") + key + "' must be a number or array");
    if (static_cast<int>(v.size()) != dim) {
        fail(section, std::string("'") + key + "' must have " + std::to_string(dim) +
                          " entries, got " + std::to_string(v.size()));
    }
    Vec out(dim);
    for (int i = 0; i < dim; ++i) {
        if (!v[i].is_number()) fail(section, std::string("'") + key + "' entries must be numbers");
        out(i) = v[i].get<double>();
    }
    return out;
}

/// Scalar shorthand expands to scalar * I (square only); otherwise row lists.
Mat parse_mat(const json& v, int rows, int cols, const char* section, const char* key) {
    if (v.is_number()) {
        if (rows != cols) {
            fail(section, std::string("'") + key + "' scalar shorthand needs a square matrix");
        }
        return v.get<double>() * Mat::Identity(rows, cols);
    }
    if (!v.is_array()) fail(section, std::string("'") + key + "' must be a number or row list");
    if (static_cast<int>(v.size()) != rows) {
        fail(section, std::string("'") + key + "' must have " + std::to_string(rows) + " rows");
    }
    Mat out(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = v[r];
        if (!row.is_array() || static_cast<int>(row.size()) != cols) {
            fail(section, std::string("'") + key + "' rows must have " + std::to_string(cols) +
                              " entries");
        }
        for (int c = 0; c < cols; ++c) {
            if (!row[c].is_number()) {
                fail(section, std::string("'") + key + "' entries must be numbers");
            }
            out(r, c) = row[c].get<double>();
        }
    }
    return out;
}

/// Free-shape row list (used where dimensions come from the data itself).
Mat parse_mat_free(const json& v, const char* section, const char* key) {
    if (!v.is_array() || v.empty() || !v[0].is_array() || v[0].empty()) {
        fail(section, std::string("'") + key + "' must be a non-empty row list");
    }
    const int rows = static_cast<int>(v.size());
    const int cols = static_cast<int>(v[0].size());
    return parse_mat(v, rows, cols, section, key);
}

json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json mat_to_json(const Mat& M) {
    json rows = json::array();
    for (int r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

LoadedConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root, "config", {"plant", "controller", "scenario", "certify", "output"});

    LoadedConfig cfg;
    json effective;

    // Plant.
    const json& plant = require_object(root, "plant");
    cfg.model = get_string(plant, "plant", "model");
    QuadcopterParams quad;
    if (cfg.model == "admire") {
        check_keys(plant, "plant", {"model", "dt", "beta", "alpha"});
        const double dt = get_number(plant, "plant", "dt");
        const Vec beta =
            plant.contains("beta") ? parse_vec(plant.at("beta"), 3, "plant", "beta") : Vec::Zero(3);
        const Vec alpha = plant.contains("alpha") ? parse_vec(plant.at("alpha"), 3, "plant", "alpha")
                                                  : Vec::Ones(3);
        const LtiPlant lti = make_admire(dt, beta, alpha);
        cfg.scenario = make_scenario(lti, dt);
        cfg.f_bar = lti.f.bound;
        cfg.lti_certifiable = true;
        effective["plant"] = {{"model", "admire"},
                              {"dt", dt},
                              {"beta", vec_to_json(beta)},
                              {"alpha", vec_to_json(alpha)}};
    } else if (cfg.model == "quadcopter") {
        check_keys(plant, "plant", {"model", "dt", "params"});
        quad.dt = get_number(plant, "plant", "dt");
        if (plant.contains("params")) {
            const json& pj = plant.at("params");
            if (!pj.is_object()) fail("plant", "'params' must be an object");
            check_keys(pj, "plant.params", {"i_xx", "i_yy", "i_zz", "j_r", "k_t", "k_b", "l"});
            quad.I_xx = get_number_or(pj, "plant.params", "i_xx", quad.I_xx);
            quad.I_yy = get_number_or(pj, "plant.params", "i_yy", quad.I_yy);
            quad.I_zz = get_number_or(pj, "plant.params", "i_zz", quad.I_zz);
            quad.J_r = get_number_or(pj, "plant.params", "j_r", quad.J_r);
            quad.k_t = get_number_or(pj, "plant.params", "k_t", quad.k_t);
            quad.k_b = get_number_or(pj, "plant.params", "k_b", quad.k_b);
            quad.L = get_number_or(pj, "plant.params", "l", quad.L);
        }
        quad.validate();
        cfg.scenario.plant = make_quadcopter(quad);
        cfg.scenario.dt = quad.dt;
        cfg.scenario.x0_halfwidth = Vec::Zero(6);
        cfg.f_bar = 0.0;
        cfg.lti_certifiable = false;
        effective["plant"] = {{"model", "quadcopter"},
                              {"dt", quad.dt},
                              {"params",
                               {{"i_xx", quad.I_xx},
                                {"i_yy", quad.I_yy},
                                {"i_zz", quad.I_zz},
                                {"j_r", quad.J_r},
                                {"k_t", quad.k_t},
                                {"k_b", quad.k_b},
                                {"l", quad.L}}}};
    } else if (cfg.model == "custom-lti") {
        check_keys(plant, "plant", {"model", "dt", "a", "b", "c", "beta", "alpha"});
        const double dt = get_number_or(plant, "plant", "dt", 1.0);
        if (!plant.contains("a") || !plant.contains("b") || !plant.contains("c")) {
            fail("plant", "custom-lti needs 'a', 'b', 'c' row lists");
        }
        const Mat A = parse_mat_free(plant.at("a"), "plant", "a");
        const int n = static_cast<int>(A.rows());
        if (A.cols() != n) fail("plant", "'a' must be square");
        const json& bj = plant.at("b");
        if (!bj.is_array() || bj.empty()) fail("plant", "'b' must be a non-empty row list");
        const Mat B = parse_mat(bj, n, bj[0].is_array() ? static_cast<int>(bj[0].size()) : 0,
                                "plant", "b");
        const json& cj = plant.at("c");
        if (!cj.is_array() || cj.empty()) fail("plant", "'c' must be a non-empty row list");
        const Mat C = parse_mat(cj, static_cast<int>(cj.size()), n, "plant", "c");
        const Vec beta =
            plant.contains("beta") ? parse_vec(plant.at("beta"), n, "plant", "beta") : Vec::Zero(n);
        const Vec alpha = plant.contains("alpha")
                              ? parse_vec(plant.at("alpha"), n, "plant", "alpha")
                              : Vec::Ones(n);
        const LtiPlant lti(A, B, C, sinusoidal_nonlinearity(beta, alpha), dt);
        cfg.scenario = make_scenario(lti, dt);
        cfg.f_bar = lti.f.bound;
        cfg.lti_certifiable = true;
        effective["plant"] = {{"model", "custom-lti"}, {"dt", dt},
                              {"a", mat_to_json(A)},  {"b", mat_to_json(B)},
                              {"c", mat_to_json(C)},  {"beta", vec_to_json(beta)},
                              {"alpha", vec_to_json(alpha)}};
    } else {
        fail("plant", "model must be one of admire, quadcopter, custom-lti");
    }

    const int n = cfg.scenario.plant.n;
    const int m = cfg.scenario.plant.m;
    const int p = cfg.scenario.plant.p;

    // Controller.
    const json& ctrl = require_object(root, "controller");
    check_keys(ctrl, "controller",
               {"prediction_steps", "w0", "q_u", "p_err", "sigma_scale_dim", "propagation",
                "input_bounds", "psd_clamp_budget"});
    UtcParams& params = cfg.scenario.params;
    params.prediction_steps = get_int_or(ctrl, "controller", "prediction_steps", 1);
    params.w0 = get_number_or(ctrl, "controller", "w0", 0.5);
    if (!ctrl.contains("q_u")) fail("controller", "missing key 'q_u'");
    params.Q_u = parse_mat(ctrl.at("q_u"), m, m, "controller", "q_u");
    if (!ctrl.contains("p_err")) fail("controller", "missing key 'p_err'");
    params.P_err = parse_mat(ctrl.at("p_err"), p, p, "controller", "p_err");
    if (ctrl.contains("sigma_scale_dim")) {
        params.sigma_scale_dim = get_int_or(ctrl, "controller", "sigma_scale_dim", m);
    }
    const std::string prop = ctrl.contains("propagation")
                                 ? get_string(ctrl, "controller", "propagation")
                                 : std::string("hold");
    if (prop == "hold") {
        params.propagation = PropagationMode::hold;
    } else if (prop == "noise") {
        params.propagation = PropagationMode::noise;
    } else {
        fail("controller", "propagation must be \"hold\" or \"noise\"");
    }
    if (ctrl.contains("input_bounds")) {
        const json& ib = ctrl.at("input_bounds");
        if (!ib.is_object()) fail("controller", "'input_bounds' must be an object");
        check_keys(ib, "controller.input_bounds", {"lo", "hi"});
        if (!ib.contains("lo") || !ib.contains("hi")) {
            fail("controller", "input_bounds needs both 'lo' and 'hi'");
        }
        params.input_bounds = {parse_vec(ib.at("lo"), m, "controller", "lo"),
                               parse_vec(ib.at("hi"), m, "controller", "hi")};
    }
    params.psd_clamp_budget = get_number_or(ctrl, "controller", "psd_clamp_budget", 1e-8);

    // Scenario.
    const json& scen = require_object(root, "scenario");
    check_keys(scen, "scenario",
               {"horizon", "x0_halfwidth", "seed", "reference", "u0", "p0"});
    if (!scen.contains("horizon")) fail("scenario", "missing key 'horizon'");
    cfg.scenario.horizon = get_int_or(scen, "scenario", "horizon", 0);
    if (scen.contains("x0_halfwidth")) {
        cfg.scenario.x0_halfwidth = parse_vec(scen.at("x0_halfwidth"), n, "scenario",
                                              "x0_halfwidth");
    }
    if (scen.contains("seed")) {
        const json& sj = scen.at("seed");
        if (!sj.is_number_integer() || sj.get<double>() < 0) {
            fail("scenario", "'seed' must be a nonnegative integer");
        }
        cfg.scenario.seed = sj.get<std::uint64_t>();
    }
    if (scen.contains("reference")) {
        const json& rj = scen.at("reference");
        if (!rj.is_object()) fail("scenario", "'reference' must be an object");
        const std::string kind = get_string(rj, "scenario.reference", "type");
        if (kind == "zero") {
            check_keys(rj, "scenario.reference", {"type"});
            cfg.scenario.reference.kind = Reference::Kind::zero;
        } else if (kind == "sinusoid") {
            check_keys(rj, "scenario.reference", {"type", "amplitude", "frequency_hz", "phase"});
            cfg.scenario.reference.kind = Reference::Kind::sinusoid;
            if (!rj.contains("amplitude") || !rj.contains("frequency_hz")) {
                fail("scenario.reference", "sinusoid needs 'amplitude' and 'frequency_hz'");
            }
            cfg.scenario.reference.amplitude =
                parse_vec(rj.at("amplitude"), p, "scenario.reference", "amplitude");
            cfg.scenario.reference.frequency_hz =
                parse_vec(rj.at("frequency_hz"), p, "scenario.reference", "frequency_hz");
            cfg.scenario.reference.phase =
                rj.contains("phase") ? parse_vec(rj.at("phase"), p, "scenario.reference", "phase")
                                     : Vec::Zero(p);
        } else {
            fail("scenario.reference", "type must be \"zero\" or \"sinusoid\"");
        }
    }
    if (scen.contains("u0")) {
        cfg.scenario.u0 = parse_vec(scen.at("u0"), m, "scenario", "u0");
    }
    if (scen.contains("p0")) {
        cfg.scenario.P0 = parse_mat(scen.at("p0"), m, m, "scenario", "p0");
    }

    // Certify.
    if (root.contains("certify")) {
        const json& cert = require_object(root, "certify");
        check_keys(cert, "certify", {"gain"});
        if (cert.contains("gain")) {
            cfg.certify_gain = parse_mat(cert.at("gain"), m, p, "certify", "gain");
        }
    }

    // Output.
    if (root.contains("output")) {
        const json& out = require_object(root, "output");
        check_keys(out, "output", {"directory"});
        if (out.contains("directory")) {
            cfg.output_dir = get_string(out, "output", "directory");
        }
    }

    // Command-line overrides land before validation so the echoed config is
    // the one that actually ran.
    if (overrides.seed) cfg.scenario.seed = *overrides.seed;
    if (overrides.horizon) cfg.scenario.horizon = *overrides.horizon;
    if (overrides.prediction_steps) params.prediction_steps = *overrides.prediction_steps;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;

    cfg.scenario.validate();

    // Effective config with every default materialized.
    effective["controller"] = {{"prediction_steps", params.prediction_steps},
                               {"w0", params.w0},
                               {"q_u", mat_to_json(params.Q_u)},
                               {"p_err", mat_to_json(params.P_err)},
                               {"propagation", prop},
                               {"psd_clamp_budget", params.psd_clamp_budget}};
    if (params.sigma_scale_dim) {
        effective["controller"]["sigma_scale_dim"] = *params.sigma_scale_dim;
    }
    if (params.input_bounds) {
        effective["controller"]["input_bounds"] = {
            {"lo", vec_to_json(params.input_bounds->first)},
            {"hi", vec_to_json(params.input_bounds->second)}};
    }
    effective["scenario"] = {{"horizon", cfg.scenario.horizon},
                             {"x0_halfwidth", vec_to_json(cfg.scenario.x0_halfwidth)},
                             {"seed", cfg.scenario.seed}};
    if (cfg.scenario.reference.kind == Reference::Kind::zero) {
        effective["scenario"]["reference"] = {{"type", "zero"}};
    } else {
        effective["scenario"]["reference"] = {
            {"type", "sinusoid"},
            {"amplitude", vec_to_json(cfg.scenario.reference.amplitude)},
            {"frequency_hz", vec_to_json(cfg.scenario.reference.frequency_hz)},
            {"phase", vec_to_json(cfg.scenario.reference.phase)}};
    }
    if (cfg.scenario.u0.size() > 0) {
        effective["scenario"]["u0"] = vec_to_json(cfg.scenario.u0);
    }
    if (cfg.scenario.P0) {
        effective["scenario"]["p0"] = mat_to_json(*cfg.scenario.P0);
    }
    if (cfg.certify_gain) {
        effective["certify"] = {{"gain", mat_to_json(*cfg.certify_gain)}};
    }
    effective["output"] = {{"directory", cfg.output_dir}};

    cfg.canonical_json = effective.dump(2) + "\n";

    // The run-log hash identifies the experiment itself; the RNG seed and the
    // artifact destination are run metadata, so seed sweeps and re-runs into
    // different directories share a hash.
    json identity = effective;
    identity["scenario"].erase("seed");
    identity.erase("output");
    cfg.identity_json = identity.dump(2) + "\n";
    return cfg;
}

LoadedConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot read config file " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    return parse_config(buf.str(), overrides);
}

std::string config_hash(const std::string& canonical_json) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_json) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace utc
