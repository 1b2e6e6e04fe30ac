#include "scene_file.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "mimodoa/errors.hpp"

namespace mimodoa::cli {
namespace {

using nlohmann::json;

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const auto a : allowed) known = known || key == a;
        if (!known) throw ValidationError(join(path, key), "unknown key");
    }
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ValidationError(path, "expected a number");
    return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) throw ValidationError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

bool get_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw ValidationError(path, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ValidationError(path, "expected a string");
    return j.get<std::string>();
}

const json& get_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ValidationError(path, "expected an array");
    return j;
}

template <class Fn>
void optional_field(const json& j, const std::string& path, std::string_view key, Fn&& fn) {
    const auto it = j.find(std::string(key));
    if (it != j.end()) fn(*it, join(path, key));
}

ArrayGeometry parse_geometry(const json& j, const std::string& path) {
    check_keys(j, path, {"n_tx", "n_rx", "d_over_lambda", "phi_trx_deg"});
    ArrayGeometry g;
    optional_field(j, path, "n_tx", [&](const json& v, const std::string& p) { g.n_tx = get_unsigned(v, p); });
    optional_field(j, path, "n_rx", [&](const json& v, const std::string& p) { g.n_rx = get_unsigned(v, p); });
    optional_field(j, path, "d_over_lambda",
                   [&](const json& v, const std::string& p) { g.d_over_lambda = get_number(v, p); });
    optional_field(j, path, "phi_trx_deg",
                   [&](const json& v, const std::string& p) { g.phi_trx_deg = get_number(v, p); });
    return g;
}

idea::Doa parse_doa(const json& j, const std::string& path) {
    check_keys(j, path, {"theta_deg", "phi_deg"});
    if (!j.contains("theta_deg")) throw ValidationError(join(path, "theta_deg"), "missing");
    if (!j.contains("phi_deg")) throw ValidationError(join(path, "phi_deg"), "missing");
    return {get_number(j["theta_deg"], join(path, "theta_deg")), get_number(j["phi_deg"], join(path, "phi_deg"))};
}

void parse_idea(const json& j, const std::string& path, idea::IdeaConfig& cfg) {
    check_keys(j, path, {"iterations", "init", "convergence_epsilon"});
    optional_field(j, path, "iterations",
                   [&](const json& v, const std::string& p) { cfg.max_iterations = get_unsigned(v, p); });
    optional_field(j, path, "convergence_epsilon",
                   [&](const json& v, const std::string& p) { cfg.convergence_epsilon = get_number(v, p); });
    optional_field(j, path, "init", [&](const json& v, const std::string& p) {
        get_array(v, p);
        for (std::size_t i = 0; i < v.size(); ++i)
            cfg.init_doas.push_back(parse_doa(v[i], p + "[" + std::to_string(i) + "]"));
    });
}

void parse_music(const json& j, const std::string& path, music::MusicConfig& cfg) {
    check_keys(j, path, {"theta_step_deg", "phi_step_deg", "theta_min_deg", "theta_max_deg", "phi_min_deg",
                         "phi_max_deg", "workers"});
    auto num = [&](std::string_view key, double& dst) {
        optional_field(j, path, key, [&](const json& v, const std::string& p) { dst = get_number(v, p); });
    };
    num("theta_step_deg", cfg.theta_step_deg);
    num("phi_step_deg", cfg.phi_step_deg);
    num("theta_min_deg", cfg.theta_min_deg);
    num("theta_max_deg", cfg.theta_max_deg);
    num("phi_min_deg", cfg.phi_min_deg);
    num("phi_max_deg", cfg.phi_max_deg);
    optional_field(j, path, "workers", [&](const json& v, const std::string& p) { cfg.workers = get_unsigned(v, p); });
}

SceneFile parse_scene_json(const json& j, const std::string& path) {
    check_keys(j, path,
               {"geometry", "sources", "snr_db", "noise_free", "num_samples", "seed", "idea", "music"});
    SceneFile f;
    auto& s = f.scene;
    optional_field(j, path, "geometry",
                   [&](const json& v, const std::string& p) { s.geometry = parse_geometry(v, p); });
    if (!j.contains("sources")) throw ValidationError(join(path, "sources"), "missing");
    const std::string sp = join(path, "sources");
    get_array(j["sources"], sp);
    for (std::size_t k = 0; k < j["sources"].size(); ++k) {
        const json& v = j["sources"][k];
        const std::string p = sp + "[" + std::to_string(k) + "]";
        check_keys(v, p, {"theta_deg", "phi_deg", "power"});
        Source src;
        if (!v.contains("theta_deg")) throw ValidationError(join(p, "theta_deg"), "missing");
        if (!v.contains("phi_deg")) throw ValidationError(join(p, "phi_deg"), "missing");
        src.theta_deg = get_number(v["theta_deg"], join(p, "theta_deg"));
        src.phi_deg = get_number(v["phi_deg"], join(p, "phi_deg"));
        optional_field(v, p, "power", [&](const json& x, const std::string& q) { src.power = get_number(x, q); });
        s.sources.push_back(src);
    }
    optional_field(j, path, "snr_db", [&](const json& v, const std::string& p) { s.snr_db = get_number(v, p); });
    optional_field(j, path, "noise_free",
                   [&](const json& v, const std::string& p) { s.noise_free = get_bool(v, p); });
    optional_field(j, path, "num_samples",
                   [&](const json& v, const std::string& p) { s.num_samples = get_unsigned(v, p); });
    optional_field(j, path, "seed", [&](const json& v, const std::string& p) { s.seed = get_unsigned(v, p); });
    optional_field(j, path, "idea", [&](const json& v, const std::string& p) { parse_idea(v, p, f.idea); });
    optional_field(j, path, "music", [&](const json& v, const std::string& p) { parse_music(v, p, f.music); });

    try {
        s.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(join(path, e.field()), std::string(e.what()).substr(e.field().size() + 2));
    }
    if (!f.idea.init_doas.empty() && f.idea.init_doas.size() + 1 != s.num_sources())
        throw ValidationError(join(path, "idea.init"), "needs K-1 = " + std::to_string(s.num_sources() - 1) +
                                                          " initial DOAs");
    return f;
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into a line number.
        std::size_t line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
        throw IoError("malformed JSON at line " + std::to_string(line) + ": " + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

SceneFile parse_scene(const std::string& text) { return parse_scene_json(parse_text(text), ""); }

SceneFile load_scene(const std::filesystem::path& path) { return parse_scene(read_file(path)); }

ExperimentFile parse_experiment(const std::string& text) {
    const json j = parse_text(text);
    check_keys(j, "", {"experiment", "scene", "sweep", "trials", "estimators", "master_seed", "workers",
                       "num_samples", "iterations", "exact_covariance"});
    ExperimentFile f;
    if (!j.contains("experiment")) throw ValidationError("experiment", "missing");
    const std::string kind = get_string(j["experiment"], "experiment");
    if (kind == "rmse")
        f.kind = ExperimentKind::Rmse;
    else if (kind == "subarray")
        f.kind = ExperimentKind::Subarray;
    else if (kind == "convergence")
        f.kind = ExperimentKind::Convergence;
    else
        throw ValidationError("experiment", "expected rmse, subarray or convergence, got '" + kind + "'");

    if (!j.contains("scene")) throw ValidationError("scene", "missing");
    f.scene = parse_scene_json(j["scene"], "scene");

    std::uint64_t master_seed = f.scene.scene.seed;
    std::size_t workers = 1;
    optional_field(j, "", "master_seed", [&](const json& v, const std::string& p) { master_seed = get_unsigned(v, p); });
    optional_field(j, "", "workers", [&](const json& v, const std::string& p) { workers = get_unsigned(v, p); });

    if (f.kind == ExperimentKind::Convergence) {
        for (const char* key : {"sweep", "estimators"})
            if (j.contains(key)) throw ValidationError(key, "not used by convergence experiments");
        auto& c = f.convergence;
        c.scene = f.scene.scene;
        c.init_doas = f.scene.idea.init_doas;
        c.iterations = f.scene.idea.max_iterations;
        c.master_seed = master_seed;
        c.workers = workers;
        optional_field(j, "", "trials", [&](const json& v, const std::string& p) { c.trials = get_unsigned(v, p); });
        optional_field(j, "", "iterations",
                       [&](const json& v, const std::string& p) { c.iterations = get_unsigned(v, p); });
        optional_field(j, "", "exact_covariance",
                       [&](const json& v, const std::string& p) { c.exact_covariance = get_bool(v, p); });
        optional_field(j, "", "num_samples", [&](const json& v, const std::string& p) {
            get_array(v, p);
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto m = get_unsigned(v[i], p + "[" + std::to_string(i) + "]");
                if (m < 1) throw ValidationError(p + "[" + std::to_string(i) + "]", "must be >= 1");
                f.num_samples.push_back(m);
            }
        });
        if (f.num_samples.empty()) f.num_samples.push_back(c.scene.num_samples);
        if (c.trials < 1) throw ValidationError("trials", "must be >= 1");
        if (c.iterations < 1) throw ValidationError("iterations", "must be >= 1");
        return f;
    }

    for (const char* key : {"num_samples", "iterations", "exact_covariance"})
        if (j.contains(key)) throw ValidationError(key, "only used by convergence experiments");
    auto& r = f.rmse;
    r.scene = f.scene.scene;
    r.idea_cfg = f.scene.idea;
    r.music_cfg = f.scene.music;
    r.master_seed = master_seed;
    r.workers = workers;
    optional_field(j, "", "trials", [&](const json& v, const std::string& p) { r.trials = get_unsigned(v, p); });
    optional_field(j, "", "estimators", [&](const json& v, const std::string& p) {
        get_array(v, p);
        r.estimators.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string q = p + "[" + std::to_string(i) + "]";
            try {
                r.estimators.push_back(bench::parse_estimator(get_string(v[i], q)));
            } catch (const InvalidArgument& e) {
                throw ValidationError(q, e.what());
            }
        }
    });

    if (!j.contains("sweep")) throw ValidationError("sweep", "missing");
    const json& sw = j["sweep"];
    check_keys(sw, "sweep", {"variable", "values", "geometries"});
    if (!sw.contains("variable")) throw ValidationError("sweep.variable", "missing");
    try {
        r.variable = bench::parse_sweep_variable(get_string(sw["variable"], "sweep.variable"));
    } catch (const InvalidArgument& e) {
        throw ValidationError("sweep.variable", e.what());
    }
    if (r.variable == bench::SweepVariable::Geometry) {
        if (sw.contains("values")) throw ValidationError("sweep.values", "geometry sweeps use 'geometries'");
        if (!sw.contains("geometries")) throw ValidationError("sweep.geometries", "missing");
        get_array(sw["geometries"], "sweep.geometries");
        for (std::size_t i = 0; i < sw["geometries"].size(); ++i)
            r.geometries.push_back(
                parse_geometry(sw["geometries"][i], "sweep.geometries[" + std::to_string(i) + "]"));
    } else {
        if (sw.contains("geometries")) throw ValidationError("sweep.geometries", "only for geometry sweeps");
        if (!sw.contains("values")) throw ValidationError("sweep.values", "missing");
        get_array(sw["values"], "sweep.values");
        for (std::size_t i = 0; i < sw["values"].size(); ++i)
            r.values.push_back(get_number(sw["values"][i], "sweep.values[" + std::to_string(i) + "]"));
    }
    if (f.kind == ExperimentKind::Subarray &&
        (r.variable != bench::SweepVariable::Geometry || r.geometries.size() != 2))
        throw ValidationError("sweep", "subarray experiments sweep exactly two geometries (baseline, candidate)");
    r.validate();
    return f;
}

ExperimentFile load_experiment(const std::filesystem::path& path) { return parse_experiment(read_file(path)); }

}  // namespace mimodoa::cli
