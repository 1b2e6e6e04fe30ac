#pragma once

// JSON scene and experiment files. Unknown keys are rejected; every
// diagnostic carries the dotted path of the offending field.
//
// Scene file:
//   { "geometry": {"n_tx": 3, "n_rx": 3, "d_over_lambda": 0.5, "phi_trx_deg": 90},
//     "sources": [{"theta_deg": 30, "phi_deg": 25, "power": 1}, ...],
//     "snr_db": 30, "noise_free": false, "num_samples": 50, "seed": 1,
//     "idea": {"iterations": 10, "init": [{"theta_deg": 10, "phi_deg": 10}],
//              "convergence_epsilon": 0},
//     "music": {"theta_step_deg": 0.1, "phi_step_deg": 0.1, ...} }
//
// Experiment file:
//   { "experiment": "rmse" | "subarray" | "convergence",
//     "scene": { scene file },
//     "sweep": {"variable": "snr_db", "values": [5, 10]}      rmse
//     "sweep": {"variable": "geometry", "geometries": [{...}]} subarray / rmse
//     "trials": 500, "estimators": ["idea", "music"], "master_seed": 1,
//     "workers": 1,
//     "num_samples": [10, 500], "iterations": 10, "exact_covariance": false }  convergence

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mimodoa/bench.hpp"
#include "mimodoa/idea.hpp"
#include "mimodoa/music.hpp"
#include "mimodoa/scene.hpp"

namespace mimodoa::cli {

struct SceneFile {
    SceneConfig scene;
    idea::IdeaConfig idea;
    music::MusicConfig music;
};

enum class ExperimentKind { Rmse, Subarray, Convergence };

struct ExperimentFile {
    ExperimentKind kind = ExperimentKind::Rmse;
    SceneFile scene;
    bench::ExperimentSpec rmse;          ///< rmse and subarray
    std::vector<std::size_t> num_samples;  ///< convergence traces, one per entry
    bench::ConvergenceSpec convergence;  ///< template for each trace
};

/// Throws ValidationError (bad content) or IoError (unreadable/malformed file).
SceneFile parse_scene(const std::string& text);
SceneFile load_scene(const std::filesystem::path& path);

ExperimentFile parse_experiment(const std::string& text);
ExperimentFile load_experiment(const std::filesystem::path& path);

}  // namespace mimodoa::cli
