#pragma once

// Monte-Carlo harness: RMSE sweeps and averaged cost traces.
//
// Trial t of every sweep point draws its snapshots with
// derive_seed(master_seed, t), so sweep points share noise realizations and
// results do not depend on how trials are spread over workers.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mimodoa/idea.hpp"
#include "mimodoa/music.hpp"
#include "mimodoa/scene.hpp"

namespace mimodoa::bench {

enum class SweepVariable { SnrDb, NumSamples, Geometry };

SweepVariable parse_sweep_variable(std::string_view name);  ///< "snr_db", "num_samples", "geometry"
std::string_view to_string(SweepVariable v);

enum class Estimator { Idea, Music };

Estimator parse_estimator(std::string_view name);  ///< "idea", "music"
std::string_view to_string(Estimator e);

/// Best assignment of estimates to truth: perm[k] is the estimate paired with
/// truth k. Minimizes the summed squared theta error plus wrapped phi error;
/// ties go to the lexicographically smallest permutation. K <= 6.
std::vector<std::size_t> associate(const std::vector<idea::Doa>& estimated,
                                   const std::vector<idea::Doa>& truth);

/// Azimuth difference wrapped to (-180, 180].
double wrap_azimuth_error(double deg);

struct ExperimentSpec {
    SceneConfig scene;  ///< template; the sweep variable overrides one field
    SweepVariable variable = SweepVariable::SnrDb;
    std::vector<double> values;             ///< snr_db or num_samples sweeps
    std::vector<ArrayGeometry> geometries;  ///< geometry sweeps
    std::size_t trials = 500;
    std::vector<Estimator> estimators{Estimator::Idea};
    idea::IdeaConfig idea_cfg;
    music::MusicConfig music_cfg;
    std::uint64_t master_seed = 1;
    std::size_t workers = 1;  ///< does not affect results

    std::size_t num_points() const;
    /// Scene of sweep point i with the seed left at the template value.
    SceneConfig point_scene(std::size_t i) const;
    /// "30", "50", "5x4" etc.
    std::string point_label(std::size_t i) const;
    void validate() const;
};

/// FNV-1a over a canonical text form of the spec. Ignores workers.
std::uint64_t spec_hash(const ExperimentSpec& spec);

struct AngleRmse {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
};

struct RmseRow {
    std::size_t point = 0;
    std::string label;
    Estimator estimator = Estimator::Idea;
    std::vector<AngleRmse> rmse;  ///< per source, scene order
    std::size_t trials_ok = 0;
    std::size_t trials_failed = 0;
};

struct RmseTable {
    SweepVariable variable = SweepVariable::SnrDb;
    std::vector<RmseRow> rows;  ///< point-major, estimators in spec order
    std::size_t trials = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t spec_hash = 0;

    const RmseRow& row(std::size_t point, Estimator e) const;
};

RmseTable run_experiment(const ExperimentSpec& spec);

/// One row per (point, estimator, source, angle), preceded by "#" metadata.
void write_rmse_csv(std::ostream& out, const RmseTable& table);
/// One row per (point, estimator) with theta_k/phi_k columns.
void write_rmse_wide_csv(std::ostream& out, const RmseTable& table);

struct Reduction {
    std::vector<AngleRmse> percent;  ///< 100 (1 - rmse_candidate / rmse_baseline)
};

/// RMSE reduction of sweep point `candidate` against `baseline`.
Reduction rmse_reduction(const RmseTable& table, Estimator e, std::size_t baseline, std::size_t candidate);
/// theta_1..theta_K then phi_1..phi_K, in percent.
void write_reduction_csv(std::ostream& out, const RmseTable& table, Estimator e, std::size_t baseline,
                         std::size_t candidate);

struct ConvergenceSpec {
    SceneConfig scene;  ///< num_samples and snr_db taken from here
    std::size_t iterations = 10;
    std::size_t trials = 200;
    std::vector<idea::Doa> init_doas;
    bool exact_covariance = false;  ///< use A P A^H + sigma^2 I instead of samples
    std::uint64_t master_seed = 1;
    std::size_t workers = 1;
};

struct ConvergenceTrace {
    std::size_t num_sources = 0;
    std::vector<double> update_tx;     ///< mean Q_tx per update index
    std::vector<double> update_rx;
    std::vector<double> iteration_tx;  ///< mean over the K updates of each iteration
    std::vector<double> iteration_rx;
    std::size_t trials_ok = 0;
    std::size_t trials_failed = 0;
};

ConvergenceTrace convergence_trace(const ConvergenceSpec& spec);

/// "update,iteration,q_tx,q_rx" rows after "#" metadata.
void write_convergence_csv(std::ostream& out, const ConvergenceTrace& trace, const ConvergenceSpec& spec);

}  // namespace mimodoa::bench
