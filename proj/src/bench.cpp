#include "mimodoa/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "mimodoa/errors.hpp"
#include "mimodoa/rng.hpp"

namespace mimodoa::bench {
namespace {

constexpr std::string_view kRmseSchema = "mimodoa-rmse/1";
constexpr std::string_view kRmseWideSchema = "mimodoa-rmse-wide/1";
constexpr std::string_view kReductionSchema = "mimodoa-reduction/1";
constexpr std::string_view kConvergenceSchema = "mimodoa-convergence/1";

// Runs job(i) for i in [0, n). Results must be written to slot i only.
template <class Job>
void parallel_for(std::size_t n, std::size_t workers, Job&& job) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) job(i);
        });
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_rmse(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9e", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_geometry(std::ostream& out, const ArrayGeometry& g) {
    out << g.n_tx << ' ' << g.n_rx << ' ' << fmt_double(g.d_over_lambda) << ' ' << fmt_double(g.phi_trx_deg);
}

std::string geometry_label(const ArrayGeometry& g) {
    return std::to_string(g.n_tx) + "x" + std::to_string(g.n_rx);
}

std::vector<idea::Doa> truth_of(const SceneConfig& scene) {
    std::vector<idea::Doa> out;
    for (const auto& s : scene.sources) out.push_back({s.theta_deg, s.phi_deg});
    return out;
}

// Squared errors of one estimator in one trial, per source in scene order.
struct TrialErrors {
    bool ok = false;
    std::vector<AngleRmse> sq;
};

TrialErrors score(const std::vector<idea::Doa>& est, const std::vector<idea::Doa>& truth) {
    const auto perm = associate(est, truth);
    TrialErrors e{true, {}};
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double dt = est[perm[k]].theta_deg - truth[k].theta_deg;
        const double dp = wrap_azimuth_error(est[perm[k]].phi_deg - truth[k].phi_deg);
        e.sq.push_back({dt * dt, dp * dp});
    }
    return e;
}

TrialErrors run_estimator(Estimator e, const SnapshotSet& snaps, const SceneConfig& scene,
                          const ExperimentSpec& spec) {
    const auto truth = truth_of(scene);
    const std::size_t k = scene.num_sources();
    try {
        const ComplexMatrix r = sample_covariance(snaps);
        std::vector<idea::Doa> est;
        if (e == Estimator::Idea) {
            const auto res = idea::run(idea::prepare_covariance(r, scene.geometry, k), scene.geometry, k,
                                       spec.idea_cfg);
            for (const auto& s : res.sources) est.push_back({s.theta_deg, s.phi_deg});
        } else {
            music::MusicConfig mc = spec.music_cfg;
            mc.workers = 1;
            const auto res = music::estimate(r, scene.geometry, k, mc);
            for (const auto& p : res.doas) est.push_back({p.theta_deg, p.phi_deg});
        }
        return score(est, truth);
    } catch (const Error&) {
        return {};
    }
}

}  // namespace

SweepVariable parse_sweep_variable(std::string_view name) {
    if (name == "snr_db") return SweepVariable::SnrDb;
    if (name == "num_samples") return SweepVariable::NumSamples;
    if (name == "geometry") return SweepVariable::Geometry;
    throw InvalidArgument("unknown sweep variable '" + std::string(name) +
                          "' (expected snr_db, num_samples or geometry)");
}

std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::SnrDb: return "snr_db";
        case SweepVariable::NumSamples: return "num_samples";
        case SweepVariable::Geometry: return "geometry";
    }
    return "?";
}

Estimator parse_estimator(std::string_view name) {
    if (name == "idea") return Estimator::Idea;
    if (name == "music") return Estimator::Music;
    throw InvalidArgument("unknown estimator '" + std::string(name) + "' (expected idea or music)");
}

std::string_view to_string(Estimator e) { return e == Estimator::Idea ? "idea" : "music"; }

double wrap_azimuth_error(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

std::vector<std::size_t> associate(const std::vector<idea::Doa>& estimated,
                                   const std::vector<idea::Doa>& truth) {
    if (estimated.size() != truth.size())
        throw DimensionMismatch("associate: " + std::to_string(estimated.size()) + " estimates for " +
                                std::to_string(truth.size()) + " sources");
    if (truth.size() > 6) throw InvalidArgument("associate supports at most 6 sources");
    std::vector<std::size_t> perm(truth.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::size_t> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double c = 0.0;
        for (std::size_t k = 0; k < truth.size(); ++k) {
            const double dt = estimated[perm[k]].theta_deg - truth[k].theta_deg;
            const double dp = wrap_azimuth_error(estimated[perm[k]].phi_deg - truth[k].phi_deg);
            c += dt * dt + dp * dp;
        }
        if (c < best_cost) {
            best_cost = c;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

std::size_t ExperimentSpec::num_points() const {
    return variable == SweepVariable::Geometry ? geometries.size() : values.size();
}

SceneConfig ExperimentSpec::point_scene(std::size_t i) const {
    SceneConfig s = scene;
    switch (variable) {
        case SweepVariable::SnrDb: s.snr_db = values.at(i); break;
        case SweepVariable::NumSamples: s.num_samples = static_cast<std::size_t>(values.at(i)); break;
        case SweepVariable::Geometry: s.geometry = geometries.at(i); break;
    }
    return s;
}

std::string ExperimentSpec::point_label(std::size_t i) const {
    switch (variable) {
        case SweepVariable::SnrDb: {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%g", values.at(i));
            return buf;
        }
        case SweepVariable::NumSamples: return std::to_string(static_cast<std::size_t>(values.at(i)));
        case SweepVariable::Geometry: return geometry_label(geometries.at(i));
    }
    return {};
}

void ExperimentSpec::validate() const {
    if (trials < 1) throw ValidationError("trials", "must be >= 1");
    if (num_points() == 0) throw ValidationError("sweep", "needs at least one value");
    if (estimators.empty()) throw ValidationError("estimators", "needs at least one estimator");
    if (variable == SweepVariable::NumSamples)
        for (const double v : values)
            if (!(v >= 1.0) || v != std::floor(v))
                throw ValidationError("sweep.values", "sample counts must be positive integers");
    for (std::size_t i = 0; i < num_points(); ++i) point_scene(i).validate();
    if (idea_cfg.max_iterations < 1) throw ValidationError("idea.iterations", "must be >= 1");
    if (!idea_cfg.init_doas.empty() && idea_cfg.init_doas.size() + 1 != scene.num_sources())
        throw ValidationError("idea.init", "needs K-1 initial DOAs");
    if (std::find(estimators.begin(), estimators.end(), Estimator::Music) != estimators.end())
        music_cfg.validate();
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    std::ostringstream s;
    write_geometry(s, spec.scene.geometry);
    s << '|';
    for (const auto& src : spec.scene.sources)
        s << fmt_double(src.theta_deg) << ',' << fmt_double(src.phi_deg) << ',' << fmt_double(src.power) << ';';
    s << '|' << fmt_double(spec.scene.snr_db) << '|' << spec.scene.noise_free << '|' << spec.scene.num_samples;
    s << '|' << to_string(spec.variable) << '|';
    for (const double v : spec.values) s << fmt_double(v) << ',';
    for (const auto& g : spec.geometries) {
        write_geometry(s, g);
        s << ',';
    }
    s << '|' << spec.trials << '|';
    for (const auto e : spec.estimators) s << to_string(e) << ',';
    s << '|' << spec.idea_cfg.max_iterations << ',' << fmt_double(spec.idea_cfg.convergence_epsilon) << ',';
    for (const auto& d : spec.idea_cfg.init_doas) s << fmt_double(d.theta_deg) << ':' << fmt_double(d.phi_deg) << ',';
    const auto& m = spec.music_cfg;
    s << '|' << fmt_double(m.theta_step_deg) << ',' << fmt_double(m.phi_step_deg) << ','
      << fmt_double(m.theta_min_deg) << ',' << fmt_double(m.theta_max_deg) << ',' << fmt_double(m.phi_min_deg)
      << ',' << fmt_double(m.phi_max_deg);
    s << '|' << spec.master_seed;

    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : s.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const RmseRow& RmseTable::row(std::size_t point, Estimator e) const {
    for (const auto& r : rows)
        if (r.point == point && r.estimator == e) return r;
    throw InvalidArgument("RMSE table has no row for point " + std::to_string(point) + " and estimator " +
                          std::string(to_string(e)));
}

RmseTable run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    RmseTable table;
    table.variable = spec.variable;
    table.trials = spec.trials;
    table.master_seed = spec.master_seed;
    table.spec_hash = spec_hash(spec);

    const std::size_t ne = spec.estimators.size();
    for (std::size_t p = 0; p < spec.num_points(); ++p) {
        const SceneConfig base = spec.point_scene(p);
        const std::size_t k = base.num_sources();

        std::vector<std::vector<TrialErrors>> outcome(spec.trials, std::vector<TrialErrors>(ne));
        parallel_for(spec.trials, spec.workers, [&](std::size_t t) {
            SceneConfig scene = base;
            scene.seed = derive_seed(spec.master_seed, t);
            const SnapshotSet snaps = synthesize(scene);
            for (std::size_t e = 0; e < ne; ++e) outcome[t][e] = run_estimator(spec.estimators[e], snaps, scene, spec);
        });

        for (std::size_t e = 0; e < ne; ++e) {
            RmseRow row;
            row.point = p;
            row.label = spec.point_label(p);
            row.estimator = spec.estimators[e];
            std::vector<AngleRmse> sum(k);
            for (std::size_t t = 0; t < spec.trials; ++t) {
                const auto& o = outcome[t][e];
                if (!o.ok) {
                    ++row.trials_failed;
                    continue;
                }
                ++row.trials_ok;
                for (std::size_t s = 0; s < k; ++s) {
                    sum[s].theta_deg += o.sq[s].theta_deg;
                    sum[s].phi_deg += o.sq[s].phi_deg;
                }
            }
            const double n = static_cast<double>(row.trials_ok);
            for (const auto& s : sum)
                row.rmse.push_back(row.trials_ok == 0
                                       ? AngleRmse{std::nan(""), std::nan("")}
                                       : AngleRmse{std::sqrt(s.theta_deg / n), std::sqrt(s.phi_deg / n)});
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

namespace {

void write_metadata(std::ostream& out, std::string_view schema, std::uint64_t hash, std::uint64_t seed,
                    std::size_t trials) {
    out << "# schema: " << schema << '\n';
    out << "# spec_hash: " << hex64(hash) << '\n';
    out << "# master_seed: " << seed << '\n';
    out << "# trials: " << trials << '\n';
}

}  // namespace

void write_rmse_csv(std::ostream& out, const RmseTable& table) {
    write_metadata(out, kRmseSchema, table.spec_hash, table.master_seed, table.trials);
    out << "sweep_variable,sweep_value,estimator,source,angle,rmse_deg,trials_ok,trials_failed\n";
    for (const auto& r : table.rows)
        for (std::size_t s = 0; s < r.rmse.size(); ++s)
            for (int a = 0; a < 2; ++a) {
                out << to_string(table.variable) << ',' << r.label << ',' << to_string(r.estimator) << ','
                    << s + 1 << ',' << (a == 0 ? "theta" : "phi") << ','
                    << fmt_rmse(a == 0 ? r.rmse[s].theta_deg : r.rmse[s].phi_deg) << ',' << r.trials_ok << ','
                    << r.trials_failed << '\n';
            }
}

void write_rmse_wide_csv(std::ostream& out, const RmseTable& table) {
    write_metadata(out, kRmseWideSchema, table.spec_hash, table.master_seed, table.trials);
    const std::size_t k = table.rows.empty() ? 0 : table.rows.front().rmse.size();
    out << to_string(table.variable) << ",estimator";
    for (std::size_t s = 1; s <= k; ++s) out << ",theta" << s;
    for (std::size_t s = 1; s <= k; ++s) out << ",phi" << s;
    out << ",trials_ok,trials_failed\n";
    for (const auto& r : table.rows) {
        out << r.label << ',' << to_string(r.estimator);
        for (const auto& a : r.rmse) out << ',' << fmt_rmse(a.theta_deg);
        for (const auto& a : r.rmse) out << ',' << fmt_rmse(a.phi_deg);
        out << ',' << r.trials_ok << ',' << r.trials_failed << '\n';
    }
}

Reduction rmse_reduction(const RmseTable& table, Estimator e, std::size_t baseline, std::size_t candidate) {
    const auto& b = table.row(baseline, e);
    const auto& c = table.row(candidate, e);
    if (b.rmse.size() != c.rmse.size()) throw DimensionMismatch("rmse_reduction: source counts differ");
    Reduction out;
    for (std::size_t s = 0; s < b.rmse.size(); ++s)
        out.percent.push_back({100.0 * (1.0 - c.rmse[s].theta_deg / b.rmse[s].theta_deg),
                               100.0 * (1.0 - c.rmse[s].phi_deg / b.rmse[s].phi_deg)});
    return out;
}

void write_reduction_csv(std::ostream& out, const RmseTable& table, Estimator e, std::size_t baseline,
                         std::size_t candidate) {
    const auto red = rmse_reduction(table, e, baseline, candidate);
    write_metadata(out, kReductionSchema, table.spec_hash, table.master_seed, table.trials);
    out << "estimator,baseline,candidate";
    for (std::size_t s = 1; s <= red.percent.size(); ++s) out << ",theta" << s << "_pct";
    for (std::size_t s = 1; s <= red.percent.size(); ++s) out << ",phi" << s << "_pct";
    out << '\n' << to_string(e) << ',' << table.row(baseline, e).label << ',' << table.row(candidate, e).label;
    char buf[32];
    for (const auto& p : red.percent) {
        std::snprintf(buf, sizeof(buf), ",%.2f", p.theta_deg);
        out << buf;
    }
    for (const auto& p : red.percent) {
        std::snprintf(buf, sizeof(buf), ",%.2f", p.phi_deg);
        out << buf;
    }
    out << '\n';
}

ConvergenceTrace convergence_trace(const ConvergenceSpec& spec) {
    spec.scene.validate();
    if (spec.trials < 1) throw ValidationError("trials", "must be >= 1");
    if (spec.iterations < 1) throw ValidationError("iterations", "must be >= 1");
    const std::size_t k = spec.scene.num_sources();
    const std::size_t updates = k * spec.iterations;

    idea::IdeaConfig cfg;
    cfg.max_iterations = spec.iterations;
    cfg.init_doas = spec.init_doas;

    struct Outcome {
        bool ok = false;
        std::vector<idea::CostPair> costs;
    };
    std::vector<Outcome> outcome(spec.trials);
    parallel_for(spec.trials, spec.workers, [&](std::size_t t) {
        SceneConfig scene = spec.scene;
        scene.seed = derive_seed(spec.master_seed, t);
        try {
            const ComplexMatrix r = spec.exact_covariance ? exact_covariance(scene) : sample_covariance(synthesize(scene));
            const auto res = idea::run(idea::prepare_covariance(r, scene.geometry, k), scene.geometry, k, cfg);
            for (const auto& rec : res.trace) outcome[t].costs.push_back(rec.cost);
            outcome[t].ok = true;
        } catch (const Error&) {
            outcome[t].ok = false;
        }
    });

    ConvergenceTrace out;
    out.num_sources = k;
    out.update_tx.assign(updates, 0.0);
    out.update_rx.assign(updates, 0.0);
    for (const auto& o : outcome) {
        if (!o.ok) {
            ++out.trials_failed;
            continue;
        }
        ++out.trials_ok;
        for (std::size_t u = 0; u < updates; ++u) {
            out.update_tx[u] += o.costs[u].tx;
            out.update_rx[u] += o.costs[u].rx;
        }
    }
    if (out.trials_ok > 0)
        for (std::size_t u = 0; u < updates; ++u) {
            out.update_tx[u] /= static_cast<double>(out.trials_ok);
            out.update_rx[u] /= static_cast<double>(out.trials_ok);
        }
    for (std::size_t it = 0; it < spec.iterations; ++it) {
        double tx = 0.0, rx = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            tx += out.update_tx[it * k + s];
            rx += out.update_rx[it * k + s];
        }
        out.iteration_tx.push_back(tx / static_cast<double>(k));
        out.iteration_rx.push_back(rx / static_cast<double>(k));
    }
    return out;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTrace& trace, const ConvergenceSpec& spec) {
    out << "# schema: " << kConvergenceSchema << '\n';
    out << "# master_seed: " << spec.master_seed << '\n';
    out << "# trials_ok: " << trace.trials_ok << '\n';
    out << "# trials_failed: " << trace.trials_failed << '\n';
    out << "# num_samples: " << spec.scene.num_samples << '\n';
    out << "update,iteration,q_tx,q_rx\n";
    for (std::size_t u = 0; u < trace.update_tx.size(); ++u)
        out << u << ',' << u / trace.num_sources + 1 << ',' << fmt_rmse(trace.update_tx[u]) << ','
            << fmt_rmse(trace.update_rx[u]) << '\n';
}

}  // namespace mimodoa::bench
