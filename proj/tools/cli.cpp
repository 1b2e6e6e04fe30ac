#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "mimodoa/bench.hpp"
#include "mimodoa/complexity.hpp"
#include "mimodoa/errors.hpp"
#include "mimodoa/idea.hpp"
#include "mimodoa/music.hpp"
#include "mimodoa/scene.hpp"
#include "mimodoa/snapshot_io.hpp"
#include "scene_file.hpp"
#include "svg_plot.hpp"

namespace mimodoa::cli {
namespace {

namespace fs = std::filesystem;

enum class Format { Csv, Svg, Both };

struct SceneOverrides {
    std::optional<double> snr_db;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    bool noise_free = false;
    std::optional<std::size_t> iterations;
    std::optional<double> grid_step;

    void add_to(CLI::App& app) {
        app.add_option("--snr", snr_db, "SNR in dB");
        app.add_option("--samples", samples, "number of snapshots M")->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "random seed");
        app.add_flag("--noise-free", noise_free, "synthesize without noise");
        app.add_option("--iterations", iterations, "iDEA full iterations T")->check(CLI::PositiveNumber);
        app.add_option("--grid-step", grid_step, "MUSIC grid step in degrees")->check(CLI::PositiveNumber);
    }

    void apply(SceneFile& f) const {
        if (snr_db) f.scene.snr_db = *snr_db;
        if (samples) f.scene.num_samples = *samples;
        if (seed) f.scene.seed = *seed;
        if (noise_free) f.scene.noise_free = true;
        if (iterations) f.idea.max_iterations = *iterations;
        if (grid_step) f.music.theta_step_deg = f.music.phi_step_deg = *grid_step;
        f.scene.validate();
    }
};

const std::map<std::string, Format> kFormats{{"csv", Format::Csv}, {"svg", Format::Svg}, {"both", Format::Both}};

bool wants_csv(Format f) { return f != Format::Svg; }
bool wants_svg(Format f) { return f != Format::Csv; }

fs::path resolve_out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return ".";
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    body(f);
    if (!f) throw IoError("write failed for '" + path.string() + "'");
}

std::string fixed(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string_view status_name(idea::DoaStatus s) {
    switch (s) {
        case idea::DoaStatus::Ok: return "ok";
        case idea::DoaStatus::Clamped: return "clamped";
        case idea::DoaStatus::AzimuthUndefined: return "azimuth_undefined";
    }
    return "?";
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
    std::string scene;
    std::string out;
    SceneOverrides ov;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    auto f = load_scene(a.scene);
    a.ov.apply(f);
    const auto snaps = synthesize(f.scene);
    write_snapshots(a.out, snaps);
    out << "wrote " << snaps.num_samples() << " snapshots of length " << f.scene.geometry.virtual_size() << " to "
        << a.out << '\n';
    return kOk;
}

// ---- estimate ------------------------------------------------------------

struct EstimateArgs {
    std::string scene;
    std::string snapshots;
    std::size_t num_sources = 0;
    std::string estimator = "idea";
    std::string out;
    Format format = Format::Csv;
    bool spectrum = false;
    SceneOverrides ov;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
    SceneFile f;
    SnapshotSet snaps;
    std::size_t k = 0;
    if (!a.scene.empty()) {
        f = load_scene(a.scene);
        a.ov.apply(f);
        snaps = synthesize(f.scene);
        k = f.scene.num_sources();
        if (a.num_sources != 0 && a.num_sources != k)
            throw ValidationError("--num-sources", "disagrees with the scene file");
    } else {
        snaps = read_snapshots(a.snapshots);
        k = a.num_sources;
        if (k == 0) throw ValidationError("--num-sources", "required with --snapshots");
        if (a.ov.iterations) f.idea.max_iterations = *a.ov.iterations;
        if (a.ov.grid_step) f.music.theta_step_deg = f.music.phi_step_deg = *a.ov.grid_step;
        if (k >= snaps.geometry.n_tx || k >= snaps.geometry.n_rx)
            throw ValidationError("--num-sources", "K must be smaller than both n_tx and n_rx (K < N_tx and K < N_rx)");
    }
    const ArrayGeometry& g = snaps.geometry;
    const auto est = bench::parse_estimator(a.estimator);
    const ComplexMatrix r = sample_covariance(snaps);
    const fs::path dir = resolve_out_dir(a.out);
    const bool write = !a.out.empty() || std::getenv(kOutDirEnv) != nullptr;

    if (est == bench::Estimator::Idea) {
        const auto res = idea::run(idea::prepare_covariance(r, g, k), g, k, f.idea);
        out << "source,theta_deg,phi_deg,status\n";
        for (std::size_t s = 0; s < res.sources.size(); ++s)
            out << s + 1 << ',' << fixed(res.sources[s].theta_deg) << ',' << fixed(res.sources[s].phi_deg) << ','
                << status_name(res.sources[s].status) << '\n';
        if (write) {
            ensure_dir(dir);
            if (wants_csv(a.format))
                write_file(dir / "idea_trace.csv", [&](std::ostream& o) {
                    o << "update,iteration,q_tx,q_rx,prior_q_tx,prior_q_rx\n";
                    char buf[160];
                    for (const auto& rec : res.trace) {
                        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.9e,%.9e,", rec.update, rec.iteration,
                                      rec.cost.tx, rec.cost.rx);
                        o << buf;
                        if (rec.prior) {
                            std::snprintf(buf, sizeof(buf), "%.9e,%.9e\n", rec.prior->tx, rec.prior->rx);
                            o << buf;
                        } else {
                            o << ",\n";
                        }
                    }
                });
            if (wants_svg(a.format)) {
                Series tx{"Q_tx", {}, {}}, rx{"Q_rx", {}, {}};
                for (const auto& rec : res.trace) {
                    tx.x.push_back(static_cast<double>(rec.update));
                    tx.y.push_back(rec.cost.tx);
                    rx.x.push_back(static_cast<double>(rec.update));
                    rx.y.push_back(rec.cost.rx);
                }
                write_file(dir / "idea_trace.svg", [&](std::ostream& o) {
                    write_line_plot(o, {tx, rx}, {"iDEA cost trace", "update", "cost", true});
                });
            }
        }
    } else {
        const auto res = music::estimate(r, g, k, f.music);
        out << "source,theta_deg,phi_deg,value\n";
        for (std::size_t s = 0; s < res.doas.size(); ++s) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "%.6e", res.doas[s].value);
            out << s + 1 << ',' << fixed(res.doas[s].theta_deg) << ',' << fixed(res.doas[s].phi_deg) << ',' << buf
                << '\n';
        }
        if (write && a.spectrum) {
            ensure_dir(dir);
            write_file(dir / "music_spectrum.csv", [&](std::ostream& o) { music::write_spectrum_csv(o, res.spectrum); });
        }
    }
    return kOk;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
    std::string spec;
    std::string out;
    Format format = Format::Csv;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
};

void rmse_svg(std::ostream& o, const bench::RmseTable& t, const bench::ExperimentSpec& spec) {
    std::vector<Series> series;
    for (const auto e : spec.estimators)
        for (std::size_t s = 0; s < spec.scene.num_sources(); ++s)
            for (int a = 0; a < 2; ++a) {
                Series sr{std::string(bench::to_string(e)) + (a == 0 ? " theta" : " phi") + std::to_string(s + 1),
                          {}, {}};
                for (std::size_t p = 0; p < spec.num_points(); ++p) {
                    const auto& row = t.row(p, e);
                    sr.x.push_back(spec.variable == bench::SweepVariable::Geometry ? static_cast<double>(p)
                                                                                    : spec.values[p]);
                    sr.y.push_back(a == 0 ? row.rmse[s].theta_deg : row.rmse[s].phi_deg);
                }
                series.push_back(std::move(sr));
            }
    const std::string xl = spec.variable == bench::SweepVariable::SnrDb        ? "SNR [dB]"
                           : spec.variable == bench::SweepVariable::NumSamples ? "samples M"
                                                                               : "geometry index";
    write_line_plot(o, series, {"RMSE", xl, "RMSE [deg]", true});
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
    auto f = load_experiment(a.spec);
    const fs::path dir = resolve_out_dir(a.out);
    ensure_dir(dir);

    if (f.kind == ExperimentKind::Convergence) {
        auto c = f.convergence;
        if (a.trials) c.trials = *a.trials;
        if (a.seed) c.master_seed = *a.seed;
        if (a.workers) c.workers = *a.workers;
        std::vector<Series> series;
        for (const auto m : f.num_samples) {
            c.scene.num_samples = m;
            const auto trace = bench::convergence_trace(c);
            out << "M=" << m << ": trials_ok=" << trace.trials_ok << " trials_failed=" << trace.trials_failed
                << " final q_tx=" << trace.iteration_tx.back() << " q_rx=" << trace.iteration_rx.back() << '\n';
            if (wants_csv(a.format))
                write_file(dir / ("convergence_M" + std::to_string(m) + ".csv"),
                           [&](std::ostream& o) { bench::write_convergence_csv(o, trace, c); });
            Series tx{"Q_tx M=" + std::to_string(m), {}, trace.update_tx};
            Series rx{"Q_rx M=" + std::to_string(m), {}, trace.update_rx};
            for (std::size_t u = 0; u < trace.update_tx.size(); ++u) {
                tx.x.push_back(static_cast<double>(u));
                rx.x.push_back(static_cast<double>(u));
            }
            series.push_back(std::move(tx));
            series.push_back(std::move(rx));
        }
        if (wants_svg(a.format))
            write_file(dir / "convergence.svg", [&](std::ostream& o) {
                write_line_plot(o, series, {"iDEA averaged cost", "update", "cost", true});
            });
        return kOk;
    }

    auto spec = f.rmse;
    if (a.trials) spec.trials = *a.trials;
    if (a.seed) spec.master_seed = *a.seed;
    if (a.workers) spec.workers = *a.workers;
    const auto table = bench::run_experiment(spec);
    if (wants_csv(a.format)) {
        write_file(dir / "rmse.csv", [&](std::ostream& o) { bench::write_rmse_csv(o, table); });
        write_file(dir / "rmse_wide.csv", [&](std::ostream& o) { bench::write_rmse_wide_csv(o, table); });
    }
    if (wants_svg(a.format)) write_file(dir / "rmse.svg", [&](std::ostream& o) { rmse_svg(o, table, spec); });
    bench::write_rmse_wide_csv(out, table);

    if (f.kind == ExperimentKind::Subarray) {
        for (const auto e : spec.estimators) {
            bench::write_reduction_csv(out, table, e, 0, 1);
            if (wants_csv(a.format))
                write_file(dir / ("reduction_" + std::string(bench::to_string(e)) + ".csv"),
                           [&](std::ostream& o) { bench::write_reduction_csv(o, table, e, 0, 1); });
        }
    }
    std::size_t failed = 0, total = 0;
    for (const auto& r : table.rows) {
        failed += r.trials_failed;
        total += r.trials_ok + r.trials_failed;
    }
    if (failed > 0) out << "# failed trials: " << failed << " of " << total << '\n';
    return kOk;
}

// ---- complexity ----------------------------------------------------------

struct ComplexityArgs {
    complexity::ComplexityInputs in;
    std::string sweep;
    std::vector<std::uint64_t> values;
    std::uint64_t t_per_k = 0;
    bool array_follows_k = false;
    bool csv = false;
    std::string out;
    Format format = Format::Csv;
};

int cmd_complexity(const ComplexityArgs& a, std::ostream& out) {
    std::vector<complexity::ComplexityReport> rows;
    std::optional<complexity::SweepParam> param;
    if (a.sweep.empty()) {
        if (!a.values.empty()) throw ValidationError("--values", "requires --sweep");
        rows.push_back(complexity::evaluate(a.in));
    } else {
        param = complexity::parse_sweep_param(a.sweep);
        rows = complexity::sweep(*param, a.values, a.in, {a.t_per_k, a.array_follows_k});
    }
    if (a.csv)
        complexity::write_csv(out, rows);
    else
        complexity::write_table(out, rows);
    if (rows.size() == 1) out << "gain_db " << fixed(rows.front().gain_db, 2) << '\n';

    if (!a.out.empty()) {
        const fs::path dir = a.out;
        ensure_dir(dir);
        if (wants_csv(a.format))
            write_file(dir / "complexity.csv", [&](std::ostream& o) { complexity::write_csv(o, rows); });
        if (wants_svg(a.format) && param) {
            Series idea_s{"iDEA", {}, {}}, music_s{"MUSIC", {}, {}};
            for (std::size_t i = 0; i < rows.size(); ++i) {
                idea_s.x.push_back(static_cast<double>(a.values[i]));
                music_s.x.push_back(static_cast<double>(a.values[i]));
                idea_s.y.push_back(static_cast<double>(rows[i].idea_cost));
                music_s.y.push_back(static_cast<double>(rows[i].music_cost));
            }
            write_file(dir / "complexity.svg", [&](std::ostream& o) {
                write_line_plot(o, {idea_s, music_s},
                                {"complex multiplications", std::string(complexity::to_string(*param)), "count", true});
            });
        }
    }
    return kOk;
}

// ---- convergence -----------------------------------------------------------

struct ConvergenceArgs {
    std::string scene;
    std::size_t trials = 200;
    bool exact = false;
    std::string out;
    Format format = Format::Csv;
    std::size_t workers = 1;
    SceneOverrides ov;
};

int cmd_convergence(const ConvergenceArgs& a, std::ostream& out) {
    auto f = load_scene(a.scene);
    a.ov.apply(f);
    bench::ConvergenceSpec c;
    c.scene = f.scene;
    c.iterations = f.idea.max_iterations;
    c.trials = a.trials;
    c.init_doas = f.idea.init_doas;
    c.exact_covariance = a.exact;
    c.master_seed = f.scene.seed;
    c.workers = a.workers;
    const auto trace = bench::convergence_trace(c);
    bench::write_convergence_csv(out, trace, c);
    if (!a.out.empty() || std::getenv(kOutDirEnv)) {
        const fs::path dir = resolve_out_dir(a.out);
        ensure_dir(dir);
        if (wants_csv(a.format))
            write_file(dir / "convergence.csv", [&](std::ostream& o) { bench::write_convergence_csv(o, trace, c); });
        if (wants_svg(a.format)) {
            Series tx{"Q_tx", {}, trace.update_tx}, rx{"Q_rx", {}, trace.update_rx};
            for (std::size_t u = 0; u < trace.update_tx.size(); ++u) {
                tx.x.push_back(static_cast<double>(u));
                rx.x.push_back(static_cast<double>(u));
            }
            write_file(dir / "convergence.svg", [&](std::ostream& o) {
                write_line_plot(o, {tx, rx}, {"iDEA averaged cost", "update", "cost", true});
            });
        }
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mimodoa: 2D DOA estimation for MIMO virtual arrays"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mimodoa 1.0");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "synthesize snapshots from a scene file");
    s->add_option("--scene", synth.scene, "scene JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", synth.out, "snapshot file to write")->required();
    synth.ov.add_to(*s);

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "estimate DOAs from a scene or snapshot file");
    auto* scene_opt = e->add_option("--scene", est.scene, "scene JSON")->check(CLI::ExistingFile);
    auto* snap_opt = e->add_option("--snapshots", est.snapshots, "snapshot file")->check(CLI::ExistingFile);
    scene_opt->excludes(snap_opt);
    e->add_option("--num-sources,-K", est.num_sources, "number of sources (snapshot input)");
    e->add_option("--estimator", est.estimator, "idea or music")->check(CLI::IsMember({"idea", "music"}));
    e->add_option("--out", est.out, "output directory");
    e->add_option("--format", est.format, "csv, svg or both")->transform(CLI::CheckedTransformer(kFormats));
    e->add_flag("--spectrum", est.spectrum, "write the MUSIC pseudospectrum CSV");
    est.ov.add_to(*e);

    BenchArgs bn;
    auto* b = app.add_subcommand("bench", "run a Monte-Carlo experiment file");
    b->add_option("--spec", bn.spec, "experiment JSON")->required()->check(CLI::ExistingFile);
    b->add_option("--out", bn.out, "output directory");
    b->add_option("--format", bn.format, "csv, svg or both")->transform(CLI::CheckedTransformer(kFormats));
    b->add_option("--trials", bn.trials, "override trial count")->check(CLI::PositiveNumber);
    b->add_option("--seed", bn.seed, "override master seed");
    b->add_option("--workers", bn.workers, "worker threads")->check(CLI::PositiveNumber);

    ComplexityArgs cx;
    auto* c = app.add_subcommand("complexity", "complex-multiplication counts of iDEA and 2D MUSIC");
    c->add_option("--K", cx.in.k, "number of sources");
    c->add_option("--M", cx.in.m, "number of snapshots");
    c->add_option("--T", cx.in.t, "iDEA iterations");
    c->add_option("--n-tx", cx.in.n_tx, "transmit elements");
    c->add_option("--n-rx", cx.in.n_rx, "receive elements");
    c->add_option("--n-theta", cx.in.n_theta, "MUSIC elevation grid points");
    c->add_option("--n-phi", cx.in.n_phi, "MUSIC azimuth grid points");
    c->add_option("--sweep", cx.sweep, "parameter to sweep: K, M, T, n_tx, n_rx, n_theta, n_phi");
    c->add_option("--values", cx.values, "sweep values")->delimiter(',');
    c->add_option("--t-per-k", cx.t_per_k, "with --sweep K, set T = t_per_k * K");
    c->add_flag("--array-follows-k", cx.array_follows_k, "with --sweep K, set n_tx = n_rx = K + 1");
    c->add_flag("--csv", cx.csv, "print CSV instead of a table");
    c->add_option("--out", cx.out, "output directory");
    c->add_option("--format", cx.format, "csv, svg or both")->transform(CLI::CheckedTransformer(kFormats));

    ConvergenceArgs cv;
    auto* v = app.add_subcommand("convergence", "averaged iDEA cost traces for a scene file");
    v->add_option("--scene", cv.scene, "scene JSON")->required()->check(CLI::ExistingFile);
    v->add_option("--trials", cv.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    v->add_flag("--exact", cv.exact, "use the exact covariance instead of samples");
    v->add_option("--out", cv.out, "output directory");
    v->add_option("--format", cv.format, "csv, svg or both")->transform(CLI::CheckedTransformer(kFormats));
    v->add_option("--workers", cv.workers, "worker threads")->check(CLI::PositiveNumber);
    cv.ov.add_to(*v);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (e->parsed() && est.scene.empty() && est.snapshots.empty())
            throw CLI::RequiredError("--scene or --snapshots");
    } catch (const CLI::ParseError& pe) {
        const int code = app.exit(pe, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (s->parsed()) return cmd_synth(synth, out);
        if (e->parsed()) return cmd_estimate(est, out);
        if (b->parsed()) return cmd_bench(bn, out);
        if (c->parsed()) return cmd_complexity(cx, out);
        if (v->parsed()) return cmd_convergence(cv, out);
    } catch (const ValidationError& x) {
        err << "validation error: " << x.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& x) {
        err << "invalid argument: " << x.what() << '\n';
        return kUsage;
    } catch (const IoError& x) {
        err << "I/O error: " << x.what() << '\n';
        return kIo;
    } catch (const DegenerateUpdate& x) {
        err << "degenerate update: " << x.what() << '\n';
        return kDegenerate;
    } catch (const PeakDeficit& x) {
        err << "peak deficit: " << x.what() << " (found " << x.found().size() << ")\n";
        return kPeakDeficit;
    } catch (const NonFiniteCost& x) {
        err << "numeric error: " << x.what() << '\n';
        return kNumeric;
    } catch (const InconsistentSteering& x) {
        err << "numeric error: " << x.what() << '\n';
        return kNumeric;
    } catch (const DimensionMismatch& x) {
        err << "numeric error: " << x.what() << '\n';
        return kNumeric;
    } catch (const std::exception& x) {
        err << "error: " << x.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace mimodoa::cli
