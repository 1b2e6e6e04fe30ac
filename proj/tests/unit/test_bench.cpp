#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mimodoa/bench.hpp"
#include "mimodoa/errors.hpp"
#include "scenes.hpp"

using namespace mimodoa;
using namespace mimodoa::bench;

TEST_CASE("azimuth error wrapping") {
    CHECK(wrap_azimuth_error(0.0) == 0.0);
    CHECK(wrap_azimuth_error(180.0) == 180.0);
    CHECK(wrap_azimuth_error(-180.0) == 180.0);
    CHECK(wrap_azimuth_error(359.0) == doctest::Approx(-1.0));
    CHECK(wrap_azimuth_error(-350.0) == doctest::Approx(10.0));
}

TEST_CASE("association") {
    const std::vector<idea::Doa> truth{{30.0, 25.0}, {70.0, 80.0}, {50.0, 200.0}};
    CHECK(associate(truth, truth) == std::vector<std::size_t>{0, 1, 2});
    const std::vector<idea::Doa> swapped{{70.0, 80.0}, {30.0, 25.0}, {50.0, 200.0}};
    CHECK(associate(swapped, truth) == std::vector<std::size_t>{1, 0, 2});

    SUBCASE("azimuth wraps across zero") {
        const std::vector<idea::Doa> t{{40.0, 1.0}, {40.0, 180.0}};
        const std::vector<idea::Doa> e{{40.0, 181.0}, {40.0, 359.0}};
        CHECK(associate(e, t) == std::vector<std::size_t>{1, 0});
    }
    SUBCASE("ties go to the smallest permutation") {
        const std::vector<idea::Doa> t{{40.0, 10.0}, {40.0, 30.0}};
        const std::vector<idea::Doa> e{{40.0, 20.0}, {40.0, 20.0}};
        CHECK(associate(e, t) == std::vector<std::size_t>{0, 1});
    }
    CHECK_THROWS_AS(associate({{1.0, 1.0}}, truth), DimensionMismatch);
}

namespace {

ExperimentSpec small_spec() {
    ExperimentSpec s;
    s.scene = testing::reference_scene();
    s.variable = SweepVariable::SnrDb;
    s.values = {10.0, 30.0};
    s.trials = 20;
    s.idea_cfg.max_iterations = 6;
    s.music_cfg.theta_step_deg = s.music_cfg.phi_step_deg = 2.0;
    return s;
}

}  // namespace

TEST_CASE("noise-free experiments are exact") {
    auto spec = small_spec();
    spec.scene.noise_free = true;
    spec.values = {30.0};
    spec.idea_cfg.max_iterations = 10;
    const auto t = run_experiment(spec);
    const auto& row = t.row(0, Estimator::Idea);
    CHECK(row.trials_ok == 20);
    for (const auto& r : row.rmse) {
        CHECK(r.theta_deg <= 1e-5);
        CHECK(r.phi_deg <= 1e-5);
    }
}

TEST_CASE("higher SNR lowers RMSE") {
    auto spec = small_spec();
    spec.trials = 100;
    const auto t = run_experiment(spec);
    for (std::size_t s = 0; s < 2; ++s) {
        CHECK(t.row(1, Estimator::Idea).rmse[s].theta_deg < t.row(0, Estimator::Idea).rmse[s].theta_deg);
        CHECK(t.row(1, Estimator::Idea).rmse[s].phi_deg < t.row(0, Estimator::Idea).rmse[s].phi_deg);
    }
}

TEST_CASE("failed trials are counted, not dropped silently") {
    const auto c = testing::colliding_scene();
    ExperimentSpec spec;
    spec.scene = c.scene;
    spec.values = {30.0};
    spec.trials = 5;
    spec.idea_cfg.init_doas = c.init;
    const auto t = run_experiment(spec);
    const auto& row = t.row(0, Estimator::Idea);
    CHECK(row.trials_failed == 5);
    CHECK(row.trials_ok == 0);
    CHECK(std::isnan(row.rmse[0].theta_deg));
    std::ostringstream o;
    write_rmse_csv(o, t);
    CHECK(o.str().find(",0,5\n") != std::string::npos);
}

TEST_CASE("spec validation") {
    auto spec = small_spec();
    spec.trials = 0;
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
    spec = small_spec();
    spec.values.clear();
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
    spec = small_spec();
    spec.variable = SweepVariable::NumSamples;
    spec.values = {10.5};
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
    spec = small_spec();
    spec.variable = SweepVariable::Geometry;
    spec.geometries = {{2, 2, 0.5, 90.0}};
    CHECK_THROWS_AS(run_experiment(spec), ValidationError);
}

TEST_CASE("sweep points") {
    auto spec = small_spec();
    spec.variable = SweepVariable::NumSamples;
    spec.values = {10, 500};
    CHECK(spec.point_scene(1).num_samples == 500);
    CHECK(spec.point_label(1) == "500");
    spec.variable = SweepVariable::Geometry;
    spec.geometries = {{3, 3, 0.5, 90.0}, {5, 4, 0.5, 90.0}};
    CHECK(spec.num_points() == 2);
    CHECK(spec.point_label(1) == "5x4");
    CHECK(spec.point_scene(1).geometry.n_tx == 5);
}

TEST_CASE("spec hash ignores workers only") {
    auto a = small_spec();
    auto b = a;
    b.workers = 4;
    CHECK(spec_hash(a) == spec_hash(b));
    b.trials = 21;
    CHECK(spec_hash(a) != spec_hash(b));
    b = a;
    b.master_seed = 2;
    CHECK(spec_hash(a) != spec_hash(b));
}

TEST_CASE("results do not depend on worker count") {
    auto spec = small_spec();
    spec.estimators = {Estimator::Idea, Estimator::Music};
    std::ostringstream one, three;
    write_rmse_csv(one, run_experiment(spec));
    spec.workers = 3;
    write_rmse_csv(three, run_experiment(spec));
    CHECK(one.str() == three.str());
}

TEST_CASE("RMSE CSV layout") {
    auto spec = small_spec();
    spec.values = {30.0};
    spec.trials = 2;
    const auto t = run_experiment(spec);
    std::ostringstream o;
    write_rmse_csv(o, t);
    std::istringstream in(o.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "# schema: mimodoa-rmse/1");
    std::getline(in, line);
    CHECK(line.rfind("# spec_hash: ", 0) == 0);
    std::getline(in, line);
    CHECK(line == "# master_seed: 1");
    std::getline(in, line);
    CHECK(line == "# trials: 2");
    std::getline(in, line);
    CHECK(line == "sweep_variable,sweep_value,estimator,source,angle,rmse_deg,trials_ok,trials_failed");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 4);

    std::ostringstream w;
    write_rmse_wide_csv(w, t);
    CHECK(w.str().find("snr_db,estimator,theta1,theta2,phi1,phi2,trials_ok,trials_failed\n30,idea,") !=
          std::string::npos);
}

TEST_CASE("sub-array reduction summary") {
    auto spec = small_spec();
    spec.variable = SweepVariable::Geometry;
    spec.geometries = {{3, 3, 0.5, 90.0}, {5, 4, 0.5, 90.0}};
    spec.scene.snr_db = 5.0;
    spec.trials = 200;
    const auto t = run_experiment(spec);
    const auto red = rmse_reduction(t, Estimator::Idea, 0, 1);
    REQUIRE(red.percent.size() == 2);
    for (const auto& p : red.percent) {
        CHECK(p.theta_deg > 0.0);
        CHECK(p.phi_deg > 0.0);
    }
    std::ostringstream o;
    write_reduction_csv(o, t, Estimator::Idea, 0, 1);
    CHECK(o.str().find("estimator,baseline,candidate,theta1_pct,theta2_pct,phi1_pct,phi2_pct\nidea,3x3,5x4,") !=
          std::string::npos);
    CHECK_THROWS_AS(t.row(0, Estimator::Music), InvalidArgument);
}

TEST_CASE("convergence traces") {
    ConvergenceSpec c;
    c.scene = testing::reference_scene();
    c.trials = 10;
    c.iterations = 8;

    SUBCASE("exact noise-free covariance decays to zero") {
        c.scene.noise_free = true;
        c.exact_covariance = true;
        const auto t = convergence_trace(c);
        REQUIRE(t.update_tx.size() == 16);
        CHECK(t.iteration_tx.size() == 8);
        CHECK(t.update_tx.back() < 1e-12);
        CHECK(t.update_rx.back() < 1e-12);
    }
    SUBCASE("noisy traces level off") {
        const auto t = convergence_trace(c);
        CHECK(t.trials_ok == 10);
        CHECK(t.iteration_tx.back() > 0.0);
        CHECK(t.iteration_tx.back() <= t.iteration_tx.front());
        std::ostringstream o;
        write_convergence_csv(o, t, c);
        CHECK(o.str().find("update,iteration,q_tx,q_rx\n0,1,") != std::string::npos);
    }
}

TEST_CASE("name parsing") {
    CHECK(parse_estimator("music") == Estimator::Music);
    CHECK_THROWS_AS(parse_estimator("esprit"), InvalidArgument);
    CHECK(parse_sweep_variable("geometry") == SweepVariable::Geometry);
    CHECK_THROWS_AS(parse_sweep_variable("snr"), InvalidArgument);
}
