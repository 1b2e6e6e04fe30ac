#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mimodoa/errors.hpp"
#include "mimodoa/music.hpp"
#include "scenes.hpp"

using namespace mimodoa;
using namespace mimodoa::music;

namespace {

MusicConfig coarse(double step) {
    MusicConfig c;
    c.theta_step_deg = c.phi_step_deg = step;
    return c;
}

// 1 / (a^H En En^H a) evaluated directly from the eigenvectors.
double direct_spectrum(const ComplexMatrix& r, const ArrayGeometry& g, std::size_t k, double theta, double phi) {
    const auto eig = hermitian_eig(r);
    const auto a = virtual_steering(Source{theta, phi, 1.0}, g);
    double d = 0.0;
    for (std::size_t c = k; c < r.rows(); ++c) {
        Complex p = 0.0;
        for (std::size_t i = 0; i < r.rows(); ++i) p += std::conj(eig.vectors(i, c)) * a[i];
        d += std::norm(p);
    }
    return 1.0 / d;
}

}  // namespace

TEST_CASE("grid sizes") {
    const MusicConfig c;
    CHECK(c.theta_points() == 901);
    CHECK(c.phi_points() == 3600);
    const auto one = coarse(1.0);
    CHECK(one.theta_points() == 91);
    CHECK(one.phi_points() == 360);
}

TEST_CASE("config validation") {
    auto c = coarse(1.0);
    c.theta_step_deg = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = coarse(1.0);
    c.phi_max_deg = 400.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = coarse(100.0);
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("folded spectrum equals the direct quadratic form") {
    auto scene = testing::reference_scene();
    scene.geometry = {3, 4, 0.45, 70.0};
    scene.snr_db = 5.0;
    const auto r = sample_covariance(synthesize(scene));
    auto cfg = coarse(7.5);
    const auto s = pseudospectrum(r, scene.geometry, 2, cfg);
    for (std::size_t i = 0; i < s.theta_deg.size(); i += 3)
        for (std::size_t j = 0; j < s.phi_deg.size(); j += 5) {
            const double want = direct_spectrum(r, scene.geometry, 2, s.theta_deg[i], s.phi_deg[j]);
            CHECK(s.at(i, j) == doctest::Approx(want).epsilon(1e-9));
        }
}

TEST_CASE("noise-free peaks sit on the true directions") {
    auto scene = testing::reference_scene();
    scene.noise_free = true;
    const auto res = estimate(exact_covariance(scene), scene.geometry, 2, coarse(0.5));
    REQUIRE(res.doas.size() == 2);
    const bool order = res.doas[0].theta_deg < 50.0;
    const auto& a = res.doas[order ? 0 : 1];
    const auto& b = res.doas[order ? 1 : 0];
    CHECK(a.theta_deg == doctest::Approx(30.0));
    CHECK(a.phi_deg == doctest::Approx(25.0));
    CHECK(b.theta_deg == doctest::Approx(70.0));
    CHECK(b.phi_deg == doctest::Approx(80.0));
    REQUIRE(res.eigenvalues.size() == 9);
    CHECK(res.eigenvalues[2] < 1e-10);
}

TEST_CASE("off-grid sources land within one cell") {
    SceneConfig scene;
    scene.geometry = {3, 3, 0.5, 90.0};
    scene.sources = {{33.3, 121.7, 1.0}, {61.2, 250.4, 1.0}};
    scene.noise_free = true;
    const auto res = estimate(exact_covariance(scene), scene.geometry, 2, coarse(1.0));
    for (const auto& src : scene.sources) {
        bool found = false;
        for (const auto& p : res.doas)
            found = found || (std::abs(p.theta_deg - src.theta_deg) <= 1.0 && std::abs(p.phi_deg - src.phi_deg) <= 1.0);
        CHECK(found);
    }
}

TEST_CASE("worker count does not change the spectrum") {
    auto scene = testing::reference_scene();
    const auto r = sample_covariance(synthesize(scene));
    auto cfg = coarse(2.0);
    const auto a = pseudospectrum(r, scene.geometry, 2, cfg);
    cfg.workers = 3;
    const auto b = pseudospectrum(r, scene.geometry, 2, cfg);
    CHECK(a.values == b.values);
}

TEST_CASE("peak finding") {
    Spectrum s;
    s.theta_deg = {0.0, 1.0, 2.0};
    s.phi_deg = {0.0, 90.0, 180.0, 270.0};
    s.values = {5, 1, 1, 4,
                1, 1, 1, 1,
                1, 1, 3, 1};
    SUBCASE("azimuth wraps") {
        const auto p = find_peaks(s, true);
        REQUIRE(p.size() == 2);
        CHECK(p[0].value == 5.0);
        CHECK(p[1].value == 3.0);
    }
    SUBCASE("open azimuth keeps the edge maximum") {
        const auto p = find_peaks(s, false);
        REQUIRE(p.size() == 3);
        CHECK(p[1].value == 4.0);
    }
    SUBCASE("plateaus are not strict maxima") {
        s.values.assign(12, 2.0);
        CHECK(find_peaks(s).empty());
    }
    SUBCASE("ties sort by theta then phi") {
        s.values = {1, 1, 1, 1,
                    7, 1, 7, 1,
                    1, 1, 1, 1};
        const auto p = find_peaks(s);
        REQUIRE(p.size() == 2);
        CHECK(p[0].phi_deg == 0.0);
        CHECK(p[1].phi_deg == 180.0);
    }
}

TEST_CASE("too few peaks raise PeakDeficit") {
    SceneConfig scene;
    scene.geometry = {4, 4, 0.5, 90.0};
    scene.sources = {{20.0, 40.0, 1.0}, {50.0, 160.0, 1.0}, {75.0, 290.0, 1.0}};
    MusicConfig cfg;
    cfg.theta_step_deg = 45.0;
    cfg.phi_step_deg = 180.0;
    try {
        estimate(exact_covariance(scene), scene.geometry, 3, cfg);
        FAIL("expected PeakDeficit");
    } catch (const PeakDeficit& e) {
        CHECK(e.found().size() < 3);
    }
}

TEST_CASE("argument errors") {
    const ArrayGeometry g;
    CHECK_THROWS_AS(pseudospectrum(ComplexMatrix::identity(4), g, 1, coarse(5.0)), DimensionMismatch);
    CHECK_THROWS_AS(pseudospectrum(ComplexMatrix::identity(9), g, 9, coarse(5.0)), InvalidArgument);
}

TEST_CASE("spectrum CSV") {
    Spectrum s;
    s.theta_deg = {0.0, 0.5};
    s.phi_deg = {10.0};
    s.values = {1.0, 2.5};
    std::ostringstream o;
    write_spectrum_csv(o, s);
    CHECK(o.str() == "theta_deg,phi_deg,value\n0.000000,10.000000,1.0000000000e+00\n"
                     "0.500000,10.000000,2.5000000000e+00\n");
}
