#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mimodoa/errors.hpp"
#include "mimodoa/scene.hpp"
#include "mimodoa/snapshot_io.hpp"
#include "scenes.hpp"

using namespace mimodoa;

TEST_CASE("steering phases of a broadside array") {
    const ArrayGeometry g;
    const auto e = steering_epsilon({30.0, 0.0, 1.0}, g);
    CHECK(e.tx == doctest::Approx(-kPi * 0.5));
    CHECK(e.rx == doctest::Approx(0.0).epsilon(1e-12));

    const auto f = steering_epsilon({90.0, 90.0, 1.0}, g);
    CHECK(f.tx == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(f.rx == doctest::Approx(-kPi));

    const auto z = steering_epsilon({0.0, 200.0, 1.0}, g);
    CHECK(z.tx == 0.0);
    CHECK(z.rx == 0.0);
}

TEST_CASE("steering vectors start at exp(j eps)") {
    const auto v = steering_vector(0.3, 4);
    REQUIRE(v.size() == 4);
    CHECK(std::arg(v[0]) == doctest::Approx(0.3));
    CHECK(std::arg(v[3]) == doctest::Approx(1.2));
    CHECK_THROWS_AS(steering_vector(0.3, 1), InvalidArgument);
}

TEST_CASE("virtual steering index layout") {
    const ArrayGeometry g{3, 4, 0.5, 90.0};
    const SteeringPhase p{0.2, -0.7};
    const auto a = virtual_steering(p, g);
    REQUIRE(a.size() == 12);
    for (std::size_t i = 1; i <= 3; ++i)
        for (std::size_t l = 1; l <= 4; ++l) {
            const Complex want = std::polar(1.0, static_cast<double>(i) * p.tx + static_cast<double>(l) * p.rx);
            CHECK(std::abs(a[(i - 1) * 4 + (l - 1)] - want) < 1e-14);
        }
}

TEST_CASE("scene validation") {
    auto s = testing::reference_scene();
    CHECK_NOTHROW(s.validate());

    SUBCASE("too many sources") {
        s.sources.push_back({50.0, 50.0, 1.0});
        try {
            s.validate();
            FAIL("expected ValidationError");
        } catch (const ValidationError& e) {
            CHECK(e.field() == "sources");
            CHECK(std::string(e.what()).find("K < N_tx and K < N_rx") != std::string::npos);
        }
    }
    SUBCASE("bad angles") {
        s.sources[1].theta_deg = 95.0;
        CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("sources[1].theta_deg"), ValidationError);
    }
    SUBCASE("azimuth is half open") {
        s.sources[0].phi_deg = 360.0;
        CHECK_THROWS_AS(s.validate(), ValidationError);
    }
    SUBCASE("spacing beyond half a wavelength") {
        s.geometry.d_over_lambda = 0.6;
        CHECK_THROWS_AS(s.validate(), ValidationError);
    }
    SUBCASE("collinear arrays") {
        s.geometry.phi_trx_deg = 0.0;
        CHECK_THROWS_AS(s.validate(), ValidationError);
    }
    SUBCASE("no samples") {
        s.num_samples = 0;
        CHECK_THROWS_AS(s.validate(), ValidationError);
    }
}

TEST_CASE("noise variance follows SNR against unit power") {
    SceneConfig s = testing::reference_scene();
    s.snr_db = 10.0;
    CHECK(s.noise_variance() == doctest::Approx(0.1));
    s.noise_free = true;
    CHECK(s.noise_variance() == 0.0);
}

TEST_CASE("synthesis is deterministic in the seed") {
    auto s = testing::reference_scene();
    const auto a = synthesize(s);
    const auto b = synthesize(s);
    REQUIRE(a.num_samples() == 50);
    REQUIRE(a.samples[0].size() == 9);
    CHECK(a.samples == b.samples);
    s.seed = 2;
    CHECK(synthesize(s).samples != a.samples);
}

TEST_CASE("noise-free snapshots lie in the signal subspace") {
    auto s = testing::reference_scene();
    s.noise_free = true;
    const auto snaps = synthesize(s);
    const auto e = kronecker_noise_vector(testing::steering_of(s));
    for (const auto& x : snaps.samples) CHECK(std::abs(dot(e, x)) < 1e-12);
}

TEST_CASE("sample covariance approaches the exact covariance") {
    auto s = testing::reference_scene();
    s.snr_db = 10.0;
    s.num_samples = 20000;
    const auto r = sample_covariance(synthesize(s));
    const auto exact = exact_covariance(s);
    CHECK(r.hermitian_defect() == 0.0);
    CHECK((r - exact).frobenius_norm() < 0.05 * exact.frobenius_norm());
    CHECK_THROWS_AS(sample_covariance(SnapshotSet{}), InvalidArgument);
}

TEST_CASE("sub-array smoothing") {
    auto s = testing::reference_scene();
    s.noise_free = true;
    s.geometry = {5, 4, 0.5, 90.0};
    CHECK(subarray_count(s.geometry, 2) == 6);

    SUBCASE("exact covariance smooths to the small-array covariance") {
        auto small = s;
        small.geometry = {3, 3, 0.5, 90.0};
        s.noise_free = small.noise_free = false;
        s.snr_db = small.snr_db = 3.0;
        const auto smoothed = subarray_smoothed_covariance(exact_covariance(s), s.geometry, 2);
        REQUIRE(smoothed.rows() == 9);
        CHECK((smoothed - exact_covariance(small)).frobenius_norm() < 1e-12);
    }
    SUBCASE("a (K+1)x(K+1) array is left unchanged") {
        auto small = s;
        small.geometry = {3, 3, 0.5, 90.0};
        const auto r = exact_covariance(small);
        CHECK(subarray_smoothed_covariance(r, small.geometry, 2) == r);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(subarray_smoothed_covariance(ComplexMatrix(9, 9), s.geometry, 2), DimensionMismatch);
        CHECK_THROWS_AS(subarray_smoothed_covariance(ComplexMatrix(20, 20), s.geometry, 4), InvalidArgument);
    }
}

TEST_CASE("snapshot file round trip") {
    auto s = testing::reference_scene();
    s.num_samples = 7;
    s.geometry = {3, 4, 0.4, 75.0};
    const auto snaps = synthesize(s);
    std::stringstream buf;
    write_snapshots(buf, snaps);
    CHECK(buf.str().size() == 40 + 7 * 12 * 16);
    CHECK(buf.str().substr(0, 8) == "MDSNAP01");
    const auto back = read_snapshots(buf);
    CHECK(back.samples == snaps.samples);
    CHECK(back.geometry.n_tx == 3);
    CHECK(back.geometry.n_rx == 4);
    CHECK(back.geometry.d_over_lambda == 0.4);
    CHECK(back.geometry.phi_trx_deg == 75.0);
}

TEST_CASE("corrupt snapshot files are rejected") {
    auto s = testing::reference_scene();
    s.num_samples = 3;
    std::stringstream good;
    write_snapshots(good, synthesize(s));
    const std::string bytes = good.str();

    SUBCASE("bad magic") {
        std::stringstream in("XDSNAP01" + bytes.substr(8));
        CHECK_THROWS_AS(read_snapshots(in), IoError);
    }
    SUBCASE("truncated") {
        std::stringstream in(bytes.substr(0, bytes.size() - 5));
        CHECK_THROWS_AS(read_snapshots(in), IoError);
    }
    SUBCASE("trailing bytes") {
        std::stringstream in(bytes + "x");
        CHECK_THROWS_AS(read_snapshots(in), IoError);
    }
    SUBCASE("invalid geometry in header") {
        std::string b = bytes;
        b[8] = 1;  // n_tx = 1
        std::stringstream in(b);
        CHECK_THROWS_AS(read_snapshots(in), IoError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_snapshots(std::string("/nonexistent/snapshots.bin")), IoError);
    }
}
