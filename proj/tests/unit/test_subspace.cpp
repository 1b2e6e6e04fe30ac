#include <doctest.h>

#include <cmath>

#include "mimodoa/errors.hpp"
#include "mimodoa/subspace.hpp"
#include "scenes.hpp"

using namespace mimodoa;

namespace {

// Coefficients of prod_m (1 - z_m x), lowest order first.
ComplexVector polynomial_coefficients(const std::vector<double>& eps) {
    ComplexVector c{1.0};
    for (const double e : eps) {
        ComplexVector next(c.size() + 1);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= std::polar(1.0, e) * c[i];
        }
        c = next;
    }
    return c;
}

}  // namespace

TEST_CASE("first noise vector") {
    const auto e = noise_subspace_1d(std::vector<double>{0.4});
    REQUIRE(e.size() == 2);
    CHECK(e[0] == Complex(1.0));
    CHECK(std::abs(e[1] + std::polar(1.0, 0.4)) < 1e-15);
    CHECK_THROWS_AS(noise_subspace_1d(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("noise vectors equal the root polynomial coefficients") {
    SceneRng rng(3);
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<double> eps;
        for (std::size_t m = 0; m < k; ++m) eps.push_back(rng.uniform(-kPi, kPi));
        const auto e = noise_subspace_1d(eps);
        const auto want = polynomial_coefficients(eps);
        REQUIRE(e.size() == k + 1);
        for (std::size_t i = 0; i <= k; ++i) CHECK(std::abs(e[i] - want[i]) < 1e-12);
    }
}

TEST_CASE("noise vectors annihilate every steering vector of their phases") {
    SceneRng rng(4);
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<double> eps;
        for (std::size_t m = 0; m < k; ++m) eps.push_back(rng.uniform(-kPi, kPi));
        const auto e = noise_subspace_1d(eps);
        for (const double p : eps) CHECK(std::abs(dot(steering_vector(p, k + 1), e)) < 1e-12);
    }
}

TEST_CASE("padded noise vector") {
    CHECK(padded_noise_subspace(std::vector<double>{}) == ComplexVector{1.0, 0.0});
    const auto p = padded_noise_subspace(std::vector<double>{0.1, 0.2});
    REQUIRE(p.size() == 4);
    CHECK(p[3] == Complex(0.0));
}

TEST_CASE("u-vectors reassemble the full noise vector") {
    SceneRng rng(6);
    for (std::size_t k = 1; k <= 4; ++k) {
        SteeringSet all;
        for (std::size_t m = 0; m < k; ++m) all.push_back({rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi)});
        const SteeringSet partial(all.begin(), all.end() - 1);
        const auto u = build_uvectors(partial);
        CHECK(u.num_sources() == k);
        REQUIRE(u.u0.size() == (k + 1) * (k + 1));
        const auto composed = compose_noise_vector(u, all.back());
        const auto direct = kronecker_noise_vector(all);
        double diff = 0.0;
        for (std::size_t i = 0; i < direct.size(); ++i) diff = std::max(diff, std::abs(composed[i] - direct[i]));
        CHECK(diff < 1e-12);
    }
}

TEST_CASE("single-source u-vectors are unit selectors") {
    const auto u = build_uvectors({});
    CHECK(u.u0 == ComplexVector{1.0, 0.0, 0.0, 0.0});
    CHECK(u.u1 == ComplexVector{0.0, 1.0, 0.0, 0.0});
    CHECK(u.u2 == ComplexVector{0.0, 0.0, 1.0, 0.0});
    CHECK(u.u3 == ComplexVector{0.0, 0.0, 0.0, 1.0});
}

TEST_CASE("residuals vanish only at the true source") {
    SceneRng rng(8);
    for (std::size_t k = 1; k <= 3; ++k) {
        const auto scene = testing::random_scene(rng, k, 0.2);
        const auto r = exact_covariance(scene);
        const auto truth = testing::steering_of(scene);
        const auto u = build_uvectors(SteeringSet(truth.begin(), truth.end() - 1));
        const auto ok = theorem2_residuals(u, r, truth.back());
        CHECK(ok.r1 < 1e-10);
        CHECK(ok.r2 < 1e-10);
        CHECK(ok.r3 < 1e-10);
        const auto off = theorem2_residuals(u, r, {truth.back().tx + 0.3, truth.back().rx - 0.3});
        CHECK(off.r1 > 1e-6);
        CHECK(off.r2 > 1e-6);
    }
    CHECK_THROWS_AS(theorem2_residuals(build_uvectors({}), ComplexMatrix::identity(9), {0.0, 0.0}),
                    DimensionMismatch);
}

TEST_CASE("u-vector products factor into one-axis terms") {
    // u1^H a = (Et^H a_tx)(L Er)^H a_rx for a = a_tx (x) a_rx.
    const SteeringSet partial{{0.5, -1.1}};
    const auto u = build_uvectors(partial);
    const ArrayGeometry g{3, 3, 0.5, 90.0};
    const SteeringPhase s{-2.0, 0.7};
    const auto a = virtual_steering(s, g);
    const auto et = padded_noise_subspace(std::vector<double>{0.5});
    const auto er = padded_noise_subspace(std::vector<double>{-1.1});
    const Complex want = dot(et, steering_vector(s.tx, 3)) * dot(down_shift(er), steering_vector(s.rx, 3));
    CHECK(std::abs(dot(u.u1, a) - want) < 1e-13);
}
