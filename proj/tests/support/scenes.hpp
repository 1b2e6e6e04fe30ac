#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mimodoa/idea.hpp"
#include "mimodoa/rng.hpp"
#include "mimodoa/scene.hpp"
#include "mimodoa/subspace.hpp"

namespace mimodoa::testing {

/// Two sources on a 3x3 array, the reference scene of the convergence runs.
inline SceneConfig reference_scene() {
    SceneConfig s;
    s.geometry = {3, 3, 0.5, 90.0};
    s.sources = {{30.0, 25.0, 1.0}, {70.0, 80.0, 1.0}};
    s.snr_db = 30.0;
    s.num_samples = 50;
    return s;
}

inline double wrapped_phase_gap(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * kPi));
}

/// K random sources on a (K+1)x(K+1) array whose steering phases differ by
/// at least `min_gap` radians on both axes.
inline SceneConfig random_scene(SceneRng& rng, std::size_t k, double min_gap = 0.05) {
    SceneConfig s;
    s.geometry = {k + 1, k + 1, 0.5, 90.0};
    s.noise_free = true;
    while (s.sources.size() < k) {
        const Source cand{rng.uniform(5.0, 85.0), rng.uniform(0.0, 360.0), rng.uniform(0.5, 2.0)};
        const auto e = steering_epsilon(cand, s.geometry);
        bool ok = true;
        for (const auto& o : s.sources) {
            const auto f = steering_epsilon(o, s.geometry);
            ok = ok && wrapped_phase_gap(e.tx, f.tx) > min_gap && wrapped_phase_gap(e.rx, f.rx) > min_gap;
        }
        if (ok) s.sources.push_back(cand);
    }
    return s;
}

inline SteeringSet steering_of(const SceneConfig& s) {
    SteeringSet out;
    for (const auto& src : s.sources) out.push_back(steering_epsilon(src, s.geometry));
    return out;
}

inline double sin2_half(double a) {
    const double s = std::sin(a / 2.0);
    return s * s;
}

struct BoundPair {
    double tx = 0.0;
    double rx = 0.0;
};

/// Lower bound on the cost drop of one update: the true source closest to
/// the new estimate plays the role of the K-th source,
///   sigma_K^2 sin^2((e_K - e_replaced)/2) prod_m sin^2((e_tx,K - e_tx,m)/2)
///                                        prod_n sin^2((e_rx,K - e_rx,n)/2).
inline BoundPair cost_drop_bound(const SceneConfig& scene, const SteeringSet& known,
                                 const SteeringPhase& replaced, const SteeringPhase& estimate) {
    const auto truth = steering_of(scene);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        const double d = std::hypot(wrapped_phase_gap(truth[k].tx, estimate.tx),
                                    wrapped_phase_gap(truth[k].rx, estimate.rx));
        if (d < best_d) best_d = d, best = k;
    }
    const auto& t = truth[best];
    double common = scene.sources[best].power;
    for (const auto& m : known) common *= sin2_half(t.tx - m.tx) * sin2_half(t.rx - m.rx);
    return {common * sin2_half(t.tx - replaced.tx), common * sin2_half(t.rx - replaced.rx)};
}

/// Sources sharing one transmit phase with the initial guess, so every
/// transmit noise vector vanishes on the scene.
struct CollidingScene {
    SceneConfig scene;
    std::vector<idea::Doa> init;
};

inline CollidingScene colliding_scene() {
    // sin(theta) cos(phi) = 0.5 for all three directions.
    auto phi_for = [](double theta) { return rad2deg(std::acos(0.5 / std::sin(deg2rad(theta)))); };
    CollidingScene c;
    c.scene.geometry = {3, 3, 0.5, 90.0};
    c.scene.noise_free = true;
    c.scene.sources = {{30.0, 0.0, 1.0}, {60.0, phi_for(60.0), 1.0}};
    c.init = {{40.0, phi_for(40.0)}};
    return c;
}

}  // namespace mimodoa::testing
