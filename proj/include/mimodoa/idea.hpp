#pragma once

// Iterative 2D DOA estimation on a (K+1) x (K+1) virtual array covariance.
//
// The estimator keeps a window of steering estimates. Each update takes the
// newest K-1 of them as known sources, builds u0..u3 and solves the K-th
// source in closed form:
//   exp(j eps_tx) = arg of (u1^H R u1) / (u1^H R u3)
//   exp(j eps_rx) = arg of (u2^H R u2) / (u2^H R u3)
// The new estimate becomes the newest window entry and the oldest one drops
// out. K updates make one full iteration.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "mimodoa/numerics.hpp"
#include "mimodoa/scene.hpp"
#include "mimodoa/subspace.hpp"

namespace mimodoa::idea {

struct Doa {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
};

enum class DoaStatus {
    Ok,
    Clamped,           ///< sin(theta) exceeded 1 and was clamped
    AzimuthUndefined,  ///< zenith source, phi reported as 0
};

struct RecoveredDoa {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    DoaStatus status = DoaStatus::Ok;
};

/// How recover_doa treats phases outside the visible region.
enum class VisibilityPolicy {
    Strict,  ///< clamp within 1e-6, otherwise throw InconsistentSteering
    Clamp,   ///< always clamp sin(theta) to 1, keep the azimuth
};

/// Inverts steering_epsilon for any phi_trx. With c = 2 pi d/lambda,
/// sin(theta) cos(phi) = -eps_tx / c and
/// sin(theta) sin(phi) = (-eps_rx / c - cos(phi_trx) sin(theta) cos(phi)) / sin(phi_trx).
RecoveredDoa recover_doa(const SteeringPhase& eps, const ArrayGeometry& geometry,
                         VisibilityPolicy policy = VisibilityPolicy::Strict);

struct CostPair {
    double tx = 0.0;
    double rx = 0.0;

    double max() const noexcept { return tx > rx ? tx : rx; }
};

/// Q_tx = (u1 - e^{j eps_tx} u3)^H R (u1 - e^{j eps_tx} u3), Q_rx likewise
/// with u2. Throws NonFiniteCost when R is not PSD within tolerance.
CostPair cost_functions(const UVectors& u, const ComplexMatrix& r, const SteeringPhase& candidate);

/// Closed-form K-th source from the u-vectors. Throws DegenerateUpdate (with
/// update index 0) when a denominator vanishes.
SteeringPhase solve_steering(const UVectors& u, const ComplexMatrix& r);

struct IdeaConfig {
    std::size_t max_iterations = 10;   ///< T, full iterations
    std::vector<Doa> init_doas;        ///< K-1 entries; empty selects the default spread
    double convergence_epsilon = 0.0;  ///< 0 runs all T iterations
};

/// theta = 10 + 5 k, phi = 10 + 15 k degrees for k = 0..count-1.
std::vector<Doa> default_initialization(std::size_t count);

struct CostRecord {
    std::size_t update = 0;     ///< 0-based update index tau
    std::size_t iteration = 0;  ///< 1-based full iteration
    CostPair cost;              ///< cost at the new estimate
    /// Cost of the estimate the update replaced, under the same u-vectors.
    /// Absent on the first K-1 updates, before every source has an estimate.
    std::optional<CostPair> prior;
};

using CostTrace = std::vector<CostRecord>;

struct UpdateEvent {
    std::size_t update = 0;
    std::size_t iteration = 0;
    const SteeringSet& known;                ///< the K-1 sources used
    std::optional<SteeringPhase> replaced;   ///< estimate dropped by this update
    SteeringPhase estimate;
    CostPair cost;
    std::optional<CostPair> prior;
};

using UpdateObserver = std::function<void(const UpdateEvent&)>;

struct EstimationResult {
    std::vector<RecoveredDoa> sources;  ///< newest estimate first
    SteeringSet steering;               ///< same order as sources
    CostTrace trace;
    std::size_t iterations_run = 0;
};

/// Runs the estimator on a (K+1)^2 square covariance. Steering pairs outside
/// the visible region are clamped when converted to angles.
EstimationResult run(const ComplexMatrix& r, const ArrayGeometry& geometry, std::size_t num_sources,
                     const IdeaConfig& cfg, const UpdateObserver& observer = {});

/// Sub-array smoothing when the physical array is larger than (K+1)x(K+1),
/// otherwise a copy of r.
ComplexMatrix prepare_covariance(const ComplexMatrix& r, const ArrayGeometry& geometry,
                                 std::size_t num_sources);

}  // namespace mimodoa::idea
