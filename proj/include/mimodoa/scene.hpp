#pragma once

// Array geometry, sources, snapshot synthesis and covariance builders.
//
// The transmit array lies on the x axis, the receive array at angle
// phi_trx from it. Element i (1-based) of a steering vector is
// exp(j * i * eps); the virtual steering vector is tx (x) rx, so virtual
// element (i, l) sits at flat index (i - 1) * n_rx + (l - 1).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mimodoa/numerics.hpp"

namespace mimodoa {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

struct ArrayGeometry {
    std::size_t n_tx = 3;
    std::size_t n_rx = 3;
    double d_over_lambda = 0.5;
    double phi_trx_deg = 90.0;

    std::size_t virtual_size() const noexcept { return n_tx * n_rx; }

    /// Throws ValidationError on out-of-range fields.
    void validate() const;
};

struct Source {
    double theta_deg = 0.0;  ///< elevation, [0, 90]
    double phi_deg = 0.0;    ///< azimuth, [0, 360)
    double power = 1.0;      ///< sigma_k^2

    /// `prefix` is prepended to the field name in diagnostics.
    void validate(const std::string& prefix = {}) const;
};

/// Ground truth for one experiment. Noise variance is derived from snr_db
/// against a unit reference power (sigma^2 = 10^(-snr_db/10)) unless
/// noise_free is set, in which case it is exactly zero.
struct SceneConfig {
    ArrayGeometry geometry;
    std::vector<Source> sources;
    double snr_db = 30.0;
    bool noise_free = false;
    std::size_t num_samples = 50;
    std::uint64_t seed = 1;

    std::size_t num_sources() const noexcept { return sources.size(); }
    double noise_variance() const noexcept;

    /// Enforces K < min(n_tx, n_rx) besides the per-field ranges.
    void validate() const;
};

struct SnapshotSet {
    ArrayGeometry geometry;
    std::vector<ComplexVector> samples;  ///< M vectors of length n_tx * n_rx

    std::size_t num_samples() const noexcept { return samples.size(); }
};

struct SteeringPhase {
    double tx = 0.0;  ///< radians
    double rx = 0.0;

    friend bool operator==(const SteeringPhase&, const SteeringPhase&) = default;
};

/// eps_tx = -2 pi d/lambda sin(theta) cos(phi),
/// eps_rx = -2 pi d/lambda sin(theta) cos(phi - phi_trx).
SteeringPhase steering_epsilon(const Source& source, const ArrayGeometry& geometry);

/// Entry i (i = 1..n) is exp(j i eps).
ComplexVector steering_vector(double eps, std::size_t n);

ComplexVector virtual_steering(const Source& source, const ArrayGeometry& geometry);
ComplexVector virtual_steering(const SteeringPhase& phase, const ArrayGeometry& geometry);

/// x(m) = A s(m) + w(m) with circular Gaussian s and w. Deterministic in
/// config.seed.
SnapshotSet synthesize(const SceneConfig& config);

/// (1/M) sum x x^H. Throws InvalidArgument on an empty set.
ComplexMatrix sample_covariance(const SnapshotSet& snapshots);

/// A diag(powers) A^H + sigma^2 I.
ComplexMatrix exact_covariance(const SceneConfig& config);

std::size_t subarray_count(const ArrayGeometry& geometry, std::size_t num_sources);

/// Average of the (K+1)x(K+1) sub-array principal blocks. Output is
/// (K+1)^2 x (K+1)^2.
ComplexMatrix subarray_smoothed_covariance(const ComplexMatrix& r, const ArrayGeometry& geometry,
                                           std::size_t num_sources);
ComplexMatrix subarray_smoothed_covariance(const SnapshotSet& snapshots, std::size_t num_sources);

}  // namespace mimodoa
