#pragma once

// Closed-form noise-subspace vectors of a (K+1) x (K+1) virtual array.
//
// Along one axis, E_1 = [1, -exp(j eps_1)] and
//   E_k = Etilde_{k-1} - exp(j eps_k) L Etilde_{k-1},
// where Etilde pads a trailing zero and L is the cyclic down-shift. E_k is
// orthogonal to the steering vectors of all k phases, and E_tx (x) E_rx is
// orthogonal to every virtual steering vector of the scene.
//
// With K-1 sources known, E_K splits into four vectors that do not depend on
// the K-th source:
//   u0 = Et (x) Er,  u1 = Et (x) L Er,  u2 = L Et (x) Er,  u3 = L Et (x) L Er
//   E_K = u0 - e^{j eps_rx} u1 - e^{j eps_tx} u2 + e^{j (eps_tx + eps_rx)} u3.
// For K = 1 the empty product convention Etilde_0 = [1, 0] applies.

#include <span>
#include <vector>

#include "mimodoa/numerics.hpp"
#include "mimodoa/scene.hpp"

namespace mimodoa {

/// Steering phases of a set of sources, one entry per source.
using SteeringSet = std::vector<SteeringPhase>;

struct UVectors {
    ComplexVector u0, u1, u2, u3;

    /// K implied by the vector length (K+1)^2.
    std::size_t num_sources() const;
};

/// Length k+1 recursive noise vector of the k given phases.
ComplexVector noise_subspace_1d(std::span<const double> eps);

/// E_{k} padded with one trailing zero; [1, 0] for an empty list.
ComplexVector padded_noise_subspace(std::span<const double> eps);

/// Builds u0..u3 from K-1 known sources; the result serves a K-source scene.
UVectors build_uvectors(const SteeringSet& partial);

/// Reassembles E_K for a candidate K-th source from the u-vectors.
ComplexVector compose_noise_vector(const UVectors& u, const SteeringPhase& candidate);

/// Full E_K = E_tx,K (x) E_rx,K for a complete steering set.
ComplexVector kronecker_noise_vector(const SteeringSet& all);

struct Theorem2Residuals {
    double r1 = 0.0;  ///< |R (u1 - e^{j eps_tx} u3)|
    double r2 = 0.0;  ///< |R (u2 - e^{j eps_rx} u3)|
    double r3 = 0.0;  ///< |R (u0 - e^{j (eps_tx + eps_rx)} u3)|
};

/// Norms of R applied to the three candidate noise vectors. All vanish for an
/// exact noise-free covariance when the partial set and candidate are true.
Theorem2Residuals theorem2_residuals(const UVectors& u, const ComplexMatrix& r,
                                     const SteeringPhase& candidate);

}  // namespace mimodoa
