#pragma once

// 2D MUSIC baseline over a (theta, phi) grid.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mimodoa/errors.hpp"
#include "mimodoa/numerics.hpp"
#include "mimodoa/scene.hpp"

namespace mimodoa::music {

struct MusicConfig {
    double theta_step_deg = 0.1;
    double phi_step_deg = 0.1;
    double theta_min_deg = 0.0;
    double theta_max_deg = 90.0;   ///< inclusive
    double phi_min_deg = 0.0;
    double phi_max_deg = 360.0;    ///< exclusive
    std::size_t workers = 1;       ///< threads for grid evaluation

    std::size_t theta_points() const;
    std::size_t phi_points() const;
    void validate() const;
};

/// Pseudospectrum values, theta-major.
struct Spectrum {
    std::vector<double> theta_deg;
    std::vector<double> phi_deg;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * phi_deg.size() + j]; }
};

struct MusicResult {
    std::vector<GridPeak> doas;  ///< K strongest local maxima, strongest first
    Spectrum spectrum;
    std::vector<double> eigenvalues;  ///< descending
};

/// P(theta, phi) = 1 / (a^H En En^H a) with En the N-K weakest eigenvectors.
Spectrum pseudospectrum(const ComplexMatrix& r, const ArrayGeometry& geometry, std::size_t num_sources,
                        const MusicConfig& cfg);

/// Strict local maxima over the 8-neighbourhood, phi periodic, theta clamped.
/// Sorted by value descending, then (theta, phi) ascending.
std::vector<GridPeak> find_peaks(const Spectrum& spectrum, bool phi_periodic = true);

/// Throws PeakDeficit when fewer than K local maxima exist.
MusicResult estimate(const ComplexMatrix& r, const ArrayGeometry& geometry, std::size_t num_sources,
                     const MusicConfig& cfg);

/// CSV rows "theta_deg,phi_deg,value".
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

}  // namespace mimodoa::music
