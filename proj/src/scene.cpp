#include "mimodoa/scene.hpp"

#include <cmath>
#include <string>

#include "mimodoa/errors.hpp"
#include "mimodoa/rng.hpp"

namespace mimodoa {

void ArrayGeometry::validate() const {
    if (n_tx < 2) throw ValidationError("geometry.n_tx", "must be >= 2");
    if (n_rx < 2) throw ValidationError("geometry.n_rx", "must be >= 2");
    if (!(d_over_lambda > 0.0 && d_over_lambda <= 0.5))
        throw ValidationError("geometry.d_over_lambda",
                              "element spacing must satisfy 0 < d <= lambda/2");
    if (!(phi_trx_deg > 0.0 && phi_trx_deg < 180.0))
        throw ValidationError("geometry.phi_trx_deg", "must lie in (0, 180) degrees");
}

void Source::validate(const std::string& prefix) const {
    if (!(theta_deg >= 0.0 && theta_deg <= 90.0))
        throw ValidationError(prefix + "theta_deg", "elevation must lie in [0, 90] degrees");
    if (!(phi_deg >= 0.0 && phi_deg < 360.0))
        throw ValidationError(prefix + "phi_deg", "azimuth must lie in [0, 360) degrees");
    if (!(power > 0.0) || !std::isfinite(power))
        throw ValidationError(prefix + "power", "source power must be positive");
}

double SceneConfig::noise_variance() const noexcept {
    return noise_free ? 0.0 : std::pow(10.0, -snr_db / 10.0);
}

void SceneConfig::validate() const {
    geometry.validate();
    if (sources.empty()) throw ValidationError("sources", "at least one source is required");
    for (std::size_t k = 0; k < sources.size(); ++k)
        sources[k].validate("sources[" + std::to_string(k) + "].");
    const std::size_t k = sources.size();
    if (k >= geometry.n_tx || k >= geometry.n_rx)
        throw ValidationError("sources",
                              "number of sources K=" + std::to_string(k) +
                                  " must be smaller than both n_tx and n_rx (K < N_tx and K < N_rx)");
    if (num_samples < 1) throw ValidationError("num_samples", "must be >= 1");
    if (!noise_free && !std::isfinite(snr_db)) throw ValidationError("snr_db", "must be finite");
}

SteeringPhase steering_epsilon(const Source& source, const ArrayGeometry& geometry) {
    const double c = 2.0 * kPi * geometry.d_over_lambda;
    const double st = std::sin(deg2rad(source.theta_deg));
    const double phi = deg2rad(source.phi_deg);
    return {-c * st * std::cos(phi), -c * st * std::cos(phi - deg2rad(geometry.phi_trx_deg))};
}

ComplexVector steering_vector(double eps, std::size_t n) {
    if (n < 2) throw InvalidArgument("steering_vector needs n >= 2");
    ComplexVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::polar(1.0, static_cast<double>(i + 1) * eps);
    return v;
}

ComplexVector virtual_steering(const SteeringPhase& phase, const ArrayGeometry& geometry) {
    return kron(steering_vector(phase.tx, geometry.n_tx), steering_vector(phase.rx, geometry.n_rx));
}

ComplexVector virtual_steering(const Source& source, const ArrayGeometry& geometry) {
    return virtual_steering(steering_epsilon(source, geometry), geometry);
}

SnapshotSet synthesize(const SceneConfig& config) {
    config.validate();
    const std::size_t n = config.geometry.virtual_size();
    const std::size_t k = config.num_sources();
    const double noise_var = config.noise_variance();

    std::vector<ComplexVector> steering;
    steering.reserve(k);
    for (const auto& s : config.sources) steering.push_back(virtual_steering(s, config.geometry));

    SceneRng rng(config.seed);
    SnapshotSet out{config.geometry, {}};
    out.samples.reserve(config.num_samples);
    ComplexVector s(k);
    for (std::size_t m = 0; m < config.num_samples; ++m) {
        for (std::size_t q = 0; q < k; ++q) s[q] = rng.complex_normal(config.sources[q].power);
        ComplexVector x(n);
        for (std::size_t q = 0; q < k; ++q)
            for (std::size_t i = 0; i < n; ++i) x[i] += steering[q][i] * s[q];
        if (noise_var > 0.0)
            for (auto& xi : x) xi += rng.complex_normal(noise_var);
        out.samples.push_back(std::move(x));
    }
    return out;
}

ComplexMatrix sample_covariance(const SnapshotSet& snapshots) {
    if (snapshots.samples.empty()) throw InvalidArgument("sample_covariance: empty snapshot set");
    const std::size_t n = snapshots.samples.front().size();
    ComplexMatrix r(n, n);
    for (const auto& x : snapshots.samples) {
        if (x.size() != n) throw DimensionMismatch("sample_covariance: ragged snapshots");
        for (std::size_t i = 0; i < n; ++i) {
            const Complex xi = x[i];
            for (std::size_t j = i; j < n; ++j) r(i, j) += xi * std::conj(x[j]);
        }
    }
    const double inv_m = 1.0 / static_cast<double>(snapshots.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = Complex(r(i, i).real() * inv_m, 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            r(i, j) *= inv_m;
            r(j, i) = std::conj(r(i, j));
        }
    }
    return r;
}

ComplexMatrix exact_covariance(const SceneConfig& config) {
    config.validate();
    const std::size_t n = config.geometry.virtual_size();
    ComplexMatrix r(n, n);
    for (const auto& s : config.sources) {
        const auto a = virtual_steering(s, config.geometry);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += s.power * a[i] * std::conj(a[j]);
    }
    const double noise_var = config.noise_variance();
    for (std::size_t i = 0; i < n; ++i) r(i, i) += noise_var;
    return r;
}

std::size_t subarray_count(const ArrayGeometry& geometry, std::size_t num_sources) {
    if (geometry.n_tx < num_sources + 1 || geometry.n_rx < num_sources + 1)
        throw InvalidArgument("sub-array smoothing needs n_tx >= K+1 and n_rx >= K+1");
    return (geometry.n_tx - num_sources) * (geometry.n_rx - num_sources);
}

ComplexMatrix subarray_smoothed_covariance(const ComplexMatrix& r, const ArrayGeometry& geometry,
                                           std::size_t num_sources) {
    const std::size_t n_sa = subarray_count(geometry, num_sources);
    if (!r.square() || r.rows() != geometry.virtual_size())
        throw DimensionMismatch("sub-array smoothing: covariance does not match the geometry");

    const std::size_t side = num_sources + 1;
    const std::size_t dim = side * side;
    ComplexMatrix out(dim, dim);
    std::vector<std::size_t> sel(dim);
    for (std::size_t p = 0; p + num_sources < geometry.n_tx; ++p) {
        for (std::size_t q = 0; q + num_sources < geometry.n_rx; ++q) {
            for (std::size_t i = 0; i < side; ++i)
                for (std::size_t l = 0; l < side; ++l)
                    sel[i * side + l] = (p + i) * geometry.n_rx + (q + l);
            for (std::size_t a = 0; a < dim; ++a)
                for (std::size_t b = 0; b < dim; ++b) out(a, b) += r(sel[a], sel[b]);
        }
    }
    out *= Complex(1.0 / static_cast<double>(n_sa), 0.0);
    return out;
}

ComplexMatrix subarray_smoothed_covariance(const SnapshotSet& snapshots, std::size_t num_sources) {
    return subarray_smoothed_covariance(sample_covariance(snapshots), snapshots.geometry,
                                        num_sources);
}

}  // namespace mimodoa
