#include "mimodoa/idea.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimodoa/errors.hpp"

namespace mimodoa::idea {
namespace {

constexpr double kZenithTolerance = 1e-9;
constexpr double kVisibilitySlack = 1e-6;
constexpr double kDegenerateRatio = 1e-14;
constexpr double kCostTolerance = 1e-10;

double wrap_degrees_360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    if (w >= 360.0) w -= 360.0;
    return w;
}

// Real part of v^H R v; rejects values a PSD Hermitian R cannot produce.
double hermitian_energy(std::span<const Complex> v, const ComplexMatrix& r, double scale) {
    const Complex q = quad_form(v, r, v);
    const double vv = std::pow(norm(v), 2);
    const double tol = kCostTolerance * scale * vv;
    if (!std::isfinite(q.real()) || !std::isfinite(q.imag()))
        throw NonFiniteCost("cost function is not finite");
    if (std::abs(q.imag()) > tol + kCostTolerance * std::abs(q.real()))
        throw NonFiniteCost("cost function has an imaginary part; covariance is not Hermitian");
    if (q.real() < -tol) throw NonFiniteCost("negative cost; covariance is not positive semidefinite");
    return std::max(q.real(), 0.0);
}

double covariance_scale(const ComplexMatrix& r) {
    return std::max(std::abs(r.trace()), r.frobenius_norm());
}

}  // namespace

RecoveredDoa recover_doa(const SteeringPhase& eps, const ArrayGeometry& geometry,
                         VisibilityPolicy policy) {
    const double c = 2.0 * kPi * geometry.d_over_lambda;
    const double phi_trx = deg2rad(geometry.phi_trx_deg);
    const double cos_part = -eps.tx / c;
    const double sin_part = (-eps.rx / c - std::cos(phi_trx) * cos_part) / std::sin(phi_trx);
    double sin_theta = std::hypot(cos_part, sin_part);

    if (sin_theta < kZenithTolerance) return {0.0, 0.0, DoaStatus::AzimuthUndefined};

    DoaStatus status = DoaStatus::Ok;
    if (sin_theta > 1.0) {
        if (policy == VisibilityPolicy::Strict && sin_theta > 1.0 + kVisibilitySlack) {
            throw InconsistentSteering("steering phases (" + std::to_string(eps.tx) + ", " +
                                       std::to_string(eps.rx) +
                                       ") imply sin(theta) = " + std::to_string(sin_theta));
        }
        sin_theta = 1.0;
        status = DoaStatus::Clamped;
    }
    const double theta = rad2deg(std::asin(sin_theta));
    const double phi = wrap_degrees_360(rad2deg(std::atan2(sin_part, cos_part)));
    return {theta, phi, status};
}

CostPair cost_functions(const UVectors& u, const ComplexMatrix& r, const SteeringPhase& candidate) {
    if (!r.square() || r.rows() != u.u0.size())
        throw DimensionMismatch("cost_functions: covariance does not match the u-vectors");
    const double scale = covariance_scale(r);
    const auto vt = axpy(-std::polar(1.0, candidate.tx), u.u3, u.u1);
    const auto vr = axpy(-std::polar(1.0, candidate.rx), u.u3, u.u2);
    return {hermitian_energy(vt, r, scale), hermitian_energy(vr, r, scale)};
}

SteeringPhase solve_steering(const UVectors& u, const ComplexMatrix& r) {
    if (!r.square() || r.rows() != u.u0.size())
        throw DimensionMismatch("solve_steering: covariance is " + std::to_string(r.rows()) + "x" +
                                std::to_string(r.cols()) + ", u-vectors have length " +
                                std::to_string(u.u0.size()));
    const double r_norm = r.frobenius_norm();
    const double n3 = norm(u.u3);

    const Complex num_tx = quad_form(u.u1, r, u.u1);
    const Complex den_tx = quad_form(u.u1, r, u.u3);
    const Complex num_rx = quad_form(u.u2, r, u.u2);
    const Complex den_rx = quad_form(u.u2, r, u.u3);

    if (std::abs(den_tx) <= kDegenerateRatio * r_norm * norm(u.u1) * n3 ||
        std::abs(den_rx) <= kDegenerateRatio * r_norm * norm(u.u2) * n3) {
        throw DegenerateUpdate(0, "degenerate update: cross quadratic form vanished");
    }
    // Only the phase of each ratio is kept.
    return {std::arg(num_tx / den_tx), std::arg(num_rx / den_rx)};
}

std::vector<Doa> default_initialization(std::size_t count) {
    std::vector<Doa> out;
    for (std::size_t k = 0; k < count; ++k)
        out.push_back({10.0 + 5.0 * static_cast<double>(k), 10.0 + 15.0 * static_cast<double>(k)});
    return out;
}

EstimationResult run(const ComplexMatrix& r, const ArrayGeometry& geometry, std::size_t num_sources,
                     const IdeaConfig& cfg, const UpdateObserver& observer) {
    const std::size_t k = num_sources;
    if (k < 1) throw InvalidArgument("idea::run needs at least one source");
    if (cfg.max_iterations < 1) throw InvalidArgument("idea::run needs max_iterations >= 1");
    const std::size_t dim = (k + 1) * (k + 1);
    if (!r.square() || r.rows() != dim)
        throw DimensionMismatch("idea::run expects a " + std::to_string(dim) + "x" +
                                std::to_string(dim) + " covariance for K=" + std::to_string(k) +
                                "; apply sub-array smoothing first");

    const auto init = cfg.init_doas.empty() ? default_initialization(k - 1) : cfg.init_doas;
    if (init.size() != k - 1)
        throw InvalidArgument("idea::run needs K-1=" + std::to_string(k - 1) +
                              " initial DOAs, got " + std::to_string(init.size()));

    // window[0] is the newest estimate. The first K-1 entries are the known
    // sources of the next update.
    SteeringSet window;
    for (const auto& d : init) window.push_back(steering_epsilon({d.theta_deg, d.phi_deg, 1.0}, geometry));

    const double stop_level = cfg.convergence_epsilon * std::abs(r.trace());
    EstimationResult result;
    std::size_t update = 0;
    SteeringSet known;
    for (std::size_t t = 1; t <= cfg.max_iterations; ++t) {
        double worst = 0.0;
        for (std::size_t step = 0; step < k; ++step, ++update) {
            known.assign(window.begin(), window.begin() + static_cast<std::ptrdiff_t>(k - 1));
            const auto u = build_uvectors(known);

            SteeringPhase estimate;
            try {
                estimate = solve_steering(u, r);
            } catch (const DegenerateUpdate& e) {
                throw DegenerateUpdate(update, std::string(e.what()) + " at update " +
                                                   std::to_string(update));
            }

            std::optional<SteeringPhase> replaced;
            std::optional<CostPair> prior;
            if (window.size() == k) {
                replaced = window.back();
                prior = cost_functions(u, r, *replaced);
            }
            const CostPair cost = cost_functions(u, r, estimate);
            worst = std::max(worst, cost.max());
            result.trace.push_back({update, t, cost, prior});
            if (observer) observer({update, t, known, replaced, estimate, cost, prior});

            window.insert(window.begin(), estimate);
            if (window.size() > k) window.pop_back();
        }
        result.iterations_run = t;
        if (cfg.convergence_epsilon > 0.0 && worst < stop_level) break;
    }

    result.steering = window;
    for (const auto& p : window)
        result.sources.push_back(recover_doa(p, geometry, VisibilityPolicy::Clamp));
    return result;
}

ComplexMatrix prepare_covariance(const ComplexMatrix& r, const ArrayGeometry& geometry,
                                 std::size_t num_sources) {
    if (geometry.n_tx == num_sources + 1 && geometry.n_rx == num_sources + 1) return r;
    return subarray_smoothed_covariance(r, geometry, num_sources);
}

}  // namespace mimodoa::idea
