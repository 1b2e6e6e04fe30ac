#include "mimodoa/subspace.hpp"

#include <cmath>
#include <string>

#include "mimodoa/errors.hpp"

namespace mimodoa {

std::size_t UVectors::num_sources() const {
    const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(u0.size()))));
    if (side < 2 || side * side != u0.size()) throw DimensionMismatch("u-vector length is not (K+1)^2");
    return side - 1;
}

ComplexVector noise_subspace_1d(std::span<const double> eps) {
    if (eps.empty()) throw InvalidArgument("noise_subspace_1d needs at least one phase");
    ComplexVector e{1.0, -std::polar(1.0, eps[0])};
    for (std::size_t k = 1; k < eps.size(); ++k) {
        e.push_back(0.0);
        const auto shifted = down_shift(e);
        e = axpy(-std::polar(1.0, eps[k]), shifted, e);
    }
    return e;
}

ComplexVector padded_noise_subspace(std::span<const double> eps) {
    if (eps.empty()) return {1.0, 0.0};
    auto e = noise_subspace_1d(eps);
    e.push_back(0.0);
    return e;
}

namespace {

void split_axes(const SteeringSet& set, std::vector<double>& tx, std::vector<double>& rx) {
    tx.clear();
    rx.clear();
    for (const auto& p : set) {
        tx.push_back(p.tx);
        rx.push_back(p.rx);
    }
}

}  // namespace

UVectors build_uvectors(const SteeringSet& partial) {
    std::vector<double> tx, rx;
    split_axes(partial, tx, rx);
    const auto et = padded_noise_subspace(tx);
    const auto er = padded_noise_subspace(rx);
    const auto let = down_shift(et);
    const auto ler = down_shift(er);
    return {kron(et, er), kron(et, ler), kron(let, er), kron(let, ler)};
}

ComplexVector compose_noise_vector(const UVectors& u, const SteeringPhase& candidate) {
    const Complex zt = std::polar(1.0, candidate.tx);
    const Complex zr = std::polar(1.0, candidate.rx);
    ComplexVector e(u.u0.size());
    for (std::size_t i = 0; i < e.size(); ++i)
        e[i] = u.u0[i] - zr * u.u1[i] - zt * u.u2[i] + zt * zr * u.u3[i];
    return e;
}

ComplexVector kronecker_noise_vector(const SteeringSet& all) {
    std::vector<double> tx, rx;
    split_axes(all, tx, rx);
    return kron(noise_subspace_1d(tx), noise_subspace_1d(rx));
}

Theorem2Residuals theorem2_residuals(const UVectors& u, const ComplexMatrix& r,
                                     const SteeringPhase& candidate) {
    if (!r.square() || r.rows() != u.u0.size())
        throw DimensionMismatch("theorem2_residuals: covariance is " + std::to_string(r.rows()) +
                                "x" + std::to_string(r.cols()) + ", u-vectors have length " +
                                std::to_string(u.u0.size()));
    const Complex zt = std::polar(1.0, candidate.tx);
    const Complex zr = std::polar(1.0, candidate.rx);
    return {norm(r * axpy(-zt, u.u3, u.u1)), norm(r * axpy(-zr, u.u3, u.u2)),
            norm(r * axpy(-zt * zr, u.u3, u.u0))};
}

}  // namespace mimodoa
