#include "mimodoa/complexity.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "mimodoa/errors.hpp"

namespace mimodoa::complexity {
namespace {

std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw InvalidArgument("complexity count overflows 64 bits");
    return r;
}

std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw InvalidArgument("complexity count overflows 64 bits");
    return r;
}

}  // namespace

void ComplexityInputs::validate() const {
    if (k < 1) throw ValidationError("K", "must be >= 1");
    if (m < 1) throw ValidationError("M", "must be >= 1");
    if (t < 1) throw ValidationError("T", "must be >= 1");
    if (n_tx <= k) throw ValidationError("n_tx", "must exceed K (N_sa >= 1)");
    if (n_rx <= k) throw ValidationError("n_rx", "must exceed K (N_sa >= 1)");
    if (n_theta < 1 || n_phi < 1) throw ValidationError("grid", "search point counts must be >= 1");
}

std::uint64_t idea_cost(const ComplexityInputs& in) {
    in.validate();
    const std::uint64_t k1 = in.k + 1;
    const std::uint64_t covariance = mul(add(mul(mul(k1, k1), in.m + 1), mul(in.m, in.m)), in.subarrays());
    const std::uint64_t updates = mul(mul(2 * in.k, in.t), add(mul(k1, in.k + 3), 1));
    return add(add(covariance, updates), 4);
}

std::uint64_t music_cost(const ComplexityInputs& in) {
    in.validate();
    const std::uint64_t n = in.virtual_size();
    const std::uint64_t covariance = add(mul(mul(n, n), in.m + 1), mul(in.m, in.m));
    const std::uint64_t evd = mul(12, mul(n, mul(n, n)));
    const std::uint64_t search = mul(mul(in.k, mul(in.n_theta, in.n_phi)), add(mul(n, n - in.k), 1));
    return add(add(covariance, evd), search);
}

ComplexityReport evaluate(const ComplexityInputs& in) {
    ComplexityReport r{in, idea_cost(in), music_cost(in), 0.0};
    r.gain_db = 10.0 * std::log10(static_cast<double>(r.music_cost) / static_cast<double>(r.idea_cost));
    return r;
}

SweepParam parse_sweep_param(std::string_view name) {
    if (name == "K") return SweepParam::K;
    if (name == "M") return SweepParam::M;
    if (name == "T") return SweepParam::T;
    if (name == "n_tx") return SweepParam::NTx;
    if (name == "n_rx") return SweepParam::NRx;
    if (name == "n_theta") return SweepParam::NTheta;
    if (name == "n_phi") return SweepParam::NPhi;
    throw InvalidArgument("unknown sweep parameter '" + std::string(name) +
                          "' (expected K, M, T, n_tx, n_rx, n_theta or n_phi)");
}

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::K: return "K";
        case SweepParam::M: return "M";
        case SweepParam::T: return "T";
        case SweepParam::NTx: return "n_tx";
        case SweepParam::NRx: return "n_rx";
        case SweepParam::NTheta: return "n_theta";
        case SweepParam::NPhi: return "n_phi";
    }
    return "?";
}

std::vector<ComplexityReport> sweep(SweepParam param, std::span<const std::uint64_t> values,
                                    const ComplexityInputs& base, const SweepOptions& opts) {
    std::vector<ComplexityReport> out;
    out.reserve(values.size());
    for (const auto v : values) {
        ComplexityInputs in = base;
        switch (param) {
            case SweepParam::K:
                in.k = v;
                if (opts.t_per_k > 0) in.t = opts.t_per_k * v;
                if (opts.array_follows_k) in.n_tx = in.n_rx = v + 1;
                break;
            case SweepParam::M: in.m = v; break;
            case SweepParam::T: in.t = v; break;
            case SweepParam::NTx: in.n_tx = v; break;
            case SweepParam::NRx: in.n_rx = v; break;
            case SweepParam::NTheta: in.n_theta = v; break;
            case SweepParam::NPhi: in.n_phi = v; break;
        }
        out.push_back(evaluate(in));
    }
    return out;
}

void write_csv(std::ostream& out, std::span<const ComplexityReport> rows) {
    out << "K,M,T,n_tx,n_rx,n_theta,n_phi,N_sa,idea_cost,music_cost,gain_db\n";
    char buf[256];
    for (const auto& r : rows) {
        const auto& i = r.inputs;
        std::snprintf(buf, sizeof(buf), "%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%llu,%.4f\n",
                      static_cast<unsigned long long>(i.k), static_cast<unsigned long long>(i.m),
                      static_cast<unsigned long long>(i.t), static_cast<unsigned long long>(i.n_tx),
                      static_cast<unsigned long long>(i.n_rx), static_cast<unsigned long long>(i.n_theta),
                      static_cast<unsigned long long>(i.n_phi),
                      static_cast<unsigned long long>(i.subarrays()),
                      static_cast<unsigned long long>(r.idea_cost),
                      static_cast<unsigned long long>(r.music_cost), r.gain_db);
        out << buf;
    }
}

void write_table(std::ostream& out, std::span<const ComplexityReport> rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%4s %6s %5s %5s %5s %14s %16s %9s\n", "K", "M", "T", "n_tx", "n_rx",
                  "idea", "music", "gain[dB]");
    out << buf;
    for (const auto& r : rows) {
        const auto& i = r.inputs;
        std::snprintf(buf, sizeof(buf), "%4llu %6llu %5llu %5llu %5llu %14llu %16llu %9.2f\n",
                      static_cast<unsigned long long>(i.k), static_cast<unsigned long long>(i.m),
                      static_cast<unsigned long long>(i.t), static_cast<unsigned long long>(i.n_tx),
                      static_cast<unsigned long long>(i.n_rx),
                      static_cast<unsigned long long>(r.idea_cost),
                      static_cast<unsigned long long>(r.music_cost), r.gain_db);
        out << buf;
    }
}

}  // namespace mimodoa::complexity
