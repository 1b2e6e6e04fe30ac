#pragma once

// Complex-multiplication counts of the two estimators.
//
//   idea  = {(K+1)^2 (M+1) + M^2} N_sa + 2KT{(K+1)(K+3) + 1} + 4
//   music = N^2 (M+1) + M^2 + 12 N^3 + K N_theta N_phi {N (N-K) + 1}
//
// with N = n_tx n_rx and N_sa = (n_tx - K)(n_rx - K). Evaluation is exact
// integer arithmetic; overflow throws.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mimodoa::complexity {

struct ComplexityInputs {
    std::uint64_t k = 3;
    std::uint64_t m = 50;
    std::uint64_t t = 12;
    std::uint64_t n_tx = 4;
    std::uint64_t n_rx = 4;
    std::uint64_t n_theta = 90;
    std::uint64_t n_phi = 360;

    std::uint64_t virtual_size() const { return n_tx * n_rx; }
    std::uint64_t subarrays() const { return (n_tx - k) * (n_rx - k); }

    /// Throws ValidationError (e.g. n_tx <= K).
    void validate() const;
};

struct ComplexityReport {
    ComplexityInputs inputs;
    std::uint64_t idea_cost = 0;
    std::uint64_t music_cost = 0;
    double gain_db = 0.0;  ///< 10 log10(music / idea)
};

std::uint64_t idea_cost(const ComplexityInputs& in);
std::uint64_t music_cost(const ComplexityInputs& in);
ComplexityReport evaluate(const ComplexityInputs& in);

enum class SweepParam { K, M, T, NTx, NRx, NTheta, NPhi };

/// Accepts "K", "M", "T", "n_tx", "n_rx", "n_theta", "n_phi". Throws
/// InvalidArgument for anything else.
SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam p);

struct SweepOptions {
    /// When nonzero and sweeping K, T follows as t_per_k * K.
    std::uint64_t t_per_k = 0;
    /// When sweeping K, keep n_tx = n_rx = K + 1.
    bool array_follows_k = false;
};

std::vector<ComplexityReport> sweep(SweepParam param, std::span<const std::uint64_t> values,
                                    const ComplexityInputs& base, const SweepOptions& opts = {});

/// Header plus one row per report.
void write_csv(std::ostream& out, std::span<const ComplexityReport> rows);
/// Fixed-width table for terminals.
void write_table(std::ostream& out, std::span<const ComplexityReport> rows);

}  // namespace mimodoa::complexity
