#include "mimodoa/music.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

namespace mimodoa::music {
namespace {

// a^H P a for a = a_tx (x) a_rx only depends on the index differences, so P is
// folded into lag sums S(di, dl) = sum P[(i,l), (i+di, l+dl)] once and each
// grid point costs O(n_tx * n_rx) instead of O(N^2).
struct LagTable {
    std::size_t n_tx = 0;
    std::size_t n_rx = 0;
    double zero_lag = 0.0;
    std::vector<Complex> lags;  // di in [0, n_tx), dl in (-n_rx, n_rx)

    Complex& at(std::size_t di, std::ptrdiff_t dl) {
        return lags[di * (2 * n_rx - 1) + static_cast<std::size_t>(dl + static_cast<std::ptrdiff_t>(n_rx) - 1)];
    }
    const Complex& at(std::size_t di, std::ptrdiff_t dl) const {
        return lags[di * (2 * n_rx - 1) + static_cast<std::size_t>(dl + static_cast<std::ptrdiff_t>(n_rx) - 1)];
    }
};

LagTable fold_projector(const ComplexMatrix& p, const ArrayGeometry& g) {
    LagTable t{g.n_tx, g.n_rx, 0.0, std::vector<Complex>(g.n_tx * (2 * g.n_rx - 1))};
    const auto nrx = static_cast<std::ptrdiff_t>(g.n_rx);
    for (std::size_t i = 0; i < g.n_tx; ++i) {
        for (std::ptrdiff_t l = 0; l < nrx; ++l) {
            const std::size_t row = i * g.n_rx + static_cast<std::size_t>(l);
            for (std::size_t i2 = i; i2 < g.n_tx; ++i2) {
                for (std::ptrdiff_t l2 = 0; l2 < nrx; ++l2) {
                    const std::size_t di = i2 - i;
                    const std::ptrdiff_t dl = l2 - l;
                    if (di == 0 && dl < 0) continue;
                    const Complex v = p(row, i2 * g.n_rx + static_cast<std::size_t>(l2));
                    if (di == 0 && dl == 0)
                        t.zero_lag += v.real();
                    else
                        t.at(di, dl) += v;
                }
            }
        }
    }
    return t;
}

double projector_energy(const LagTable& t, double eps_tx, double eps_rx, std::vector<Complex>& ptx,
                        std::vector<Complex>& prx) {
    const Complex zt = std::polar(1.0, eps_tx);
    const Complex zr = std::polar(1.0, eps_rx);
    ptx[0] = 1.0;
    for (std::size_t i = 1; i < t.n_tx; ++i) ptx[i] = ptx[i - 1] * zt;
    const std::size_t mid = t.n_rx - 1;
    prx[mid] = 1.0;
    for (std::size_t l = 1; l < t.n_rx; ++l) {
        prx[mid + l] = prx[mid + l - 1] * zr;
        prx[mid - l] = std::conj(prx[mid + l]);
    }
    Complex acc = 0.0;
    const auto nrx = static_cast<std::ptrdiff_t>(t.n_rx);
    for (std::ptrdiff_t dl = 1; dl < nrx; ++dl) acc += t.at(0, dl) * prx[mid + static_cast<std::size_t>(dl)];
    for (std::size_t di = 1; di < t.n_tx; ++di) {
        Complex row = 0.0;
        for (std::ptrdiff_t dl = 1 - nrx; dl < nrx; ++dl)
            row += t.at(di, dl) * prx[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(mid) + dl)];
        acc += row * ptx[di];
    }
    return t.zero_lag + 2.0 * acc.real();
}

}  // namespace

std::size_t MusicConfig::theta_points() const {
    return static_cast<std::size_t>(std::floor((theta_max_deg - theta_min_deg) / theta_step_deg + 1e-9)) + 1;
}

std::size_t MusicConfig::phi_points() const {
    return static_cast<std::size_t>(std::ceil((phi_max_deg - phi_min_deg) / phi_step_deg - 1e-9));
}

void MusicConfig::validate() const {
    if (!(theta_step_deg > 0.0)) throw ValidationError("music.theta_step_deg", "must be positive");
    if (!(phi_step_deg > 0.0)) throw ValidationError("music.phi_step_deg", "must be positive");
    if (!(theta_min_deg >= 0.0 && theta_max_deg <= 90.0 && theta_min_deg < theta_max_deg))
        throw ValidationError("music.theta_range", "must be an increasing sub-range of [0, 90]");
    if (!(phi_min_deg >= 0.0 && phi_max_deg <= 360.0 && phi_min_deg < phi_max_deg))
        throw ValidationError("music.phi_range", "must be an increasing sub-range of [0, 360)");
    if (theta_points() < 2 || phi_points() < 2)
        throw ValidationError("music", "grid steps must give at least two points per axis");
}

Spectrum pseudospectrum(const ComplexMatrix& r, const ArrayGeometry& geometry, std::size_t num_sources,
                        const MusicConfig& cfg) {
    cfg.validate();
    const std::size_t n = geometry.virtual_size();
    if (!r.square() || r.rows() != n)
        throw DimensionMismatch("MUSIC: covariance does not match the virtual array");
    if (num_sources < 1 || num_sources >= n)
        throw InvalidArgument("MUSIC needs 1 <= K < N");

    const auto eig = hermitian_eig(r);
    ComplexMatrix projector(n, n);
    for (std::size_t c = num_sources; c < n; ++c)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                projector(i, j) += eig.vectors(i, c) * std::conj(eig.vectors(j, c));
    const LagTable lags = fold_projector(projector, geometry);

    Spectrum s;
    const std::size_t nt = cfg.theta_points();
    const std::size_t np = cfg.phi_points();
    for (std::size_t i = 0; i < nt; ++i) s.theta_deg.push_back(cfg.theta_min_deg + static_cast<double>(i) * cfg.theta_step_deg);
    for (std::size_t j = 0; j < np; ++j) s.phi_deg.push_back(cfg.phi_min_deg + static_cast<double>(j) * cfg.phi_step_deg);
    s.values.assign(nt * np, 0.0);

    const double c = 2.0 * kPi * geometry.d_over_lambda;
    const double phi_trx = deg2rad(geometry.phi_trx_deg);
    std::vector<double> cos_phi(np), cos_phi_rx(np);
    for (std::size_t j = 0; j < np; ++j) {
        const double ph = deg2rad(s.phi_deg[j]);
        cos_phi[j] = std::cos(ph);
        cos_phi_rx[j] = std::cos(ph - phi_trx);
    }
    const double floor_value = std::numeric_limits<double>::epsilon() * static_cast<double>(n);

    auto fill_rows = [&](std::size_t first, std::size_t stride) {
        std::vector<Complex> ptx(geometry.n_tx), prx(2 * geometry.n_rx - 1);
        for (std::size_t i = first; i < nt; i += stride) {
            const double amp = -c * std::sin(deg2rad(s.theta_deg[i]));
            double* out = s.values.data() + i * np;
            for (std::size_t j = 0; j < np; ++j) {
                const double d = projector_energy(lags, amp * cos_phi[j], amp * cos_phi_rx[j], ptx, prx);
                out[j] = 1.0 / std::max(d, floor_value);
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, nt));
    if (workers == 1) {
        fill_rows(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(fill_rows, w, workers);
    }
    return s;
}

std::vector<GridPeak> find_peaks(const Spectrum& spectrum, bool phi_periodic) {
    const std::size_t nt = spectrum.theta_deg.size();
    const std::size_t np = spectrum.phi_deg.size();
    std::vector<GridPeak> peaks;
    for (std::size_t i = 0; i < nt; ++i) {
        for (std::size_t j = 0; j < np; ++j) {
            const double v = spectrum.at(i, j);
            bool is_peak = true;
            for (int di = -1; di <= 1 && is_peak; ++di) {
                const auto ii = static_cast<std::ptrdiff_t>(i) + di;
                if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(nt)) continue;
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    auto jj = static_cast<std::ptrdiff_t>(j) + dj;
                    if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(np)) {
                        if (!phi_periodic) continue;
                        jj = (jj + static_cast<std::ptrdiff_t>(np)) % static_cast<std::ptrdiff_t>(np);
                    }
                    if (spectrum.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj)) >= v) {
                        is_peak = false;
                        break;
                    }
                }
            }
            if (is_peak) peaks.push_back({spectrum.theta_deg[i], spectrum.phi_deg[j], v});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const GridPeak& a, const GridPeak& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.theta_deg != b.theta_deg) return a.theta_deg < b.theta_deg;
        return a.phi_deg < b.phi_deg;
    });
    return peaks;
}

MusicResult estimate(const ComplexMatrix& r, const ArrayGeometry& geometry, std::size_t num_sources,
                     const MusicConfig& cfg) {
    MusicResult out;
    out.spectrum = pseudospectrum(r, geometry, num_sources, cfg);
    out.eigenvalues = hermitian_eig(r).values;
    // A grid that covers the full azimuth circle wraps around.
    const bool periodic = cfg.phi_min_deg == 0.0 && cfg.phi_max_deg == 360.0;
    auto peaks = find_peaks(out.spectrum, periodic);
    if (peaks.size() < num_sources)
        throw PeakDeficit(std::move(peaks), "MUSIC found fewer local maxima than the " +
                                                std::to_string(num_sources) + " sources");
    peaks.resize(num_sources);
    out.doas = std::move(peaks);
    return out;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
    out << "theta_deg,phi_deg,value\n";
    char buf[96];
    for (std::size_t i = 0; i < spectrum.theta_deg.size(); ++i)
        for (std::size_t j = 0; j < spectrum.phi_deg.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.10e\n", spectrum.theta_deg[i],
                          spectrum.phi_deg[j], spectrum.at(i, j));
            out << buf;
        }
}

}  // namespace mimodoa::music
