#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hywave/errors.hpp"
#include "hywave/math.hpp"
#include "hywave/rng.hpp"

namespace hywave {

// Sea state in (Hm0, Te) terms as binned from buoy statistics. gamma = 1 gives
// Pierson-Moskowitz; gamma > 1 the JONSWAP peak-enhanced form.
struct SeaState {
    double hm0 = 0.0;   // m
    double te = 0.0;    // energy period, s
    double gamma = 1.0; // peak enhancement
};

// Variance density S(omega), m^2 s/rad, Hm0-parameterized JONSWAP:
//   S = (1 - 0.287 ln g) * (5/16) Hm0^2 wp^4 w^-5 exp(-5/4 (wp/w)^4) g^b
// which integrates to Hm0^2/16 exactly at gamma = 1.
inline double wave_spectral_density(double w, double hm0, double tp, double gamma) {
    if (w <= 0.0) return 0.0;
    double wp = 2.0 * pi / tp;
    double sigma = (w <= wp) ? 0.07 : 0.09;
    double r = wp / w;
    double b = std::exp(-(w - wp) * (w - wp) / (2.0 * sigma * sigma * wp * wp));
    double norm = 1.0 - 0.287 * std::log(gamma);
    return norm * (5.0 / 16.0) * hm0 * hm0 * std::pow(wp, 4) / std::pow(w, 5) *
           std::exp(-1.25 * r * r * r * r) * std::pow(gamma, b);
}

namespace detail {
// Spectral moments m0 and m_-1 by quadrature over [0.2 wp, 8 wp]; the tails beyond
// carry < 0.1 % of the variance for these spectral shapes.
inline std::pair<double, double> wave_moments(double hm0, double tp, double gamma) {
    double wp = 2.0 * pi / tp;
    double m0 = simpson([&](double w) { return wave_spectral_density(w, hm0, tp, gamma); },
                        0.2 * wp, 8.0 * wp, 2000);
    double mm1 = simpson([&](double w) { return wave_spectral_density(w, hm0, tp, gamma) / w; },
                         0.2 * wp, 8.0 * wp, 2000);
    return {m0, mm1};
}
} // namespace detail

// Energy period of the analytic spectrum: Te = 2 pi m_-1 / m0.
inline double spectrum_te(double tp, double gamma) {
    auto [m0, mm1] = detail::wave_moments(1.0, tp, gamma);
    return 2.0 * pi * mm1 / m0;
}

// Inverts Te(Tp) for the given gamma by bisection. The ratio Te/Tp is ~0.857 for
// Pierson-Moskowitz and rises toward 1 with increasing gamma.
inline double te_to_tp(double te, double gamma = 1.0) {
    if (te <= 0.0) fail(errc::config, "te_to_tp: Te must be positive");
    if (gamma < 1.0 || gamma > 10.0) fail(errc::config, "te_to_tp: gamma outside [1, 10]");
    auto f = [&](double tp) { return spectrum_te(tp, gamma) - te; };
    return bisect(f, te * 0.95, te * 1.6, 1e-9 * te);
}

struct Spectrum {
    std::vector<double> w; // rad/s, ascending, equal spacing
    std::vector<double> s; // m^2 s/rad
    double wp = 0.0;
    double dw = 0.0;
};

// Equal-d-omega discretization over [lo_fac, hi_fac] * wp.
inline Spectrum make_spectrum(const SeaState& sea, int n = 500, double lo_fac = 0.2,
                              double hi_fac = 5.0) {
    if (sea.hm0 <= 0.0 || sea.te <= 0.0) fail(errc::config, "make_spectrum: Hm0 and Te must be positive");
    if (n < 2) fail(errc::config, "make_spectrum: need >= 2 components");
    double tp = te_to_tp(sea.te, sea.gamma);
    Spectrum sp;
    sp.wp = 2.0 * pi / tp;
    double lo = lo_fac * sp.wp, hi = hi_fac * sp.wp;
    sp.dw = (hi - lo) / (n - 1);
    sp.w.resize(n);
    sp.s.resize(n);
    for (int i = 0; i < n; ++i) {
        sp.w[i] = lo + sp.dw * i;
        sp.s[i] = wave_spectral_density(sp.w[i], sea.hm0, tp, sea.gamma);
    }
    return sp;
}

struct WaveComponent {
    double amp = 0.0;   // m
    double omega = 0.0; // rad/s
    double phase = 0.0; // rad
};

struct WaveRealization {
    std::vector<WaveComponent> comps;
    bool regular = false;
    std::uint64_t seed = 0;
};

// Deterministic realization: a_i = sqrt(2 S_i dw), phases uniform from the seeded stream.
inline WaveRealization synthesize(const Spectrum& sp, std::uint64_t seed) {
    WaveRealization r;
    r.seed = seed;
    Rng rng(seed);
    r.comps.reserve(sp.w.size());
    for (std::size_t i = 0; i < sp.w.size(); ++i)
        r.comps.push_back({std::sqrt(2.0 * sp.s[i] * sp.dw), sp.w[i], rng.phase()});
    return r;
}

// Monochromatic wave of the given height (crest-to-trough) and period.
inline WaveRealization regular_wave(double height, double period) {
    if (height <= 0.0 || period <= 0.0) fail(errc::config, "regular_wave: height/period must be positive");
    WaveRealization r;
    r.regular = true;
    r.comps.push_back({height / 2.0, 2.0 * pi / period, 0.0});
    return r;
}

inline double realization_m0(const WaveRealization& r) {
    double s = 0.0;
    for (const auto& c : r.comps) s += 0.5 * c.amp * c.amp;
    return s;
}

// Energy period implied by the component table (discrete moments).
inline double realization_te(const WaveRealization& r) {
    double m0 = 0.0, mm1 = 0.0;
    for (const auto& c : r.comps) {
        m0 += 0.5 * c.amp * c.amp;
        mm1 += 0.5 * c.amp * c.amp / c.omega;
    }
    return 2.0 * pi * mm1 / m0;
}

inline double max_omega(const WaveRealization& r) {
    double w = 0.0;
    for (const auto& c : r.comps) w = std::max(w, c.omega);
    return w;
}

inline double elevation(const WaveRealization& r, double t) {
    double e = 0.0;
    for (const auto& c : r.comps) e += c.amp * std::cos(c.omega * t + c.phase);
    return e;
}

// Sampled elevation. Rejects grids coarser than 8 samples per shortest component
// period: beyond that the discrete series underresolves the component it claims
// to carry and recovered statistics go quietly wrong.
inline std::vector<double> elevation_series(const WaveRealization& r, double dt,
                                            double duration) {
    if (dt <= 0.0 || duration <= 0.0) fail(errc::config, "elevation_series: dt/duration must be positive");
    double tmin = 2.0 * pi / max_omega(r);
    if (dt > tmin / 8.0)
        fail(errc::config, "elevation_series: dt too coarse for shortest component (need <= " +
                               std::to_string(tmin / 8.0) + " s)");
    std::size_t n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = elevation(r, dt * static_cast<double>(k));
    return out;
}

// Evaluates y(t_k) = sum_i [ P_i cos(theta_i) - Q_i sin(theta_i) ], theta_i = w_i t + p_i,
// on a uniform grid via per-component rotation recurrences: O(ncomp) per sample with no
// trig in the inner loop. Phase drift over ~1e6 steps is O(1e-10) relative - negligible.
inline std::vector<double> harmonic_series(const std::vector<double>& omega,
                                           const std::vector<double>& phase,
                                           const std::vector<double>& P,
                                           const std::vector<double>& Q, double t0, double dt,
                                           std::size_t n) {
    std::size_t m = omega.size();
    if (phase.size() != m || P.size() != m || Q.size() != m)
        fail(errc::validation, "harmonic_series: mismatched component arrays");
    std::vector<double> c(m), s(m), dc(m), dsn(m);
    for (std::size_t i = 0; i < m; ++i) {
        c[i] = std::cos(omega[i] * t0 + phase[i]);
        s[i] = std::sin(omega[i] * t0 + phase[i]);
        dc[i] = std::cos(omega[i] * dt);
        dsn[i] = std::sin(omega[i] * dt);
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += P[i] * c[i] - Q[i] * s[i];
        out[k] = acc;
        for (std::size_t i = 0; i < m; ++i) {
            double cn = c[i] * dc[i] - s[i] * dsn[i];
            s[i] = s[i] * dc[i] + c[i] * dsn[i];
            c[i] = cn;
        }
    }
    return out;
}

// Band-averaged periodogram of a uniformly sampled series (plain DFT at the natural
// frequencies, magnitudes averaged in nbands equal-width frequency bands). Used to
// compare realized spectra without caring about per-line scatter.
inline std::vector<double> band_periodogram(const std::vector<double>& x, double dt,
                                            int nbands) {
    std::size_t n = x.size();
    if (n < 16 || nbands < 1) fail(errc::validation, "band_periodogram: series too short");
    std::size_t nf = n / 2;
    std::vector<double> power(nf, 0.0);
    double mu = mean(x);
    for (std::size_t k = 1; k < nf; ++k) {
        double re = 0.0, im = 0.0;
        double w = 2.0 * pi * static_cast<double>(k) / static_cast<double>(n);
        double cw = std::cos(w), sw = std::sin(w);
        double c = 1.0, s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double v = x[j] - mu;
            re += v * c;
            im -= v * s;
            double cn = c * cw - s * sw;
            s = s * cw + c * sw;
            c = cn;
        }
        power[k] = (re * re + im * im) / static_cast<double>(n);
    }
    std::vector<double> bands(nbands, 0.0);
    for (std::size_t k = 1; k < nf; ++k)
        bands[std::min<std::size_t>(k * nbands / nf, nbands - 1)] += power[k];
    (void)dt;
    return bands;
}

} // namespace hywave
