#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hywave/csv.hpp"
#include "hywave/errors.hpp"
#include "hywave/math.hpp"
#include "hywave/waves.hpp"

namespace hywave {

struct ExcEntry {
    double w = 0.0;     // rad/s
    double mag = 0.0;   // N/m (force per unit wave amplitude)
    double phase = 0.0; // rad
};

// Frequency-domain description of one floating body about its reference point
// (waterplane center at the still water line unless stated otherwise in the file).
struct BodyHydro {
    double rho = 1025.0;
    double g = 9.81;
    double volume = 0.0; // displaced volume, m^3
    Vec3 cog = Vec3::Zero();
    std::vector<double> freqs;     // rad/s, ascending
    std::vector<Mat6> added_mass;  // per frequency
    std::vector<Mat6> damping;     // per frequency (radiation damping)
    Mat6 a_inf = Mat6::Zero();     // infinite-frequency added mass
    Mat6 hydrostatic = Mat6::Zero();
    std::array<std::vector<ExcEntry>, 6> excitation; // per DOF, ascending w
    Vec6 drag = Vec6::Zero();      // quadratic viscous coefficients per DOF, N/(m/s)^2 etc.
};

namespace detail {
inline Mat6 mat6_from_json(const nlohmann::json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 6) fail(errc::schema, what + ": expected 6x6 array");
    Mat6 m;
    for (int r = 0; r < 6; ++r) {
        const auto& row = j[r];
        if (!row.is_array() || row.size() != 6) fail(errc::schema, what + ": expected 6x6 array");
        for (int c = 0; c < 6; ++c) m(r, c) = row[c].get<double>();
    }
    return m;
}

inline nlohmann::json mat6_to_json(const Mat6& m) {
    nlohmann::json j = nlohmann::json::array();
    for (int r = 0; r < 6; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 6; ++c) row.push_back(m(r, c));
        j.push_back(row);
    }
    return j;
}

inline void require_symmetric(const Mat6& m, double scale, const std::string& what) {
    for (int r = 0; r < 6; ++r)
        for (int c = r + 1; c < 6; ++c)
            if (std::abs(m(r, c) - m(c, r)) > 1e-6 * scale + 1e-9)
                fail(errc::validation, what + ": matrix not symmetric at (" + std::to_string(r) +
                                           "," + std::to_string(c) + ")");
}
} // namespace detail

inline void validate_hydro(const BodyHydro& b, const std::string& name) {
    if (b.rho <= 0.0 || b.g <= 0.0) fail(errc::validation, name + ": rho/g must be positive");
    if (b.freqs.size() < 2) fail(errc::validation, name + ": need >= 2 frequencies");
    for (std::size_t i = 0; i < b.freqs.size(); ++i) {
        if (b.freqs[i] <= 0.0) fail(errc::validation, name + ": frequencies must be positive");
        if (i > 0 && b.freqs[i] <= b.freqs[i - 1])
            fail(errc::validation, name + ": frequencies must ascend");
    }
    if (b.added_mass.size() != b.freqs.size() || b.damping.size() != b.freqs.size())
        fail(errc::validation, name + ": coefficient tables must match frequency grid");
    double ascale = std::abs(b.a_inf.diagonal().maxCoeff()) + 1.0;
    for (std::size_t i = 0; i < b.freqs.size(); ++i) {
        detail::require_symmetric(b.added_mass[i], ascale, name + " added_mass");
        detail::require_symmetric(b.damping[i], ascale, name + " damping");
        for (int d = 0; d < 6; ++d)
            if (b.damping[i](d, d) < -1e-9)
                fail(errc::validation, name + ": negative radiation damping on diagonal DOF " +
                                           std::to_string(d));
    }
    detail::require_symmetric(b.a_inf, ascale, name + " a_inf");
    detail::require_symmetric(b.hydrostatic, std::abs(b.hydrostatic.diagonal().maxCoeff()) + 1.0,
                              name + " hydrostatic");
    for (int d = 0; d < 6; ++d) {
        const auto& tab = b.excitation[d];
        for (std::size_t i = 1; i < tab.size(); ++i)
            if (tab[i].w <= tab[i - 1].w)
                fail(errc::validation, name + ": excitation frequencies must ascend (DOF " +
                                           std::to_string(d) + ")");
        if (b.drag[d] < 0.0) fail(errc::validation, name + ": negative drag coefficient");
    }
}

inline BodyHydro hydro_from_json(const nlohmann::json& j, const std::string& name) {
    BodyHydro b;
    try {
        b.rho = j.at("rho").get<double>();
        b.g = j.at("g").get<double>();
        b.volume = j.at("volume").get<double>();
        auto cog = j.at("cog").get<std::vector<double>>();
        if (cog.size() != 3) fail(errc::schema, name + ": cog must have 3 entries");
        b.cog = Vec3(cog[0], cog[1], cog[2]);
        b.freqs = j.at("freqs").get<std::vector<double>>();
        const auto& am = j.at("added_mass");
        const auto& dm = j.at("damping");
        if (am.size() != b.freqs.size() || dm.size() != b.freqs.size())
            fail(errc::schema, name + ": added_mass/damping length mismatch with freqs");
        for (std::size_t i = 0; i < b.freqs.size(); ++i) {
            b.added_mass.push_back(detail::mat6_from_json(am[i], name + " added_mass"));
            b.damping.push_back(detail::mat6_from_json(dm[i], name + " damping"));
        }
        b.a_inf = detail::mat6_from_json(j.at("a_inf"), name + " a_inf");
        b.hydrostatic = detail::mat6_from_json(j.at("hydrostatic"), name + " hydrostatic");
        for (const auto& [key, tab] : j.at("excitation").items()) {
            int d = -1;
            try {
                d = std::stoi(key);
            } catch (...) {}
            if (d < 0 || d > 5) fail(errc::schema, name + ": excitation DOF key '" + key + "'");
            for (const auto& e : tab)
                b.excitation[d].push_back({e.at("w").get<double>(), e.at("mag").get<double>(),
                                           e.at("phase").get<double>()});
        }
        if (j.contains("drag")) {
            auto dv = j.at("drag").get<std::vector<double>>();
            if (dv.size() != 6) fail(errc::schema, name + ": drag must have 6 entries");
            for (int d = 0; d < 6; ++d) b.drag[d] = dv[d];
        }
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    validate_hydro(b, name);
    return b;
}

inline BodyHydro load_hydro(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, path + ": " + e.what());
    }
    return hydro_from_json(j, path);
}

inline nlohmann::json hydro_to_json(const BodyHydro& b) {
    nlohmann::json j;
    j["rho"] = b.rho;
    j["g"] = b.g;
    j["volume"] = b.volume;
    j["cog"] = {b.cog.x(), b.cog.y(), b.cog.z()};
    j["freqs"] = b.freqs;
    j["added_mass"] = nlohmann::json::array();
    j["damping"] = nlohmann::json::array();
    for (std::size_t i = 0; i < b.freqs.size(); ++i) {
        j["added_mass"].push_back(detail::mat6_to_json(b.added_mass[i]));
        j["damping"].push_back(detail::mat6_to_json(b.damping[i]));
    }
    j["a_inf"] = detail::mat6_to_json(b.a_inf);
    j["hydrostatic"] = detail::mat6_to_json(b.hydrostatic);
    j["excitation"] = nlohmann::json::object();
    for (int d = 0; d < 6; ++d) {
        if (b.excitation[d].empty()) continue;
        nlohmann::json tab = nlohmann::json::array();
        for (const auto& e : b.excitation[d])
            tab.push_back({{"w", e.w}, {"mag", e.mag}, {"phase", e.phase}});
        j["excitation"][std::to_string(d)] = tab;
    }
    j["drag"] = {b.drag[0], b.drag[1], b.drag[2], b.drag[3], b.drag[4], b.drag[5]};
    return j;
}

// Frequency interpolation of the tabulated matrices (clamped outside the band).
inline Mat6 added_mass_at(const BodyHydro& b, double w) {
    if (w <= b.freqs.front()) return b.added_mass.front();
    if (w >= b.freqs.back()) return b.added_mass.back();
    auto it = std::upper_bound(b.freqs.begin(), b.freqs.end(), w);
    std::size_t i = static_cast<std::size_t>(it - b.freqs.begin());
    double t = (w - b.freqs[i - 1]) / (b.freqs[i] - b.freqs[i - 1]);
    return b.added_mass[i - 1] + t * (b.added_mass[i] - b.added_mass[i - 1]);
}

inline Mat6 damping_at(const BodyHydro& b, double w) {
    if (w <= b.freqs.front()) return b.damping.front();
    if (w >= b.freqs.back()) return b.damping.back();
    auto it = std::upper_bound(b.freqs.begin(), b.freqs.end(), w);
    std::size_t i = static_cast<std::size_t>(it - b.freqs.begin());
    double t = (w - b.freqs[i - 1]) / (b.freqs[i] - b.freqs[i - 1]);
    return b.damping[i - 1] + t * (b.damping[i] - b.damping[i - 1]);
}

// Radiation impulse response K(t) = (2/pi) integral B(w) cos(w t) dw over the tabulated
// band (trapezoid on the file's own grid). K enters the memory convolution
//   F_rad(t) = -A_inf a(t) - integral_0^tmax K(tau) v(t - tau) dtau.
struct RadiationIrf {
    double dt = 0.0;
    std::vector<Mat6> K; // K[k] = K(k dt), k = 0 .. n-1
    // Channels with any non-negligible kernel content, to skip zero work in the
    // convolution loop.
    std::vector<std::pair<int, int>> active;
};

inline RadiationIrf radiation_irf(const BodyHydro& b, double dt = 0.05, double tmax = 60.0) {
    if (dt <= 0.0 || tmax <= dt) fail(errc::config, "radiation_irf: bad dt/tmax");
    RadiationIrf irf;
    irf.dt = dt;
    std::size_t n = static_cast<std::size_t>(std::floor(tmax / dt)) + 1;
    irf.K.resize(n, Mat6::Zero());
    std::size_t nf = b.freqs.size();
    for (std::size_t k = 0; k < n; ++k) {
        double t = dt * static_cast<double>(k);
        Mat6 acc = Mat6::Zero();
        for (std::size_t i = 1; i < nf; ++i) {
            double w0 = b.freqs[i - 1], w1 = b.freqs[i];
            acc += 0.5 * (w1 - w0) *
                   (b.damping[i - 1] * std::cos(w0 * t) + b.damping[i] * std::cos(w1 * t));
        }
        irf.K[k] = (2.0 / pi) * acc;
    }
    double kmax = 0.0;
    for (const auto& K : irf.K) kmax = std::max(kmax, K.cwiseAbs().maxCoeff());
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
            double peak = 0.0;
            for (const auto& K : irf.K) peak = std::max(peak, std::abs(K(r, c)));
            if (peak > 1e-8 * kmax) irf.active.push_back({r, c});
        }
    return irf;
}

// Per-DOF excitation projection for a wave realization: returns, for DOF d,
//   F_d(t) = sum_i P_i cos(w_i t + phi_i) - Q_i sin(w_i t + phi_i)
// with P = a |X| cos(arg X), Q = a |X| sin(arg X) interpolated from the table.
struct ExcitationProjection {
    std::vector<double> omega, phase;
    std::array<std::vector<double>, 6> P, Q;
    std::array<bool, 6> active{};
};

inline ExcitationProjection project_excitation(const BodyHydro& b, const WaveRealization& wave) {
    ExcitationProjection pr;
    std::size_t n = wave.comps.size();
    pr.omega.resize(n);
    pr.phase.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        pr.omega[i] = wave.comps[i].omega;
        pr.phase[i] = wave.comps[i].phase;
    }
    for (int d = 0; d < 6; ++d) {
        const auto& tab = b.excitation[d];
        if (tab.empty()) continue;
        pr.active[d] = true;
        pr.P[d].resize(n);
        pr.Q[d].resize(n);
        std::vector<double> ws(tab.size()), mags(tab.size()), phs(tab.size());
        for (std::size_t i = 0; i < tab.size(); ++i) {
            ws[i] = tab[i].w;
            mags[i] = tab[i].mag;
            phs[i] = tab[i].phase;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double a = wave.comps[i].amp;
            double mag = interp1(ws, mags, pr.omega[i]);
            double ph = interp1(ws, phs, pr.omega[i]);
            pr.P[d][i] = a * mag * std::cos(ph);
            pr.Q[d][i] = a * mag * std::sin(ph);
        }
    }
    return pr;
}

// Direct evaluation (used for spot checks; the simulator precomputes series instead).
inline Vec6 excitation_force(const ExcitationProjection& pr, double t) {
    Vec6 f = Vec6::Zero();
    for (int d = 0; d < 6; ++d) {
        if (!pr.active[d]) continue;
        double acc = 0.0;
        for (std::size_t i = 0; i < pr.omega.size(); ++i) {
            double th = pr.omega[i] * t + pr.phase[i];
            acc += pr.P[d][i] * std::cos(th) - pr.Q[d][i] * std::sin(th);
        }
        f[d] = acc;
    }
    return f;
}

// Quadratic viscous load, diagonal per-DOF model on relative velocity.
inline Vec6 viscous_force(const Vec6& drag, const Vec6& v_body, const Vec6& v_fluid = Vec6::Zero()) {
    Vec6 f;
    for (int d = 0; d < 6; ++d) {
        double vr = v_fluid[d] - v_body[d];
        f[d] = drag[d] * std::abs(vr) * vr;
    }
    return f;
}

} // namespace hywave
