#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hywave/csv.hpp"
#include "hywave/errors.hpp"
#include "hywave/math.hpp"
#include "hywave/rng.hpp"
#include "hywave/waves.hpp"

namespace hywave {

struct TurbineSpec {
    std::string name;
    double rated_power = 0.0;    // W, electrical
    double rotor_diameter = 0.0; // m
    double hub_height = 0.0;     // m above SWL
    double cut_in = 3.0;         // m/s
    double rated_wind = 0.0;     // m/s
    double cut_out = 25.0;       // m/s
    double rated_rpm = 0.0;
    double max_tip_speed = 0.0;  // m/s (sanity bound)
    double lambda_opt = 0.0;     // tip-speed ratio tracked in region 2
    double cp_max = 0.0;         // Cp at (lambda_opt, 0)
    double rotor_inertia = 0.0;  // kg m^2 about the shaft
    double rho_air = 1.225;
    double shear_alpha = 0.14;   // power-law exponent
    // Pitch PI gains (rad pitch per rad/s speed error; per rad speed error) with
    // first-order gain scheduling against pitch angle, NREL-style.
    double pitch_kp = 0.8;
    double pitch_ki = 0.35;
    double pitch_sched = deg2rad(6.3); // gain halves at this pitch angle
    double pitch_max = deg2rad(90.0);
    double pitch_rate = deg2rad(8.0);  // rad/s actuator limit
    double gen_torque_max_rate = 0.0;  // N m/s, 0 = unlimited

    double rotor_radius() const { return rotor_diameter / 2.0; }
    double rotor_area() const { return pi * rotor_radius() * rotor_radius(); }
    double rated_omega() const { return rated_rpm * 2.0 * pi / 60.0; }
    double rated_torque() const { return rated_power / rated_omega(); }
    // Region-2 optimal-tracking constant: tau = k Omega^2.
    double k_opt() const {
        double R = rotor_radius();
        return 0.5 * rho_air * rotor_area() * R * R * R * cp_max /
               (lambda_opt * lambda_opt * lambda_opt);
    }
};

inline TurbineSpec turbine_from_json(const nlohmann::json& j, const std::string& name) {
    TurbineSpec t;
    try {
        t.name = j.value("name", name);
        t.rated_power = j.at("rated_power").get<double>();
        t.rotor_diameter = j.at("rotor_diameter").get<double>();
        t.hub_height = j.at("hub_height").get<double>();
        t.cut_in = j.at("cut_in").get<double>();
        t.rated_wind = j.at("rated_wind").get<double>();
        t.cut_out = j.at("cut_out").get<double>();
        t.rated_rpm = j.at("rated_rpm").get<double>();
        t.max_tip_speed = j.at("max_tip_speed").get<double>();
        t.lambda_opt = j.at("lambda_opt").get<double>();
        t.cp_max = j.at("cp_max").get<double>();
        t.rotor_inertia = j.at("rotor_inertia").get<double>();
        t.rho_air = j.value("rho_air", 1.225);
        t.shear_alpha = j.value("shear_alpha", 0.14);
        t.pitch_kp = j.value("pitch_kp", t.pitch_kp);
        t.pitch_ki = j.value("pitch_ki", t.pitch_ki);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    if (t.rated_power <= 0 || t.rotor_diameter <= 0 || t.rated_rpm <= 0 || t.lambda_opt <= 0 ||
        t.cp_max <= 0 || t.cp_max >= 16.0 / 27.0 || t.rotor_inertia <= 0)
        fail(errc::validation, name + ": turbine parameters out of range (Cp must stay below Betz)");
    if (!(t.cut_in < t.rated_wind && t.rated_wind < t.cut_out))
        fail(errc::validation, name + ": need cut_in < rated wind < cut_out");
    return t;
}

inline TurbineSpec load_turbine(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, path + ": " + e.what());
    }
    return turbine_from_json(j, path);
}

// Cp/Ct surfaces on a (lambda, beta) grid, bilinear lookup with clamping at the
// grid edges. CSV layout: first row = beta grid in degrees, first column = lambda.
struct RotorTables {
    std::vector<double> lambda;   // ascending
    std::vector<double> beta;     // rad, ascending
    std::vector<std::vector<double>> cp; // [ilambda][ibeta]
    std::vector<std::vector<double>> ct;

    double lookup(const std::vector<std::vector<double>>& tab, double lam, double b) const {
        lam = clamp(lam, lambda.front(), lambda.back());
        b = clamp(b, beta.front(), beta.back());
        auto li = std::upper_bound(lambda.begin(), lambda.end(), lam);
        std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(li - lambda.begin()),
                                              lambda.size() - 1);
        if (i == 0) i = 1;
        auto bi = std::upper_bound(beta.begin(), beta.end(), b);
        std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(bi - beta.begin()),
                                              beta.size() - 1);
        if (k == 0) k = 1;
        double tx = (lam - lambda[i - 1]) / (lambda[i] - lambda[i - 1]);
        double ty = (b - beta[k - 1]) / (beta[k] - beta[k - 1]);
        return (1 - tx) * ((1 - ty) * tab[i - 1][k - 1] + ty * tab[i - 1][k]) +
               tx * ((1 - ty) * tab[i][k - 1] + ty * tab[i][k]);
    }
    double cp_at(double lam, double b) const { return lookup(cp, lam, b); }
    double ct_at(double lam, double b) const { return lookup(ct, lam, b); }
};

namespace detail {
inline void load_rotor_grid(const std::string& path, std::vector<double>& lambda,
                            std::vector<double>& beta, std::vector<std::vector<double>>& tab) {
    Table t = read_table(path, ',');
    if (t.rows.size() < 3 || t.rows[0].size() < 3)
        fail(errc::schema, path + ": rotor table needs beta header row and lambda column");
    std::vector<double> bdeg(t.rows[0].begin() + 1, t.rows[0].end());
    std::vector<double> lam, bq;
    for (double b : bdeg) bq.push_back(deg2rad(b));
    std::vector<std::vector<double>> vals;
    for (std::size_t r = 1; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != bdeg.size() + 1)
            fail(errc::schema, path + ": ragged rotor table row");
        lam.push_back(t.rows[r][0]);
        vals.emplace_back(t.rows[r].begin() + 1, t.rows[r].end());
    }
    for (std::size_t i = 1; i < lam.size(); ++i)
        if (lam[i] <= lam[i - 1]) fail(errc::validation, path + ": lambda grid must ascend");
    for (std::size_t i = 1; i < bq.size(); ++i)
        if (bq[i] <= bq[i - 1]) fail(errc::validation, path + ": beta grid must ascend");
    if (!lambda.empty() && (lambda != lam || beta != bq))
        fail(errc::validation, path + ": Cp and Ct grids differ");
    lambda = lam;
    beta = bq;
    tab = vals;
}
} // namespace detail

inline RotorTables load_rotor_tables(const std::string& cp_path, const std::string& ct_path) {
    RotorTables rt;
    detail::load_rotor_grid(cp_path, rt.lambda, rt.beta, rt.cp);
    detail::load_rotor_grid(ct_path, rt.lambda, rt.beta, rt.ct);
    double betz = 16.0 / 27.0;
    for (const auto& row : rt.cp)
        for (double v : row)
            if (v < -1e-9 || v > betz)
                fail(errc::validation, cp_path + ": Cp outside [0, Betz limit]");
    for (const auto& row : rt.ct)
        for (double v : row)
            if (v < -1e-9 || v > 2.0) fail(errc::validation, ct_path + ": Ct outside [0, 2]");
    return rt;
}

// ---------------------------------------------------------------------------
// Wind synthesis
// ---------------------------------------------------------------------------

// Kaimal variance density S(f) = 4 sigma^2 (L/V) / (1 + 6 f L / V)^(5/3), f in Hz.
inline double kaimal_density(double f, double sigma, double length_scale, double vmean) {
    double x = length_scale / vmean;
    return 4.0 * sigma * sigma * x / std::pow(1.0 + 6.0 * f * x, 5.0 / 3.0);
}

struct WindSpec {
    std::string mode = "steady";  // "steady" | "turbulent"
    double mean_speed = 0.0;      // m/s at ref_height
    double ref_height = 0.0;      // anemometer height, m; 0 = already at hub
    double ti = 0.14;             // turbulence intensity at hub
    double length_scale = 340.2;  // Kaimal integral scale, m
    std::uint64_t seed = 1;
    int n_components = 1200;
    double f_lo = 1.0 / 600.0;    // Hz; slower content belongs to the mean, not turbulence
    double f_hi = 2.0 / 3.0;      // Hz
    bool normalize_variance = true;
};

// Uniformly sampled hub-height wind speed series.
struct WindSeries {
    double dt = 0.1;
    double mean_hub = 0.0;
    std::vector<double> v; // m/s

    double at(double t) const {
        if (v.empty()) return mean_hub;
        double u = t / dt;
        if (u <= 0.0) return v.front();
        std::size_t i = static_cast<std::size_t>(u);
        if (i + 1 >= v.size()) return v.back();
        double frac = u - static_cast<double>(i);
        return v[i] + frac * (v[i + 1] - v[i]);
    }
};

// Power-law vertical extrapolation of the mean speed.
inline double shear_to_hub(double v_ref, double ref_height, double hub_height, double alpha) {
    if (ref_height <= 0.0) return v_ref; // already hub height
    return v_ref * std::pow(hub_height / ref_height, alpha);
}

// Single-point Kaimal synthesis, equal-df component grid, deterministic phases.
// With normalize_variance the discrete component variance is rescaled to exactly
// sigma^2 = (ti * mean)^2 so realized statistics do not depend on band truncation.
inline WindSeries make_wind(const WindSpec& spec, double hub_height, double shear_alpha,
                            double duration, double dt = 0.1) {
    if (spec.mean_speed < 0.0) fail(errc::config, "make_wind: negative mean speed");
    if (duration <= 0.0 || dt <= 0.0) fail(errc::config, "make_wind: bad duration/dt");
    WindSeries ws;
    ws.dt = dt;
    ws.mean_hub = shear_to_hub(spec.mean_speed, spec.ref_height, hub_height, shear_alpha);
    std::size_t n = static_cast<std::size_t>(std::floor(duration / dt)) + 2;
    if (spec.mode == "steady") {
        ws.v.assign(n, ws.mean_hub);
        return ws;
    }
    if (spec.mode != "turbulent") fail(errc::config, "make_wind: unknown mode '" + spec.mode + "'");
    if (spec.n_components < 2 || spec.f_hi <= spec.f_lo)
        fail(errc::config, "make_wind: bad turbulence band");
    double sigma = spec.ti * ws.mean_hub;
    int nc = spec.n_components;
    double df = (spec.f_hi - spec.f_lo) / (nc - 1);
    std::vector<double> omega(nc), phase(nc), P(nc), Q(nc, 0.0);
    Rng rng(spec.seed);
    double var = 0.0;
    for (int i = 0; i < nc; ++i) {
        double f = spec.f_lo + df * i;
        double a = std::sqrt(2.0 * kaimal_density(f, sigma, spec.length_scale,
                                                  std::max(ws.mean_hub, 0.1)) * df);
        omega[i] = 2.0 * pi * f;
        phase[i] = rng.phase();
        P[i] = a;
        var += 0.5 * a * a;
    }
    if (spec.normalize_variance && var > 0.0 && sigma > 0.0) {
        double scale = sigma / std::sqrt(var);
        for (double& p : P) p *= scale;
    }
    ws.v = harmonic_series(omega, phase, P, Q, 0.0, dt, n);
    for (double& v : ws.v) v = std::max(0.0, v + ws.mean_hub);
    return ws;
}

// ---------------------------------------------------------------------------
// Rotor loads and control
// ---------------------------------------------------------------------------

struct RotorLoads {
    double thrust = 0.0;     // N, along shaft
    double aero_torque = 0.0; // N m
    double cp = 0.0, ct = 0.0, lambda = 0.0;
};

inline RotorLoads rotor_loads(const TurbineSpec& t, const RotorTables& tab, double v_rel,
                              double omega, double pitch) {
    RotorLoads out;
    if (v_rel < 0.05 || omega <= 0.0) return out;
    out.lambda = omega * t.rotor_radius() / v_rel;
    out.cp = tab.cp_at(out.lambda, pitch);
    out.ct = tab.ct_at(out.lambda, pitch);
    double q = 0.5 * t.rho_air * t.rotor_area() * v_rel * v_rel;
    out.thrust = q * out.ct;
    out.aero_torque = q * v_rel * out.cp / omega;
    return out;
}

// Generator torque law: optimal k Omega^2 up to 95 % of rated speed, linear ramp to
// rated torque at rated speed, constant electrical power above. Continuous in Omega.
inline double generator_torque(const TurbineSpec& t, double omega) {
    if (omega <= 0.0) return 0.0;
    double w_r = t.rated_omega();
    double w_25 = 0.95 * w_r;
    double k = t.k_opt();
    if (omega <= w_25) return k * omega * omega;
    if (omega <= w_r) {
        double tau_25 = k * w_25 * w_25;
        return tau_25 + (t.rated_torque() - tau_25) * (omega - w_25) / (w_r - w_25);
    }
    return t.rated_power / omega; // constant-power region
}

struct TurbineState {
    double omega = 0.0;          // rotor speed, rad/s
    double pitch = 0.0;          // rad
    double pitch_integral = 0.0; // rad (integral term state)
    bool parked = false;

    // outputs of the last step
    double thrust = 0.0;
    double gen_torque = 0.0;
    double gen_power = 0.0; // W, electrical
    double aero_torque = 0.0;
};

// Advances rotor speed and pitch one step against the hub-relative wind. The PI
// speed loop is always active; below rated it saturates at fine pitch, so the only
// regime switching is the continuous torque law plus cut-in/cut-out supervision.
inline void turbine_step(const TurbineSpec& t, const RotorTables& tab, TurbineState& st,
                         double v_rel, double dt) {
    bool outside = (v_rel < t.cut_in) || (v_rel > t.cut_out);
    if (outside) {
        // Parked/feathered: no generator load, blades to feather, rotor spins down.
        st.parked = true;
        double target = t.pitch_max;
        double db = clamp(target - st.pitch, -t.pitch_rate * dt, t.pitch_rate * dt);
        st.pitch += db;
        st.pitch_integral = st.pitch;
        RotorLoads rl = rotor_loads(t, tab, v_rel, st.omega, st.pitch);
        st.aero_torque = rl.aero_torque;
        st.thrust = rl.thrust;
        st.gen_torque = 0.0;
        st.gen_power = 0.0;
        st.omega = std::max(0.0, st.omega + dt * (rl.aero_torque - 0.0) / t.rotor_inertia -
                                     dt * 0.02 * st.omega); // small shaft friction
        return;
    }
    st.parked = false;

    double w_r = t.rated_omega();
    double err = st.omega - w_r;
    double sched = 1.0 / (1.0 + st.pitch / t.pitch_sched);
    st.pitch_integral += t.pitch_ki * sched * err * dt;
    st.pitch_integral = clamp(st.pitch_integral, 0.0, t.pitch_max); // anti-windup
    double cmd = clamp(t.pitch_kp * sched * err + st.pitch_integral, 0.0, t.pitch_max);
    double db = clamp(cmd - st.pitch, -t.pitch_rate * dt, t.pitch_rate * dt);
    st.pitch += db;

    st.gen_torque = generator_torque(t, st.omega);
    RotorLoads rl = rotor_loads(t, tab, v_rel, st.omega, st.pitch);
    st.aero_torque = rl.aero_torque;
    st.thrust = rl.thrust;
    st.omega += dt * (rl.aero_torque - st.gen_torque) / t.rotor_inertia;
    st.omega = std::max(st.omega, 1e-3);
    st.gen_power = st.gen_torque * st.omega;
}

// Steady-state operating point for constant hub wind: either a region-2/2.5 balance
// at fine pitch, or rated speed with the pitch that absorbs the surplus torque.
struct SteadyOp {
    double omega = 0.0, pitch = 0.0, power = 0.0, thrust = 0.0;
};

inline SteadyOp steady_operating_point(const TurbineSpec& t, const RotorTables& tab, double v) {
    SteadyOp op;
    if (v < t.cut_in || v > t.cut_out) return op;
    double w_r = t.rated_omega();
    auto resid = [&](double w) {
        return rotor_loads(t, tab, v, w, 0.0).aero_torque - generator_torque(t, w);
    };
    // Below-rated balance exists if aero torque falls short of rated torque at w_r.
    if (resid(w_r) <= 0.0) {
        op.omega = bisect(resid, 1e-2, w_r, 1e-10);
        op.pitch = 0.0;
    } else {
        op.omega = w_r;
        auto bresid = [&](double b) {
            return rotor_loads(t, tab, v, w_r, b).aero_torque - t.rated_torque();
        };
        op.pitch = bisect(bresid, 0.0, t.pitch_max, 1e-10);
    }
    RotorLoads rl = rotor_loads(t, tab, v, op.omega, op.pitch);
    op.thrust = rl.thrust;
    op.power = generator_torque(t, op.omega) * op.omega;
    return op;
}

} // namespace hywave
