#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hywave/aero.hpp"
#include "hywave/errors.hpp"
#include "hywave/hydro.hpp"
#include "hywave/math.hpp"
#include "hywave/metrics.hpp"
#include "hywave/mooring.hpp"
#include "hywave/waves.hpp"

namespace hywave {

// ---------------------------------------------------------------------------
// System configuration
// ---------------------------------------------------------------------------

struct BodyMass {
    double mass = 0.0;
    Vec3 cog = Vec3::Zero();       // about the body reference point
    Vec3 inertia = Vec3::Zero();   // principal moments about the CoG

    Mat6 rigid() const {
        Mat3 I = inertia.asDiagonal();
        return rigid_body_mass(mass, cog, I);
    }
};

struct SystemConfig {
    std::string name;
    std::string platform_kind;   // "spar" | "semisub"
    bool reaction_plate = false;
    std::string turbine_kind;    // "none" | "5mw" | "15mw"
    std::string float_kind;      // "none" | "float1" | "float2"

    std::string platform_coeffs; // resolved paths
    BodyMass platform_mass;
    std::string float_coeffs;
    BodyMass float_mass;
    double float_attach_z = 0.0; // equilibrium float reference height on the tower axis

    std::string turbine_file, cp_table, ct_table;

    double pto_damping = 0.0;    // N/(m/s)
    DeviceRating wec_rating{286e3, 0.8, 0.95, 0.98};
    DeviceRating wt_rating{0.0, 1.0, 0.95, 0.98}; // rated filled from turbine file

    double water_depth = 0.0;
    std::vector<MooringLine> lines;

    std::string radiation_mode = "convolution"; // or "linear" (damping_at(w->0) model)
    double irf_dt = 0.05, irf_tmax = 60.0;

    bool has_turbine() const { return turbine_kind != "none"; }
    bool has_float() const { return float_kind != "none"; }
    int ndof() const { return has_float() ? 7 : 6; }
};

namespace detail {

inline std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return fp.string();
    return (base / fp).lexically_normal().string();
}

inline BodyMass body_mass_from_json(const nlohmann::json& j, const std::string& name) {
    BodyMass b;
    try {
        b.mass = j.at("mass").get<double>();
        auto c = j.at("cog").get<std::vector<double>>();
        auto i = j.at("inertia").get<std::vector<double>>();
        if (c.size() != 3 || i.size() != 3) fail(errc::schema, name + ": cog/inertia need 3 entries");
        b.cog = Vec3(c[0], c[1], c[2]);
        b.inertia = Vec3(i[0], i[1], i[2]);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    if (b.mass <= 0.0 || b.inertia.minCoeff() <= 0.0)
        fail(errc::validation, name + ": mass/inertia must be positive");
    return b;
}

} // namespace detail

inline SystemConfig system_from_json(const nlohmann::json& j, const std::string& name,
                                     const std::filesystem::path& base_dir) {
    SystemConfig c;
    try {
        c.name = j.value("name", name);
        const auto& pl = j.at("platform");
        c.platform_kind = pl.at("kind").get<std::string>();
        c.reaction_plate = pl.value("reaction_plate", false);
        c.platform_coeffs = detail::resolve_path(base_dir, pl.at("coeffs").get<std::string>());
        c.platform_mass = detail::body_mass_from_json(pl, c.name + " platform");
        c.turbine_kind = j.contains("turbine") ? j["turbine"].value("kind", "none") : "none";
        if (c.has_turbine()) {
            const auto& tb = j.at("turbine");
            c.turbine_file = detail::resolve_path(base_dir, tb.at("file").get<std::string>());
            c.cp_table = detail::resolve_path(base_dir, tb.at("cp_table").get<std::string>());
            c.ct_table = detail::resolve_path(base_dir, tb.at("ct_table").get<std::string>());
        }
        c.float_kind = j.contains("float") ? j["float"].value("kind", "none") : "none";
        if (c.float_kind == "default")
            c.float_kind = c.turbine_kind == "15mw" ? "float2" : "float1";
        if (c.has_float()) {
            const auto& fl = j.at("float");
            c.float_coeffs = detail::resolve_path(base_dir, fl.at("coeffs").get<std::string>());
            c.float_mass = detail::body_mass_from_json(fl, c.name + " float");
            c.float_attach_z = fl.value("attach_z", 0.0);
            const auto& pto = j.at("pto");
            c.pto_damping = pto.at("damping").get<double>();
            if (c.pto_damping < 0.0) fail(errc::validation, c.name + ": pto damping must be >= 0");
            c.wec_rating.rated_power = pto.value("rated_power", 286e3);
            c.wec_rating.efficiency = pto.value("efficiency", 0.8);
        }
        c.water_depth = j.at("water_depth").get<double>();
        if (j.contains("mooring")) {
            nlohmann::json m = j.at("mooring");
            if (m.contains("file")) {
                std::string mp = detail::resolve_path(base_dir, m.at("file").get<std::string>());
                try {
                    m = nlohmann::json::parse(read_text_file(mp));
                } catch (const nlohmann::json::exception& e) {
                    fail(errc::schema, mp + ": " + e.what());
                }
            }
            LineProps props = line_props_from_json(m.at("props"), c.name + " mooring");
            auto fls = m.at("fairleads");
            auto ans = m.at("anchors");
            if (fls.size() != ans.size() || fls.empty())
                fail(errc::schema, c.name + ": fairleads/anchors must pair up");
            for (std::size_t i = 0; i < fls.size(); ++i) {
                auto f = fls[i].get<std::vector<double>>();
                auto a = ans[i].get<std::vector<double>>();
                if (f.size() != 3 || a.size() != 3)
                    fail(errc::schema, c.name + ": fairlead/anchor entries need 3 coords");
                MooringLine ln;
                ln.props = props;
                ln.fairlead_body = Vec3(f[0], f[1], f[2]);
                ln.anchor = Vec3(a[0], a[1], a[2]);
                c.lines.push_back(ln);
            }
        }
        c.radiation_mode = j.value("radiation_mode", "convolution");
        c.irf_dt = j.value("irf_dt", 0.05);
        c.irf_tmax = j.value("irf_tmax", 60.0);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    if (c.platform_kind != "spar" && c.platform_kind != "semisub")
        fail(errc::config, c.name + ": platform kind must be spar or semisub");
    if (c.turbine_kind != "none" && c.turbine_kind != "5mw" && c.turbine_kind != "15mw")
        fail(errc::config, c.name + ": turbine kind must be none/5mw/15mw");
    if (c.float_kind != "none" && c.float_kind != "float1" && c.float_kind != "float2")
        fail(errc::config, c.name + ": float kind must be none/float1/float2");
    if (c.radiation_mode != "convolution" && c.radiation_mode != "linear")
        fail(errc::config, c.name + ": radiation_mode must be convolution or linear");
    if (c.water_depth <= 0.0) fail(errc::config, c.name + ": water depth must be positive");
    return c;
}

inline SystemConfig load_system(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, path + ": " + e.what());
    }
    return system_from_json(j, path, std::filesystem::path(path).parent_path());
}

// ---------------------------------------------------------------------------
// Assembled system
// ---------------------------------------------------------------------------

// Generalized coordinates q: platform (X, Y, Z, RX, RY, RZ) plus, for systems with a
// float, the relative displacement s along the tower axis. The float's 6-DOF body
// velocity is J q_dot with the constraint Jacobian J below (small-rotation kinematics
// about the as-moored pose, constant-matrix Cummins practice).
struct HybridSystem {
    SystemConfig cfg;
    int n = 6;

    BodyHydro platform;
    std::optional<BodyHydro> floatb;
    RadiationIrf irf_p, irf_f;
    Eigen::Matrix<double, 6, Eigen::Dynamic> jac_f; // 6 x n float Jacobian

    std::optional<TurbineSpec> turbine;
    RotorTables tables;

    MatX mass;          // n x n generalized mass incl. A_inf
    Eigen::LDLT<MatX> mass_ldlt;
    MatX stiffness;     // n x n generalized hydrostatic restoring

    Vec6 moor_bias = Vec6::Zero(); // cancels quasi-static pretension at the neutral pose
    VecX q_eq;                     // discrete static equilibrium
    std::vector<LineState> line_eq;

    VecX embed_platform(const Vec6& f) const {
        VecX out = VecX::Zero(n);
        out.head<6>() = f;
        return out;
    }
    VecX embed_float(const Vec6& f) const { return jac_f.transpose() * f; }
};

namespace detail {

inline Eigen::Matrix<double, 6, Eigen::Dynamic> float_jacobian(int n, double attach_z) {
    Eigen::Matrix<double, 6, Eigen::Dynamic> J(6, n);
    J.setZero();
    J.block<6, 6>(0, 0).setIdentity();
    J(0, 4) = attach_z;  // surge from pitch
    J(1, 3) = -attach_z; // sway from roll
    if (n > 6) J(2, 6) = 1.0; // relative heave
    return J;
}

} // namespace detail

// Total quasi-static restoring force at pose q (hydrostatic + catenary + bias);
// used by the equilibrium solve and by stiffness probes.
inline VecX quasistatic_force(const HybridSystem& sys, const VecX& q) {
    VecX f = -sys.stiffness * q;
    if (!sys.cfg.lines.empty()) {
        Vec6 pose = q.head<6>();
        Vec6 fm = quasistatic_mooring_force(sys.cfg.lines, sys.cfg.water_depth, pose) + sys.moor_bias;
        f += sys.embed_platform(fm);
    }
    return f;
}

struct EquilibriumReport {
    bool converged = false;
    double residual_force = 0.0;  // max |generalized force| component, N or N m
    int outer_iterations = 0;
};

// ---------------------------------------------------------------------------
// build_system
// ---------------------------------------------------------------------------

inline HybridSystem build_system(const SystemConfig& cfg) {
    HybridSystem sys;
    sys.cfg = cfg;
    sys.n = cfg.ndof();
    sys.platform = load_hydro(cfg.platform_coeffs);
    if (cfg.has_float()) sys.floatb = load_hydro(cfg.float_coeffs);
    if (cfg.has_turbine()) {
        sys.turbine = load_turbine(cfg.turbine_file);
        sys.tables = load_rotor_tables(cfg.cp_table, cfg.ct_table);
        sys.cfg.wt_rating.rated_power = sys.turbine->rated_power;
        sys.cfg.wt_rating.efficiency = 1.0; // generator path reports electrical directly
    }

    sys.jac_f = detail::float_jacobian(sys.n, cfg.float_attach_z);

    // Generalized mass and restoring. The float's rigid + A_inf blocks map through
    // the constraint Jacobian; everything evaluated at the design pose (constant).
    sys.mass = MatX::Zero(sys.n, sys.n);
    Mat6 mp = cfg.platform_mass.rigid() + sys.platform.a_inf;
    sys.mass.topLeftCorner(6, 6) = mp;
    sys.stiffness = MatX::Zero(sys.n, sys.n);
    sys.stiffness.topLeftCorner(6, 6) = sys.platform.hydrostatic;
    if (cfg.has_float()) {
        Mat6 mf = cfg.float_mass.rigid() + sys.floatb->a_inf;
        sys.mass += sys.jac_f.transpose() * mf * sys.jac_f;
        sys.stiffness += sys.jac_f.transpose() * sys.floatb->hydrostatic * sys.jac_f;
    }
    sys.mass_ldlt.compute(sys.mass);
    if (sys.mass_ldlt.info() != Eigen::Success || !sys.mass_ldlt.isPositive())
        fail(errc::config, cfg.name + ": generalized mass matrix is singular or indefinite");

    if (cfg.radiation_mode == "convolution") {
        sys.irf_p = radiation_irf(sys.platform, cfg.irf_dt, cfg.irf_tmax);
        if (cfg.has_float()) sys.irf_f = radiation_irf(*sys.floatb, cfg.irf_dt, cfg.irf_tmax);
    }

    // Static equilibrium. The hydrostatic matrices restore about the as-moored design
    // pose, so the catenary pretension at q = 0 is absorbed into a constant bias and
    // the solve only polishes the discrete-vs-closed-form mooring difference.
    sys.q_eq = VecX::Zero(sys.n);
    if (!cfg.lines.empty()) {
        sys.moor_bias = -quasistatic_mooring_force(cfg.lines, cfg.water_depth, Vec6::Zero());
        MatX K = sys.stiffness;
        K.topLeftCorner(6, 6) +=
            quasistatic_mooring_stiffness(cfg.lines, cfg.water_depth, Vec6::Zero());
        Eigen::LDLT<MatX> Kl(K);
        if (Kl.info() != Eigen::Success)
            fail(errc::config, cfg.name + ": singular static stiffness");
        // Newton on the closed-form catenary force (fast), then swap in the relaxed
        // lumped-mass lines and polish with the same stiffness.
        VecX q = sys.q_eq;
        for (int it = 0; it < 20; ++it) {
            VecX f = quasistatic_force(sys, q);
            if (f.cwiseAbs().maxCoeff() < 1e-6) break;
            q += Kl.solve(f);
        }
        EquilibriumReport rep;
        for (int outer = 0; outer < 12; ++outer) {
            ++rep.outer_iterations;
            sys.line_eq.clear();
            Vec6 pose = q.head<6>();
            Vec6 fm = sys.moor_bias;
            bool relaxed_all = true;
            for (const auto& ln : cfg.lines) {
                Vec3 fw = fairlead_world(ln.fairlead_body, pose);
                LineState st = line_init(ln, cfg.water_depth, fw);
                relaxed_all &= line_relax(ln, cfg.water_depth, st, fw, 400.0, 1e-6);
                Vec3 fl = st.fairlead_force;
                fm.head<3>() += fl;
                fm.tail<3>() += (fw - Vec3(pose[0], pose[1], pose[2])).cross(fl);
                sys.line_eq.push_back(std::move(st));
            }
            VecX f = -sys.stiffness * q + sys.embed_platform(fm);
            rep.residual_force = f.cwiseAbs().maxCoeff();
            if (relaxed_all && rep.residual_force < 0.005) {
                rep.converged = true;
                break;
            }
            q += Kl.solve(f);
        }
        if (!rep.converged)
            fail(errc::numeric, cfg.name + ": static equilibrium did not converge (residual " +
                                    std::to_string(rep.residual_force) + " N after " +
                                    std::to_string(rep.outer_iterations) + " outer iterations)");
        sys.q_eq = q;
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Time stepping
// ---------------------------------------------------------------------------

struct SystemState {
    double t = 0.0;
    VecX q, v;           // generalized position / velocity
    TurbineState turbine;
    std::vector<LineState> lines;

    // frozen-per-step loads
    Vec6 moor_force = Vec6::Zero(); // world force at platform ref + moment
    Vec6 rad_p = Vec6::Zero(), rad_p_prev = Vec6::Zero();
    Vec6 rad_f = Vec6::Zero(), rad_f_prev = Vec6::Zero();
    double thrust = 0.0, aero_roll = 0.0;

    // decimated velocity histories for the radiation convolution (ring buffers)
    std::vector<Vec6> hist_p, hist_f;
    std::size_t hist_head = 0;
    std::size_t step_index = 0;

    // last-step diagnostics
    double pto_force = 0.0, pto_power = 0.0;
};

// Environment bound to one simulation case.
struct Environment {
    WaveRealization wave;
    WindSeries wind;
    // excitation force series per body DOF, sampled at dt_exc
    double dt_exc = 0.05;
    std::array<std::vector<double>, 6> fexc_p, fexc_f;
    std::array<bool, 6> act_p{}, act_f{};

    double exc(const std::array<std::vector<double>, 6>& f, const std::array<bool, 6>& act,
               int d, double t) const {
        if (!act[d]) return 0.0;
        const auto& s = f[d];
        double u = t / dt_exc;
        if (u <= 0.0) return s.front();
        std::size_t i = static_cast<std::size_t>(u);
        if (i + 1 >= s.size()) return s.back();
        double fr = u - static_cast<double>(i);
        return s[i] + fr * (s[i + 1] - s[i]);
    }
};

inline Environment make_environment(const HybridSystem& sys, const WaveRealization& wave,
                                    const WindSeries& wind, double duration, double dt_exc = 0.05) {
    Environment env;
    env.wave = wave;
    env.wind = wind;
    env.dt_exc = dt_exc;
    std::size_t n = static_cast<std::size_t>(std::ceil(duration / dt_exc)) + 2;
    auto fill = [&](const BodyHydro& b, std::array<std::vector<double>, 6>& out,
                    std::array<bool, 6>& act) {
        ExcitationProjection pr = project_excitation(b, wave);
        for (int d = 0; d < 6; ++d) {
            act[d] = pr.active[d];
            if (pr.active[d])
                out[d] = harmonic_series(pr.omega, pr.phase, pr.P[d], pr.Q[d], 0.0, dt_exc, n);
        }
    };
    if (!wave.comps.empty()) {
        fill(sys.platform, env.fexc_p, env.act_p);
        if (sys.floatb) fill(*sys.floatb, env.fexc_f, env.act_f);
    }
    return env;
}

namespace detail {

// Generalized force at a stage point, excluding the frozen per-step parts which the
// caller adds (mooring, radiation, aero thrust).
inline void stage_force(const HybridSystem& sys, const Environment& env, double t, const VecX& q,
                        const VecX& v, VecX& out) {
    const int n = sys.n;
    out = -sys.stiffness * q;
    // excitation
    Vec6 fe;
    for (int d = 0; d < 6; ++d) fe[d] = env.exc(env.fexc_p, env.act_p, d, t);
    out.head<6>() += fe;
    if (sys.floatb) {
        Vec6 ff;
        bool any = false;
        for (int d = 0; d < 6; ++d) {
            ff[d] = env.exc(env.fexc_f, env.act_f, d, t);
            any |= env.act_f[d];
        }
        if (any) out += sys.jac_f.transpose() * ff;
    }
    // viscous drag (body-velocity referenced)
    Vec6 vp = v.head<6>();
    out.head<6>() += viscous_force(sys.platform.drag, vp);
    if (sys.floatb) {
        Vec6 vf = sys.jac_f * v;
        out += sys.jac_f.transpose() * viscous_force(sys.floatb->drag, vf);
    }
    // linear radiation mode (constant-coefficient reduction)
    if (sys.cfg.radiation_mode == "linear") {
        out.head<6>() -= sys.platform.damping.front() * vp;
        if (sys.floatb) {
            Vec6 vf = sys.jac_f * v;
            out += sys.jac_f.transpose() * (-(sys.floatb->damping.front() * vf));
        }
    }
    // PTO: equal and opposite pair along the tower axis, assembled through both
    // attachment Jacobians so the third-law cancellation is explicit.
    if (n > 6 && sys.cfg.pto_damping > 0.0) {
        double f_pto = -sys.cfg.pto_damping * v[6];
        Vec6 on_float = Vec6::Zero(), on_platform = Vec6::Zero();
        on_float[2] = f_pto;
        on_platform[2] = -f_pto;
        out += sys.jac_f.transpose() * on_float;
        out.head<6>() += on_platform;
    }
}

inline Vec6 convolve(const RadiationIrf& irf, const std::vector<Vec6>& hist, std::size_t head,
                     std::size_t filled) {
    Vec6 f = Vec6::Zero();
    std::size_t n = std::min(filled, irf.K.size());
    if (n < 2) return f;
    for (auto [r, c] : irf.active) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            const Vec6& vh = hist[(head + hist.size() - j) % hist.size()];
            acc += w * irf.K[j](r, c) * vh[c];
        }
        f[r] -= acc * irf.dt;
    }
    return f;
}

} // namespace detail

// Initial state at the discrete static equilibrium. The frozen per-step loads start
// at their equilibrium values so the first step sees a balanced system.
inline SystemState initial_state(const HybridSystem& sys, const Environment& env) {
    SystemState st;
    st.q = sys.q_eq;
    st.v = VecX::Zero(sys.n);
    st.lines = sys.line_eq;
    if (!sys.cfg.lines.empty()) {
        Vec6 pose = sys.q_eq.head<6>();
        Vec6 fm = Vec6::Zero();
        for (std::size_t i = 0; i < sys.cfg.lines.size(); ++i) {
            Vec3 fw = fairlead_world(sys.cfg.lines[i].fairlead_body, pose);
            Vec3 fl = sys.line_eq[i].fairlead_force;
            fm.head<3>() += fl;
            fm.tail<3>() += (fw - Vec3(pose[0], pose[1], pose[2])).cross(fl);
        }
        st.moor_force = fm;
    }
    std::size_t nh = sys.cfg.radiation_mode == "convolution"
                         ? std::max<std::size_t>(sys.irf_p.K.size(), 2)
                         : 2;
    st.hist_p.assign(nh, Vec6::Zero());
    if (sys.floatb) st.hist_f.assign(nh, Vec6::Zero());
    if (sys.turbine) {
        SteadyOp op = steady_operating_point(*sys.turbine, sys.tables, env.wind.mean_hub);
        st.turbine.omega = std::max(op.omega, 1e-3);
        st.turbine.pitch = op.pitch;
        st.turbine.pitch_integral = op.pitch;
        st.thrust = op.thrust;
    }
    return st;
}

// One fixed-step RK4 advance. Mooring, radiation, and rotor loads are held over the
// step (loose coupling); hydrostatics, excitation, drag, and PTO are stage-exact.
inline void step(const HybridSystem& sys, const Environment& env, SystemState& st, double dt,
                 std::size_t irf_decim) {
    const int n = sys.n;

    // refresh frozen loads at the step start
    if (sys.cfg.radiation_mode == "convolution" && st.step_index % irf_decim == 0) {
        st.hist_head = (st.hist_head + 1) % st.hist_p.size();
        st.hist_p[st.hist_head] = st.v.head<6>();
        std::size_t filled = std::min(st.step_index / irf_decim + 1, st.hist_p.size());
        st.rad_p_prev = st.rad_p;
        st.rad_p = detail::convolve(sys.irf_p, st.hist_p, st.hist_head, filled);
        if (sys.floatb) {
            st.hist_f[st.hist_head] = sys.jac_f * st.v;
            st.rad_f_prev = st.rad_f;
            st.rad_f = detail::convolve(sys.irf_f, st.hist_f, st.hist_head, filled);
        }
    }
    if (sys.turbine) {
        double zh = sys.turbine->hub_height;
        double v_hub = st.v[0] + zh * st.v[4];
        double v_rel = env.wind.at(st.t) - v_hub;
        turbine_step(*sys.turbine, sys.tables, st.turbine, v_rel, dt);
        st.thrust = st.turbine.thrust;
        st.aero_roll = -st.turbine.gen_torque;
    }

    VecX frozen = VecX::Zero(n);
    {
        // linear continuation of the decimated radiation force between evaluations
        double frac = static_cast<double>(st.step_index % irf_decim) / static_cast<double>(irf_decim);
        Vec6 rad_p_now = st.rad_p + frac * (st.rad_p - st.rad_p_prev);
        Vec6 fp = st.moor_force + sys.moor_bias + rad_p_now;
        if (sys.turbine) {
            fp[0] += st.thrust;
            fp[4] += st.thrust * sys.turbine->hub_height;
            fp[3] += st.aero_roll;
        }
        frozen.head<6>() = fp;
        if (sys.floatb) {
            Vec6 rad_f_now = st.rad_f + frac * (st.rad_f - st.rad_f_prev);
            frozen += sys.jac_f.transpose() * rad_f_now;
        }
    }

    // RK4 on (q, v)
    static thread_local VecX f, a1, a2, a3, a4, qs, vs;
    auto accel = [&](double ts, const VecX& qq, const VecX& vv, VecX& acc) {
        detail::stage_force(sys, env, ts, qq, vv, f);
        f += frozen;
        acc = sys.mass_ldlt.solve(f);
    };
    double t = st.t;
    accel(t, st.q, st.v, a1);
    qs = st.q + 0.5 * dt * st.v;
    vs = st.v + 0.5 * dt * a1;
    accel(t + 0.5 * dt, qs, vs, a2);
    qs = st.q + 0.5 * dt * vs;
    vs = st.v + 0.5 * dt * a2;
    accel(t + 0.5 * dt, qs, vs, a3);
    qs = st.q + dt * vs;
    vs = st.v + dt * a3;
    accel(t + dt, qs, vs, a4);
    VecX q_new = st.q + dt / 6.0 * (st.v + 2.0 * (st.v + 0.5 * dt * a1) +
                                    2.0 * (st.v + 0.5 * dt * a2) + (st.v + dt * a3));
    VecX v_new = st.v + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);

    // advance mooring lines with the fairleads moving between the step endpoints
    if (!sys.cfg.lines.empty()) {
        Vec6 pose0 = st.q.head<6>(), pose1 = q_new.head<6>();
        Vec6 fm = Vec6::Zero();
        for (std::size_t i = 0; i < sys.cfg.lines.size(); ++i) {
            const auto& ln = sys.cfg.lines[i];
            Vec3 f0 = fairlead_world(ln.fairlead_body, pose0);
            Vec3 f1 = fairlead_world(ln.fairlead_body, pose1);
            line_step(ln, sys.cfg.water_depth, st.lines[i], f0, f1, dt);
            Vec3 fl = st.lines[i].fairlead_force;
            fm.head<3>() += fl;
            fm.tail<3>() += (f1 - Vec3(pose1[0], pose1[1], pose1[2])).cross(fl);
        }
        st.moor_force = fm;
    }

    st.q = q_new;
    st.v = v_new;
    st.t += dt;
    ++st.step_index;
    if (n > 6) {
        st.pto_force = -sys.cfg.pto_damping * st.v[6];
        st.pto_power = sys.cfg.pto_damping * st.v[6] * st.v[6];
    }

    // divergence detector
    if (!st.q.allFinite() || !st.v.allFinite())
        fail(errc::simulation, sys.cfg.name + ": state became non-finite at t = " +
                                   std::to_string(st.t) + " s");
    double trans = st.q.head<3>().cwiseAbs().maxCoeff();
    double rot = st.q.segment<3>(3).cwiseAbs().maxCoeff();
    double rel = n > 6 ? std::abs(st.q[6]) : 0.0;
    if (trans > std::max(2.0 * sys.cfg.water_depth, 200.0) || rot > 1.5 || rel > 100.0)
        fail(errc::simulation,
             sys.cfg.name + ": motion diverged at t = " + std::to_string(st.t) +
                 " s (|xyz|max = " + std::to_string(trans) + " m, |rot|max = " +
                 std::to_string(rot) + " rad, |s| = " + std::to_string(rel) + " m)");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct TimeSeriesResult {
    double dt = 0.0;          // recording interval
    double transient_cutoff = 0.0;
    std::vector<std::string> names;
    std::vector<std::vector<double>> data; // [channel][sample]

    const std::vector<double>& channel(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return data[i];
        fail(errc::validation, "no channel named " + name);
    }
    std::size_t cutoff_index() const {
        return std::min(static_cast<std::size_t>(std::ceil(transient_cutoff / dt)),
                        data.empty() ? 0 : data[0].size());
    }
};

struct RmsPair {
    double raw = 0.0;
    double mean_removed = 0.0;
};

// Windowed second-moment sums so RMS over adjacent windows composes exactly.
struct RmsAccumulator {
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++count;
    }
    void merge(const RmsAccumulator& o) {
        sum += o.sum;
        sum2 += o.sum2;
        count += o.count;
    }
    RmsPair finish() const {
        if (count == 0) fail(errc::validation, "rms: empty window");
        RmsPair r;
        double m = sum / static_cast<double>(count);
        r.raw = std::sqrt(sum2 / static_cast<double>(count));
        r.mean_removed = std::sqrt(std::max(0.0, sum2 / static_cast<double>(count) - m * m));
        return r;
    }
};

inline RmsPair rms(const std::vector<double>& series, double dt, double transient_cutoff) {
    std::size_t i0 = static_cast<std::size_t>(std::ceil(transient_cutoff / dt));
    if (i0 >= series.size()) fail(errc::validation, "rms: cutoff leaves empty window");
    RmsAccumulator acc;
    for (std::size_t i = i0; i < series.size(); ++i) acc.add(series[i]);
    return acc.finish();
}

struct SimCase {
    double duration = 1200.0;
    double dt = 0.01;
    double transient_cutoff = 200.0;
    double record_dt = 0.1; // output decimation
};

inline TimeSeriesResult simulate(const HybridSystem& sys, const WaveRealization& wave,
                                 const WindSeries& wind, const SimCase& sc) {
    if (sc.duration <= sc.transient_cutoff)
        fail(errc::config, "simulate: duration must exceed the transient cutoff");
    if (sc.dt <= 0.0 || sc.record_dt < sc.dt)
        fail(errc::config, "simulate: need dt > 0 and record_dt >= dt");
    if (!wave.comps.empty()) {
        double tmin = 2.0 * pi / max_omega(wave);
        if (sc.dt > tmin / 8.0)
            fail(errc::config, "simulate: dt too coarse for the shortest wave component");
    }
    Environment env = make_environment(sys, wave, wind, sc.duration);
    SystemState st = initial_state(sys, env);
    std::size_t irf_decim =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sys.cfg.irf_dt / sc.dt)));
    std::size_t rec_decim =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(sc.record_dt / sc.dt)));
    std::size_t nsteps = static_cast<std::size_t>(std::llround(sc.duration / sc.dt));

    TimeSeriesResult res;
    res.dt = sc.dt * static_cast<double>(rec_decim);
    res.transient_cutoff = sc.transient_cutoff;
    res.names = {"t", "eta", "surge", "sway", "heave", "roll", "pitch", "yaw"};
    if (sys.floatb) {
        res.names.push_back("float_rel");
        res.names.push_back("float_heave");
        res.names.push_back("pto_force");
        res.names.push_back("pto_power");
        res.names.push_back("wec_elec");
    }
    for (std::size_t i = 0; i < sys.cfg.lines.size(); ++i)
        res.names.push_back("tension_" + std::to_string(i + 1));
    if (sys.turbine) {
        res.names.push_back("wind_hub");
        res.names.push_back("thrust");
        res.names.push_back("rotor_speed");
        res.names.push_back("blade_pitch");
        res.names.push_back("wt_power");
    }
    res.data.resize(res.names.size());
    std::size_t est = nsteps / rec_decim + 2;
    for (auto& ch : res.data) ch.reserve(est);

    auto record = [&]() {
        std::size_t c = 0;
        res.data[c++].push_back(st.t);
        res.data[c++].push_back(elevation(env.wave, st.t));
        for (int d = 0; d < 6; ++d) res.data[c++].push_back(st.q[d]);
        if (sys.floatb) {
            res.data[c++].push_back(st.q[6]);
            res.data[c++].push_back(st.q[2] + st.q[6]);
            res.data[c++].push_back(st.pto_force);
            res.data[c++].push_back(st.pto_power);
            res.data[c++].push_back(electrical_power(st.pto_power, sys.cfg.wec_rating));
        }
        for (std::size_t i = 0; i < sys.cfg.lines.size(); ++i)
            res.data[c++].push_back(st.lines[i].fairlead_tension);
        if (sys.turbine) {
            res.data[c++].push_back(env.wind.at(st.t));
            res.data[c++].push_back(st.thrust);
            res.data[c++].push_back(st.turbine.omega);
            res.data[c++].push_back(st.turbine.pitch);
            res.data[c++].push_back(st.turbine.gen_power);
        }
    };

    record();
    for (std::size_t k = 0; k < nsteps; ++k) {
        step(sys, env, st, sc.dt, irf_decim);
        if ((k + 1) % rec_decim == 0) record();
    }
    return res;
}

inline std::string result_to_csv(const TimeSeriesResult& r) {
    std::ostringstream out;
    out.precision(10);
    for (std::size_t c = 0; c < r.names.size(); ++c)
        out << r.names[c] << (c + 1 < r.names.size() ? ',' : '\n');
    std::size_t n = r.data.empty() ? 0 : r.data[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < r.data.size(); ++c)
            out << r.data[c][i] << (c + 1 < r.data.size() ? ',' : '\n');
    }
    return out.str();
}

// Post-cutoff channel statistics (RMS both conventions, mean, extrema).
inline nlohmann::json result_summary(const TimeSeriesResult& r) {
    nlohmann::json j;
    j["dt"] = r.dt;
    j["transient_cutoff"] = r.transient_cutoff;
    std::size_t i0 = r.cutoff_index();
    for (std::size_t c = 0; c < r.names.size(); ++c) {
        if (r.names[c] == "t") continue;
        const auto& s = r.data[c];
        if (i0 >= s.size()) fail(errc::validation, "result_summary: cutoff leaves no samples");
        RmsAccumulator acc;
        double mn = s[i0], mx = s[i0];
        for (std::size_t i = i0; i < s.size(); ++i) {
            acc.add(s[i]);
            mn = std::min(mn, s[i]);
            mx = std::max(mx, s[i]);
        }
        RmsPair rp = acc.finish();
        nlohmann::json cj;
        cj["mean"] = acc.sum / static_cast<double>(acc.count);
        cj["rms"] = rp.raw;
        cj["rms_zero_mean"] = rp.mean_removed;
        cj["min"] = mn;
        cj["max"] = mx;
        j["channels"][r.names[c]] = cj;
    }
    return j;
}

} // namespace hywave
