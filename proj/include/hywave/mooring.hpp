#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hywave/errors.hpp"
#include "hywave/math.hpp"

namespace hywave {

struct LineProps {
    double length = 0.0;      // unstretched, m
    double mass_air = 0.0;    // kg/m in air
    double mass_sub = 0.0;    // kg/m submerged (net of buoyancy)
    double ea = 0.0;          // axial stiffness, N
    double diameter = 0.0;    // equivalent diameter for drag/added mass, m
    int n_segments = 40;
    double cd_normal = 1.2;
    double cd_axial = 0.05;
    double ca_normal = 1.0;
    // Axial damping as a fraction of segment critical. Sized to kill the parasitic
    // axial ringing of the discretization (explicit midpoint amplifies undamped
    // modes); tension response at wave frequencies is insensitive to it.
    double zeta_internal = 0.25;
    double seabed_k = 3.0e6; // penalty stiffness, N/m per m of line
    double seabed_zeta = 1.0; // critical contact damping
    double rho_water = 1025.0;

    double w_sub() const { return mass_sub * 9.81; } // N/m submerged weight
    double seg_len() const { return length / n_segments; }
};

inline LineProps line_props_from_json(const nlohmann::json& j, const std::string& name) {
    LineProps p;
    try {
        p.length = j.at("length").get<double>();
        p.mass_air = j.at("mass_air").get<double>();
        p.mass_sub = j.at("mass_sub").get<double>();
        p.ea = j.at("ea").get<double>();
        p.diameter = j.at("diameter").get<double>();
        p.n_segments = j.value("n_segments", p.n_segments);
        p.cd_normal = j.value("cd_normal", p.cd_normal);
        p.cd_axial = j.value("cd_axial", p.cd_axial);
        p.ca_normal = j.value("ca_normal", p.ca_normal);
        p.zeta_internal = j.value("zeta_internal", p.zeta_internal);
        p.seabed_k = j.value("seabed_k", p.seabed_k);
        p.seabed_zeta = j.value("seabed_zeta", p.seabed_zeta);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    if (p.length <= 0 || p.mass_air <= 0 || p.mass_sub <= 0 || p.ea <= 0 || p.diameter <= 0 ||
        p.n_segments < 2)
        fail(errc::validation, name + ": line properties out of range");
    return p;
}

struct MooringLine {
    LineProps props;
    Vec3 anchor = Vec3::Zero();        // world, on the seabed
    Vec3 fairlead_body = Vec3::Zero(); // platform frame, about the platform reference
};

// ---------------------------------------------------------------------------
// Elastic catenary (quasi-static closed form)
// ---------------------------------------------------------------------------
//
// Planar elastic catenary from anchor to fairlead: horizontal span xf, vertical
// rise zf, unstretched length L, submerged weight w per length, stiffness EA.
// Grounded branch (part of the line rests on a frictionless seabed, suspended
// unstretched length Ls, H constant along the grounded part):
//   xf = (L - Ls) + (H/w) asinh(w Ls / H) + H L / EA
//   zf = (H/w) (sqrt(1 + (w Ls/H)^2) - 1) + w Ls^2 / (2 EA)
// Lifted branch (anchor vertical tension Va >= 0):
//   xf = (H/w) [asinh((Va + wL)/H) - asinh(Va/H)] + H L / EA
//   zf = (H/w) [sqrt(1 + ((Va+wL)/H)^2) - sqrt(1 + (Va/H)^2)] + (Va L + w L^2/2) / EA

struct CatenaryResult {
    double h = 0.0;        // horizontal tension at fairlead (= everywhere), N
    double v = 0.0;        // vertical tension at fairlead, N (pulls down on it)
    double suspended = 0.0; // unstretched suspended length, m
    double anchor_v = 0.0; // vertical tension at the anchor (0 when grounded), N
    bool grounded = true;

    double fairlead_tension() const { return std::hypot(h, v); }
};

namespace detail {

struct Resid2 {
    double f1, f2;
};

inline Resid2 grounded_resid(const LineProps& p, double xf, double zf, double H, double Ls) {
    double w = p.w_sub();
    double u = w * Ls / H;
    Resid2 r;
    r.f1 = (p.length - Ls) + (H / w) * std::asinh(u) + H * p.length / p.ea - xf;
    r.f2 = (H / w) * (std::sqrt(1.0 + u * u) - 1.0) + w * Ls * Ls / (2.0 * p.ea) - zf;
    return r;
}

inline Resid2 lifted_resid(const LineProps& p, double xf, double zf, double H, double Va) {
    double w = p.w_sub();
    double a = Va / H, b = (Va + w * p.length) / H;
    Resid2 r;
    r.f1 = (H / w) * (std::asinh(b) - std::asinh(a)) + H * p.length / p.ea - xf;
    r.f2 = (H / w) * (std::sqrt(1.0 + b * b) - std::sqrt(1.0 + a * a)) +
           (Va * p.length + w * p.length * p.length / 2.0) / p.ea - zf;
    return r;
}

// For a fixed horizontal tension H, pick the branch and second unknown that satisfy
// the vertical equation (both residuals are monotone in their second unknown), and
// report the horizontal residual. Sets x2/grounded for the caller.
struct BranchSol {
    double x2 = 0.0;
    bool grounded = true;
};

inline double catenary_horizontal_resid(const LineProps& p, double xf, double zf, double H,
                                        BranchSol& s) {
    double w = p.w_sub();
    // full-suspension rise: at or above zf means a grounded shape can reach the fairlead
    if (grounded_resid(p, xf, zf, H, p.length).f2 >= 0.0) {
        double lo = 0.0, hi = p.length;
        for (int i = 0; i < 80; ++i) {
            double mid = 0.5 * (lo + hi);
            (grounded_resid(p, xf, zf, H, mid).f2 < 0.0 ? lo : hi) = mid;
        }
        s.x2 = 0.5 * (lo + hi);
        s.grounded = true;
        return grounded_resid(p, xf, zf, H, s.x2).f1;
    }
    double lo = 0.0, hi = w * p.length;
    for (int i = 0; i < 200 && lifted_resid(p, xf, zf, H, hi).f2 < 0.0; ++i) hi *= 2.0;
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        (lifted_resid(p, xf, zf, H, mid).f2 < 0.0 ? lo : hi) = mid;
    }
    s.x2 = 0.5 * (lo + hi);
    s.grounded = false;
    return lifted_resid(p, xf, zf, H, s.x2).f1;
}

} // namespace detail

inline CatenaryResult catenary_solve(const LineProps& p, double xf, double zf) {
    if (xf <= 0.0 || zf < 0.0) fail(errc::numeric, "catenary_solve: need xf > 0, zf >= 0");
    double w = p.w_sub();
    // The horizontal span grows monotonically with H (flatter hang, more stretch), so
    // bracket H by doubling and bisect; the vertical equation is eliminated per
    // evaluation by the branch solve above. Unconditionally convergent.
    detail::BranchSol s;
    double Hlo = 1e-2;
    if (detail::catenary_horizontal_resid(p, xf, zf, Hlo, s) > 0.0) {
        // fairlead inside the zero-tension footprint: surplus line piles at the anchor,
        // report the near-slack limit instead of failing
        CatenaryResult res;
        res.grounded = s.grounded;
        res.h = Hlo;
        res.v = s.grounded ? w * s.x2 : s.x2 + w * p.length;
        res.suspended = s.grounded ? s.x2 : p.length;
        res.anchor_v = s.grounded ? 0.0 : s.x2;
        return res;
    }
    double Hhi = std::max(w * p.length, 1.0);
    bool bracketed = false;
    for (int i = 0; i < 80; ++i) {
        if (detail::catenary_horizontal_resid(p, xf, zf, Hhi, s) > 0.0) {
            bracketed = true;
            break;
        }
        Hhi *= 2.0;
    }
    if (!bracketed) fail(errc::numeric, "catenary_solve: span out of reach for this line");
    for (int i = 0; i < 100; ++i) {
        double mid = 0.5 * (Hlo + Hhi);
        (detail::catenary_horizontal_resid(p, xf, zf, mid, s) < 0.0 ? Hlo : Hhi) = mid;
    }
    double H = 0.5 * (Hlo + Hhi);
    detail::catenary_horizontal_resid(p, xf, zf, H, s);
    CatenaryResult res;
    res.grounded = s.grounded;
    res.h = H;
    if (s.grounded) {
        res.v = w * s.x2;
        res.suspended = s.x2;
        res.anchor_v = 0.0;
    } else {
        res.v = s.x2 + w * p.length;
        res.suspended = p.length;
        res.anchor_v = s.x2;
    }
    return res;
}

// Node positions along the line (local vertical plane: x toward fairlead, z up from
// anchor), equally spaced in unstretched arc length, for seeding the dynamic model.
inline std::vector<Vec3> catenary_profile(const LineProps& p, double xf, double zf,
                                          const CatenaryResult& c, int n_nodes) {
    std::vector<Vec3> out;
    out.reserve(n_nodes);
    double w = p.w_sub();
    double L = p.length;
    for (int i = 0; i < n_nodes; ++i) {
        double s = L * static_cast<double>(i) / (n_nodes - 1); // unstretched arc from anchor
        double x, z;
        if (c.grounded) {
            double lb = L - c.suspended;
            if (s <= lb) {
                x = s * (1.0 + c.h / p.ea);
                z = 0.0;
            } else {
                double sq = s - lb;
                double u = w * sq / c.h;
                x = lb * (1.0 + c.h / p.ea) + (c.h / w) * std::asinh(u) + c.h * sq / p.ea;
                z = (c.h / w) * (std::sqrt(1.0 + u * u) - 1.0) + w * sq * sq / (2.0 * p.ea);
            }
        } else {
            double a = c.anchor_v / c.h, b = (c.anchor_v + w * s) / c.h;
            x = (c.h / w) * (std::asinh(b) - std::asinh(a)) + c.h * s / p.ea;
            z = (c.h / w) * (std::sqrt(1.0 + b * b) - std::sqrt(1.0 + a * a)) +
                (c.anchor_v * s + w * s * s / 2.0) / p.ea;
        }
        out.push_back(Vec3(x, 0.0, z));
        (void)xf;
        (void)zf;
    }
    return out;
}

// Quasi-static fairlead force (world frame) for a line between world-frame anchor
// and fairlead positions, anchor on the seabed.
inline Vec3 catenary_fairlead_force(const LineProps& p, const Vec3& anchor, const Vec3& fairlead) {
    Vec3 d = fairlead - anchor;
    double xf = std::hypot(d.x(), d.y());
    double zf = d.z();
    if (xf < 1e-6) xf = 1e-6;
    CatenaryResult c = catenary_solve(p, xf, zf);
    Vec3 uh(d.x() / xf, d.y() / xf, 0.0);
    return -c.h * uh - Vec3(0.0, 0.0, c.v);
}

// ---------------------------------------------------------------------------
// Lumped-mass dynamic line
// ---------------------------------------------------------------------------

struct LineState {
    std::vector<Vec3> r, v; // node 0 = anchor (fixed), node N = fairlead (prescribed)
    double dt_max = 0.0;    // stable substep bound for this discretization
    double fairlead_tension = 0.0;
    Vec3 fairlead_force = Vec3::Zero(); // force the line applies at the fairlead, world
};

namespace detail {

inline double line_dt_bound(const LineProps& p) {
    double l0 = p.seg_len();
    double m_node = (p.mass_air + p.rho_water * pi * p.diameter * p.diameter / 4.0 * p.ca_normal) * l0;
    double c_axial = std::sqrt(p.ea / p.mass_air); // m/s elastic wave speed
    double dt_cfl = l0 / c_axial;
    double c_bed = p.seabed_zeta * 2.0 * std::sqrt(p.seabed_k * l0 * m_node);
    double dt_bed = c_bed > 0.0 ? 2.0 * m_node / c_bed : dt_cfl;
    return 0.4 * std::min(dt_cfl, dt_bed);
}

// Node accelerations for the free nodes 1..N-1. End nodes are kinematic.
// drag_mult scales fluid drag (used by static relaxation), extra_c adds linear
// per-node damping (also relaxation only).
inline void line_accels(const LineProps& p, double depth, const std::vector<Vec3>& r,
                        const std::vector<Vec3>& v, std::vector<Vec3>& acc, double drag_mult,
                        double extra_c) {
    int n = static_cast<int>(r.size()) - 1; // segments
    double l0 = p.seg_len();
    double m_node = (p.mass_air + p.rho_water * pi * p.diameter * p.diameter / 4.0 * p.ca_normal) * l0;
    double wL = p.w_sub() * l0;
    double c_int = p.zeta_internal * 2.0 * std::sqrt(p.ea * p.mass_air); // N s/m on elongation rate
    double c_bed = p.seabed_zeta * 2.0 * std::sqrt(p.seabed_k * l0 * m_node);
    static thread_local std::vector<Vec3> tens;
    tens.assign(n, Vec3::Zero());
    for (int i = 0; i < n; ++i) {
        Vec3 d = r[i + 1] - r[i];
        double len = d.norm();
        if (len < 1e-9) continue;
        Vec3 u = d / len;
        double strain = (len - l0) / l0;
        double rate = (v[i + 1] - v[i]).dot(u);
        double t = p.ea * strain + c_int * rate;
        if (strain <= 0.0) t = 0.0;      // chain cannot push
        tens[i] = std::max(t, 0.0) * u;  // no compressive force through a slack segment
    }
    for (int i = 1; i < n; ++i) {
        Vec3 f = tens[i] - tens[i - 1];
        f.z() -= wL; // submerged weight
        // seabed penalty spring + damper
        double pen = -depth - r[i].z();
        if (pen > 0.0) f.z() += p.seabed_k * l0 * pen - c_bed * v[i].z();
        // Morison drag, split along the local tangent
        Vec3 t0 = (r[i + 1] - r[i - 1]);
        double tn = t0.norm();
        Vec3 that = tn > 1e-9 ? Vec3(t0 / tn) : Vec3(0, 0, 1);
        Vec3 vt = v[i].dot(that) * that;
        Vec3 vn = v[i] - vt;
        double qn = 0.5 * p.rho_water * p.cd_normal * p.diameter * l0 * drag_mult;
        double qt = 0.5 * p.rho_water * p.cd_axial * pi * p.diameter * l0 * drag_mult;
        f -= qn * vn.norm() * vn + qt * vt.norm() * vt;
        f -= extra_c * v[i];
        acc[i] = f / m_node;
    }
    acc[0].setZero();
    acc[n].setZero();
}

} // namespace detail

// Seeds the dynamic line from the quasi-static catenary shape at the current
// fairlead position.
inline LineState line_init(const MooringLine& line, double depth, const Vec3& fairlead_world) {
    const LineProps& p = line.props;
    Vec3 d = fairlead_world - line.anchor;
    double xf = std::max(std::hypot(d.x(), d.y()), 1e-6);
    double zf = d.z();
    CatenaryResult c = catenary_solve(p, xf, zf);
    auto prof = catenary_profile(p, xf, zf, c, p.n_segments + 1);
    Vec3 uh(d.x() / xf, d.y() / xf, 0.0);
    LineState st;
    st.r.resize(prof.size());
    st.v.assign(prof.size(), Vec3::Zero());
    for (std::size_t i = 0; i < prof.size(); ++i)
        st.r[i] = line.anchor + uh * prof[i].x() + Vec3(0, 0, prof[i].z());
    st.r.back() = fairlead_world; // exact endpoint
    st.dt_max = detail::line_dt_bound(p);
    st.fairlead_tension = c.fairlead_tension();
    st.fairlead_force = -c.h * uh - Vec3(0, 0, c.v);
    return st;
}

namespace detail {

// One explicit midpoint (RK2) substep with prescribed fairlead endpoint motion.
inline void line_substep(const LineProps& p, double depth, LineState& st, const Vec3& fl_pos0,
                         const Vec3& fl_vel, double dt, double drag_mult, double extra_c) {
    std::size_t nn = st.r.size();
    static thread_local std::vector<Vec3> a0, r1, v1, a1;
    a0.assign(nn, Vec3::Zero());
    a1.assign(nn, Vec3::Zero());
    r1 = st.r;
    v1 = st.v;
    st.r.back() = fl_pos0;
    st.v.back() = fl_vel;
    line_accels(p, depth, st.r, st.v, a0, drag_mult, extra_c);
    for (std::size_t i = 1; i + 1 < nn; ++i) {
        r1[i] = st.r[i] + 0.5 * dt * st.v[i];
        v1[i] = st.v[i] + 0.5 * dt * a0[i];
    }
    r1.back() = fl_pos0 + 0.5 * dt * fl_vel;
    v1.back() = fl_vel;
    line_accels(p, depth, r1, v1, a1, drag_mult, extra_c);
    for (std::size_t i = 1; i + 1 < nn; ++i) {
        st.r[i] += dt * v1[i];
        st.v[i] += dt * a1[i];
    }
    st.r.back() = fl_pos0 + dt * fl_vel;
    st.v.back() = fl_vel;
}

// Direct Newton solve for the discrete static shape with both ends pinned: same
// force law as line_accels at rest (slack-clipped axial springs, submerged weight,
// seabed penalty). Slack spans leave the tangent stiffness only semidefinite, so
// the solve is Tikhonov-regularized and damped by backtracking on the residual.
inline bool line_static_newton(const LineProps& p, double depth, std::vector<Vec3>& r,
                               double ftol) {
    int n = static_cast<int>(r.size()) - 1; // segments; nodes 0 and n are pinned
    int m = n - 1;
    if (m < 1) return true;
    double l0 = p.seg_len();
    double wL = p.w_sub() * l0;
    std::vector<Vec3> tens(n);
    std::vector<Mat3> kseg(n);
    auto residual = [&](const std::vector<Vec3>& rr, VecX* F, MatX* K) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            tens[i].setZero();
            if (K) kseg[i].setZero();
            Vec3 d = rr[i + 1] - rr[i];
            double len = d.norm();
            if (len < 1e-9) continue;
            Vec3 u = d / len;
            double strain = (len - l0) / l0;
            if (strain <= 0.0) continue;
            double t = p.ea * strain;
            tens[i] = t * u;
            if (K)
                kseg[i] = p.ea / l0 * (u * u.transpose()) +
                          t / len * (Mat3::Identity() - u * u.transpose());
        }
        for (int i = 1; i < n; ++i) {
            Vec3 f = tens[i] - tens[i - 1];
            f.z() -= wL;
            double pen = -depth - rr[i].z();
            double kb = pen > 0.0 ? p.seabed_k * l0 : 0.0;
            if (pen > 0.0) f.z() += p.seabed_k * l0 * pen;
            worst = std::max(worst, f.norm());
            int a = 3 * (i - 1);
            if (F) F->segment<3>(a) = f;
            if (K) {
                K->block<3, 3>(a, a) = kseg[i] + kseg[i - 1];
                (*K)(a + 2, a + 2) += kb;
                if (i + 1 < n) K->block<3, 3>(a, a + 3) = -kseg[i];
                if (i >= 2) K->block<3, 3>(a, a - 3) = -kseg[i - 1];
            }
        }
        return worst;
    };
    VecX F = VecX::Zero(3 * m);
    MatX K = MatX::Zero(3 * m, 3 * m);
    std::vector<Vec3> trial = r;
    double res = residual(r, &F, &K);
    for (int it = 0; it < 60 && res >= ftol; ++it) {
        MatX Kreg = K;
        Kreg.diagonal().array() += 1e-9 * K.diagonal().maxCoeff() + 1e-6;
        Eigen::LDLT<MatX> ld(Kreg);
        if (ld.info() != Eigen::Success) return false;
        VecX step = ld.solve(F);
        bool accepted = false;
        for (double alpha = 1.0; alpha > 1.0 / 128.0; alpha *= 0.5) {
            for (int i = 1; i < n; ++i) trial[i] = r[i] + alpha * step.segment<3>(3 * (i - 1));
            if (residual(trial, nullptr, nullptr) < res) {
                std::swap(r, trial);
                K.setZero();
                res = residual(r, &F, &K);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    return res < ftol;
}

inline void line_report_fairlead(const LineProps& p, LineState& st) {
    std::size_t nn = st.r.size();
    Vec3 d = st.r[nn - 1] - st.r[nn - 2];
    double len = d.norm();
    double l0 = p.seg_len();
    double t = 0.0;
    if (len > 1e-9) {
        double strain = (len - l0) / l0;
        double rate = (st.v[nn - 1] - st.v[nn - 2]).dot(d / len);
        double c_int = p.zeta_internal * 2.0 * std::sqrt(p.ea * p.mass_air);
        t = std::max(p.ea * std::max(strain, 0.0) + (strain > 0 ? c_int * rate : 0.0), 0.0);
    }
    Vec3 u = len > 1e-9 ? Vec3(d / len) : Vec3(0, 0, 1);
    st.fairlead_force = -t * u + Vec3(0, 0, -p.w_sub() * l0 / 2.0); // plus end half-node weight
    st.fairlead_tension = t;
}

} // namespace detail

// Advances a line across one platform step [0, dt] with the fairlead moving linearly
// from fl0 to fl1; substepping keeps the explicit integrator inside its CFL bound.
// On return LineState carries the fairlead force for the next platform step.
inline void line_step(const MooringLine& line, double depth, LineState& st, const Vec3& fl0,
                      const Vec3& fl1, double dt) {
    int nsub = std::max(1, static_cast<int>(std::ceil(dt / st.dt_max)));
    double h = dt / nsub;
    Vec3 vel = (fl1 - fl0) / dt;
    for (int k = 0; k < nsub; ++k) {
        Vec3 p0 = fl0 + vel * (h * k);
        detail::line_substep(line.props, depth, st, p0, vel, h, 1.0, 0.0);
    }
    detail::line_report_fairlead(line.props, st);
    for (const auto& r : st.r)
        if (!r.allFinite()) fail(errc::simulation, "mooring line diverged (non-finite node)");
}

// Settles a line to its discrete static shape with the fairlead pinned and the
// velocities damped to rest. A Newton polish from the catenary-seeded shape does
// the work in the common case; if that stalls (e.g. after a large fairlead jump),
// dynamic relaxation with kinetic damping — zero the velocities whenever the
// kinetic energy peaks — brings the shape close enough to retry.
inline bool line_relax(const MooringLine& line, double depth, LineState& st, const Vec3& fairlead,
                       double t_max = 400.0, double vtol = 1e-5) {
    const LineProps& p = line.props;
    st.r.back() = fairlead;
    auto settled = [&]() {
        for (auto& v : st.v) v.setZero();
        detail::line_report_fairlead(p, st);
        return true;
    };
    if (detail::line_static_newton(p, depth, st.r, 1e-4)) return settled();
    double h = st.dt_max;
    int steps = static_cast<int>(t_max / h);
    double ke_prev = 0.0;
    int last_try = 0;
    for (int k = 0; k < steps; ++k) {
        detail::line_substep(p, depth, st, fairlead, Vec3::Zero(), h, 20.0, 0.0);
        double ke = 0.0;
        for (const auto& v : st.v) ke += v.squaredNorm();
        if (ke < ke_prev) {
            for (auto& v : st.v) v.setZero();
            ke = 0.0;
            if (k - last_try > 100) {
                last_try = k;
                if (detail::line_static_newton(p, depth, st.r, 1e-4)) return settled();
            }
        }
        ke_prev = ke;
        if (k % 200 == 199) {
            double vmax = 0.0;
            for (const auto& v : st.v) vmax = std::max(vmax, v.norm());
            if (vmax < vtol && detail::line_static_newton(p, depth, st.r, 1e-4)) return settled();
        }
    }
    detail::line_report_fairlead(p, st);
    return false;
}

// ---------------------------------------------------------------------------
// System-level helpers
// ---------------------------------------------------------------------------

// Linearized fairlead world position for a small-rotation platform pose.
inline Vec3 fairlead_world(const Vec3& fairlead_body, const Vec6& pose) {
    Vec3 th(pose[3], pose[4], pose[5]);
    return pose.head<3>() + fairlead_body + th.cross(fairlead_body);
}

inline Vec3 fairlead_world_vel(const Vec3& fairlead_body, const Vec6& vel) {
    Vec3 om(vel[3], vel[4], vel[5]);
    return vel.head<3>() + om.cross(fairlead_body);
}

// Quasi-static mooring load (forces and moments about the platform reference).
inline Vec6 quasistatic_mooring_force(const std::vector<MooringLine>& lines, double depth,
                                      const Vec6& pose) {
    Vec6 out = Vec6::Zero();
    for (const auto& ln : lines) {
        Vec3 pf = fairlead_world(ln.fairlead_body, pose);
        if (pf.z() < -depth + 1.0)
            fail(errc::numeric, "mooring: fairlead at or below the seabed");
        Vec3 f = catenary_fairlead_force(ln.props, ln.anchor, pf);
        Vec3 arm = pf - pose.head<3>();
        out.head<3>() += f;
        out.tail<3>() += arm.cross(f);
    }
    return out;
}

// Finite-difference quasi-static stiffness about a pose (6x6).
inline Mat6 quasistatic_mooring_stiffness(const std::vector<MooringLine>& lines, double depth,
                                          const Vec6& pose, double dq = 0.05) {
    Mat6 K;
    for (int k = 0; k < 6; ++k) {
        Vec6 dp = Vec6::Zero();
        dp[k] = (k < 3) ? dq : dq / 50.0;
        Vec6 fp = quasistatic_mooring_force(lines, depth, pose + dp);
        Vec6 fm = quasistatic_mooring_force(lines, depth, pose - dp);
        K.col(k) = -(fp - fm) / (2.0 * dp[k]);
    }
    return K;
}

} // namespace hywave
