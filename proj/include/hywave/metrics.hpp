#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hywave/errors.hpp"
#include "hywave/resource.hpp"

namespace hywave {

// Generator rating and the loss chain applied downstream of it. The efficiency
// converts mechanical to electrical with the cap on the electrical side;
// availability and transmission derate annual energy, not instantaneous power.
struct DeviceRating {
    double rated_power = 0.0;  // W electrical
    double efficiency = 0.8;   // mechanical -> electrical
    double availability = 0.95;
    double transmission = 0.98;
};

inline void validate_rating(const DeviceRating& r, const std::string& name) {
    if (r.rated_power <= 0.0) fail(errc::validation, name + ": rated power must be positive");
    auto frac = [&](double v, const char* what) {
        if (v <= 0.0 || v > 1.0) fail(errc::validation, name + ": " + what + " outside (0,1]");
    };
    frac(r.efficiency, "efficiency");
    frac(r.availability, "availability");
    frac(r.transmission, "transmission");
}

inline DeviceRating rating_from_json(const nlohmann::json& j, const std::string& name) {
    DeviceRating r;
    try {
        r.rated_power = j.at("rated_power").get<double>();
        r.efficiency = j.value("efficiency", 0.8);
        r.availability = j.value("availability", 0.95);
        r.transmission = j.value("transmission", 0.98);
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    validate_rating(r, name);
    return r;
}

inline double electrical_power(double mech_w, const DeviceRating& r) {
    if (mech_w < 0.0) fail(errc::validation, "electrical_power: mechanical power must be >= 0");
    return std::min(r.efficiency * mech_w, r.rated_power);
}

// Mean electrical power per (Hm0, Te) cell, axes aligned with the source JPD.
// Cells without a simulation (empty JPD cells) stay at zero power and are flagged.
struct PowerMatrix {
    BinAxis h_axis, t_axis;
    std::vector<std::vector<double>> power;   // W
    std::vector<std::vector<bool>> simulated; // false = empty cell, no run

    void init(const Jpd& jpd) {
        h_axis = jpd.h_axis;
        t_axis = jpd.t_axis;
        power.assign(h_axis.count, std::vector<double>(t_axis.count, 0.0));
        simulated.assign(h_axis.count, std::vector<bool>(t_axis.count, false));
    }
};

inline void require_aligned(const PowerMatrix& m, const Jpd& jpd) {
    if (m.h_axis.count != jpd.h_axis.count || m.t_axis.count != jpd.t_axis.count ||
        m.h_axis.origin != jpd.h_axis.origin || m.h_axis.width != jpd.h_axis.width ||
        m.t_axis.origin != jpd.t_axis.origin || m.t_axis.width != jpd.t_axis.width)
        fail(errc::validation, "power matrix axes do not match the JPD");
}

struct AepResult {
    double gross_mwh = 0.0; // production while on line
    double net_mwh = 0.0;   // after availability and transmission
};

// gross = sum of cell power x occurrence-hours; net applies the rating's loss chain.
inline AepResult aep(const PowerMatrix& m, const Jpd& jpd, const DeviceRating& r) {
    require_aligned(m, jpd);
    validate_rating(r, "aep rating");
    double wh = 0.0;
    for (std::size_t i = 0; i < m.h_axis.count; ++i)
        for (std::size_t k = 0; k < m.t_axis.count; ++k) {
            double p = m.power[i][k];
            if (p < -1e-9 || p > r.rated_power * (1.0 + 1e-9))
                fail(errc::validation, "aep: cell power outside [0, rated]");
            wh += p * jpd.hours(i, k);
        }
    AepResult out;
    out.gross_mwh = wh / 1e6;
    out.net_mwh = out.gross_mwh * r.availability * r.transmission;
    return out;
}

inline double gross_from_net(double net_mwh, const DeviceRating& r) {
    return net_mwh / (r.availability * r.transmission);
}

// CF = gross AEP over rated-power-times-8760 (gross-output convention: the paper's
// published AEP/CF pairs back-solve to CF taken before availability/transmission).
inline double capacity_factor(double gross_aep_mwh, double rated_w) {
    if (rated_w <= 0.0) fail(errc::config, "capacity_factor: rated power must be positive");
    return gross_aep_mwh / (rated_w / 1e6 * 8760.0);
}

// Occurrence-weighted population statistics of per-cell power over occupied cells.
struct Variability {
    double mean = 0.0; // W
    double stdev = 0.0;
    double cv = 0.0;   // stdev / mean
};

inline Variability p_cv(const PowerMatrix& m, const Jpd& jpd) {
    require_aligned(m, jpd);
    double wsum = 0.0, mu = 0.0;
    for (std::size_t i = 0; i < m.h_axis.count; ++i)
        for (std::size_t k = 0; k < m.t_axis.count; ++k)
            if (jpd.counts[i][k] > 0) {
                double w = jpd.occurrence(i, k);
                wsum += w;
                mu += w * m.power[i][k];
            }
    if (wsum <= 0.0) fail(errc::validation, "p_cv: no occupied cells");
    mu /= wsum;
    if (mu <= 0.0) fail(errc::validation, "p_cv: zero mean power, metric undefined");
    double var = 0.0;
    for (std::size_t i = 0; i < m.h_axis.count; ++i)
        for (std::size_t k = 0; k < m.t_axis.count; ++k)
            if (jpd.counts[i][k] > 0) {
                double d = m.power[i][k] - mu;
                var += jpd.occurrence(i, k) * d * d;
            }
    var /= wsum;
    Variability out;
    out.mean = mu;
    out.stdev = std::sqrt(var);
    out.cv = out.stdev / mu;
    return out;
}

// Time-series variant over one run (population convention).
inline Variability p_cv_series(const std::vector<double>& power) {
    if (power.empty()) fail(errc::validation, "p_cv_series: empty series");
    Variability out;
    out.mean = mean(power);
    if (out.mean <= 0.0) fail(errc::validation, "p_cv_series: zero mean power, metric undefined");
    out.stdev = std::sqrt(variance(power));
    out.cv = out.stdev / out.mean;
    return out;
}

// Cost model with named share breakdowns. Costs carry a currency-year tag; an
// inflation index table (year -> index) rebases them when supplied.
struct CostModel {
    double capex = 0.0; // $, farm total
    double opex = 0.0;  // $/yr
    double fcr = 0.11;
    int year = 2025;    // currency basis of capex/opex as given
    std::map<std::string, double> capex_shares;
    std::map<std::string, double> opex_shares;
};

inline void validate_shares(const std::map<std::string, double>& shares, const std::string& what) {
    if (shares.empty()) return;
    double s = 0.0;
    for (const auto& [k, v] : shares) {
        if (v < 0.0 || v > 1.0) fail(errc::validation, what + ": share '" + k + "' outside [0,1]");
        s += v;
    }
    if (std::abs(s - 1.0) > 1e-6) fail(errc::validation, what + ": shares sum to " + std::to_string(s));
}

inline CostModel cost_from_json(const nlohmann::json& j, const std::string& name) {
    CostModel c;
    try {
        c.capex = j.at("capex").get<double>();
        c.opex = j.at("opex").get<double>();
        c.fcr = j.value("fcr", 0.11);
        c.year = j.value("year", 2025);
        if (j.contains("capex_shares"))
            c.capex_shares = j.at("capex_shares").get<std::map<std::string, double>>();
        if (j.contains("opex_shares"))
            c.opex_shares = j.at("opex_shares").get<std::map<std::string, double>>();
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, name + ": " + e.what());
    }
    if (c.capex <= 0.0 || c.opex < 0.0) fail(errc::validation, name + ": capex/opex out of range");
    if (c.fcr <= 0.0 || c.fcr >= 1.0) fail(errc::validation, name + ": fcr outside (0, 1)");
    validate_shares(c.capex_shares, name + " capex_shares");
    validate_shares(c.opex_shares, name + " opex_shares");
    return c;
}

// Rebase capex/opex to basis_year using a cumulative index table (e.g. CPI levels).
inline CostModel adjust_currency(const CostModel& c, const std::map<int, double>& index,
                                 int basis_year) {
    if (index.empty() || c.year == basis_year) return c;
    auto from = index.find(c.year);
    auto to = index.find(basis_year);
    if (from == index.end() || to == index.end())
        fail(errc::config, "adjust_currency: missing index entry for year");
    CostModel out = c;
    double f = to->second / from->second;
    out.capex *= f;
    out.opex *= f;
    out.year = basis_year;
    return out;
}

inline double lcoe(double capex, double opex_per_year, double fcr, double net_aep_mwh) {
    if (net_aep_mwh <= 0.0) fail(errc::config, "lcoe: AEP must be positive");
    if (fcr <= 0.0 || fcr >= 1.0) fail(errc::config, "lcoe: FCR outside (0, 1)");
    return (capex * fcr + opex_per_year) / net_aep_mwh;
}

// Fixed-charge-rate levelized cost, $/MWh, farm totals over farm net AEP.
inline double lcoe(const CostModel& cost, double net_aep_farm_mwh) {
    return lcoe(cost.capex, cost.opex, cost.fcr, net_aep_farm_mwh);
}

// Removal fractions per named share when a device piggybacks on shared infrastructure
// (e.g. the WEC drops its own mooring and export cable and half its installation).
struct AllocationRules {
    std::map<std::string, double> wec_capex_removal; // share name -> fraction removed [0,1]
    std::map<std::string, double> wec_opex_removal;
    std::map<std::string, double> fwt_capex_removal; // usually empty
    std::map<std::string, double> fwt_opex_removal;
};

namespace detail {
inline double apply_removal(double total, const std::map<std::string, double>& shares,
                            const std::map<std::string, double>& removal,
                            const std::string& what) {
    double removed = 0.0;
    for (const auto& [item, frac] : removal) {
        if (frac < 0.0 || frac > 1.0) fail(errc::config, what + ": removal fraction outside [0,1]");
        auto it = shares.find(item);
        if (it == shares.end())
            fail(errc::config, what + ": removal names unknown share '" + item + "'");
        removed += it->second * frac;
    }
    return total * (1.0 - removed);
}
} // namespace detail

struct HybridCosts {
    CostModel wec, fwt;
};

inline HybridCosts hybrid_cost_allocation(const CostModel& wec, const CostModel& fwt,
                                          const AllocationRules& rules) {
    validate_shares(wec.capex_shares, "wec capex_shares");
    validate_shares(fwt.capex_shares, "fwt capex_shares");
    HybridCosts out{wec, fwt};
    out.wec.capex = detail::apply_removal(wec.capex, wec.capex_shares, rules.wec_capex_removal,
                                          "wec capex");
    out.wec.opex = detail::apply_removal(wec.opex, wec.opex_shares, rules.wec_opex_removal,
                                         "wec opex");
    out.fwt.capex = detail::apply_removal(fwt.capex, fwt.capex_shares, rules.fwt_capex_removal,
                                          "fwt capex");
    out.fwt.opex = detail::apply_removal(fwt.opex, fwt.opex_shares, rules.fwt_opex_removal,
                                         "fwt opex");
    return out;
}

// Ecology-style synergy labels from the signed relative changes of a lower-is-better
// metric (LCOE, P_CV) for the two co-located devices, with a relative dead band for
// "unchanged".
enum class Synergy { mutualism, commensalism, parasitism, no_synergy };

inline const char* to_string(Synergy s) {
    switch (s) {
    case Synergy::mutualism: return "Mutualism";
    case Synergy::commensalism: return "Commensalism";
    case Synergy::parasitism: return "Parasitism";
    case Synergy::no_synergy: return "NoSynergy";
    }
    return "?";
}

struct SynergyVerdict {
    std::string metric;
    Synergy kind = Synergy::no_synergy;
    double delta_a = 0.0; // relative change, negative = improvement
    double delta_b = 0.0;
    double tol = 1e-3;
};

inline SynergyVerdict classify_synergy(double standalone_a, double hybrid_a, double standalone_b,
                                       double hybrid_b, double tol = 1e-3,
                                       const std::string& metric = "lcoe") {
    if (standalone_a <= 0.0 || standalone_b <= 0.0)
        fail(errc::config, "classify_synergy: standalone metric values must be positive");
    SynergyVerdict v;
    v.metric = metric;
    v.tol = tol;
    v.delta_a = (hybrid_a - standalone_a) / standalone_a;
    v.delta_b = (hybrid_b - standalone_b) / standalone_b;
    auto cls = [tol](double d) { return d < -tol ? -1 : (d > tol ? 1 : 0); };
    int ca = cls(v.delta_a), cb = cls(v.delta_b);
    if (ca < 0 && cb < 0) v.kind = Synergy::mutualism;
    else if ((ca < 0 && cb == 0) || (cb < 0 && ca == 0)) v.kind = Synergy::commensalism;
    else if ((ca < 0 && cb > 0) || (cb < 0 && ca > 0)) v.kind = Synergy::parasitism;
    else v.kind = Synergy::no_synergy;
    return v;
}

} // namespace hywave
