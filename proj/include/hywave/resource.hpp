#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hywave/csv.hpp"
#include "hywave/errors.hpp"
#include "hywave/math.hpp"

namespace hywave {

// One valid met-buoy standard meteorological record (hourly unless stated otherwise).
struct BuoyRecord {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0;
    double wind_dir = 0.0;   // deg, meteorological (direction wind comes from)
    double wind_speed = 0.0; // m/s at anemometer height
    double hm0 = 0.0;        // significant wave height, m
    double te = 0.0;         // energy period proxy (average-period column), s
};

struct BuoyDataset {
    std::vector<BuoyRecord> records; // valid rows only
    std::size_t rows_dropped = 0;    // rows removed due to sentinel/malformed fields
};

namespace detail {
inline bool is_sentinel(double v) { return v >= 98.995; } // 99.0/99.00/999 style missing markers
} // namespace detail

// Parses an NDBC-style stdmet text file:
//   #YY MM DD hh mm WDIR WSPD GST WVHT DPD APD MWD ...
// Rows with missing wind speed, wave height, or average period are dropped (99.0/999
// sentinels). Wind direction 999 is tolerated only by dropping the row: the wind rose
// needs it. Column order is fixed per the stdmet convention; extra columns are ignored.
inline BuoyDataset load_buoy_records(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(errc::missing_artifact, "cannot open buoy file " + path);
    BuoyDataset ds;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_fields(line, ' ');
        if (fields.size() < 11) {
            ++ds.rows_dropped;
            continue;
        }
        const std::string ctx = path + ":" + std::to_string(lineno);
        BuoyRecord r;
        r.year = static_cast<int>(parse_double(fields[0], ctx));
        if (r.year < 100) r.year += (r.year >= 70 ? 1900 : 2000); // two-digit-year files
        r.month = static_cast<int>(parse_double(fields[1], ctx));
        r.day = static_cast<int>(parse_double(fields[2], ctx));
        r.hour = static_cast<int>(parse_double(fields[3], ctx));
        r.minute = static_cast<int>(parse_double(fields[4], ctx));
        r.wind_dir = parse_double(fields[5], ctx);
        r.wind_speed = parse_double(fields[6], ctx);
        r.hm0 = parse_double(fields[8], ctx);
        r.te = parse_double(fields[10], ctx); // APD column
        if (r.wind_dir >= 998.5 || detail::is_sentinel(r.wind_speed) ||
            detail::is_sentinel(r.hm0) || detail::is_sentinel(r.te) || r.hm0 < 0.0 ||
            r.te <= 0.0) {
            ++ds.rows_dropped;
            continue;
        }
        ds.records.push_back(r);
    }
    if (ds.records.empty()) fail(errc::schema, "no valid records in " + path);
    return ds;
}

// Half-open uniform binning [lo, lo+w), [lo+w, lo+2w), ...
struct BinAxis {
    double origin = 0.0;
    double width = 0.0;
    std::size_t count = 0;

    std::size_t index_of(double v) const {
        double k = std::floor((v - origin) / width);
        if (k < 0.0 || k >= static_cast<double>(count))
            fail(errc::validation, "value outside bin axis");
        return static_cast<std::size_t>(k);
    }
    double lo(std::size_t i) const { return origin + width * static_cast<double>(i); }
    double center(std::size_t i) const { return origin + width * (static_cast<double>(i) + 0.5); }
};

inline BinAxis make_axis_covering(double origin, double width, double vmax) {
    if (width <= 0.0) fail(errc::config, "bin width must be positive");
    BinAxis ax{origin, width, 0};
    ax.count = static_cast<std::size_t>(std::floor((vmax - origin) / width)) + 1;
    return ax;
}

// Joint probability distribution of (Hm0, Te). hours = counts * record_hours;
// occurrence = counts / total valid records.
struct Jpd {
    BinAxis h_axis; // Hm0 bins, m
    BinAxis t_axis; // Te bins, s
    double record_hours = 1.0;
    std::vector<std::vector<std::size_t>> counts;  // [ih][it]
    std::vector<std::vector<double>> mean_wind;    // per-cell mean wind speed, m/s
    std::size_t total = 0;

    double occurrence(std::size_t ih, std::size_t it) const {
        return static_cast<double>(counts[ih][it]) / static_cast<double>(total);
    }
    double hours(std::size_t ih, std::size_t it) const {
        return static_cast<double>(counts[ih][it]) * record_hours;
    }
    // Most-occupied cell; ties resolve to the lower (ih, it).
    std::pair<std::size_t, std::size_t> modal_cell() const {
        std::size_t bi = 0, bj = 0, best = 0;
        for (std::size_t i = 0; i < counts.size(); ++i)
            for (std::size_t j = 0; j < counts[i].size(); ++j)
                if (counts[i][j] > best) {
                    best = counts[i][j];
                    bi = i;
                    bj = j;
                }
        return {bi, bj};
    }
};

struct JpdBins {
    double h_origin = 0.0, h_width = 0.5; // m
    double t_origin = 0.0, t_width = 1.0; // s
};

inline Jpd build_jpd(const std::vector<BuoyRecord>& records, const JpdBins& bins = {},
                     double record_hours = 1.0) {
    if (records.empty()) fail(errc::validation, "build_jpd: no records");
    double hmax = 0.0, tmax = 0.0;
    for (const auto& r : records) {
        hmax = std::max(hmax, r.hm0);
        tmax = std::max(tmax, r.te);
    }
    Jpd j;
    j.h_axis = make_axis_covering(bins.h_origin, bins.h_width, hmax);
    j.t_axis = make_axis_covering(bins.t_origin, bins.t_width, tmax);
    j.record_hours = record_hours;
    j.counts.assign(j.h_axis.count, std::vector<std::size_t>(j.t_axis.count, 0));
    j.mean_wind.assign(j.h_axis.count, std::vector<double>(j.t_axis.count, 0.0));
    for (const auto& r : records) {
        std::size_t ih = j.h_axis.index_of(r.hm0);
        std::size_t it = j.t_axis.index_of(r.te);
        j.counts[ih][it] += 1;
        j.mean_wind[ih][it] += r.wind_speed;
    }
    j.total = records.size();
    for (std::size_t i = 0; i < j.h_axis.count; ++i)
        for (std::size_t k = 0; k < j.t_axis.count; ++k)
            if (j.counts[i][k] > 0) j.mean_wind[i][k] /= static_cast<double>(j.counts[i][k]);
    return j;
}

// Wind rose: speed bands x direction sectors. Sectors are centered on their nominal
// heading (sector 0 spans [-w/2, w/2) around north).
struct WindRose {
    std::vector<double> speed_edges; // ascending band edges, m/s; last band is open-ended
    std::size_t sectors = 0;
    std::vector<std::vector<std::size_t>> counts; // [band][sector]
    std::size_t total = 0;

    std::size_t dominant_band() const {
        std::size_t best = 0, bi = 0;
        for (std::size_t b = 0; b < counts.size(); ++b) {
            std::size_t s = 0;
            for (std::size_t k = 0; k < counts[b].size(); ++k) s += counts[b][k];
            if (s > best) {
                best = s;
                bi = b;
            }
        }
        return bi;
    }
};

inline WindRose build_wind_rose(const std::vector<BuoyRecord>& records,
                                std::vector<double> speed_edges = {0, 5, 10, 15, 20, 25},
                                std::size_t sectors = 12) {
    if (records.empty()) fail(errc::validation, "build_wind_rose: no records");
    if (speed_edges.size() < 2 || sectors == 0)
        fail(errc::config, "wind rose needs >= 1 speed band and >= 1 sector");
    for (std::size_t i = 1; i < speed_edges.size(); ++i)
        if (speed_edges[i] <= speed_edges[i - 1])
            fail(errc::config, "wind rose speed edges must ascend");
    WindRose rose;
    rose.speed_edges = speed_edges;
    rose.sectors = sectors;
    rose.counts.assign(speed_edges.size() - 1, std::vector<std::size_t>(sectors, 0));
    double sector_width = 360.0 / static_cast<double>(sectors);
    for (const auto& r : records) {
        std::size_t band = rose.counts.size() - 1;
        for (std::size_t b = 0; b + 1 < speed_edges.size(); ++b)
            if (r.wind_speed >= speed_edges[b] &&
                (r.wind_speed < speed_edges[b + 1] || b + 2 == speed_edges.size())) {
                band = b;
                break;
            }
        double d = std::fmod(r.wind_dir + sector_width / 2.0, 360.0);
        if (d < 0.0) d += 360.0;
        std::size_t sec = std::min(static_cast<std::size_t>(d / sector_width), sectors - 1);
        rose.counts[band][sec] += 1;
        ++rose.total;
    }
    return rose;
}

// Site resource bundle consumed by the power-matrix / report stages.
struct CombinedResource {
    std::string site;
    Jpd jpd;
    WindRose rose;
    double site_mean_wind = 0.0; // m/s at anemometer height
    std::size_t records_valid = 0;
    std::size_t records_dropped = 0;
};

inline CombinedResource build_combined(const BuoyDataset& ds, const std::string& site,
                                       const JpdBins& bins = {}, double record_hours = 1.0) {
    CombinedResource cr;
    cr.site = site;
    cr.jpd = build_jpd(ds.records, bins, record_hours);
    cr.rose = build_wind_rose(ds.records);
    double s = 0.0;
    for (const auto& r : ds.records) s += r.wind_speed;
    cr.site_mean_wind = s / static_cast<double>(ds.records.size());
    cr.records_valid = ds.records.size();
    cr.records_dropped = ds.rows_dropped;
    return cr;
}

inline nlohmann::json resource_to_json(const CombinedResource& cr) {
    nlohmann::json j;
    j["site"] = cr.site;
    j["records_valid"] = cr.records_valid;
    j["records_dropped"] = cr.records_dropped;
    j["site_mean_wind"] = cr.site_mean_wind;
    j["jpd"]["h_origin"] = cr.jpd.h_axis.origin;
    j["jpd"]["h_width"] = cr.jpd.h_axis.width;
    j["jpd"]["t_origin"] = cr.jpd.t_axis.origin;
    j["jpd"]["t_width"] = cr.jpd.t_axis.width;
    j["jpd"]["record_hours"] = cr.jpd.record_hours;
    j["jpd"]["total_records"] = cr.jpd.total;
    j["jpd"]["counts"] = cr.jpd.counts;
    j["jpd"]["mean_wind"] = cr.jpd.mean_wind;
    j["wind_rose"]["speed_edges"] = cr.rose.speed_edges;
    j["wind_rose"]["sectors"] = cr.rose.sectors;
    j["wind_rose"]["counts"] = cr.rose.counts;
    return j;
}

inline CombinedResource resource_from_json(const nlohmann::json& j) {
    CombinedResource cr;
    try {
        cr.site = j.at("site").get<std::string>();
        cr.records_valid = j.at("records_valid").get<std::size_t>();
        cr.records_dropped = j.at("records_dropped").get<std::size_t>();
        cr.site_mean_wind = j.at("site_mean_wind").get<double>();
        const auto& jj = j.at("jpd");
        cr.jpd.h_axis.origin = jj.at("h_origin").get<double>();
        cr.jpd.h_axis.width = jj.at("h_width").get<double>();
        cr.jpd.t_axis.origin = jj.at("t_origin").get<double>();
        cr.jpd.t_axis.width = jj.at("t_width").get<double>();
        cr.jpd.record_hours = jj.at("record_hours").get<double>();
        cr.jpd.total = jj.at("total_records").get<std::size_t>();
        cr.jpd.counts = jj.at("counts").get<std::vector<std::vector<std::size_t>>>();
        cr.jpd.mean_wind = jj.at("mean_wind").get<std::vector<std::vector<double>>>();
        cr.jpd.h_axis.count = cr.jpd.counts.size();
        cr.jpd.t_axis.count = cr.jpd.counts.empty() ? 0 : cr.jpd.counts[0].size();
        const auto& jr = j.at("wind_rose");
        cr.rose.speed_edges = jr.at("speed_edges").get<std::vector<double>>();
        cr.rose.sectors = jr.at("sectors").get<std::size_t>();
        cr.rose.counts = jr.at("counts").get<std::vector<std::vector<std::size_t>>>();
        cr.rose.total = 0;
        for (const auto& band : cr.rose.counts)
            for (auto c : band) cr.rose.total += c;
    } catch (const nlohmann::json::exception& e) {
        fail(errc::schema, std::string("resource artifact: ") + e.what());
    }
    // Cross-checks: occurrence must close and the axes must match the count grid.
    std::size_t n = 0;
    for (const auto& row : cr.jpd.counts)
        for (auto c : row) n += c;
    if (n != cr.jpd.total) fail(errc::validation, "resource artifact: JPD counts do not sum to total");
    return cr;
}

// Occurrence-hours table in CSV form (rows = Hm0 bins, cols = Te bins), for spreadsheets.
inline std::string jpd_to_csv(const Jpd& j) {
    std::ostringstream out;
    out << "hm0_center";
    for (std::size_t k = 0; k < j.t_axis.count; ++k) out << "," << j.t_axis.center(k);
    out << "\n";
    for (std::size_t i = 0; i < j.h_axis.count; ++i) {
        out << j.h_axis.center(i);
        for (std::size_t k = 0; k < j.t_axis.count; ++k) out << "," << j.hours(i, k);
        out << "\n";
    }
    return out.str();
}

} // namespace hywave
