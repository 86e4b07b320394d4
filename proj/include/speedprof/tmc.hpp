#pragma once

// TMC ingest: map a route onto the minimum covering sequence of TMC sections,
// then pull the matching records out of an archive of history files.

#include <algorithm>
#include <filesystem>
#include <future>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "speedprof/error.hpp"
#include "speedprof/route.hpp"
#include "speedprof/text_io.hpp"
#include "speedprof/time.hpp"

namespace speedprof {

inline constexpr double kDefaultCorridorM = 30.0;
inline constexpr double kDefaultTmcPeriodS = 60.0;

struct TmcSection {
    std::string code;
    std::vector<GeoPoint> geometry;
    double start_arc_m = 0.0; ///< filled by map_route_to_tmc
    double end_arc_m = 0.0;
};

struct TmcObservation {
    std::string code;
    Timestamp timestamp = 0;
    double current_speed_mps = 0.0;
    double freeflow_speed_mps = 1.0;
};

/// Observations grouped by section code; each group strictly increasing in time.
class TmcHistory {
public:
    using Group = std::vector<TmcObservation>;

    TmcHistory() = default;

    /// Builds from unsorted records; duplicates on (code, timestamp) keep the
    /// record that appears last in `records`.
    static TmcHistory from_records(std::vector<TmcObservation> records, double sample_period_s = 0.0) {
        TmcHistory h;
        for (auto& r : records) h.groups_[r.code].push_back(std::move(r));
        for (auto& [code, g] : h.groups_) {
            std::stable_sort(g.begin(), g.end(),
                             [](const TmcObservation& a, const TmcObservation& b) { return a.timestamp < b.timestamp; });
            Group dedup;
            dedup.reserve(g.size());
            for (auto& o : g) {
                if (!dedup.empty() && dedup.back().timestamp == o.timestamp) dedup.back() = std::move(o);
                else dedup.push_back(std::move(o));
            }
            g = std::move(dedup);
        }
        h.period_ = sample_period_s > 0.0 ? sample_period_s : h.infer_period();
        return h;
    }

    std::span<const TmcObservation> observations(const std::string& code) const {
        const auto it = groups_.find(code);
        if (it == groups_.end()) return {};
        return it->second;
    }

    bool contains(const std::string& code) const { return groups_.count(code) != 0 && !groups_.at(code).empty(); }
    const std::map<std::string, Group>& groups() const noexcept { return groups_; }
    bool empty() const noexcept { return groups_.empty(); }
    std::size_t record_count() const noexcept {
        std::size_t n = 0;
        for (const auto& [c, g] : groups_) n += g.size();
        return n;
    }
    /// Nominal seconds between samples: median positive spacing, or 60 s when unknown.
    double sample_period_s() const noexcept { return period_; }

    friend bool operator==(const TmcHistory& a, const TmcHistory& b) {
        if (a.period_ != b.period_ || a.groups_.size() != b.groups_.size()) return false;
        for (auto ia = a.groups_.begin(), ib = b.groups_.begin(); ia != a.groups_.end(); ++ia, ++ib) {
            if (ia->first != ib->first || ia->second.size() != ib->second.size()) return false;
            for (std::size_t i = 0; i < ia->second.size(); ++i) {
                const auto& x = ia->second[i];
                const auto& y = ib->second[i];
                if (x.timestamp != y.timestamp || x.current_speed_mps != y.current_speed_mps ||
                    x.freeflow_speed_mps != y.freeflow_speed_mps)
                    return false;
            }
        }
        return true;
    }

private:
    double infer_period() const {
        std::vector<Timestamp> deltas;
        for (const auto& [c, g] : groups_)
            for (std::size_t i = 1; i < g.size(); ++i) deltas.push_back(g[i].timestamp - g[i - 1].timestamp);
        if (deltas.empty()) return kDefaultTmcPeriodS;
        auto mid = deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2);
        std::nth_element(deltas.begin(), mid, deltas.end());
        return static_cast<double>(*mid);
    }

    std::map<std::string, Group> groups_;
    double period_ = kDefaultTmcPeriodS;
};

/// Zero-order hold lookup: speed of the latest observation at or before t,
/// or of the earliest observation when t precedes them all.
inline double sample_tmc(const TmcHistory& history, const std::string& code, Timestamp t) {
    const auto obs = history.observations(code);
    if (obs.empty()) throw NoData(code);
    const auto it = std::upper_bound(obs.begin(), obs.end(), t,
                                     [](Timestamp v, const TmcObservation& o) { return v < o.timestamp; });
    if (it == obs.begin()) return obs.front().current_speed_mps;
    return std::prev(it)->current_speed_mps;
}

// ---------------------------------------------------------------------------
// Route to TMC mapping

struct TmcMapping {
    std::vector<std::string> codes;        ///< minimum covering sequence, ordered by arc position
    std::vector<TmcSection> sections;      ///< the chosen sections with their arc span on the route
    std::vector<std::string> point_codes;  ///< covering code of every standard point
};

namespace detail {

inline double distance_to_polyline(Vec2 p, const std::vector<Vec2>& line) {
    if (line.size() == 1) return norm(p - line[0]);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        const Vec2 d = line[i + 1] - line[i];
        const double len2 = dot(d, d);
        const double t = len2 > 0.0 ? std::clamp(dot(p - line[i], d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, norm(p - (line[i] + t * d)));
    }
    return best;
}

/// coverage[s][i]: standard point i lies within `corridor_m` of section s.
inline std::vector<std::vector<bool>> section_coverage(const Route& route, std::span<const TmcSection> sections,
                                                       double corridor_m) {
    std::vector<Vec2> sp_plane;
    sp_plane.reserve(route.size());
    for (const auto& sp : route.standard_points()) sp_plane.push_back(route.frame().to_plane(sp.position));

    std::vector<std::vector<bool>> cov(sections.size(), std::vector<bool>(route.size(), false));
    for (std::size_t s = 0; s < sections.size(); ++s) {
        if (sections[s].geometry.empty()) continue;
        std::vector<Vec2> geom;
        geom.reserve(sections[s].geometry.size());
        for (const auto& g : sections[s].geometry) geom.push_back(route.frame().to_plane(g));
        for (std::size_t i = 0; i < sp_plane.size(); ++i) cov[s][i] = distance_to_polyline(sp_plane[i], geom) <= corridor_m;
    }
    return cov;
}

} // namespace detail

namespace detail {

/// Contiguous run of standard points [lo, hi] inside one section's corridor.
struct CoverRun {
    std::size_t section, lo, hi;
};

/// Exact minimum cover by iterative deepening over the sections covering the
/// first uncovered point, tried in farthest-reach order. Returns the chosen
/// section indices or an empty vector when no cover of size < limit exists.
class ExactCover {
public:
    ExactCover(const std::vector<std::vector<bool>>& cov, const std::vector<CoverRun>& runs,
               const std::vector<std::string>& codes)
        : cov_(cov), runs_(runs), codes_(codes), n_(cov.empty() ? 0 : cov.front().size()) {}

    std::vector<std::size_t> solve(std::size_t limit) {
        for (std::size_t depth = 1; depth < limit; ++depth) {
            std::vector<int> count(n_, 0);
            chosen_.clear();
            if (search(depth, count)) return chosen_;
        }
        return {};
    }

private:
    bool search(std::size_t budget, std::vector<int>& count) {
        std::size_t p = 0;
        while (p < n_ && count[p] > 0) ++p;
        if (p == n_) return true;
        if (budget == 0) return false;
        std::vector<const CoverRun*> options;
        for (const auto& r : runs_)
            if (r.lo <= p && p <= r.hi) options.push_back(&r);
        std::sort(options.begin(), options.end(), [&](const CoverRun* a, const CoverRun* b) {
            if (a->hi != b->hi) return a->hi > b->hi;
            if (a->lo != b->lo) return a->lo < b->lo;
            return codes_[a->section] < codes_[b->section];
        });
        for (const auto* r : options) {
            const std::size_t s = r->section;
            if (std::find(chosen_.begin(), chosen_.end(), s) != chosen_.end()) continue;
            chosen_.push_back(s);
            for (std::size_t i = 0; i < n_; ++i) count[i] += cov_[s][i];
            if (search(budget - 1, count)) return true;
            for (std::size_t i = 0; i < n_; ++i) count[i] -= cov_[s][i];
            chosen_.pop_back();
        }
        return false;
    }

    const std::vector<std::vector<bool>>& cov_;
    const std::vector<CoverRun>& runs_;
    const std::vector<std::string>& codes_;
    std::size_t n_;
    std::vector<std::size_t> chosen_;
};

} // namespace detail

/// Minimum-cardinality set of sections covering every standard point. When
/// each section covers one contiguous run of points the greedy farthest-reach
/// interval cover is optimal and is used directly; otherwise an exact search
/// bounded by the greedy result runs. Points covered by several chosen
/// sections go to the one whose run through the point reaches farthest.
inline TmcMapping map_route_to_tmc(const Route& route, std::span<const TmcSection> sections,
                                   double corridor_m = kDefaultCorridorM) {
    {
        std::vector<std::string> seen;
        for (const auto& s : sections) seen.push_back(s.code);
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw ConfigError("duplicate TMC code in section table", "tmc.duplicate_code");
    }
    const auto cov = detail::section_coverage(route, sections, corridor_m);
    const std::size_t n = route.size();

    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (const auto& c : cov) any = any || c[i];
        if (!any) throw UncoveredPoint(i);
    }

    std::vector<std::string> codes;
    for (const auto& s : sections) codes.push_back(s.code);
    std::vector<detail::CoverRun> runs;
    bool contiguous = true;
    for (std::size_t s = 0; s < cov.size(); ++s) {
        std::size_t i = 0, count = 0;
        while (i < n) {
            if (!cov[s][i]) {
                ++i;
                continue;
            }
            const std::size_t lo = i;
            while (i < n && cov[s][i]) ++i;
            runs.push_back({s, lo, i - 1});
            ++count;
        }
        contiguous = contiguous && count <= 1;
    }

    // greedy farthest reach
    std::vector<std::size_t> chosen;
    for (std::size_t p = 0; p < n;) {
        const detail::CoverRun* best = nullptr;
        for (const auto& r : runs) {
            if (r.lo > p || r.hi < p) continue;
            if (!best || r.hi > best->hi || (r.hi == best->hi && r.lo < best->lo) ||
                (r.hi == best->hi && r.lo == best->lo && codes[r.section] < codes[best->section]))
                best = &r;
        }
        if (std::find(chosen.begin(), chosen.end(), best->section) == chosen.end()) chosen.push_back(best->section);
        p = best->hi + 1;
    }
    if (!contiguous && chosen.size() > 1) {
        auto exact = detail::ExactCover(cov, runs, codes).solve(chosen.size());
        if (!exact.empty()) chosen = std::move(exact);
    }

    // each point goes to the chosen run through it reaching farthest, then smallest code
    TmcMapping out;
    out.point_codes.resize(n);
    std::vector<std::size_t> first_point(sections.size(), n);
    for (std::size_t i = 0; i < n; ++i) {
        const detail::CoverRun* best = nullptr;
        for (const auto& r : runs) {
            if (r.lo > i || r.hi < i || std::find(chosen.begin(), chosen.end(), r.section) == chosen.end()) continue;
            if (!best || r.hi > best->hi || (r.hi == best->hi && codes[r.section] < codes[best->section])) best = &r;
        }
        out.point_codes[i] = codes[best->section];
        first_point[best->section] = std::min(first_point[best->section], i);
    }
    std::stable_sort(chosen.begin(), chosen.end(),
                     [&](std::size_t a, std::size_t b) { return first_point[a] < first_point[b]; });
    for (const auto s : chosen) {
        TmcSection sec = sections[s];
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& g : sec.geometry) {
            const double a = route.project_point(g).arc_position_m;
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        sec.start_arc_m = lo;
        sec.end_arc_m = hi;
        out.codes.push_back(sec.code);
        out.sections.push_back(std::move(sec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Section table file: header `tmc_code,geometry`, geometry as `lat:lon;lat:lon;...`

inline std::vector<TmcSection> parse_section_table(std::string_view content, const std::string& name = "<sections>") {
    text::LineReader reader(content);
    std::string_view line;
    if (!reader.next_nonblank(line) || !text::header_matches(line, {"tmc_code", "geometry"}))
        throw ParseError(name, reader.line_no(), std::string(line), "bad section table header");
    std::vector<TmcSection> out;
    while (reader.next_nonblank(line)) {
        const auto comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError(name, reader.line_no(), std::string(line), "expected tmc_code,geometry");
        TmcSection sec;
        sec.code = std::string(text::trim(line.substr(0, comma)));
        if (sec.code.empty()) throw ParseError(name, reader.line_no(), std::string(line), "empty tmc_code");
        for (auto v : text::split(line.substr(comma + 1), ';')) {
            if (v.empty()) continue;
            const auto colon = v.find(':');
            GeoPoint g;
            if (colon == std::string_view::npos || !text::parse_double(text::trim(v.substr(0, colon)), g.lat) ||
                !text::parse_double(text::trim(v.substr(colon + 1)), g.lon) || !g.valid())
                throw ParseError(name, reader.line_no(), std::string(line), "bad geometry vertex");
            sec.geometry.push_back(g);
        }
        if (sec.geometry.empty()) throw ParseError(name, reader.line_no(), std::string(line), "section without geometry");
        out.push_back(std::move(sec));
    }
    return out;
}

inline std::vector<TmcSection> read_section_table(const std::filesystem::path& path) {
    return parse_section_table(text::read_file(path), path.string());
}

inline std::string format_section_table(std::span<const TmcSection> sections) {
    std::string out = "tmc_code,geometry\n";
    for (const auto& s : sections) {
        out += s.code;
        out += ',';
        for (std::size_t i = 0; i < s.geometry.size(); ++i) {
            if (i) out += ';';
            out += fmt::format("{}:{}", s.geometry[i].lat, s.geometry[i].lon);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// History files: header `tmc_code,timestamp_utc_s,current_speed_mps,freeflow_speed_mps`

inline const std::vector<std::string_view>& history_file_header() {
    static const std::vector<std::string_view> h{"tmc_code", "timestamp_utc_s", "current_speed_mps",
                                                 "freeflow_speed_mps"};
    return h;
}

/// Parses one history file, appending records whose code is in `wanted`
/// (all records when `wanted` is empty).
inline void parse_history_file(std::string_view content, const std::string& name,
                               std::span<const std::string> wanted, std::vector<TmcObservation>& out) {
    text::LineReader reader(content);
    std::string_view line;
    if (!reader.next_nonblank(line)) return; // empty file: no records
    if (!text::header_matches(line, history_file_header()))
        throw ParseError(name, reader.line_no(), std::string(line), "bad history header");
    std::vector<std::string_view> f;
    while (reader.next_nonblank(line)) {
        text::split(line, ',', f);
        TmcObservation o;
        if (f.size() != 4 || f[0].empty() || !text::parse_int(f[1], o.timestamp) ||
            !text::parse_double(f[2], o.current_speed_mps) || !text::parse_double(f[3], o.freeflow_speed_mps))
            throw ParseError(name, reader.line_no(), std::string(line), "malformed history record");
        if (!(o.current_speed_mps >= 0.0) || !(o.freeflow_speed_mps > 0.0))
            throw ParseError(name, reader.line_no(), std::string(line), "speed out of range");
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), f[0]) == wanted.end()) continue;
        o.code = std::string(f[0]);
        out.push_back(std::move(o));
    }
}

struct ExtractResult {
    TmcHistory history;
    std::vector<std::string> missing_codes; ///< requested codes without any record (warning, not error)
};

/// Extracts every record for `codes` from the archive. Files are parsed
/// independently (in parallel when cores allow) and merged in the given order,
/// so on duplicate (code, timestamp) the record from the later file wins.
inline ExtractResult extract_tmc_history(std::span<const std::string> codes,
                                         std::span<const std::filesystem::path> archive) {
    std::vector<std::string> wanted(codes.begin(), codes.end());
    const auto parse_one = [&wanted](const std::filesystem::path& p) {
        std::vector<TmcObservation> recs;
        const std::string content = text::read_file(p);
        parse_history_file(content, p.string(), wanted, recs);
        return recs;
    };

    std::vector<std::vector<TmcObservation>> per_file(archive.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (hw > 1 && archive.size() > 1) {
        std::vector<std::future<std::vector<TmcObservation>>> jobs;
        jobs.reserve(archive.size());
        for (const auto& p : archive) jobs.push_back(std::async(std::launch::async, parse_one, std::cref(p)));
        for (std::size_t i = 0; i < jobs.size(); ++i) per_file[i] = jobs[i].get();
    } else {
        for (std::size_t i = 0; i < archive.size(); ++i) per_file[i] = parse_one(archive[i]);
    }

    std::vector<TmcObservation> all;
    for (auto& v : per_file) std::move(v.begin(), v.end(), std::back_inserter(all));

    ExtractResult res{TmcHistory::from_records(std::move(all)), {}};
    for (const auto& c : codes) {
        if (!res.history.contains(c) &&
            std::find(res.missing_codes.begin(), res.missing_codes.end(), c) == res.missing_codes.end())
            res.missing_codes.push_back(c);
    }
    return res;
}

/// Regular files of an archive directory in lexicographic order.
inline std::vector<std::filesystem::path> list_archive(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw MissingInput(dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

inline std::string format_history(const TmcHistory& history) {
    std::string out = "tmc_code,timestamp_utc_s,current_speed_mps,freeflow_speed_mps\n";
    for (const auto& [code, g] : history.groups())
        for (const auto& o : g)
            out += fmt::format("{},{},{},{}\n", code, o.timestamp, o.current_speed_mps, o.freeflow_speed_mps);
    return out;
}

inline std::string format_observations(std::span<const TmcObservation> obs) {
    std::string out = "tmc_code,timestamp_utc_s,current_speed_mps,freeflow_speed_mps\n";
    for (const auto& o : obs)
        out += fmt::format("{},{},{},{}\n", o.code, o.timestamp, o.current_speed_mps, o.freeflow_speed_mps);
    return out;
}

} // namespace speedprof
