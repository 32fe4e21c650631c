#include "srb/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace srb {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash_hex(std::string_view canonical_config) {
    std::ostringstream os;
    os << std::hex << fnv1a64(canonical_config);
    return os.str();
}

std::string format_double(double value) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, end);
}

const char* measure_status_name(MeasureStatus status) {
    switch (status) {
        case MeasureStatus::Srb: return "srb";
        case MeasureStatus::NotSrb: return "not_srb";
        case MeasureStatus::ExistsInvariantSeparated: return "exists_invariant_separated";
        case MeasureStatus::Unknown: return "unknown";
    }
    return "unknown";
}

nlohmann::json to_json(const FixedPointSet& fps) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : fps.points) {
        points.push_back({{"location", p.location}, {"tangential", p.tangential}});
    }
    return {{"points", points}, {"gap_signs", fps.gap_signs}, {"degenerate", fps.degenerate}};
}

nlohmann::json to_json(const BetaBounds& bounds) {
    return {{"lower", bounds.lower}, {"upper", bounds.upper}, {"kind", "empirical"}};
}

nlohmann::json to_json(const IntervalVertex& vertex) {
    return {{"map", vertex.map_index},
            {"lo", vertex.lo},
            {"hi", vertex.hi},
            {"orientation", vertex.orientation == Orientation::Up ? "up" : "down"}};
}

nlohmann::json to_json(const VertexGraph& graph) {
    nlohmann::json vertices = nlohmann::json::array();
    for (const auto& v : graph.vertices) vertices.push_back(to_json(v));
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : graph.edges) edges.push_back({e.first, e.second});
    return {{"kind", graph.kind == GraphKind::Down ? "down" : "up"},
            {"vertices", vertices},
            {"edges", edges}};
}

nlohmann::json to_json(const BSInterval& interval) {
    return {{"lo", interval.lo},
            {"hi", interval.hi},
            {"lo_witnesses", interval.lo_witnesses},
            {"hi_witnesses", interval.hi_witnesses},
            {"openness", "unspecified"}};
}

nlohmann::json to_json(const DriftProfile& drift) {
    nlohmann::json bounds = nlohmann::json::array();
    for (const auto& b : drift.map_bounds) bounds.push_back(to_json(b));
    return {{"inf", drift.inf},
            {"sup", drift.sup},
            {"phi_at_zero", drift.phi_at_zero},
            {"phi_at_one", drift.phi_at_one},
            {"grid_points", drift.r.size()},
            {"map_bounds", bounds},
            {"coarse", {{"upper", drift.coarse_upper}, {"lower", drift.coarse_lower}}}};
}

namespace {

std::string candidate_name(const CandidateVerdict& c) {
    if (!c.point_mass) return "interior_supported";
    if (c.location == 0.0) return "delta_0";
    if (c.location == 1.0) return "delta_1";
    return "delta_at_" + format_double(c.location);
}

std::string basin_hint(const CandidateVerdict& c) {
    if (!c.has_basin) return "";
    std::ostringstream os;
    os << "<" << format_double(c.basin_lo) << ", " << format_double(c.basin_hi)
       << "> (endpoint openness unspecified)";
    return os.str();
}

}  // namespace

nlohmann::json to_json(const ClassificationReport& report) {
    nlohmann::json candidates = nlohmann::json::array();
    for (const auto& c : report.candidates) {
        nlohmann::json jc = {{"measure", candidate_name(c)},
                             {"status", measure_status_name(c.status)},
                             {"rule", c.rule}};
        if (c.point_mass) jc["location"] = c.location;
        if (c.has_basin) {
            jc["basin_hint"] = basin_hint(c);
            jc["basin"] = {{"lo", c.basin_lo}, {"hi", c.basin_hi}, {"openness", "unspecified"}};
        }
        if (!c.note.empty()) jc["note"] = c.note;
        candidates.push_back(std::move(jc));
    }
    nlohmann::json bs = nlohmann::json::array();
    for (const auto& b : report.bs_intervals) bs.push_back(to_json(b));
    return {{"bs_bound", report.bs_bound},
            {"bs_intervals", bs},
            {"candidates", candidates},
            {"graphs", {{"down", to_json(report.g_down)}, {"up", to_json(report.g_up)}}},
            {"drift", to_json(report.drift)},
            {"variance_floor", report.drift.variance_floor}};
}

nlohmann::json to_json(const BasinScan& scan) {
    nlohmann::json j = {{"target", scan.target},
                        {"threshold", scan.threshold},
                        {"hull_nonempty", scan.hull_nonempty}};
    if (scan.hull_nonempty) {
        j["hull"] = {{"lo", scan.hull_lo}, {"hi", scan.hull_hi}, {"openness", "unspecified"}};
    }
    return j;
}

nlohmann::json to_json(const LimitVerdict& verdict) {
    const char* kind = verdict.kind == LimitVerdict::Kind::ConvergesTo ? "converges_to"
                       : verdict.kind == LimitVerdict::Kind::Oscillating ? "oscillating"
                                                                         : "undecided";
    nlohmann::json j = {{"kind", kind},
                        {"tail_mean", verdict.tail_mean},
                        {"tail_range", verdict.tail_range}};
    if (verdict.kind == LimitVerdict::Kind::ConvergesTo) {
        j["limit"] = verdict.limit;
        j["occupation_fraction"] = verdict.occupation_fraction;
    }
    return j;
}

nlohmann::json to_json(const OutcomeGrade& grade) {
    return {{"grade", grade_name(grade.grade)},
            {"tail_min", grade.tail_min},
            {"tail_max", grade.tail_max}};
}

nlohmann::json to_json(const ArcsineSummary& summary) {
    return {{"paths", summary.samples.size() + summary.excluded},
            {"excluded", summary.excluded},
            {"ks_to_arcsine", summary.ks_to_arcsine}};
}

void write_orbit_csv(std::ostream& os, const Orbit& orbit) {
    os << "t,symbol,state\n";
    os << "0,-1," << format_double(orbit.states[0]) << "\n";
    for (std::size_t t = 0; t < orbit.symbols.size(); ++t) {
        os << (t + 1) << "," << orbit.symbols[t] << "," << format_double(orbit.states[t + 1])
           << "\n";
    }
}

void write_basin_csv(std::ostream& os, const BasinScan& scan) {
    os << "r0,freq_to_target,hull_member\n";
    for (const auto& p : scan.points) {
        os << format_double(p.r0) << "," << format_double(p.frequency) << ","
           << (p.in_hull ? 1 : 0) << "\n";
    }
}

void write_market_csv(std::ostream& os, const MarketPath& path) {
    const std::size_t investors = path.shares.empty() ? 0 : path.shares.front().size();
    os << "t,symbol";
    for (std::size_t i = 0; i < investors; ++i) os << ",r" << (i + 1);
    os << "\n";
    for (std::size_t t = 0; t < path.shares.size(); ++t) {
        os << t << "," << (t == 0 ? -1 : path.symbols[t - 1]);
        for (double share : path.shares[t]) os << "," << format_double(share);
        os << "\n";
    }
}

void write_arcsine_csv(std::ostream& os, const ArcsineSummary& summary, double n) {
    os << "path_id,n,L_n,pos_fraction\n";
    for (std::size_t i = 0; i < summary.samples.size(); ++i) {
        os << i << "," << format_double(n) << "," << format_double(summary.samples[i].l_n) << ","
           << format_double(summary.samples[i].pos_fraction) << "\n";
    }
}

void write_drift_csv(std::ostream& os, const DriftProfile& drift) {
    os << "r,phi\n";
    for (std::size_t i = 0; i < drift.r.size(); ++i) {
        os << format_double(drift.r[i]) << "," << format_double(drift.phi[i]) << "\n";
    }
}

void write_graph_edge_list(std::ostream& os, const VertexGraph& graph) {
    for (std::size_t i = 0; i < graph.vertices.size(); ++i) {
        const auto& v = graph.vertices[i];
        os << "# vertex " << i << ": map " << v.map_index << " ("
           << format_double(v.lo) << ", " << format_double(v.hi) << ") "
           << (v.orientation == Orientation::Up ? "up" : "down") << "\n";
    }
    for (const auto& e : graph.edges) os << e.first << " " << e.second << "\n";
}

}  // namespace srb
