#include "srb/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srb/errors.hpp"

namespace srb {

namespace {

constexpr double kZeroTol = 1e-9;      // endpoint matching of fixed points
constexpr double kDriftTol = 1e-9;     // strict/weak drift sign threshold
constexpr double kVarianceGate = 1e-8; // minimum variance floor for exclusion rules
constexpr double kDriftGridLo = 1e-6;

bool at_zero(double x) { return std::abs(x) <= kZeroTol; }
bool at_one(double x) { return std::abs(x - 1.0) <= kZeroTol; }

}  // namespace

int VertexGraph::out_degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += e.first == v;
    return d;
}

int VertexGraph::in_degree(int v) const {
    int d = 0;
    for (const auto& e : edges) d += e.second == v;
    return d;
}

std::vector<IntervalVertex> build_vertices(const IFSystem& ifs) {
    std::vector<IntervalVertex> out;
    for (int s = 0; s < ifs.size(); ++s) {
        const auto& fps = ifs.map(s).fixed_points();
        if (fps.degenerate) {
            throw ValidationError("degenerate fixed set: map " + std::to_string(s) +
                                  " cannot be classified");
        }
        for (std::size_t i = 0; i + 1 < fps.points.size(); ++i) {
            const int sign = fps.gap_signs[i];
            if (sign == 0) {
                throw ConsistencyError("unresolved sign of tau(r)-r between fixed points of map " +
                                       std::to_string(s));
            }
            out.push_back({s, fps.points[i].location, fps.points[i + 1].location,
                           sign > 0 ? Orientation::Up : Orientation::Down});
        }
    }
    return out;
}

VertexGraph build_graph(const std::vector<IntervalVertex>& vertices, GraphKind kind) {
    VertexGraph g;
    g.kind = kind;
    g.vertices = vertices;
    const int n = static_cast<int>(vertices.size());
    for (int a = 0; a < n; ++a) {
        const auto& src = vertices[static_cast<std::size_t>(a)];
        // only vertices lying on the driving side of the diagonal emit edges
        if (kind == GraphKind::Down && src.orientation != Orientation::Down) continue;
        if (kind == GraphKind::Up && src.orientation != Orientation::Up) continue;
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const auto& dst = vertices[static_cast<std::size_t>(b)];
            if (dst.map_index == src.map_index) continue;
            const double probe = kind == GraphKind::Down ? dst.hi : dst.lo;
            if (probe > src.lo + kZeroTol && probe < src.hi - kZeroTol) {
                g.edges.emplace_back(a, b);
            }
        }
    }
    return g;
}

std::vector<double> bs_candidate_endpoints(const IFSystem& ifs) {
    std::vector<double> out;
    for (const auto& m : ifs.maps()) {
        if (m.fixed_points().degenerate) {
            throw ValidationError("degenerate fixed set: BS enumeration refused");
        }
        for (const auto& p : m.fixed_points().points) out.push_back(p.location);
    }
    std::sort(out.begin(), out.end());
    std::vector<double> dedup;
    for (double x : out) {
        if (dedup.empty() || x - dedup.back() > kZeroTol) dedup.push_back(x);
    }
    return dedup;
}

std::vector<BSInterval> enumerate_bs(const IFSystem& ifs,
                                     const std::vector<double>& candidate_endpoints) {
    struct EndpointTest {
        bool ok_left = true;   // tau_s(a) >= a for all s, equality for some
        bool ok_right = true;  // tau_s(b) <= b for all s, equality for some
        std::vector<int> witnesses;
    };
    std::vector<EndpointTest> tests(candidate_endpoints.size());
    for (std::size_t i = 0; i < candidate_endpoints.size(); ++i) {
        const double a = candidate_endpoints[i];
        bool some_eq = false;
        for (int s = 0; s < ifs.size(); ++s) {
            const double img = ifs.map(s)(a);
            if (std::abs(img - a) <= kZeroTol) {
                some_eq = true;
                tests[i].witnesses.push_back(s);
            } else if (img < a) {
                tests[i].ok_left = false;
            } else {
                tests[i].ok_right = false;
            }
        }
        tests[i].ok_left = tests[i].ok_left && some_eq;
        tests[i].ok_right = tests[i].ok_right && some_eq;
    }

    std::vector<BSInterval> out;
    for (std::size_t i = 0; i < candidate_endpoints.size(); ++i) {
        if (!tests[i].ok_left) continue;
        for (std::size_t j = i + 1; j < candidate_endpoints.size(); ++j) {
            if (!tests[j].ok_right) continue;
            out.push_back({candidate_endpoints[i], candidate_endpoints[j], tests[i].witnesses,
                           tests[j].witnesses});
        }
    }
    return out;
}

std::vector<double> common_fixed_points(const IFSystem& ifs, double tol) {
    std::vector<double> out;
    for (const auto& p : ifs.map(0).fixed_points().points) {
        bool common = true;
        for (int s = 1; common && s < ifs.size(); ++s) {
            common = ifs.map(s).fixed_points().contains(p.location, tol);
        }
        if (common) out.push_back(p.location);
    }
    return out;
}

DriftProfile drift_profile(const IFSystem& ifs, int grid) {
    if (grid < 2) throw ValidationError("drift_profile: grid must have at least 2 points");
    const auto probs = ifs.probabilities();
    const int L = ifs.size();

    DriftProfile profile;
    profile.inf = std::numeric_limits<double>::infinity();
    profile.sup = -std::numeric_limits<double>::infinity();
    profile.variance_floor = std::numeric_limits<double>::infinity();

    // evaluation set: the uniform grid plus every map's interior fixed
    // points. At a fixed point of map s the exponent of that map is 1, which
    // pins the sign of phi there; skipping those points can misread the
    // extrema between grid nodes.
    std::vector<double> eval_points;
    eval_points.reserve(static_cast<std::size_t>(grid) + 8);
    for (int i = 0; i < grid; ++i) {
        eval_points.push_back(kDriftGridLo +
                              (1.0 - 2.0 * kDriftGridLo) * static_cast<double>(i) / (grid - 1));
    }
    for (const auto& map : ifs.maps()) {
        for (const auto& p : map.fixed_points().points) {
            if (p.location > kDriftGridLo && p.location < 1.0 - kDriftGridLo) {
                eval_points.push_back(p.location);
            }
        }
    }

    profile.r.reserve(eval_points.size());
    profile.phi.reserve(eval_points.size());
    for (const double r : eval_points) {
        double phi = 0.0;
        double second = 0.0;
        for (int s = 0; s < L; ++s) {
            const double b = beta(ifs.map(s), r);
            if (!(b > 0.0)) throw ValidationError("drift_profile: nonpositive exponent value");
            const double lb = std::log(b);
            phi += probs[static_cast<std::size_t>(s)] * lb;
            second += probs[static_cast<std::size_t>(s)] * lb * lb;
        }
        profile.r.push_back(r);
        profile.phi.push_back(phi);
        profile.inf = std::min(profile.inf, phi);
        profile.sup = std::max(profile.sup, phi);
        profile.variance_floor = std::min(profile.variance_floor, second - phi * phi);
    }

    profile.phi_at_zero = 0.0;
    profile.phi_at_one = 0.0;
    for (int s = 0; s < L; ++s) {
        profile.phi_at_zero +=
            probs[static_cast<std::size_t>(s)] * std::log(beta_limit_at_zero(ifs.map(s)));
        profile.phi_at_one +=
            probs[static_cast<std::size_t>(s)] * std::log(beta_limit_at_one(ifs.map(s)));
    }

    profile.map_bounds.reserve(static_cast<std::size_t>(L));
    profile.coarse_upper = 0.0;
    profile.coarse_lower = 0.0;
    for (int s = 0; s < L; ++s) {
        const auto bounds = beta_bounds(ifs.map(s), 0.0, 1.0, 2001);
        profile.map_bounds.push_back(bounds);
        profile.coarse_upper += probs[static_cast<std::size_t>(s)] * std::log(bounds.upper);
        profile.coarse_lower += probs[static_cast<std::size_t>(s)] * std::log(bounds.lower);
    }
    return profile;
}

namespace {

struct Verdicts {
    std::vector<CandidateVerdict>& candidates;

    void apply(std::size_t idx, MeasureStatus status, const std::string& rule) {
        auto& c = candidates[idx];
        if (c.status == MeasureStatus::Unknown) {
            c.status = status;
            c.rule = rule;
            return;
        }
        const bool clash = (c.status == MeasureStatus::Srb && status == MeasureStatus::NotSrb) ||
                           (c.status == MeasureStatus::NotSrb && status == MeasureStatus::Srb);
        if (clash) {
            std::ostringstream os;
            os << "conflicting classification rules for candidate at " << c.location << ": "
               << c.rule << " vs " << rule;
            throw ConsistencyError(os.str());
        }
        // same status from a later rule: keep the first firing rule
    }

    void basin(std::size_t idx, double lo, double hi) {
        candidates[idx].has_basin = true;
        candidates[idx].basin_lo = lo;
        candidates[idx].basin_hi = hi;
    }
};

}  // namespace

ClassificationReport classify(const IFSystem& ifs, int drift_grid) {
    if (ifs.degenerate()) {
        throw ValidationError("degenerate fixed set: classification refused");
    }
    if (!ifs.fixes_endpoints()) {
        throw ValidationError("classification requires all maps to fix both endpoints");
    }

    ClassificationReport report;
    report.vertices = build_vertices(ifs);
    report.g_down = build_graph(report.vertices, GraphKind::Down);
    report.g_up = build_graph(report.vertices, GraphKind::Up);
    report.bs_intervals = enumerate_bs(ifs, bs_candidate_endpoints(ifs));
    report.bs_bound = report.bs_intervals.size();
    report.drift = drift_profile(ifs, drift_grid);

    // candidate list: the endpoint masses plus every interior common fixed point
    report.candidates.push_back({true, 0.0, MeasureStatus::Unknown, "", false, 0, 0, ""});
    report.candidates.push_back({true, 1.0, MeasureStatus::Unknown, "", false, 0, 0, ""});
    const std::size_t kDelta0 = 0;
    const std::size_t kDelta1 = 1;
    std::vector<std::size_t> interior;  // candidate index per interior common fixed point
    for (double x : common_fixed_points(ifs)) {
        if (at_zero(x) || at_one(x)) continue;
        interior.push_back(report.candidates.size());
        report.candidates.push_back({true, x, MeasureStatus::Unknown, "", false, 0, 0, ""});
    }

    Verdicts v{report.candidates};
    const auto& drift = report.drift;

    // (i) strict drift sign: a unique attracting endpoint
    if (drift.sup < -kDriftTol) {
        v.apply(kDelta1, MeasureStatus::Srb, "negative-drift");
        v.basin(kDelta1, 0.0, 1.0);
        report.candidates[kDelta1].note = "unique; basin (0,1]";
        v.apply(kDelta0, MeasureStatus::NotSrb, "negative-drift");
        for (std::size_t idx : interior) v.apply(idx, MeasureStatus::NotSrb, "negative-drift");
    } else if (drift.inf > kDriftTol) {
        v.apply(kDelta0, MeasureStatus::Srb, "positive-drift");
        v.basin(kDelta0, 0.0, 1.0);
        report.candidates[kDelta0].note = "unique; basin [0,1)";
        v.apply(kDelta1, MeasureStatus::NotSrb, "positive-drift");
        for (std::size_t idx : interior) v.apply(idx, MeasureStatus::NotSrb, "positive-drift");
    }

    // (ii) weak drift sign plus a variance floor excludes an endpoint
    if (drift.variance_floor > kVarianceGate) {
        if (drift.sup <= kDriftTol) {
            v.apply(kDelta0, MeasureStatus::NotSrb, "nonpositive-drift-with-variance");
        }
        if (drift.inf >= -kDriftTol) {
            v.apply(kDelta1, MeasureStatus::NotSrb, "nonnegative-drift-with-variance");
        }
    }

    // (iii) graph rules
    // first/last vertex of each map (intervals adjacent to the endpoints)
    std::vector<const IntervalVertex*> first_vertex(static_cast<std::size_t>(ifs.size()), nullptr);
    std::vector<const IntervalVertex*> last_vertex(static_cast<std::size_t>(ifs.size()), nullptr);
    for (const auto& vert : report.vertices) {
        if (at_zero(vert.lo)) first_vertex[static_cast<std::size_t>(vert.map_index)] = &vert;
        if (at_one(vert.hi)) last_vertex[static_cast<std::size_t>(vert.map_index)] = &vert;
    }

    bool all_down_at_zero = true, all_up_at_zero = true;
    bool all_up_at_one = true, all_down_at_one = true;
    double min_first_hi = 1.0, max_last_lo = 0.0;
    bool first_his_equal = true, last_los_equal = true;
    for (int s = 0; s < ifs.size(); ++s) {
        const auto* f = first_vertex[static_cast<std::size_t>(s)];
        const auto* l = last_vertex[static_cast<std::size_t>(s)];
        if (f == nullptr || l == nullptr) {
            throw ConsistencyError("missing endpoint-adjacent interval for map " + std::to_string(s));
        }
        all_down_at_zero = all_down_at_zero && f->orientation == Orientation::Down;
        all_up_at_zero = all_up_at_zero && f->orientation == Orientation::Up;
        all_up_at_one = all_up_at_one && l->orientation == Orientation::Up;
        all_down_at_one = all_down_at_one && l->orientation == Orientation::Down;
        min_first_hi = std::min(min_first_hi, f->hi);
        max_last_lo = std::max(max_last_lo, l->lo);
        first_his_equal = first_his_equal &&
                          std::abs(f->hi - first_vertex[0]->hi) <= kZeroTol;
        last_los_equal = last_los_equal && std::abs(l->lo - last_vertex[0]->lo) <= kZeroTol;
    }

    // rule 1: every map descends on an interval starting at 0
    if (all_down_at_zero) {
        v.apply(kDelta0, MeasureStatus::Srb, "all-maps-descending-at-zero");
        v.basin(kDelta0, 0.0, min_first_hi);
    }
    // rule 2: every map ascends on an interval ending at 1
    if (all_up_at_one) {
        v.apply(kDelta1, MeasureStatus::Srb, "all-maps-ascending-at-one");
        v.basin(kDelta1, max_last_lo, 1.0);
    }

    // rules 3/4: an unreachable interval pins an invariant measure away from
    // an endpoint
    const auto& gd = report.g_down;
    const auto& gu = report.g_up;
    for (int i = 0; i < static_cast<int>(gd.vertices.size()); ++i) {
        const auto& vert = gd.vertices[static_cast<std::size_t>(i)];
        if (!at_one(vert.hi) && gd.is_source(i)) {
            CandidateVerdict c;
            c.point_mass = false;
            c.status = MeasureStatus::ExistsInvariantSeparated;
            c.rule = "down-graph-source";
            std::ostringstream os;
            os << "invariant measure supported in [" << vert.hi << ", 1]; separated from 0";
            c.note = os.str();
            report.candidates.push_back(std::move(c));
            break;
        }
    }
    for (int i = 0; i < static_cast<int>(gu.vertices.size()); ++i) {
        const auto& vert = gu.vertices[static_cast<std::size_t>(i)];
        if (!at_zero(vert.lo) && gu.is_source(i)) {
            CandidateVerdict c;
            c.point_mass = false;
            c.status = MeasureStatus::ExistsInvariantSeparated;
            c.rule = "up-graph-source";
            std::ostringstream os;
            os << "invariant measure supported in [0, " << vert.lo << "]; separated from 1";
            c.note = os.str();
            report.candidates.push_back(std::move(c));
            break;
        }
    }

    // rule 5: an ascending interval at 0 with an upward escape route, shielded
    // by an unreachable descending interval, keeps orbits away from 0
    {
        bool fires = false;
        for (int a = 0; !fires && a < static_cast<int>(gu.vertices.size()); ++a) {
            const auto& va = gu.vertices[static_cast<std::size_t>(a)];
            if (!(va.orientation == Orientation::Up && at_zero(va.lo))) continue;
            if (gu.out_degree(a) < 1) continue;
            for (int b = 0; !fires && b < static_cast<int>(gd.vertices.size()); ++b) {
                const auto& vb = gd.vertices[static_cast<std::size_t>(b)];
                if (!at_zero(vb.lo) || vb.hi >= va.hi - kZeroTol) continue;
                if (gd.is_source(b)) fires = true;
            }
        }
        if (fires) v.apply(kDelta0, MeasureStatus::NotSrb, "upward-escape-from-zero");
    }
    // rule 6: mirror image at 1
    {
        bool fires = false;
        for (int a = 0; !fires && a < static_cast<int>(gd.vertices.size()); ++a) {
            const auto& va = gd.vertices[static_cast<std::size_t>(a)];
            if (!(va.orientation == Orientation::Down && at_one(va.hi))) continue;
            if (gd.out_degree(a) < 1) continue;
            for (int b = 0; !fires && b < static_cast<int>(gu.vertices.size()); ++b) {
                const auto& vb = gu.vertices[static_cast<std::size_t>(b)];
                if (!at_one(vb.hi) || vb.lo <= va.lo + kZeroTol) continue;
                if (gu.is_source(b)) fires = true;
            }
        }
        if (fires) v.apply(kDelta1, MeasureStatus::NotSrb, "downward-escape-from-one");
    }

    // rule 7: every map ascends from 0 to one common level a
    if (all_up_at_zero && first_his_equal && !at_one(min_first_hi)) {
        const double a = first_vertex[0]->hi;
        for (std::size_t idx : interior) {
            if (std::abs(report.candidates[idx].location - a) <= kZeroTol) {
                v.apply(idx, MeasureStatus::Srb, "common-ascent-level");
                v.basin(idx, 0.0, a);
                report.candidates[idx].note = "basin (0, a]";
            }
        }
        v.apply(kDelta0, MeasureStatus::NotSrb, "common-ascent-level");
    }
    // rule 8: every map descends from 1 to one common level b
    if (all_down_at_one && last_los_equal && !at_zero(max_last_lo)) {
        const double b = last_vertex[0]->lo;
        for (std::size_t idx : interior) {
            if (std::abs(report.candidates[idx].location - b) <= kZeroTol) {
                v.apply(idx, MeasureStatus::Srb, "common-descent-level");
                v.basin(idx, b, 1.0);
                report.candidates[idx].note = "basin [b, 1)";
            }
        }
        v.apply(kDelta1, MeasureStatus::NotSrb, "common-descent-level");
    }

    // (iv) the cardinality bound must cover every measure claimed present
    std::size_t claimed = 0;
    for (const auto& c : report.candidates) {
        claimed += c.point_mass && c.status == MeasureStatus::Srb;
    }
    if (claimed > report.bs_bound) {
        std::ostringstream os;
        os << "claimed " << claimed << " point measures but the interval bound is "
           << report.bs_bound;
        throw ConsistencyError(os.str());
    }
    return report;
}

}  // namespace srb
