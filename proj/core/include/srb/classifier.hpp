#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "srb/orbit_engine.hpp"

namespace srb {

enum class Orientation { Up, Down };  // Up: tau(r) > r on the interval

// An open interval between consecutive fixed points of one constituent map.
struct IntervalVertex {
    int map_index = 0;
    double lo = 0.0;
    double hi = 0.0;
    Orientation orientation = Orientation::Down;
};

enum class GraphKind { Down, Up };

struct VertexGraph {
    GraphKind kind = GraphKind::Down;
    std::vector<IntervalVertex> vertices;
    std::vector<std::pair<int, int>> edges;  // (source index, target index)

    int out_degree(int v) const;
    int in_degree(int v) const;
    bool is_source(int v) const { return in_degree(v) == 0; }
    bool is_sink(int v) const { return out_degree(v) == 0; }
};

// One vertex per consecutive fixed-point pair per map; orientation from the
// sign of tau(r) - r at the interval midpoint. Refuses degenerate maps.
std::vector<IntervalVertex> build_vertices(const IFSystem& ifs);

// Edges are purely combinatorial: in the Down graph a Down vertex points at
// every vertex of another map whose right endpoint lies strictly inside it;
// in the Up graph an Up vertex points at every vertex of another map whose
// left endpoint lies strictly inside it. Up vertices emit no Down-graph
// edges and Down vertices emit no Up-graph edges.
VertexGraph build_graph(const std::vector<IntervalVertex>& vertices, GraphKind kind);

// An interval whose left endpoint no map pulls down (with equality for at
// least one map) and whose right endpoint no map pushes up (ditto). The
// number of such intervals bounds the number of physical measures.
struct BSInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<int> lo_witnesses;  // maps fixing the left endpoint
    std::vector<int> hi_witnesses;  // maps fixing the right endpoint
};

// Sorted union of all constituent maps' fixed points - the only points where
// the BS endpoint equalities can hold.
std::vector<double> bs_candidate_endpoints(const IFSystem& ifs);

// All candidate pairs a < b passing both endpoint tests, nested pairs
// included. The literal count may exceed the attained measure count.
std::vector<BSInterval> enumerate_bs(const IFSystem& ifs,
                                     const std::vector<double>& candidate_endpoints);

// Interior points fixed by every constituent map (within tol).
std::vector<double> common_fixed_points(const IFSystem& ifs, double tol = 1e-9);

// The conditional drift phi(r) = sum_s p_s ln beta_s(r) tabulated on a grid
// over [1e-6, 1-1e-6] augmented with every map's interior fixed points, with
// the evaluation extrema, the per-map exponent bounds, the coarse sufficient
// bounds sum_s p_s ln B_s / sum_s p_s ln b_s, and the evaluation infimum of
// the conditional variance of ln beta.
struct DriftProfile {
    std::vector<double> r;
    std::vector<double> phi;
    double inf = 0.0;
    double sup = 0.0;
    double phi_at_zero = 0.0;  // endpoint limits, reported but not folded into inf/sup
    double phi_at_one = 0.0;
    std::vector<BetaBounds> map_bounds;  // per-map empirical exponent bounds on [0,1]
    double coarse_upper = 0.0;  // sum_s p_s ln(upper bound of beta_s)
    double coarse_lower = 0.0;  // sum_s p_s ln(lower bound of beta_s)
    double variance_floor = 0.0;
};

DriftProfile drift_profile(const IFSystem& ifs, int grid = 10000);

enum class MeasureStatus { Srb, NotSrb, ExistsInvariantSeparated, Unknown };

struct CandidateVerdict {
    bool point_mass = true;
    double location = 0.0;  // position of the point mass when point_mass
    MeasureStatus status = MeasureStatus::Unknown;
    std::string rule;  // identifier of the rule that fired; empty when Unknown
    bool has_basin = false;
    double basin_lo = 0.0;  // endpoint openness deliberately left unspecified
    double basin_hi = 0.0;
    std::string note;
};

struct ClassificationReport {
    std::vector<CandidateVerdict> candidates;
    std::vector<BSInterval> bs_intervals;
    std::size_t bs_bound = 0;
    std::vector<IntervalVertex> vertices;
    VertexGraph g_down;
    VertexGraph g_up;
    DriftProfile drift;
};

// Applies, in order: the drift-sign criteria (unique-measure verdicts), the
// drift+variance exclusion criteria, the eight graph rules, and the BS
// cardinality bound. Conflicting verdicts for one candidate raise
// ConsistencyError; candidates no rule reaches stay Unknown.
ClassificationReport classify(const IFSystem& ifs, int drift_grid = 10000);

}  // namespace srb
