#pragma once

#include <cstdint>
#include <ostream>
#include <string>

#include <json.hpp>

#include "srb/classifier.hpp"
#include "srb/market.hpp"
#include "srb/orbit_engine.hpp"
#include "srb/stats.hpp"

namespace srb {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a over the canonical config text; embedded in every artifact.
std::uint64_t fnv1a64(std::string_view text);
std::string config_hash_hex(std::string_view canonical_config);

// --- JSON -------------------------------------------------------------------

nlohmann::json to_json(const FixedPointSet& fps);
nlohmann::json to_json(const BetaBounds& bounds);
nlohmann::json to_json(const IntervalVertex& vertex);
nlohmann::json to_json(const VertexGraph& graph);
nlohmann::json to_json(const BSInterval& interval);
nlohmann::json to_json(const DriftProfile& drift);  // summary, not the full table
nlohmann::json to_json(const ClassificationReport& report);
nlohmann::json to_json(const BasinScan& scan);
nlohmann::json to_json(const LimitVerdict& verdict);
nlohmann::json to_json(const OutcomeGrade& grade);
nlohmann::json to_json(const ArcsineSummary& summary);

const char* measure_status_name(MeasureStatus status);

// --- CSV --------------------------------------------------------------------

// columns: t, symbol, state (symbol -1 on the t = 0 row)
void write_orbit_csv(std::ostream& os, const Orbit& orbit);
// columns: r0, freq_to_target, hull_member
void write_basin_csv(std::ostream& os, const BasinScan& scan);
// columns: t, symbol, then one share column per investor
void write_market_csv(std::ostream& os, const MarketPath& path);
// columns: path_id, n, L_n, pos_fraction
void write_arcsine_csv(std::ostream& os, const ArcsineSummary& summary, double n);
// columns: r, phi (drift table)
void write_drift_csv(std::ostream& os, const DriftProfile& drift);
// plain text edge list with a vertex legend
void write_graph_edge_list(std::ostream& os, const VertexGraph& graph);

// shortest round-trip decimal rendering, locale independent
std::string format_double(double value);

}  // namespace srb
