#pragma once

#include <span>
#include <variant>
#include <vector>

namespace srb {

// A fixed point of a monotone interval map, with the sign behaviour of
// tau(r) - r around it.
struct FixedPoint {
    double location = 0.0;
    // true when tau - r does not change sign across the point
    bool tangential = false;
};

struct FixedPointSet {
    std::vector<FixedPoint> points;  // ascending
    // sign of tau(r) - r on the open interval between consecutive points:
    // +1 above the diagonal, -1 below. size == points.size() - 1.
    std::vector<int> gap_signs;
    // tau(r) - r vanishes on a whole scan cell (identity-like map); such maps
    // are simulable but are refused by fixed-point-based analysis.
    bool degenerate = false;

    std::vector<double> locations() const;
    bool contains(double x, double tol) const;
};

// --- map families ----------------------------------------------------------

// tau(r) = r^exponent, exponent > 0.
struct PowerMap {
    double exponent;
};

// Polynomial pieces on consecutive [breaks[i], breaks[i+1]] cells; coeffs[i]
// are ascending-power coefficients of the piece. breaks must start at 0 and
// end at 1; the assembled map must be strictly increasing from [0,1] into
// itself (checked on a sample grid at construction).
struct PiecewisePolynomial {
    std::vector<double> breaks;
    std::vector<std::vector<double>> coeffs;
};

// One-dimensional two-investor market selection step:
//   tau(r) = sum_k payoffs[k] * lambda1[k] r / (lambda1[k] r + lambda2[k] (1-r)).
// payoffs is a simplex vector (the relative payoff row for one state);
// lambda1/lambda2 are completely mixed strategy vectors.
struct MarketMap {
    std::vector<double> payoffs;
    std::vector<double> lambda1;
    std::vector<double> lambda2;
};

struct IdentityMap {};

class MonotoneMap {
public:
    using Kind = std::variant<PowerMap, PiecewisePolynomial, MarketMap, IdentityMap>;

    explicit MonotoneMap(Kind kind);

    static MonotoneMap power(double exponent);
    static MonotoneMap piecewise(std::vector<double> breaks,
                                 std::vector<std::vector<double>> coeffs);
    static MonotoneMap market(std::vector<double> payoffs, std::vector<double> lambda1,
                              std::vector<double> lambda2);
    static MonotoneMap identity();

    // Evaluates tau(r). r must lie in [0,1].
    double operator()(double r) const;

    const Kind& kind() const { return kind_; }
    bool is_identity() const { return std::holds_alternative<IdentityMap>(kind_); }

    // Both endpoints fixed (within 1e-12). Power and market maps satisfy this
    // by construction.
    bool fixes_endpoints() const { return fixes_endpoints_; }

    // Fixed points computed eagerly at construction (tol 1e-12), so instances
    // are immutable and freely shareable across threads.
    const FixedPointSet& fixed_points() const { return fixed_points_; }

private:
    Kind kind_;
    bool fixes_endpoints_ = false;
    FixedPointSet fixed_points_;
};

// Scans tau(r) - r on a uniform grid of `scan_cells` cells, bisects every
// sign change to `tol`, and refines near-zero grid values into tangential
// fixed points. Reports a degenerate set when tau - r vanishes on a full cell.
FixedPointSet find_fixed_points(const MonotoneMap& map, double tol = 1e-12,
                                int scan_cells = 10000);

// --- exponent form tau(r) = r^beta(r) ---------------------------------------

// beta(r) = ln tau(r) / ln r on (0,1), clamped to [1e-12, 1-1e-12] for
// evaluation. At r = 0 and r = 1 the analytic limit is returned where one
// exists (power and market maps); other kinds fall back to a one-sided
// numerical limit. Throws ValidationError when tau(r) lands on {0,1} for an
// interior r, which no strictly increasing endpoint-fixing map can do.
double beta(const MonotoneMap& map, double r);

double beta_limit_at_zero(const MonotoneMap& map);
double beta_limit_at_one(const MonotoneMap& map);

struct BetaBounds {
    double lower = 0.0;
    double upper = 0.0;
};

// Empirical exponent bounds on [lo, hi]: min/max of beta over a grid of
// grid_size points, folded with the analytic endpoint limits contained in the
// interval and, for market maps, with the closed-form local-extremum value
// evaluated along the grid. Grid-sound, not proof-sound.
BetaBounds beta_bounds(const MonotoneMap& map, double lo, double hi, int grid_size);

// Bundles a map with its exponent data; convenience over the free functions.
class ExponentProfile {
public:
    explicit ExponentProfile(MonotoneMap map);

    double operator()(double r) const { return beta(map_, r); }
    double limit_at_zero() const { return limit_zero_; }
    double limit_at_one() const { return limit_one_; }
    BetaBounds bounds(double lo, double hi, int grid_size) const {
        return beta_bounds(map_, lo, hi, grid_size);
    }
    const MonotoneMap& map() const { return map_; }

private:
    MonotoneMap map_;
    double limit_zero_;
    double limit_one_;
};

}  // namespace srb
