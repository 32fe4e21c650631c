#include "srb/interval_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srb/errors.hpp"

namespace srb {

namespace {

constexpr double kEndpointTol = 1e-12;
constexpr double kBetaClamp = 1e-12;
// residual size below which a no-sign-change local minimum is refined as a
// tangential fixed-point candidate
constexpr double kTangentialThreshold = 1e-4;

double eval_polynomial(std::span<const double> coeffs, double r) {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        acc = acc * r + coeffs[i];
    }
    return acc;
}

double eval_kind(const MonotoneMap::Kind& kind, double r) {
    if (const auto* p = std::get_if<PowerMap>(&kind)) {
        if (r == 0.0) return 0.0;
        if (r == 1.0) return 1.0;
        if (p->exponent == 2.0) return r * r;
        if (p->exponent == 0.5) return std::sqrt(r);
        return std::pow(r, p->exponent);
    }
    if (const auto* pw = std::get_if<PiecewisePolynomial>(&kind)) {
        const auto& breaks = pw->breaks;
        // piece i covers [breaks[i], breaks[i+1]); the last piece is closed
        auto it = std::upper_bound(breaks.begin(), breaks.end(), r);
        std::size_t piece = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
        piece = std::min(piece, pw->coeffs.size() - 1);
        const double v = eval_polynomial(pw->coeffs[piece], r);
        return std::clamp(v, 0.0, 1.0);
    }
    if (const auto* m = std::get_if<MarketMap>(&kind)) {
        if (r == 0.0) return 0.0;
        if (r == 1.0) return 1.0;
        double acc = 0.0;
        const std::size_t n = m->payoffs.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double holding = m->lambda1[k] * r + m->lambda2[k] * (1.0 - r);
            acc += m->payoffs[k] * ((m->lambda1[k] * r) / holding);
        }
        return acc;
    }
    return r;  // identity
}

void require_simplex(std::span<const double> v, bool strictly_positive, const char* what) {
    if (v.empty()) throw ValidationError(std::string(what) + ": empty vector");
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) throw ValidationError(std::string(what) + ": negative entry");
        if (strictly_positive && !(x > 0.0)) {
            throw ValidationError(std::string(what) + ": entries must be strictly positive");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << what << ": entries sum to " << sum << ", expected 1";
        throw ValidationError(os.str());
    }
}

void validate_kind(const MonotoneMap::Kind& kind) {
    if (const auto* p = std::get_if<PowerMap>(&kind)) {
        if (!(p->exponent > 0.0) || !std::isfinite(p->exponent)) {
            throw ValidationError("power map exponent must be positive and finite");
        }
        return;
    }
    if (const auto* pw = std::get_if<PiecewisePolynomial>(&kind)) {
        if (pw->breaks.size() < 2 || pw->coeffs.size() != pw->breaks.size() - 1) {
            throw ValidationError("piecewise map: need n+1 breakpoints for n pieces");
        }
        if (std::abs(pw->breaks.front()) > kEndpointTol || std::abs(pw->breaks.back() - 1.0) > kEndpointTol) {
            throw ValidationError("piecewise map: breakpoints must span [0,1]");
        }
        for (std::size_t i = 0; i + 1 < pw->breaks.size(); ++i) {
            if (!(pw->breaks[i] < pw->breaks[i + 1])) {
                throw ValidationError("piecewise map: breakpoints must be strictly ascending");
            }
            if (i > 0) {
                const double left = eval_polynomial(pw->coeffs[i - 1], pw->breaks[i]);
                const double right = eval_polynomial(pw->coeffs[i], pw->breaks[i]);
                if (std::abs(left - right) > 1e-9) {
                    throw ValidationError("piecewise map: pieces are discontinuous at breakpoint " +
                                          std::to_string(i));
                }
            }
        }
        // sampled range and strict-monotonicity check
        const int n = 512;
        double prev = eval_kind(kind, 0.0);
        if (prev < -1e-9 || prev > 1.0 + 1e-9) throw ValidationError("piecewise map leaves [0,1]");
        for (int i = 1; i <= n; ++i) {
            const double r = static_cast<double>(i) / n;
            const double v = eval_kind(kind, r);
            if (v < -1e-9 || v > 1.0 + 1e-9) throw ValidationError("piecewise map leaves [0,1]");
            if (!(v > prev)) throw ValidationError("piecewise map is not strictly increasing");
            prev = v;
        }
        return;
    }
    if (const auto* m = std::get_if<MarketMap>(&kind)) {
        if (m->lambda1.size() != m->payoffs.size() || m->lambda2.size() != m->payoffs.size()) {
            throw ValidationError("market map: payoff and strategy dimensions differ");
        }
        require_simplex(m->payoffs, /*strictly_positive=*/false, "market map payoffs");
        require_simplex(m->lambda1, /*strictly_positive=*/true, "market map lambda1");
        require_simplex(m->lambda2, /*strictly_positive=*/true, "market map lambda2");
        return;
    }
}

// Golden-section minimization of |tau(r) - r| for tangential fixed points.
double refine_tangential(const MonotoneMap::Kind& kind, double lo, double hi) {
    const double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    auto g = [&](double r) { return std::abs(eval_kind(kind, r) - r); };
    double gc = g(c), gd = g(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-15; ++iter) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    return 0.5 * (a + b);
}

double bisect_root(const MonotoneMap::Kind& kind, double lo, double hi, double glo) {
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double gm = eval_kind(kind, mid) - mid;
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> FixedPointSet::locations() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.location);
    return out;
}

bool FixedPointSet::contains(double x, double tol) const {
    for (const auto& p : points) {
        if (std::abs(p.location - x) <= tol) return true;
    }
    return false;
}

MonotoneMap::MonotoneMap(Kind kind) : kind_(std::move(kind)) {
    validate_kind(kind_);
    fixes_endpoints_ = std::abs(eval_kind(kind_, 0.0)) <= kEndpointTol &&
                       std::abs(eval_kind(kind_, 1.0) - 1.0) <= kEndpointTol;
    fixed_points_ = find_fixed_points(*this);
}

MonotoneMap MonotoneMap::power(double exponent) { return MonotoneMap(PowerMap{exponent}); }

MonotoneMap MonotoneMap::piecewise(std::vector<double> breaks,
                                   std::vector<std::vector<double>> coeffs) {
    return MonotoneMap(PiecewisePolynomial{std::move(breaks), std::move(coeffs)});
}

MonotoneMap MonotoneMap::market(std::vector<double> payoffs, std::vector<double> lambda1,
                                std::vector<double> lambda2) {
    return MonotoneMap(MarketMap{std::move(payoffs), std::move(lambda1), std::move(lambda2)});
}

MonotoneMap MonotoneMap::identity() { return MonotoneMap(IdentityMap{}); }

double MonotoneMap::operator()(double r) const {
    if (!(r >= 0.0 && r <= 1.0)) {
        throw ValidationError("map evaluation outside [0,1]");
    }
    return eval_kind(kind_, r);
}

FixedPointSet find_fixed_points(const MonotoneMap& map, double tol, int scan_cells) {
    if (!(tol > 0.0)) throw ValidationError("fixed-point tolerance must be positive");
    if (scan_cells < 2) throw ValidationError("fixed-point scan needs at least 2 cells");

    FixedPointSet out;
    if (map.is_identity()) {
        out.degenerate = true;
        return out;
    }
    const auto& kind = map.kind();

    std::vector<double> grid(static_cast<std::size_t>(scan_cells) + 1);
    std::vector<double> resid(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = static_cast<double>(i) / scan_cells;
        resid[i] = eval_kind(kind, grid[i]) - grid[i];
    }

    std::vector<double> roots;
    std::vector<bool> tangential_flags;
    auto add_root = [&](double x, bool tangential) {
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (std::abs(roots[i] - x) <= 1e-9) {
                tangential_flags[i] = tangential_flags[i] && tangential;
                return;
            }
        }
        roots.push_back(x);
        tangential_flags.push_back(tangential);
    };

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double gl = resid[i];
        const double gr = resid[i + 1];
        // identity-like stretch: residual vanishes across the whole cell
        if (std::abs(gl) <= tol && std::abs(gr) <= tol &&
            std::abs(eval_kind(kind, 0.5 * (grid[i] + grid[i + 1])) - 0.5 * (grid[i] + grid[i + 1])) <= tol) {
            out.degenerate = true;
            return out;
        }
        if (gl == 0.0) {
            add_root(grid[i], false);
            continue;
        }
        if (gl * gr < 0.0) {
            add_root(bisect_root(kind, grid[i], grid[i + 1], gl), false);
        } else if (i > 0 && std::abs(gl) < kTangentialThreshold &&
                   std::abs(gl) <= std::abs(resid[i - 1]) && std::abs(gl) <= std::abs(gr) &&
                   resid[i - 1] * gr > 0.0) {
            // local minimum of |tau - r| without a sign change: a tangential
            // fixed point may hide between the nodes
            const double x = refine_tangential(kind, grid[i - 1], grid[i + 1]);
            if (std::abs(eval_kind(kind, x) - x) <= tol) {
                add_root(x, true);
            }
        }
    }
    if (resid.back() == 0.0) add_root(grid.back(), false);

    if (map.fixes_endpoints()) {
        add_root(0.0, false);
        add_root(1.0, false);
    }

    std::vector<std::size_t> order(roots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return roots[a] < roots[b]; });

    out.points.reserve(roots.size());
    for (std::size_t idx : order) {
        // snap round-off at the endpoints
        double x = roots[idx];
        if (std::abs(x) <= tol) x = 0.0;
        if (std::abs(x - 1.0) <= tol) x = 1.0;
        out.points.push_back({x, tangential_flags[idx]});
    }

    out.gap_signs.resize(out.points.size() >= 1 ? out.points.size() - 1 : 0, 0);
    for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
        const double mid = 0.5 * (out.points[i].location + out.points[i + 1].location);
        const double g = eval_kind(kind, mid) - mid;
        out.gap_signs[i] = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
    }
    // mark interior tangencies from the recorded signs
    for (std::size_t i = 1; i + 1 < out.points.size(); ++i) {
        if (out.gap_signs[i - 1] == out.gap_signs[i] && out.gap_signs[i] != 0) {
            out.points[i].tangential = true;
        }
    }
    return out;
}

namespace {

// Walks inward from the endpoint until tau is strictly inside (0,1), then
// reads off ln tau / ln r. Used for map kinds without an analytic limit.
double numerical_beta_limit(const MonotoneMap& map, bool at_one) {
    for (double off : {1e-12, 1e-9, 1e-6}) {
        const double r = at_one ? 1.0 - off : off;
        const double tau = map(r);
        if (tau > 0.0 && tau < 1.0) return std::log(tau) / std::log(r);
    }
    throw ValidationError("no usable one-sided exponent limit for this map");
}

}  // namespace

double beta_limit_at_zero(const MonotoneMap& map) {
    if (const auto* p = std::get_if<PowerMap>(&map.kind())) return p->exponent;
    if (std::holds_alternative<MarketMap>(map.kind())) return 1.0;
    if (map.is_identity()) return 1.0;
    return numerical_beta_limit(map, /*at_one=*/false);
}

double beta_limit_at_one(const MonotoneMap& map) {
    if (const auto* p = std::get_if<PowerMap>(&map.kind())) return p->exponent;
    if (const auto* m = std::get_if<MarketMap>(&map.kind())) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m->payoffs.size(); ++k) {
            acc += m->payoffs[k] * m->lambda2[k] / m->lambda1[k];
        }
        return acc;
    }
    if (map.is_identity()) return 1.0;
    return numerical_beta_limit(map, /*at_one=*/true);
}

double beta(const MonotoneMap& map, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("beta: argument outside [0,1]");
    if (const auto* p = std::get_if<PowerMap>(&map.kind())) return p->exponent;
    if (map.is_identity()) return 1.0;
    if (r == 0.0) return beta_limit_at_zero(map);
    if (r == 1.0) return beta_limit_at_one(map);
    const double rc = std::clamp(r, kBetaClamp, 1.0 - kBetaClamp);
    const double tau = map(rc);
    if (tau <= 0.0 || tau >= 1.0) {
        throw ValidationError("beta: map value on {0,1} for interior argument");
    }
    return std::log(tau) / std::log(rc);
}

namespace {

// Closed-form value of beta at an interior local extremum of a market map;
// also matches the endpoint limits, so its range over a grid bounds beta.
double market_extremum_expression(const MarketMap& m, double r) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < m.payoffs.size(); ++k) {
        const double holding = m.lambda1[k] * r + m.lambda2[k] * (1.0 - r);
        num += m.payoffs[k] * m.lambda1[k] * m.lambda2[k] / (holding * holding);
        den += m.payoffs[k] * m.lambda1[k] / holding;
    }
    return num / den;
}

}  // namespace

BetaBounds beta_bounds(const MonotoneMap& map, double lo, double hi, int grid_size) {
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
        throw ValidationError("beta_bounds: need a nonempty subinterval of [0,1]");
    }
    if (grid_size < 2) throw ValidationError("beta_bounds: grid_size must be at least 2");

    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    auto fold = [&](double v) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    };

    const auto* market = std::get_if<MarketMap>(&map.kind());
    for (int i = 0; i < grid_size; ++i) {
        const double r = lo + (hi - lo) * static_cast<double>(i) / (grid_size - 1);
        fold(beta(map, r));
        if (market != nullptr && r > 0.0 && r < 1.0) fold(market_extremum_expression(*market, r));
    }
    if (lo == 0.0) fold(beta_limit_at_zero(map));
    if (hi == 1.0) fold(beta_limit_at_one(map));
    return {mn, mx};
}

ExponentProfile::ExponentProfile(MonotoneMap map)
    : map_(std::move(map)),
      limit_zero_(beta_limit_at_zero(map_)),
      limit_one_(beta_limit_at_one(map_)) {}

}  // namespace srb
