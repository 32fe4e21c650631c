#include "srb/orbit_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "srb/errors.hpp"
#include "srb/parallel.hpp"

namespace srb {

namespace {

constexpr double kAbsorptionBand = 1e-9;
constexpr int kAbsorptionRun = 100;

}  // namespace

IFSystem::IFSystem(std::vector<MonotoneMap> maps, std::vector<double> probabilities)
    : maps_(std::move(maps)), probs_(std::move(probabilities)) {
    if (maps_.empty()) throw ValidationError("IFS needs at least one map");
    if (probs_.size() != maps_.size()) {
        throw ValidationError("IFS probability vector size does not match map count");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p > 0.0)) throw ValidationError("IFS probabilities must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "IFS probabilities sum to " << sum << ", expected 1 within 1e-12";
        throw ValidationError(os.str());
    }
    // make the sum exactly 1 so point-mass push-forwards conserve mass exactly
    double partial = 0.0;
    for (std::size_t i = 0; i + 1 < probs_.size(); ++i) partial += probs_[i];
    probs_.back() = 1.0 - partial;

    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;

    fixes_endpoints_ = true;
    degenerate_ = false;
    for (const auto& m : maps_) {
        fixes_endpoints_ = fixes_endpoints_ && m.fixes_endpoints();
        degenerate_ = degenerate_ || m.fixed_points().degenerate;
    }
}

std::vector<int> draw_symbols(const IFSystem& ifs, int steps, std::uint64_t seed,
                              std::uint64_t stream) {
    if (steps < 1) throw ValidationError("symbol stream needs at least one step");
    CounterRng rng(seed, stream);
    std::vector<int> symbols(static_cast<std::size_t>(steps));
    for (auto& s : symbols) s = rng.next_symbol(ifs.cumulative());
    return symbols;
}

Orbit sample_orbit(const IFSystem& ifs, double r0, int steps, std::uint64_t seed,
                   std::uint64_t stream) {
    Orbit orbit = orbit_from_symbols(ifs, r0, draw_symbols(ifs, steps, seed, stream));
    orbit.seed = seed;
    orbit.stream = stream;
    return orbit;
}

Orbit orbit_from_symbols(const IFSystem& ifs, double r0, std::span<const int> symbols) {
    if (!(r0 >= 0.0 && r0 <= 1.0)) throw ValidationError("orbit start outside [0,1]");
    if (symbols.empty()) throw ValidationError("orbit needs at least one step");
    Orbit orbit;
    orbit.r0 = r0;
    orbit.symbols.assign(symbols.begin(), symbols.end());
    orbit.states.resize(symbols.size() + 1);
    orbit.states[0] = r0;
    double r = r0;
    for (std::size_t t = 0; t < symbols.size(); ++t) {
        const int s = symbols[t];
        if (s < 0 || s >= ifs.size()) throw ValidationError("symbol index outside the IFS");
        r = ifs.map(s)(r);
        orbit.states[t + 1] = r;
    }
    return orbit;
}

// --- measures ---------------------------------------------------------------

EmpiricalMeasure EmpiricalMeasure::from_atoms(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.position < b.position; });
    // merge equal positions
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!(a.position >= 0.0 && a.position <= 1.0)) {
            throw ValidationError("measure atom outside [0,1]");
        }
        if (!merged.empty() && merged.back().position == a.position) {
            merged.back().weight += a.weight;
        } else {
            merged.push_back(a);
        }
    }
    EmpiricalMeasure m;
    m.atoms_ = std::move(merged);
    m.mass_ = 0.0;
    for (const auto& a : m.atoms_) m.mass_ += a.weight;
    if (m.atoms_.size() > kAtomCap) return m.binned();
    return m;
}

EmpiricalMeasure EmpiricalMeasure::from_histogram(std::vector<double> bin_masses) {
    if (bin_masses.empty()) throw ValidationError("histogram needs at least one bin");
    EmpiricalMeasure m;
    m.bins_ = std::move(bin_masses);
    m.mass_ = 0.0;
    for (double w : m.bins_) m.mass_ += w;
    return m;
}

EmpiricalMeasure EmpiricalMeasure::binned(int bins) const {
    if (is_histogram()) return *this;
    std::vector<double> masses(static_cast<std::size_t>(bins), 0.0);
    for (const auto& a : atoms_) {
        auto idx = static_cast<std::size_t>(std::min<double>(a.position * bins, bins - 1));
        masses[idx] += a.weight;
    }
    return from_histogram(std::move(masses));
}

double EmpiricalMeasure::cdf(double x) const {
    if (is_histogram()) {
        const double nb = static_cast<double>(bins_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            const double lo = static_cast<double>(i) / nb;
            const double hi = static_cast<double>(i + 1) / nb;
            if (x >= hi) {
                acc += bins_[i];
            } else if (x > lo) {
                acc += bins_[i] * (x - lo) / (hi - lo);
            } else {
                break;
            }
        }
        return acc;
    }
    double acc = 0.0;
    for (const auto& a : atoms_) {
        if (a.position > x) break;
        acc += a.weight;
    }
    return acc;
}

double EmpiricalMeasure::cdf_left(double x) const {
    if (is_histogram()) return cdf(x);
    double acc = 0.0;
    for (const auto& a : atoms_) {
        if (a.position >= x) break;
        acc += a.weight;
    }
    return acc;
}

double EmpiricalMeasure::mass_near(double x, double eps) const {
    return cdf(std::min(x + eps, 1.0)) - cdf_left(std::max(x - eps, 0.0));
}

EmpiricalMeasure empirical_measure(const Orbit& orbit) {
    const std::size_t horizon = orbit.states.size() - 1;  // first T of the T+1 states
    if (horizon == 0) throw ValidationError("empirical measure needs an orbit of length >= 1");
    const double w = 1.0 / static_cast<double>(horizon);
    std::vector<EmpiricalMeasure::Atom> atoms;
    atoms.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) atoms.push_back({orbit.states[t], w});
    return EmpiricalMeasure::from_atoms(std::move(atoms));
}

double weak_distance(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2) {
    std::vector<double> candidates{0.0, 1.0};
    auto collect = [&](const EmpiricalMeasure& m) {
        if (m.is_histogram()) {
            const double nb = static_cast<double>(m.bins().size());
            for (std::size_t i = 0; i <= m.bins().size(); ++i) {
                candidates.push_back(static_cast<double>(i) / nb);
            }
        } else {
            for (const auto& a : m.atoms()) candidates.push_back(a.position);
        }
    };
    collect(m1);
    collect(m2);
    double d = 0.0;
    for (double x : candidates) {
        d = std::max(d, std::abs(m1.cdf(x) - m2.cdf(x)));
        d = std::max(d, std::abs(m1.cdf_left(x) - m2.cdf_left(x)));
    }
    return d;
}

EmpiricalMeasure push_forward(const IFSystem& ifs, const EmpiricalMeasure& m) {
    const auto probs = ifs.probabilities();
    if (m.is_histogram()) {
        const auto& bins = m.bins();
        const double nb = static_cast<double>(bins.size());
        std::vector<double> out(bins.size(), 0.0);
        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (bins[i] == 0.0) continue;
            const double center = (static_cast<double>(i) + 0.5) / nb;
            for (int s = 0; s < ifs.size(); ++s) {
                const double image = ifs.map(s)(center);
                auto idx = static_cast<std::size_t>(std::min<double>(image * nb, nb - 1.0));
                out[idx] += probs[static_cast<std::size_t>(s)] * bins[i];
            }
        }
        return EmpiricalMeasure::from_histogram(std::move(out));
    }
    std::vector<EmpiricalMeasure::Atom> out;
    out.reserve(m.atoms().size() * static_cast<std::size_t>(ifs.size()));
    for (const auto& a : m.atoms()) {
        for (int s = 0; s < ifs.size(); ++s) {
            out.push_back({ifs.map(s)(a.position), probs[static_cast<std::size_t>(s)] * a.weight});
        }
    }
    return EmpiricalMeasure::from_atoms(std::move(out));
}

// --- limits and basins -------------------------------------------------------

LimitVerdict detect_limit(const Orbit& orbit, double tail_fraction, double eps) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw ValidationError("detect_limit: tail_fraction must lie in (0,1]");
    }
    if (!(eps > 0.0)) throw ValidationError("detect_limit: eps must be positive");

    const auto& states = orbit.states;
    const std::size_t n = states.size();
    const std::size_t tail =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
    const std::size_t begin = n - tail;

    double mn = states[begin];
    double mx = states[begin];
    double sum = 0.0;
    for (std::size_t i = begin; i < n; ++i) {
        mn = std::min(mn, states[i]);
        mx = std::max(mx, states[i]);
        sum += states[i];
    }
    LimitVerdict v;
    v.tail_mean = sum / static_cast<double>(tail);
    v.tail_range = mx - mn;

    double x = v.tail_mean;
    if (x < eps) x = 0.0;
    if (x > 1.0 - eps) x = 1.0;

    bool within = v.tail_range < eps;
    for (std::size_t i = begin; within && i < n; ++i) {
        within = std::abs(states[i] - x) <= eps;
    }
    if (within) {
        v.kind = LimitVerdict::Kind::ConvergesTo;
        v.limit = x;
        std::size_t near = 0;
        for (double s : states) {
            if (std::abs(s - x) <= eps) ++near;
        }
        v.occupation_fraction = static_cast<double>(near) / static_cast<double>(n);
    } else if (v.tail_range > 0.1) {
        v.kind = LimitVerdict::Kind::Oscillating;
    } else {
        v.kind = LimitVerdict::Kind::Undecided;
    }
    return v;
}

bool orbit_converges_to(const IFSystem& ifs, double r0, double target, int steps,
                        std::uint64_t seed, std::uint64_t stream, double eps) {
    CounterRng rng(seed, stream);
    const auto cumulative = ifs.cumulative();
    const bool endpoint_zero = target <= kAbsorptionBand;
    const bool endpoint_one = target >= 1.0 - kAbsorptionBand;
    double r = r0;

    if (endpoint_zero || endpoint_one) {
        int run = 0;
        for (int t = 0; t < steps; ++t) {
            r = ifs.map(rng.next_symbol(cumulative))(r);
            if (ifs.fixes_endpoints() && (r == 0.0 || r == 1.0)) {
                return endpoint_zero ? r == 0.0 : r == 1.0;  // absorbed exactly
            }
            const bool near = endpoint_zero ? r < kAbsorptionBand : r > 1.0 - kAbsorptionBand;
            run = near ? run + 1 : 0;
            if (run >= kAbsorptionRun) return true;
        }
        return false;
    }

    // interior target: final tail must stay within eps of it
    const int window = std::max(100, steps / 10);
    std::vector<double> ring(static_cast<std::size_t>(std::min(window, steps)));
    for (int t = 0; t < steps; ++t) {
        r = ifs.map(rng.next_symbol(cumulative))(r);
        ring[static_cast<std::size_t>(t) % ring.size()] = r;
    }
    if (steps < window) return false;
    for (double s : ring) {
        if (std::abs(s - target) > eps) return false;
    }
    return true;
}

bool orbit_enters(const IFSystem& ifs, double r0, int steps, std::uint64_t seed,
                  std::uint64_t stream, double lo, double hi) {
    CounterRng rng(seed, stream);
    const auto cumulative = ifs.cumulative();
    double r = r0;
    if (r >= lo && r <= hi) return true;
    for (int t = 0; t < steps; ++t) {
        r = ifs.map(rng.next_symbol(cumulative))(r);
        if (r >= lo && r <= hi) return true;
        if (ifs.fixes_endpoints() && (r == 0.0 || r == 1.0)) return false;  // absorbed outside
    }
    return false;
}

BasinScan scan_basin(const IFSystem& ifs, double target, int grid, int seeds_per_point,
                     int steps, std::uint64_t seed, double threshold, unsigned threads) {
    if (grid < 3) throw ValidationError("scan_basin: grid must have at least 3 points");
    if (seeds_per_point < 1) throw ValidationError("scan_basin: need at least one seed per point");

    BasinScan scan;
    scan.target = target;
    scan.threshold = threshold;
    scan.points.resize(static_cast<std::size_t>(grid));

    parallel_for(static_cast<std::size_t>(grid), threads, [&](std::size_t i) {
        const double r0 = static_cast<double>(i) / (grid - 1);
        int converged = 0;
        for (int k = 0; k < seeds_per_point; ++k) {
            const auto stream =
                static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(seeds_per_point) +
                static_cast<std::uint64_t>(k);
            if (orbit_converges_to(ifs, r0, target, steps, seed, stream)) ++converged;
        }
        scan.points[i] = {r0, static_cast<double>(converged) / seeds_per_point, false};
    });

    double lo = 2.0, hi = -1.0;
    for (auto& p : scan.points) {
        if (p.frequency >= threshold) {
            lo = std::min(lo, p.r0);
            hi = std::max(hi, p.r0);
        }
    }
    scan.hull_nonempty = hi >= lo && hi >= 0.0;
    if (scan.hull_nonempty) {
        scan.hull_lo = lo;
        scan.hull_hi = hi;
        for (auto& p : scan.points) p.in_hull = p.r0 >= lo && p.r0 <= hi;
    }
    return scan;
}

}  // namespace srb
