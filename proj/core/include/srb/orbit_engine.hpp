#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srb/interval_maps.hpp"
#include "srb/rng.hpp"

namespace srb {

// A finite collection of strictly increasing interval maps with a strictly
// positive probability vector; the generator of the Markov process.
class IFSystem {
public:
    IFSystem(std::vector<MonotoneMap> maps, std::vector<double> probabilities);

    const std::vector<MonotoneMap>& maps() const { return maps_; }
    const MonotoneMap& map(int s) const { return maps_[static_cast<std::size_t>(s)]; }
    std::span<const double> probabilities() const { return probs_; }
    std::span<const double> cumulative() const { return cumulative_; }
    int size() const { return static_cast<int>(maps_.size()); }

    // All constituent maps fix both endpoints.
    bool fixes_endpoints() const { return fixes_endpoints_; }
    // Some constituent map has a degenerate (identity-like) fixed set; such
    // systems can be simulated but not classified.
    bool degenerate() const { return degenerate_; }

private:
    std::vector<MonotoneMap> maps_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
    bool fixes_endpoints_ = false;
    bool degenerate_ = false;
};

struct Orbit {
    double r0 = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<int> symbols;  // symbols[t] produced states[t+1]
    std::vector<double> states;  // size symbols.size() + 1
};

// Draws `steps` i.i.d. symbols from the system's probability vector using the
// (seed, stream) counter generator. Equal keys replay bit-identically.
std::vector<int> draw_symbols(const IFSystem& ifs, int steps, std::uint64_t seed,
                              std::uint64_t stream = 0);

Orbit sample_orbit(const IFSystem& ifs, double r0, int steps, std::uint64_t seed,
                   std::uint64_t stream = 0);

// Deterministic replay along a forced symbol sequence.
Orbit orbit_from_symbols(const IFSystem& ifs, double r0, std::span<const int> symbols);

// Either an exact atom list or a fixed-bin histogram on [0,1]. Atom lists
// convert to histograms once they exceed the atom cap.
class EmpiricalMeasure {
public:
    struct Atom {
        double position;
        double weight;
    };

    static constexpr int kDefaultBins = 2048;
    static constexpr std::size_t kAtomCap = 1000000;

    static EmpiricalMeasure from_atoms(std::vector<Atom> atoms);
    static EmpiricalMeasure from_histogram(std::vector<double> bin_masses);

    bool is_histogram() const { return !bins_.empty(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& bins() const { return bins_; }
    double total_mass() const { return mass_; }

    // Cumulative mass of [0, x]; histogram mass is spread uniformly in-bin.
    double cdf(double x) const;
    // Cumulative mass of [0, x).
    double cdf_left(double x) const;

    // Mass within `eps` of x.
    double mass_near(double x, double eps) const;

    EmpiricalMeasure binned(int bins = kDefaultBins) const;

private:
    std::vector<Atom> atoms_;  // sorted by position, unique positions
    std::vector<double> bins_;
    double mass_ = 0.0;
};

// Cesaro average (1/T) sum of point masses at the first T states of the orbit.
EmpiricalMeasure empirical_measure(const Orbit& orbit);

// Kolmogorov distance sup_x |F1(x) - F2(x)| between the two CDFs.
double weak_distance(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2);

// One push-forward step of the transition operator: atoms split into L images
// weighted by the probability vector; histograms transport bin-center mass.
EmpiricalMeasure push_forward(const IFSystem& ifs, const EmpiricalMeasure& m);

struct LimitVerdict {
    enum class Kind { ConvergesTo, Oscillating, Undecided };
    Kind kind = Kind::Undecided;
    double limit = 0.0;  // meaningful for ConvergesTo
    double tail_mean = 0.0;
    double tail_range = 0.0;
    double occupation_fraction = 0.0;  // fraction of the whole orbit within eps of the limit
};

// ConvergesTo(x) when the final tail_fraction of the states all lie within
// eps of their mean and span a range below eps; Oscillating when the tail
// range exceeds 0.1; Undecided otherwise.
LimitVerdict detect_limit(const Orbit& orbit, double tail_fraction = 0.1, double eps = 1e-6);

// Declares convergence without storing the orbit. Endpoint targets use the
// absorption rule (state within 1e-9 of the endpoint for 100 consecutive
// steps, or exact absorption); interior targets require the final tail to
// stay within eps of the target.
bool orbit_converges_to(const IFSystem& ifs, double r0, double target, int steps,
                        std::uint64_t seed, std::uint64_t stream, double eps = 1e-6);

// True when some state of the orbit enters [lo, hi].
bool orbit_enters(const IFSystem& ifs, double r0, int steps, std::uint64_t seed,
                  std::uint64_t stream, double lo, double hi);

struct BasinScan {
    struct PointStat {
        double r0;
        double frequency;  // fraction of seeds whose orbit converged to the target
        bool in_hull;
    };
    double target = 0.0;
    double threshold = 0.99;
    std::vector<PointStat> points;
    bool hull_nonempty = false;
    double hull_lo = 0.0;
    double hull_hi = 0.0;
};

// Estimates the basin of the point measure at `target` as the interval hull
// of grid points whose convergence frequency reaches the threshold. The raw
// frequency table is always retained so the threshold stays auditable.
BasinScan scan_basin(const IFSystem& ifs, double target, int grid, int seeds_per_point,
                     int steps, std::uint64_t seed = 1, double threshold = 0.99,
                     unsigned threads = 0);

}  // namespace srb
