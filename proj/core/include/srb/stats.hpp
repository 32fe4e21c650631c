#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srb/orbit_engine.hpp"

namespace srb {

// The multiplicative exponent bookkeeping of one orbit: per-step exponents,
// their running log-product, the conditional drift at the visited states, and
// the centered (martingale-difference) terms. Truncates if the orbit hits an
// exact endpoint.
struct ExponentSeries {
    std::vector<double> log_alpha;        // ln alpha_t = ln beta_{s_t}(r_{t-1})
    std::vector<double> cumulative;       // partial sums of log_alpha
    std::vector<double> drift;            // phi(r_{t-1})
    std::vector<double> centered;         // M_t = log_alpha - drift
    std::vector<double> conditional_var;  // var_s(ln beta_s(r_{t-1}))
    bool truncated = false;
    std::size_t steps = 0;
};

ExponentSeries exponent_series(const Orbit& orbit, const IFSystem& ifs);

// Running Cesaro means (1/T) sum_{t<=T} M_t at the given checkpoint indices
// (1-based T values, clamped to the series length).
std::vector<double> cesaro_checkpoints(const ExponentSeries& series,
                                       std::span<const std::size_t> checkpoints);

// A martingale-difference path with its conditional second moments; the raw
// input of the occupation-time statistic.
struct DifferencePath {
    std::vector<double> x;               // X_i
    std::vector<double> conditional_sq;  // E(X_i^2 | history)
};

DifferencePath to_difference_path(const ExponentSeries& series);

// Symmetric +/-1 coin flips: the classical ground-truth process for the
// occupation-time limit law (conditional second moment identically 1).
std::vector<DifferencePath> coin_flip_paths(std::size_t paths, std::size_t length,
                                            std::uint64_t seed);

// Streaming per-path Cesaro means of scaled coin flips at the given
// checkpoint; one value per path, O(1) memory per path.
std::vector<double> coin_flip_cesaro_means(std::size_t paths, std::size_t length,
                                           double scale, std::uint64_t seed);

struct ArcsineSample {
    double l_n = 0.0;           // normalized positive-time statistic
    double pos_fraction = 0.0;  // fraction of partial sums strictly positive up to the stop
    std::size_t stopping_index = 0;
    bool valid = false;  // quadratic variation reached the normalization level
};

ArcsineSample arcsine_statistic_path(const DifferencePath& path, double n);

struct ArcsineSummary {
    std::vector<ArcsineSample> samples;  // valid samples only
    std::size_t excluded = 0;            // paths whose variation never reached n
    double ks_to_arcsine = 0.0;          // Kolmogorov distance of the L_n samples
};

ArcsineSummary arcsine_statistic(const std::vector<DifferencePath>& paths, double n);

// Streaming equivalent of arcsine_statistic over freshly drawn coin-flip
// paths; avoids materializing the whole ensemble.
ArcsineSummary coin_flip_arcsine(std::size_t paths, std::size_t length, double n,
                                 std::uint64_t seed);

// CDF of the arcsine law, clamped to [0,1] outside the unit interval.
double arcsine_cdf(double x);

// Kolmogorov distance between the empirical CDF of the samples and the
// arcsine CDF.
double ks_distance_to_arcsine(std::vector<double> samples);

struct PositiveFractionCheck {
    double a = 0.0;
    double empirical_probability = 0.0;  // fraction of samples with pos_fraction <= a
    double bound = 0.0;                  // (1/pi) arcsin sqrt(a d / D)
};

// Compares the empirical occupation probability against the analytic lower
// bound, given the conditional-moment constants d <= E(X^2|.) and X^2 <= D.
PositiveFractionCheck positive_fraction_bound(const std::vector<ArcsineSample>& samples, double a,
                                              double d, double D);

}  // namespace srb
