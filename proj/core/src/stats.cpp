#include "srb/stats.hpp"

#include <algorithm>
#include <cmath>

#include "srb/errors.hpp"
#include "srb/rng.hpp"

namespace srb {

ExponentSeries exponent_series(const Orbit& orbit, const IFSystem& ifs) {
    if (orbit.states.empty() || orbit.symbols.empty()) {
        throw ValidationError("exponent series needs a sampled orbit");
    }
    if (orbit.r0 <= 0.0 || orbit.r0 >= 1.0) {
        throw ValidationError("exponent series needs an interior start point");
    }
    const auto probs = ifs.probabilities();
    const int L = ifs.size();

    ExponentSeries series;
    series.log_alpha.reserve(orbit.symbols.size());
    series.cumulative.reserve(orbit.symbols.size());
    series.drift.reserve(orbit.symbols.size());
    series.centered.reserve(orbit.symbols.size());
    series.conditional_var.reserve(orbit.symbols.size());

    double running = 0.0;
    for (std::size_t t = 0; t < orbit.symbols.size(); ++t) {
        const double r_prev = orbit.states[t];
        if (r_prev == 0.0 || r_prev == 1.0) {
            series.truncated = true;
            break;
        }
        double phi = 0.0;
        double second = 0.0;
        double log_alpha_t = 0.0;
        for (int s = 0; s < L; ++s) {
            const double lb = std::log(beta(ifs.map(s), r_prev));
            phi += probs[static_cast<std::size_t>(s)] * lb;
            second += probs[static_cast<std::size_t>(s)] * lb * lb;
            if (s == orbit.symbols[t]) log_alpha_t = lb;
        }
        running += log_alpha_t;
        series.log_alpha.push_back(log_alpha_t);
        series.cumulative.push_back(running);
        series.drift.push_back(phi);
        series.centered.push_back(log_alpha_t - phi);
        series.conditional_var.push_back(second - phi * phi);
    }
    series.steps = series.log_alpha.size();
    return series;
}

std::vector<double> cesaro_checkpoints(const ExponentSeries& series,
                                       std::span<const std::size_t> checkpoints) {
    std::vector<double> out;
    out.reserve(checkpoints.size());
    double acc = 0.0;
    std::size_t consumed = 0;
    for (std::size_t cp : checkpoints) {
        const std::size_t limit = std::min(cp, series.centered.size());
        for (; consumed < limit; ++consumed) acc += series.centered[consumed];
        out.push_back(limit == 0 ? 0.0 : acc / static_cast<double>(limit));
    }
    return out;
}

DifferencePath to_difference_path(const ExponentSeries& series) {
    return {series.centered, series.conditional_var};
}

std::vector<DifferencePath> coin_flip_paths(std::size_t paths, std::size_t length,
                                            std::uint64_t seed) {
    std::vector<DifferencePath> out(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        CounterRng rng(seed, p);
        out[p].x.resize(length);
        out[p].conditional_sq.assign(length, 1.0);
        for (std::size_t i = 0; i < length; ++i) {
            out[p].x[i] = rng.next_unit() < 0.5 ? -1.0 : 1.0;
        }
    }
    return out;
}

std::vector<double> coin_flip_cesaro_means(std::size_t paths, std::size_t length, double scale,
                                           std::uint64_t seed) {
    std::vector<double> out(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        CounterRng rng(seed, p);
        double acc = 0.0;
        for (std::size_t i = 0; i < length; ++i) {
            acc += rng.next_unit() < 0.5 ? -scale : scale;
        }
        out[p] = acc / static_cast<double>(length);
    }
    return out;
}

ArcsineSample arcsine_statistic_path(const DifferencePath& path, double n) {
    if (!(n > 0.0)) throw ValidationError("normalization level must be positive");
    if (path.x.size() != path.conditional_sq.size()) {
        throw ValidationError("difference path arrays have unequal lengths");
    }
    ArcsineSample sample;
    double s = 0.0;
    double v = 0.0;
    double weighted_pos = 0.0;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < path.x.size(); ++i) {
        s += path.x[i];
        v += path.conditional_sq[i];
        if (s > 0.0) {
            weighted_pos += path.conditional_sq[i];
            ++pos;
        }
        if (v >= n) {
            sample.valid = true;
            sample.stopping_index = i + 1;
            sample.l_n = weighted_pos / n;
            sample.pos_fraction = static_cast<double>(pos) / static_cast<double>(i + 1);
            return sample;
        }
    }
    return sample;  // variation never reached n
}

double arcsine_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return 2.0 / 3.141592653589793238462643383279502884 * std::asin(std::sqrt(x));
}

double ks_distance_to_arcsine(std::vector<double> samples) {
    if (samples.empty()) throw ValidationError("KS distance needs at least one sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = arcsine_cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

ArcsineSummary arcsine_statistic(const std::vector<DifferencePath>& paths, double n) {
    ArcsineSummary summary;
    summary.samples.reserve(paths.size());
    for (const auto& path : paths) {
        const auto sample = arcsine_statistic_path(path, n);
        if (sample.valid) {
            summary.samples.push_back(sample);
        } else {
            ++summary.excluded;
        }
    }
    if (!summary.samples.empty()) {
        std::vector<double> values;
        values.reserve(summary.samples.size());
        for (const auto& s : summary.samples) values.push_back(s.l_n);
        summary.ks_to_arcsine = ks_distance_to_arcsine(std::move(values));
    }
    return summary;
}

ArcsineSummary coin_flip_arcsine(std::size_t paths, std::size_t length, double n,
                                 std::uint64_t seed) {
    if (!(n > 0.0)) throw ValidationError("normalization level must be positive");
    ArcsineSummary summary;
    summary.samples.reserve(paths);
    const auto stop = static_cast<std::size_t>(std::ceil(n));  // unit moments: T_n = ceil(n)
    for (std::size_t p = 0; p < paths; ++p) {
        if (length < stop) {
            ++summary.excluded;
            continue;
        }
        CounterRng rng(seed, p);
        double s = 0.0;
        std::size_t pos = 0;
        std::size_t i = 0;
        for (; i < stop; ++i) {
            s += rng.next_unit() < 0.5 ? -1.0 : 1.0;
            pos += s > 0.0;
        }
        ArcsineSample sample;
        sample.valid = true;
        sample.stopping_index = i;
        sample.l_n = static_cast<double>(pos) / n;
        sample.pos_fraction = static_cast<double>(pos) / static_cast<double>(i);
        summary.samples.push_back(sample);
    }
    if (!summary.samples.empty()) {
        std::vector<double> values;
        values.reserve(summary.samples.size());
        for (const auto& s : summary.samples) values.push_back(s.l_n);
        summary.ks_to_arcsine = ks_distance_to_arcsine(std::move(values));
    }
    return summary;
}

PositiveFractionCheck positive_fraction_bound(const std::vector<ArcsineSample>& samples, double a,
                                              double d, double D) {
    if (samples.empty()) throw ValidationError("positive-fraction bound needs samples");
    if (!(d > 0.0 && D >= d)) throw ValidationError("need 0 < d <= D");
    PositiveFractionCheck check;
    check.a = a;
    std::size_t below = 0;
    for (const auto& s : samples) below += s.pos_fraction <= a;
    check.empirical_probability = static_cast<double>(below) / static_cast<double>(samples.size());
    const double arg = std::clamp(a * d / D, 0.0, 1.0);
    check.bound = std::asin(std::sqrt(arg)) / 3.141592653589793238462643383279502884;
    return check;
}

}  // namespace srb
