#include "srb/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "srb/errors.hpp"

namespace srb {

namespace {

constexpr double kShareFloor = 10.0 * std::numeric_limits<double>::epsilon();
constexpr double kClearingTol = 1e-9;

}  // namespace

Strategy::Strategy(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty()) throw ValidationError("strategy needs at least one asset weight");
    double sum = 0.0;
    for (double w : weights_) {
        if (!(w > 0.0)) throw ValidationError("strategy weights must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "strategy weights sum to " << sum << ", expected 1";
        throw ValidationError(os.str());
    }
    if (weights_.size() > 1) {
        double partial = 0.0;
        for (std::size_t k = 0; k + 1 < weights_.size(); ++k) partial += weights_[k];
        weights_.back() = 1.0 - partial;
        if (!(weights_.back() > 0.0)) {
            throw ValidationError("strategy weights must be strictly positive");
        }
    }
}

std::vector<std::vector<double>> relative_payoffs(const std::vector<std::vector<double>>& payoffs) {
    if (payoffs.empty() || payoffs.front().empty()) {
        throw ValidationError("payoff matrix must be nonempty");
    }
    const std::size_t K = payoffs.size();
    const std::size_t L = payoffs.front().size();
    for (const auto& row : payoffs) {
        if (row.size() != L) throw ValidationError("payoff matrix rows have unequal lengths");
        for (double d : row) {
            if (!(d >= 0.0)) throw ValidationError("payoffs must be nonnegative");
        }
    }
    std::vector<std::vector<double>> relative(K, std::vector<double>(L, 0.0));
    for (std::size_t s = 0; s < L; ++s) {
        double column = 0.0;
        for (std::size_t k = 0; k < K; ++k) column += payoffs[k][s];
        if (!(column > 0.0)) {
            throw ValidationError("payoff column " + std::to_string(s) + " sums to zero");
        }
        double partial = 0.0;
        for (std::size_t k = 0; k + 1 < K; ++k) {
            relative[k][s] = payoffs[k][s] / column;
            partial += relative[k][s];
        }
        relative[K - 1][s] = 1.0 - partial;  // exact column sum
    }
    return relative;
}

MarketModel::MarketModel(std::vector<std::vector<double>> payoffs,
                         std::vector<double> probabilities)
    : payoffs_(std::move(payoffs)), probs_(std::move(probabilities)) {
    relative_ = relative_payoffs(payoffs_);
    if (probs_.size() != payoffs_.front().size()) {
        throw ValidationError("state probability count does not match payoff columns");
    }
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p > 0.0)) throw ValidationError("state probabilities must be strictly positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "state probabilities sum to " << sum << ", expected 1 within 1e-12";
        throw ValidationError(os.str());
    }
    if (probs_.size() > 1) {
        double partial = 0.0;
        for (std::size_t s = 0; s + 1 < probs_.size(); ++s) partial += probs_[s];
        probs_.back() = 1.0 - partial;
    }
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (std::size_t s = 0; s < probs_.size(); ++s) {
        acc += probs_[s];
        cumulative_[s] = acc;
    }
    cumulative_.back() = 1.0;
    // every asset must pay something in expectation
    for (std::size_t k = 0; k < payoffs_.size(); ++k) {
        double expected = 0.0;
        for (std::size_t s = 0; s < probs_.size(); ++s) expected += probs_[s] * payoffs_[k][s];
        if (!(expected > 0.0)) {
            throw ValidationError("asset " + std::to_string(k) + " has zero expected payoff");
        }
    }
}

std::vector<double> MarketModel::relative_column(int s) const {
    std::vector<double> col(static_cast<std::size_t>(assets()));
    for (int k = 0; k < assets(); ++k) {
        col[static_cast<std::size_t>(k)] =
            relative_[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
    }
    return col;
}

int MarketModel::relative_rank(double tol) const {
    // Gaussian elimination with partial pivoting on a copy of R
    auto m = relative_;
    const std::size_t rows = m.size();
    const std::size_t cols = m.front().size();
    int rank = 0;
    std::size_t row = 0;
    for (std::size_t col = 0; col < cols && row < rows; ++col) {
        std::size_t pivot = row;
        for (std::size_t i = row + 1; i < rows; ++i) {
            if (std::abs(m[i][col]) > std::abs(m[pivot][col])) pivot = i;
        }
        if (std::abs(m[pivot][col]) <= tol) continue;
        std::swap(m[pivot], m[row]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == row) continue;
            const double f = m[i][col] / m[row][col];
            for (std::size_t j = col; j < cols; ++j) m[i][j] -= f * m[row][j];
        }
        ++row;
        ++rank;
    }
    return rank;
}

MonotoneMap market_map(std::span<const double> relative_row, const Strategy& lambda1,
                       const Strategy& lambda2) {
    return MonotoneMap::market(std::vector<double>(relative_row.begin(), relative_row.end()),
                               std::vector<double>(lambda1.weights().begin(), lambda1.weights().end()),
                               std::vector<double>(lambda2.weights().begin(), lambda2.weights().end()));
}

IFSystem build_market_ifs(const MarketModel& model, const Strategy& lambda1,
                          const Strategy& lambda2) {
    if (lambda1.size() != model.assets() || lambda2.size() != model.assets()) {
        throw ValidationError("strategy dimension does not match the asset count");
    }
    bool identical = true;
    for (int k = 0; identical && k < lambda1.size(); ++k) {
        identical = lambda1[k] == lambda2[k];
    }
    std::vector<MonotoneMap> maps;
    maps.reserve(static_cast<std::size_t>(model.states()));
    for (int s = 0; s < model.states(); ++s) {
        if (identical || model.assets() == 1) {
            // the selection dynamics collapse; keep the identity so the
            // degenerate flag travels with the system
            maps.push_back(MonotoneMap::identity());
        } else {
            maps.push_back(market_map(model.relative_column(s), lambda1, lambda2));
        }
    }
    return IFSystem(std::move(maps),
                    std::vector<double>(model.probabilities().begin(), model.probabilities().end()));
}

Strategy kelly_rule(const MarketModel& model) {
    std::vector<double> weights(static_cast<std::size_t>(model.assets()), 0.0);
    const auto probs = model.probabilities();
    for (int k = 0; k < model.assets(); ++k) {
        double acc = 0.0;
        for (int s = 0; s < model.states(); ++s) {
            acc += probs[static_cast<std::size_t>(s)] *
                   model.relative_matrix()[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
        }
        weights[static_cast<std::size_t>(k)] = acc;
    }
    return Strategy(std::move(weights));
}

KellyCheck generalized_kelly_check(const Strategy& lambda1, const Strategy& lambda2,
                                   std::span<const double> expected_payoffs) {
    if (lambda1.size() != lambda2.size() ||
        static_cast<std::size_t>(lambda1.size()) != expected_payoffs.size()) {
        throw ValidationError("generalized_kelly_check: dimension mismatch");
    }
    KellyCheck check;
    check.termwise_ok = true;
    check.aggregate = 0.0;
    for (int k = 0; k < lambda1.size(); ++k) {
        const double v = expected_payoffs[static_cast<std::size_t>(k)];
        const double lo = std::min(v, lambda2[k]) - 1e-12;
        const double hi = std::max(v, lambda2[k]) + 1e-12;
        check.termwise_ok = check.termwise_ok && lambda1[k] >= lo && lambda1[k] <= hi;
        check.aggregate += (v / lambda1[k]) * (lambda2[k] - lambda1[k]);
    }
    check.aggregate_ok = check.aggregate <= 1e-12;
    if (check.termwise_ok && !check.aggregate_ok) {
        throw ConsistencyError("termwise survival condition held but the aggregate test failed");
    }
    return check;
}

double g_function(const Strategy& lambda1, const Strategy& lambda2,
                  std::span<const double> expected_payoffs, double r) {
    if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("g_function: argument outside [0,1]");
    double acc = 0.0;
    for (int k = 0; k < lambda1.size(); ++k) {
        const double holding = lambda1[k] * r + lambda2[k] * (1.0 - r);
        acc += expected_payoffs[static_cast<std::size_t>(k)] * lambda1[k] / holding;
    }
    return acc;
}

namespace {

MarketPath run_market(const MarketModel& model, const std::vector<Strategy>& strategies,
                      std::span<const double> initial_wealth, std::vector<int> symbols) {
    const int I = static_cast<int>(strategies.size());
    if (I < 2) throw ValidationError("market simulation needs at least two investors");
    if (initial_wealth.size() != strategies.size()) {
        throw ValidationError("initial wealth count does not match investor count");
    }
    for (const auto& strat : strategies) {
        if (strat.size() != model.assets()) {
            throw ValidationError("strategy dimension does not match the asset count");
        }
    }
    double w0 = 0.0;
    for (double w : initial_wealth) {
        if (!(w > 0.0)) throw ValidationError("initial wealth must be strictly positive");
        w0 += w;
    }

    MarketPath path;
    path.symbols = std::move(symbols);
    path.shares.assign(path.symbols.size() + 1,
                       std::vector<double>(static_cast<std::size_t>(I), 0.0));
    {
        auto& r0 = path.shares[0];
        double partial = 0.0;
        for (int i = 0; i + 1 < I; ++i) {
            r0[static_cast<std::size_t>(i)] = initial_wealth[static_cast<std::size_t>(i)] / w0;
            partial += r0[static_cast<std::size_t>(i)];
        }
        r0[static_cast<std::size_t>(I - 1)] = 1.0 - partial;
    }

    const int K = model.assets();
    const auto& relative = model.relative_matrix();
    std::vector<double> denom(static_cast<std::size_t>(K));

    for (std::size_t t = 0; t < path.symbols.size(); ++t) {
        const int s = path.symbols[t];
        if (s < 0 || s >= model.states()) throw ValidationError("state index outside the model");
        const auto& cur = path.shares[t];
        auto& next = path.shares[t + 1];

        for (int k = 0; k < K; ++k) {
            double acc = 0.0;
            for (int i = 0; i < I; ++i) {
                acc += strategies[static_cast<std::size_t>(i)][k] * cur[static_cast<std::size_t>(i)];
            }
            denom[static_cast<std::size_t>(k)] = acc;
            // market clearing: the per-asset holdings must sum to the supply
            double clearing = 0.0;
            for (int i = 0; i < I; ++i) {
                clearing +=
                    (strategies[static_cast<std::size_t>(i)][k] * cur[static_cast<std::size_t>(i)]) /
                    acc;
            }
            if (std::abs(clearing - 1.0) > kClearingTol) {
                std::ostringstream os;
                os << "market clearing drifted to " << clearing << " at step " << t << ", asset "
                   << k;
                throw ConsistencyError(os.str());
            }
        }

        for (int i = 0; i < I; ++i) {
            double acc = 0.0;
            for (int k = 0; k < K; ++k) {
                acc += relative[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)] *
                       ((strategies[static_cast<std::size_t>(i)][k] * cur[static_cast<std::size_t>(i)]) /
                        denom[static_cast<std::size_t>(k)]);
            }
            next[static_cast<std::size_t>(i)] = acc;
        }

        // pin the share sum: the last investor carries the complement
        double partial = 0.0;
        for (int i = 0; i + 1 < I; ++i) partial += next[static_cast<std::size_t>(i)];
        next[static_cast<std::size_t>(I - 1)] = 1.0 - partial;

        // sub-epsilon shares cannot recover; flush them to zero and renormalize
        bool floored = false;
        for (int i = 0; i < I; ++i) {
            if (next[static_cast<std::size_t>(i)] < kShareFloor &&
                next[static_cast<std::size_t>(i)] != 0.0) {
                next[static_cast<std::size_t>(i)] = 0.0;
                floored = true;
            }
        }
        if (floored) {
            double sum = 0.0;
            for (double x : next) sum += x;
            if (!(sum > 0.0)) throw ConsistencyError("all shares vanished in one step");
            for (auto& x : next) x /= sum;
        }
    }
    return path;
}

}  // namespace

MarketPath simulate_market(const MarketModel& model, const std::vector<Strategy>& strategies,
                           std::span<const double> initial_wealth, int steps, std::uint64_t seed,
                           std::uint64_t stream) {
    if (steps < 1) throw ValidationError("market simulation needs at least one step");
    CounterRng rng(seed, stream);
    std::vector<int> symbols(static_cast<std::size_t>(steps));
    for (auto& s : symbols) s = rng.next_symbol(model.cumulative());
    MarketPath path = run_market(model, strategies, initial_wealth, std::move(symbols));
    path.seed = seed;
    path.stream = stream;
    return path;
}

MarketPath simulate_market_with_symbols(const MarketModel& model,
                                        const std::vector<Strategy>& strategies,
                                        std::span<const double> initial_wealth,
                                        std::span<const int> symbols) {
    return run_market(model, strategies, initial_wealth,
                      std::vector<int>(symbols.begin(), symbols.end()));
}

std::vector<double> share_trajectory(const MarketPath& path, int investor) {
    std::vector<double> out;
    out.reserve(path.shares.size());
    for (const auto& row : path.shares) out.push_back(row[static_cast<std::size_t>(investor)]);
    return out;
}

OutcomeGrade grade_outcome(std::span<const double> share_trajectory,
                           const GradeThresholds& thresholds) {
    if (share_trajectory.size() < 2) throw ValidationError("trajectory too short to grade");
    const auto begin = static_cast<std::size_t>(
        thresholds.burn_in_fraction * static_cast<double>(share_trajectory.size()));
    const auto start = std::min(begin, share_trajectory.size() - 1);
    double mn = share_trajectory[start];
    double mx = share_trajectory[start];
    for (std::size_t i = start; i < share_trajectory.size(); ++i) {
        mn = std::min(mn, share_trajectory[i]);
        mx = std::max(mx, share_trajectory[i]);
    }
    OutcomeGrade grade;
    grade.tail_min = mn;
    grade.tail_max = mx;
    if (mn > 1.0 - thresholds.domination) {
        grade.grade = Grade::Domination;
    } else if (mx < thresholds.extinction) {
        grade.grade = Grade::Extinction;
    } else if (mx > thresholds.survival) {
        grade.grade = Grade::Survival;
    } else {
        grade.grade = Grade::Undecided;
    }
    return grade;
}

const char* grade_name(Grade grade) {
    switch (grade) {
        case Grade::Extinction: return "extinction";
        case Grade::Survival: return "survival";
        case Grade::Domination: return "domination";
        case Grade::Undecided: return "undecided";
    }
    return "undecided";
}

}  // namespace srb
