#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "srb/orbit_engine.hpp"

namespace srb {

// A simple, completely mixed investment proportion vector: all weights
// strictly positive, summing to one.
class Strategy {
public:
    explicit Strategy(std::vector<double> weights);

    std::span<const double> weights() const { return weights_; }
    double operator[](int k) const { return weights_[static_cast<std::size_t>(k)]; }
    int size() const { return static_cast<int>(weights_.size()); }

private:
    std::vector<double> weights_;
};

// Column-normalizes the payoff matrix D[k][s]: R[k][s] = D[k][s] / sum_m D[m][s],
// with the last row adjusted so every column sums to exactly 1. A zero payoff
// column is a validation error.
std::vector<std::vector<double>> relative_payoffs(const std::vector<std::vector<double>>& payoffs);

// K short-lived assets paying D[k][s] >= 0 per unit in state s, with strictly
// positive state probabilities. Relative payoffs are derived at construction.
class MarketModel {
public:
    MarketModel(std::vector<std::vector<double>> payoffs, std::vector<double> probabilities);

    int assets() const { return static_cast<int>(payoffs_.size()); }
    int states() const { return static_cast<int>(probs_.size()); }
    const std::vector<std::vector<double>>& payoff_matrix() const { return payoffs_; }
    const std::vector<std::vector<double>>& relative_matrix() const { return relative_; }
    std::span<const double> probabilities() const { return probs_; }
    std::span<const double> cumulative() const { return cumulative_; }
    std::vector<double> relative_column(int s) const;

    // Numerical rank of the relative payoff matrix; rank == assets() means no
    // redundant assets. Diagnostic only, never enforced.
    int relative_rank(double tol = 1e-9) const;

private:
    std::vector<std::vector<double>> payoffs_;
    std::vector<std::vector<double>> relative_;
    std::vector<double> probs_;
    std::vector<double> cumulative_;
};

// The one-dimensional market selection map for one state row: investor 1's
// next share as a function of the current share. Fixes both endpoints and is
// strictly increasing for completely mixed strategy pairs.
MonotoneMap market_map(std::span<const double> relative_row, const Strategy& lambda1,
                       const Strategy& lambda2);

// One market map per state, paired with the state probabilities. Equal
// strategies or a single asset collapse every map to the identity; the
// resulting system carries the degenerate flag and is refused by
// classification (but can still be simulated).
IFSystem build_market_ifs(const MarketModel& model, const Strategy& lambda1,
                          const Strategy& lambda2);

// Betting the beliefs: invest proportionally to expected relative payoffs.
Strategy kelly_rule(const MarketModel& model);

struct KellyCheck {
    bool termwise_ok = false;   // every lambda1_k between v_k and lambda2_k
    bool aggregate_ok = false;  // sum_k (v_k / lambda1_k)(lambda2_k - lambda1_k) <= 0
    double aggregate = 0.0;     // the value of that sum
};

// The survival test for investor 1 against expected relative payoffs v.
// termwise_ok implies aggregate_ok; the implication is verified.
KellyCheck generalized_kelly_check(const Strategy& lambda1, const Strategy& lambda2,
                                   std::span<const double> expected_payoffs);

// G(r) = sum_k v_k lambda1_k / (lambda1_k r + lambda2_k (1-r)). Diagnostic
// for the survival argument: G(1) = 1 and G is convex; G >= 1 on [0,1] when
// the aggregate condition holds.
double g_function(const Strategy& lambda1, const Strategy& lambda2,
                  std::span<const double> expected_payoffs, double r);

struct MarketPath {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<int> symbols;                 // symbols[t] produced shares[t+1]
    std::vector<std::vector<double>> shares;  // shares[t][i], t = 0..T
};

// Iterates the general multi-investor share dynamics with i.i.d. states drawn
// from the model probabilities. Market clearing is verified every step; for
// two investors the leader's trajectory reproduces the one-dimensional map
// iteration bit for bit under the same symbol stream.
MarketPath simulate_market(const MarketModel& model, const std::vector<Strategy>& strategies,
                           std::span<const double> initial_wealth, int steps, std::uint64_t seed,
                           std::uint64_t stream = 0);

MarketPath simulate_market_with_symbols(const MarketModel& model,
                                        const std::vector<Strategy>& strategies,
                                        std::span<const double> initial_wealth,
                                        std::span<const int> symbols);

std::vector<double> share_trajectory(const MarketPath& path, int investor);

enum class Grade { Extinction, Survival, Domination, Undecided };

struct GradeThresholds {
    double extinction = 1e-6;  // tail max below this
    double domination = 1e-6;  // tail min above 1 minus this
    double survival = 1e-3;    // tail max above this
    double burn_in_fraction = 0.5;
};

struct OutcomeGrade {
    Grade grade = Grade::Undecided;
    double tail_min = 0.0;
    double tail_max = 0.0;
};

OutcomeGrade grade_outcome(std::span<const double> share_trajectory,
                           const GradeThresholds& thresholds = {});

const char* grade_name(Grade grade);

}  // namespace srb
