#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ruinlab {

/// Ruin statistics of the lattice walk truncated at a finite horizon.
struct AbsorptionResult {
    double p_gain;
    std::int64_t distance;
    std::int64_t horizon;
    double ruin_probability_within_horizon;
    /// Mean ruin step among paths ruined within the horizon; empty when no
    /// path can be ruined (p = 1).
    std::optional<double> expected_time_censored;
    double survival_mass;
    /// Probability mass dropped from the far edges of the lattice band
    /// (cells below kPruneThreshold). It is counted as surviving.
    double pruned_mass;
    /// ruin_time_mass[t] = P(ruin exactly at step t), t = 0..horizon.
    std::vector<double> ruin_time_mass;
};

/// Cells of the forward recursion carrying less mass than this are removed
/// from the active band.
inline constexpr double kPruneThreshold = 1e-30;

/// Forward dynamic program over the net-loss lattice with an absorbing
/// barrier at `distance`. "Within horizon" includes step `horizon`.
/// Throws DomainError when horizon < distance.
AbsorptionResult ruin_probability_dp(double p_gain, std::int64_t distance, std::int64_t horizon);

/// min(1, (q/p)^d); exact 1 at p = 0 and 0 at p = 1.
double ruin_probability_closed_form(double p_gain, std::int64_t distance);

/// [1/(1 - p^d)] (d - 1) + (d - 1). Throws DomainError at p = 1.
double expected_time_paper(double p_gain, std::int64_t distance);

/// d / (q - p) for p < 1/2. Empty (divergent) for p >= 1/2.
std::optional<double> expected_time_classical(double p_gain, std::int64_t distance);

/// Mean ruin time conditioned on ruin within the horizon.
/// Throws DomainError if ruin within the horizon is impossible.
double expected_time_censored_dp(double p_gain, std::int64_t distance, std::int64_t horizon);

/// Exhaustive enumeration of all 2^(d+2N) gain/loss sequences.
struct PathEnumeration {
    std::uint64_t sequences;
    /// Sequences whose net loss first reaches d on the final step.
    std::uint64_t first_passage;
    /// Of those, how many end loss-loss (all of them, when the final-two
    /// trials argument holds; length-1 paths count as satisfying it).
    std::uint64_t end_with_two_losses;
    /// Of those with N >= 1, how many place their last gain before the
    /// final step.
    std::uint64_t last_gain_before_final;
    std::uint64_t with_gains;
};

/// Largest sequence length enumerate_first_passage accepts.
inline constexpr std::int64_t kMaxEnumerationLength = 30;

/// Throws DomainError when d + 2N exceeds kMaxEnumerationLength.
PathEnumeration enumerate_first_passage(std::int64_t distance, std::int64_t gains);

}  // namespace ruinlab
