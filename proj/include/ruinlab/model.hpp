#pragma once

#include <cstdint>

namespace ruinlab {

/// One wager: the bankroll is multiplied by (1 + gain_factor) with
/// probability p_gain, otherwise by (1 + loss_factor).
class TrialModel {
public:
    /// Throws DomainError unless 0 <= p <= 1, gain > 0 and -1 < loss < 0.
    TrialModel(double p_gain, double gain_factor, double loss_factor);

    /// The halving/doubling strategy: +100% / -50%.
    static TrialModel doubling(double p_gain) { return {p_gain, 1.0, -0.5}; }

    double p_gain() const noexcept { return p_gain_; }
    double q_loss() const noexcept { return q_loss_; }
    double gain_factor() const noexcept { return gain_factor_; }
    double loss_factor() const noexcept { return loss_factor_; }

    friend bool operator==(const TrialModel&, const TrialModel&) = default;

private:
    double p_gain_;
    double q_loss_;
    double gain_factor_;
    double loss_factor_;
};

/// Ruin threshold together with its lattice distance.
///
/// `distance_exact` is the real number of consecutive losses that take the
/// bankroll to `loss_level`; `distance` is the integer absorbing barrier used
/// on the lattice and `implied_loss_level` is the bankroll fraction the
/// integer barrier actually corresponds to (never above `loss_level`).
struct RuinSpec {
    double loss_level;
    double loss_factor;
    double distance_exact;
    std::int64_t distance;
    double implied_loss_level;
};

/// Slack subtracted before taking the ceiling so that exact powers of the
/// loss multiplier land on their integer distance.
inline constexpr double kDistanceSnap = 1e-9;

/// log(loss_level) / log(1/2).
double distance_for_loss_level(double loss_level);

/// log(loss_level) / log(1 + loss_factor).
double generalized_distance(double loss_level, double loss_factor);

RuinSpec calibrate(const TrialModel& model, double loss_level);

/// Barrier of exactly `distance` halvings, i.e. loss level (1/2)^distance.
RuinSpec ruin_at_distance(std::int64_t distance);

}  // namespace ruinlab
