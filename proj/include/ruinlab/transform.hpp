#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ruinlab/model.hpp"

namespace ruinlab {

/// Gain/loss probabilities re-weighted onto new legs so that the per-trial
/// expected arithmetic return is unchanged.
struct TransformResult {
    /// Empty when the rebalance was driven by a bare mean.
    std::optional<TrialModel> original;
    double target_gain_factor;
    double target_loss_factor;
    double matched_mean;
    double p_loss_adjusted;
    double p_gain_adjusted;

    TrialModel adjusted_model() const {
        return {p_gain_adjusted, target_gain_factor, target_loss_factor};
    }
};

/// p * gain_factor + q * loss_factor.
double model_mean(const TrialModel& model);

/// Throws DomainError for invalid target legs and InfeasibleError when the
/// mean is not strictly between the target loss and gain factors.
TransformResult rebalance(const TrialModel& model, double target_gain_factor,
                          double target_loss_factor);

/// Same solve, starting from the mean to preserve instead of a model.
TransformResult rebalance_mean(double matched_mean, double target_gain_factor,
                               double target_loss_factor);

inline constexpr const char* kWarnGainBelowHalf = "adjusted_gain_below_half";
inline constexpr const char* kWarnSmallDistance = "small_distance";

/// Integer distances below this draw the small-distance warning.
inline constexpr std::int64_t kSmallDistance = 5;

struct RebalancedRuinInputs {
    double p_gain_adjusted;
    RuinSpec ruin;
    std::vector<std::string> warnings;
};

/// Pairs the adjusted gain probability with the ruin distance measured in
/// the target loss leg, flagging the two interpretation hazards.
RebalancedRuinInputs rebalanced_ruin_inputs(const TransformResult& result, double loss_level);

}  // namespace ruinlab
