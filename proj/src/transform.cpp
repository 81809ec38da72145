#include "ruinlab/transform.hpp"

#include <cmath>
#include <string>

#include "ruinlab/errors.hpp"

namespace ruinlab {

double model_mean(const TrialModel& model) {
    return model.p_gain() * model.gain_factor() + model.q_loss() * model.loss_factor();
}

TransformResult rebalance_mean(double matched_mean, double target_gain_factor,
                               double target_loss_factor) {
    if (!(target_gain_factor > 0.0) || !std::isfinite(target_gain_factor)) {
        throw DomainError("target gain factor must be positive, got " +
                          std::to_string(target_gain_factor));
    }
    if (!(target_loss_factor > -1.0 && target_loss_factor < 0.0)) {
        throw DomainError("target loss factor must lie strictly between -1 and 0, got " +
                          std::to_string(target_loss_factor));
    }
    if (!std::isfinite(matched_mean)) throw DomainError("mean to preserve must be finite");
    if (!(matched_mean > target_loss_factor && matched_mean < target_gain_factor)) {
        throw InfeasibleError("mean " + std::to_string(matched_mean) +
                              " is not strictly between the target legs " +
                              std::to_string(target_loss_factor) + " and " +
                              std::to_string(target_gain_factor));
    }
    const double p_loss =
        (target_gain_factor - matched_mean) / (target_gain_factor - target_loss_factor);
    return TransformResult{std::nullopt,  target_gain_factor, target_loss_factor,
                           matched_mean,  p_loss,             1.0 - p_loss};
}

TransformResult rebalance(const TrialModel& model, double target_gain_factor,
                          double target_loss_factor) {
    auto result = rebalance_mean(model_mean(model), target_gain_factor, target_loss_factor);
    result.original = model;
    return result;
}

RebalancedRuinInputs rebalanced_ruin_inputs(const TransformResult& result, double loss_level) {
    RebalancedRuinInputs out{result.p_gain_adjusted,
                             calibrate(result.adjusted_model(), loss_level), {}};
    if (out.p_gain_adjusted < 0.5) out.warnings.emplace_back(kWarnGainBelowHalf);
    if (out.ruin.distance < kSmallDistance) out.warnings.emplace_back(kWarnSmallDistance);
    return out;
}

}  // namespace ruinlab
