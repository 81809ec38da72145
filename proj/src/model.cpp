#include "ruinlab/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ruinlab/errors.hpp"

namespace ruinlab {

namespace {

void check_loss_level(double loss_level) {
    if (!(loss_level > 0.0 && loss_level < 1.0)) {
        throw DomainError("loss level must lie strictly between 0 and 1, got " +
                          std::to_string(loss_level));
    }
}

void check_loss_factor(double loss_factor) {
    if (!(loss_factor > -1.0 && loss_factor < 0.0)) {
        throw DomainError("loss factor must lie strictly between -1 and 0, got " +
                          std::to_string(loss_factor));
    }
}

}  // namespace

TrialModel::TrialModel(double p_gain, double gain_factor, double loss_factor)
    : p_gain_(p_gain), q_loss_(1.0 - p_gain), gain_factor_(gain_factor), loss_factor_(loss_factor) {
    if (!(p_gain >= 0.0 && p_gain <= 1.0)) {
        throw DomainError("gain probability must lie in [0, 1], got " + std::to_string(p_gain));
    }
    if (!(gain_factor > 0.0) || !std::isfinite(gain_factor)) {
        throw DomainError("gain factor must be positive, got " + std::to_string(gain_factor));
    }
    check_loss_factor(loss_factor);
}

double distance_for_loss_level(double loss_level) {
    check_loss_level(loss_level);
    return std::log(loss_level) / std::log(0.5);
}

double generalized_distance(double loss_level, double loss_factor) {
    check_loss_level(loss_level);
    check_loss_factor(loss_factor);
    return std::log(loss_level) / std::log(1.0 + loss_factor);
}

RuinSpec calibrate(const TrialModel& model, double loss_level) {
    const double exact = generalized_distance(loss_level, model.loss_factor());
    auto distance = static_cast<std::int64_t>(std::ceil(exact - kDistanceSnap));
    if (distance < 1) distance = 1;
    const double implied =
        std::pow(1.0 + model.loss_factor(), static_cast<double>(distance));
    return RuinSpec{loss_level, model.loss_factor(), exact, distance, implied};
}

RuinSpec ruin_at_distance(std::int64_t distance) {
    if (distance < 1) {
        throw DomainError("distance must be a positive integer, got " + std::to_string(distance));
    }
    const double level = std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(distance, 1074)));
    return RuinSpec{level, -0.5, static_cast<double>(distance), distance, level};
}

}  // namespace ruinlab
