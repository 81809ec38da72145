#include "ruinlab/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <utility>

#include "ruinlab/errors.hpp"
#include "ruinlab/numeric.hpp"

namespace ruinlab {

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(p));
    }
}

void check_distance(std::int64_t distance) {
    if (distance < 1) {
        throw DomainError("distance must be >= 1, got " + std::to_string(distance));
    }
}

}  // namespace

AbsorptionResult ruin_probability_dp(double p_gain, std::int64_t distance, std::int64_t horizon) {
    check_probability(p_gain);
    check_distance(distance);
    if (horizon < distance) {
        throw DomainError("horizon " + std::to_string(horizon) + " is shorter than distance " +
                          std::to_string(distance) + "; ruin would be impossible");
    }
    const double p = p_gain;
    const double q = 1.0 - p_gain;

    // Index = height above the barrier; index 0 is the absorbing state and
    // always holds zero in the circulating band.
    const auto size = static_cast<std::size_t>(distance + horizon + 3);
    std::vector<double> cur(size, 0.0);
    std::vector<double> next(size, 0.0);
    auto lo = static_cast<std::size_t>(distance);
    auto hi = lo;
    cur[lo] = 1.0;

    std::vector<double> ruin_time(static_cast<std::size_t>(horizon) + 1, 0.0);
    CompensatedSum absorbed;
    CompensatedSum timed;
    CompensatedSum pruned;

    for (std::int64_t t = 1; t <= horizon; ++t) {
        // The update reads two cells beyond each edge of the band.
        cur[lo - 1] = 0.0;
        if (lo >= 2) cur[lo - 2] = 0.0;
        cur[hi + 1] = 0.0;
        cur[hi + 2] = 0.0;
        const double hit = lo == 1 ? q * cur[1] : 0.0;
        const std::size_t new_lo = std::max<std::size_t>(1, lo - 1);
        const std::size_t new_hi = hi + 1;
        const double* src = cur.data();
        double* dst = next.data();
        for (std::size_t h = new_lo; h <= new_hi; ++h) {
            dst[h] = p * src[h - 1] + q * src[h + 1];
        }
        lo = new_lo;
        hi = new_hi;
        while (hi > lo && next[hi] < kPruneThreshold) {
            pruned += next[hi];
            next[hi--] = 0.0;
        }
        while (lo < hi && next[lo] < kPruneThreshold) {
            pruned += next[lo];
            next[lo++] = 0.0;
        }
        std::swap(cur, next);

        ruin_time[static_cast<std::size_t>(t)] = hit;
        absorbed += hit;
        timed += static_cast<double>(t) * hit;
    }

    CompensatedSum alive;
    for (std::size_t h = lo; h <= hi; ++h) alive += cur[h];

    AbsorptionResult result;
    result.p_gain = p_gain;
    result.distance = distance;
    result.horizon = horizon;
    result.ruin_probability_within_horizon = absorbed.value();
    result.pruned_mass = pruned.value();
    result.survival_mass = alive.value() + result.pruned_mass;
    if (absorbed.value() > 0.0) {
        result.expected_time_censored = timed.value() / absorbed.value();
    }
    result.ruin_time_mass = std::move(ruin_time);
    return result;
}

double ruin_probability_closed_form(double p_gain, std::int64_t distance) {
    check_probability(p_gain);
    check_distance(distance);
    if (p_gain <= 0.5) return 1.0;
    if (p_gain == 1.0) return 0.0;
    return std::pow((1.0 - p_gain) / p_gain, static_cast<double>(distance));
}

double expected_time_paper(double p_gain, std::int64_t distance) {
    check_probability(p_gain);
    check_distance(distance);
    if (p_gain == 1.0) throw DomainError("paper time estimator is undefined at p = 1");
    const auto d = static_cast<double>(distance);
    return (1.0 / (1.0 - std::pow(p_gain, d))) * (d - 1.0) + (d - 1.0);
}

std::optional<double> expected_time_classical(double p_gain, std::int64_t distance) {
    check_probability(p_gain);
    check_distance(distance);
    if (p_gain >= 0.5) return std::nullopt;
    return static_cast<double>(distance) / ((1.0 - p_gain) - p_gain);
}

double expected_time_censored_dp(double p_gain, std::int64_t distance, std::int64_t horizon) {
    const auto result = ruin_probability_dp(p_gain, distance, horizon);
    if (!result.expected_time_censored) {
        throw DomainError("no path is ruined within the horizon; censored mean undefined");
    }
    return *result.expected_time_censored;
}

PathEnumeration enumerate_first_passage(std::int64_t distance, std::int64_t gains) {
    check_distance(distance);
    if (gains < 0) throw DomainError("gain count must be >= 0");
    const std::int64_t length = distance + 2 * gains;
    if (length > kMaxEnumerationLength) {
        throw DomainError("enumeration over 2^" + std::to_string(length) + " sequences refused");
    }

    PathEnumeration out{};
    const std::uint64_t total = std::uint64_t{1} << length;
    out.sequences = total;
    // Bit i set means trial i is a gain.
    for (std::uint64_t bits = 0; bits < total; ++bits) {
        if (std::popcount(bits) != gains) continue;
        std::int64_t net_loss = 0;
        std::int64_t hit_at = -1;
        for (std::int64_t i = 0; i < length; ++i) {
            net_loss += ((bits >> i) & 1U) ? -1 : 1;
            if (net_loss == distance) {
                hit_at = i;
                break;
            }
        }
        if (hit_at != length - 1) continue;
        ++out.first_passage;
        const bool last_loss = ((bits >> (length - 1)) & 1U) == 0;
        const bool penultimate_loss = length < 2 || ((bits >> (length - 2)) & 1U) == 0;
        if (last_loss && penultimate_loss) ++out.end_with_two_losses;
        if (gains >= 1) {
            ++out.with_gains;
            const int last_gain = 63 - std::countl_zero(bits);
            if (last_gain < length - 1) ++out.last_gain_before_final;
        }
    }
    return out;
}

}  // namespace ruinlab
