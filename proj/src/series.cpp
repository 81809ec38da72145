#include "ruinlab/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ruinlab/errors.hpp"
#include "ruinlab/numeric.hpp"

namespace ruinlab {

namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("probability must lie in [0, 1], got " + std::to_string(p));
    }
}

void check_lattice(std::int64_t distance, std::int64_t gains) {
    if (distance < 1) {
        throw DomainError("distance must be >= 1, got " + std::to_string(distance));
    }
    if (gains < 0) {
        throw DomainError("gain count must be >= 0, got " + std::to_string(gains));
    }
}

}  // namespace

std::string_view to_string(CoefficientMode mode) {
    return mode == CoefficientMode::paper ? "paper" : "exact";
}

CoefficientMode parse_coefficient_mode(std::string_view text) {
    if (text == "paper") return CoefficientMode::paper;
    if (text == "exact") return CoefficientMode::exact;
    throw DomainError("coefficient mode must be 'paper' or 'exact', got '" + std::string(text) + "'");
}

double log_bigint(const BigInt& value) {
    if (value <= 0) throw DomainError("logarithm of a non-positive integer");
    if (boost::multiprecision::msb(value) < 1000) return std::log(value.convert_to<double>());
    const boost::multiprecision::cpp_bin_float_50 wide(value);
    return static_cast<double>(log(wide));
}

BigInt binomial(std::int64_t n, std::int64_t k) {
    if (k == 0) return 1;
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    BigInt result = 1;
    // Each prefix product is itself C(n-k+i, i), so the division is exact.
    for (std::int64_t i = 1; i <= k; ++i) {
        result *= n - k + i;
        result /= i;
    }
    return result;
}

BigInt multinomial(std::int64_t n, std::span<const std::int64_t> parts) {
    if (n < 0) throw DomainError("multinomial total must be >= 0");
    std::int64_t sum = 0;
    for (auto k : parts) {
        if (k < 0) throw DomainError("multinomial parts must be >= 0");
        sum += k;
    }
    if (sum != n) {
        throw DomainError("multinomial parts sum to " + std::to_string(sum) + ", expected " +
                          std::to_string(n));
    }
    BigInt result = 1;
    std::int64_t placed = 0;
    for (auto k : parts) {
        placed += k;
        result *= binomial(placed, k);
    }
    return result;
}

BigInt paper_coefficient(std::int64_t distance, std::int64_t gains) {
    check_lattice(distance, gains);
    BigInt count = binomial(distance + 2 * gains - 2, gains);
    if (gains >= 2) count -= binomial(2 * gains - 2, gains);
    return count;
}

BigInt exact_coefficient(std::int64_t distance, std::int64_t gains) {
    check_lattice(distance, gains);
    const std::int64_t length = distance + 2 * gains;
    BigInt count = binomial(length, gains) * distance;
    count /= length;
    return count;
}

BigInt coefficient(CoefficientMode mode, std::int64_t distance, std::int64_t gains) {
    return mode == CoefficientMode::paper ? paper_coefficient(distance, gains)
                                          : exact_coefficient(distance, gains);
}

double term_probability(const BigInt& path_count, double p_gain, std::int64_t distance,
                        std::int64_t gains) {
    const double q = 1.0 - p_gain;
    const auto losses = static_cast<double>(distance + gains);
    const auto wins = static_cast<double>(gains);
    if (path_count == 0) return 0.0;
    if (q == 0.0) return 0.0;
    if (gains > 0 && p_gain == 0.0) return 0.0;
    if (distance + 2 * gains <= kLogSpacePathLength) {
        return path_count.convert_to<double>() * std::pow(q, losses) * std::pow(p_gain, wins);
    }
    double log_mass = log_bigint(path_count) + losses * std::log(q);
    if (gains > 0) log_mass += wins * std::log(p_gain);
    return std::exp(log_mass);
}

SeriesReport ruin_series(double p_gain, std::int64_t distance, std::int64_t max_gains,
                         CoefficientMode mode) {
    check_probability(p_gain);
    check_lattice(distance, 0);
    if (max_gains < 0) {
        throw DomainError("max_gains must be >= 0, got " + std::to_string(max_gains));
    }

    SeriesReport report{p_gain, distance, {}, max_gains, std::nullopt, mode};
    report.terms.reserve(static_cast<std::size_t>(max_gains) + 1);
    CompensatedSum total;
    for (std::int64_t n = 0; n <= max_gains; ++n) {
        BigInt count = coefficient(mode, distance, n);
        const double mass = term_probability(count, p_gain, distance, n);
        total += mass;
        report.terms.push_back(SeriesTerm{n, std::move(count), mass, total.value()});
    }

    const double last = report.terms.back().probability;
    const double limit_ratio = 4.0 * p_gain * (1.0 - p_gain);
    double ratio = limit_ratio;
    if (report.terms.size() >= 2) {
        const double previous = report.terms[report.terms.size() - 2].probability;
        if (previous > 0.0) ratio = std::max(ratio, last / previous);
    }
    if (last == 0.0) {
        report.tail_bound = 0.0;
    } else if (ratio < 1.0) {
        report.tail_bound = last * ratio / (1.0 - ratio);
    }
    return report;
}

double approx_arith_geometric(double p_gain, std::int64_t distance) {
    check_probability(p_gain);
    check_lattice(distance, 0);
    const double q = 1.0 - p_gain;
    const double x = q * p_gain * static_cast<double>(distance);
    if (x >= 1.0) {
        throw ValidityError("arithmetic-geometric approximation needs q*p*d < 1, got " +
                            std::to_string(x));
    }
    return std::pow(q, static_cast<double>(distance)) / (1.0 - x);
}

double approx_simplified(double p_gain, std::int64_t distance) {
    check_probability(p_gain);
    check_lattice(distance, 0);
    const double q = 1.0 - p_gain;
    const double x = q * static_cast<double>(distance);
    if (x >= 1.0) {
        throw ValidityError("simplified approximation needs q*d < 1, got " + std::to_string(x));
    }
    return std::pow(q, static_cast<double>(distance)) / (1.0 - x);
}

double paper_final_form(double p_gain, std::int64_t distance) {
    check_probability(p_gain);
    check_lattice(distance, 0);
    const double q = 1.0 - p_gain;
    return std::pow(q, static_cast<double>(distance)) /
           (1.0 / std::pow(p_gain, static_cast<double>(distance)));
}

}  // namespace ruinlab
