#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace ruinlab {

using BigInt = boost::multiprecision::cpp_int;

/// Which path-count rule a series was built with.
enum class CoefficientMode { paper, exact };

std::string_view to_string(CoefficientMode mode);
/// Accepts "paper" or "exact"; throws DomainError otherwise.
CoefficientMode parse_coefficient_mode(std::string_view text);

/// Natural logarithm of a positive arbitrary-precision integer.
double log_bigint(const BigInt& value);

/// C(n, k) by the product formula; zero when k > n.
BigInt binomial(std::int64_t n, std::int64_t k);

/// n! / (k_1! k_2! ... k_m!). Throws DomainError unless the parts sum to n.
BigInt multinomial(std::int64_t n, std::span<const std::int64_t> parts);

/// The shorter closed-form ruin-path count:
///   C(d+2N-2, N)                 for N < 2
///   C(d+2N-2, N) - C(2N-2, N)    for N >= 2
/// It matches the true first-passage count up to N = 2 and overcounts after.
BigInt paper_coefficient(std::int64_t distance, std::int64_t gains);

/// Number of gain/loss sequences of length d+2N whose net loss reaches d for
/// the first time on the last step (ballot count d/(d+2N) * C(d+2N, N)).
BigInt exact_coefficient(std::int64_t distance, std::int64_t gains);

BigInt coefficient(CoefficientMode mode, std::int64_t distance, std::int64_t gains);

struct SeriesTerm {
    std::int64_t n_gains;
    BigInt path_count;
    double probability;
    double cumulative;
};

struct SeriesReport {
    double p_gain;
    std::int64_t distance;
    std::vector<SeriesTerm> terms;
    std::int64_t truncation;
    /// Geometric estimate of the omitted mass; empty when the extrapolated
    /// ratio is >= 1 and the tail cannot be bounded this way.
    std::optional<double> tail_bound;
    CoefficientMode coefficient_mode;

    double cumulative() const { return terms.empty() ? 0.0 : terms.back().cumulative; }
};

/// Above this path length the term probability is assembled in log space.
inline constexpr std::int64_t kLogSpacePathLength = 300;

/// coefficient(d, N) * q^(d+N) * p^N in double precision.
double term_probability(const BigInt& path_count, double p_gain, std::int64_t distance,
                        std::int64_t gains);

/// Partial sums of the ruin series for N = 0..max_gains.
///
/// The tail estimate extrapolates the last term geometrically with ratio
/// max(last observed term ratio, 4pq); 4pq is the limiting ratio of the
/// first-passage terms, so the estimate does not shrink just because the
/// ratio is still climbing toward its limit.
SeriesReport ruin_series(double p_gain, std::int64_t distance, std::int64_t max_gains,
                         CoefficientMode mode);

/// q^d / (1 - q p d). Throws ValidityError when q p d >= 1.
double approx_arith_geometric(double p_gain, std::int64_t distance);

/// q^d / (1 - q d). Throws ValidityError when q d >= 1.
double approx_simplified(double p_gain, std::int64_t distance);

/// q^d / (1 / p^d) read literally, i.e. (q p)^d.
double paper_final_form(double p_gain, std::int64_t distance);

}  // namespace ruinlab
