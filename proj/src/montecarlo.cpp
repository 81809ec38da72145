#include "ruinlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include <boost/random/binomial_distribution.hpp>

#include "ruinlab/errors.hpp"
#include "ruinlab/numeric.hpp"
#include "ruinlab/oracle.hpp"
#include "ruinlab/series.hpp"

namespace ruinlab {

std::string_view to_string(StepMode mode) {
    return mode == StepMode::bulk ? "bulk" : "per-step";
}

StepMode parse_step_mode(std::string_view text) {
    if (text == "bulk") return StepMode::bulk;
    if (text == "per-step") return StepMode::per_step;
    throw DomainError("step mode must be 'bulk' or 'per-step', got '" + std::string(text) + "'");
}

void validate(const SimConfig& config) {
    if (config.budget.trials == 0) throw DomainError("trials must be >= 1");
    if (config.budget.workers == 0) throw DomainError("workers must be >= 1");
    if (config.ruin.distance < 1) throw DomainError("distance must be >= 1");
    if (config.budget.max_steps < config.ruin.distance) {
        throw DomainError("max_steps " + std::to_string(config.budget.max_steps) +
                          " is shorter than distance " + std::to_string(config.ruin.distance));
    }
}

std::optional<std::int64_t> lattice_ruin_step(double p_gain, std::int64_t distance,
                                              std::int64_t max_steps, TrialStream& stream,
                                              StepMode mode) {
    std::int64_t height = distance;
    std::int64_t step = 0;
    while (step < max_steps) {
        if (mode == StepMode::bulk && height > kBulkMinHeight) {
            const std::int64_t block = std::min(height - 1, max_steps - step);
            std::int64_t gains = 0;
            if (p_gain >= 1.0) {
                gains = block;
            } else if (p_gain > 0.0) {
                boost::random::binomial_distribution<std::int64_t, double> draw(block, p_gain);
                gains = draw(stream);
            }
            height += 2 * gains - block;
            step += block;
            continue;
        }
        height += stream.uniform() < p_gain ? 1 : -1;
        ++step;
        if (height == 0) return step;
    }
    return std::nullopt;
}

std::optional<std::int64_t> bankroll_ruin_step(const TrialModel& model, double loss_level,
                                               std::int64_t max_steps, TrialStream& stream) {
    const double up = 1.0 + model.gain_factor();
    const double down = 1.0 + model.loss_factor();
    double bankroll = 1.0;
    for (std::int64_t step = 1; step <= max_steps; ++step) {
        bankroll *= stream.uniform() < model.p_gain() ? up : down;
        if (bankroll <= loss_level) return step;
    }
    return std::nullopt;
}

namespace {

struct Partial {
    std::uint64_t ruined = 0;
    std::map<std::int64_t, std::uint64_t> histogram;
};

constexpr std::uint64_t kProgressStride = 1U << 16;

}  // namespace

SimResult simulate(const SimConfig& config, const ProgressFn& progress) {
    validate(config);
    const auto& budget = config.budget;
    const double p = config.model.p_gain();
    const std::int64_t distance = config.ruin.distance;
    const std::uint64_t trials = budget.trials;
    const auto workers = static_cast<unsigned>(
        std::min<std::uint64_t>(budget.workers, trials));

    std::mutex progress_mutex;
    std::uint64_t completed = 0;
    auto report = [&](std::uint64_t n) {
        if (!progress) return;
        std::lock_guard lock(progress_mutex);
        completed += n;
        progress(completed, trials);
    };

    std::vector<Partial> partials(workers);
    auto run_range = [&](unsigned worker, std::uint64_t begin, std::uint64_t end) {
        Partial& out = partials[worker];
        std::uint64_t since_report = 0;
        for (std::uint64_t i = begin; i < end; ++i) {
            TrialStream stream(budget.seed, i);
            if (auto t = lattice_ruin_step(p, distance, budget.max_steps, stream, budget.step_mode)) {
                ++out.ruined;
                ++out.histogram[*t];
            }
            if (++since_report == kProgressStride) {
                report(since_report);
                since_report = 0;
            }
        }
        if (since_report > 0) report(since_report);
    };

    const std::uint64_t chunk = trials / workers;
    const std::uint64_t extra = trials % workers;
    if (workers == 1) {
        run_range(0, 0, trials);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        std::uint64_t begin = 0;
        for (unsigned w = 0; w < workers; ++w) {
            const std::uint64_t end = begin + chunk + (w < extra ? 1 : 0);
            pool.emplace_back(run_range, w, begin, end);
            begin = end;
        }
    }

    SimResult result{};
    result.trials = trials;
    result.seed_echo = budget.seed;
    result.distance = distance;
    for (auto& part : partials) {
        result.ruined += part.ruined;
        for (const auto& [step, count] : part.histogram) result.time_histogram[step] += count;
    }
    result.censored = trials - result.ruined;

    const auto n = static_cast<double>(trials);
    result.ruin_frequency = static_cast<double>(result.ruined) / n;
    result.standard_error =
        std::sqrt(result.ruin_frequency * (1.0 - result.ruin_frequency) / n);
    result.ci_low = std::max(0.0, result.ruin_frequency - 1.96 * result.standard_error);
    result.ci_high = std::min(1.0, result.ruin_frequency + 1.96 * result.standard_error);

    if (result.ruined > 0) {
        long double total = 0.0L;
        for (const auto& [step, count] : result.time_histogram) {
            total += static_cast<long double>(step) * static_cast<long double>(count);
        }
        const auto ruined = static_cast<double>(result.ruined);
        const auto mean = static_cast<double>(total / static_cast<long double>(result.ruined));
        result.mean_time_to_ruin = mean;
        CompensatedSum squares;
        for (const auto& [step, count] : result.time_histogram) {
            const double dev = static_cast<double>(step) - mean;
            squares += dev * dev * static_cast<double>(count);
        }
        const double variance = result.ruined > 1 ? squares.value() / (ruined - 1.0) : 0.0;
        result.mean_time_stderr = std::sqrt(variance / ruined);
    }
    return result;
}

namespace {

MethodRow make_row(std::string method, std::optional<double> value, std::string note = {}) {
    return MethodRow{std::move(method), value, value.has_value(), std::nullopt, std::nullopt,
                     std::move(note)};
}

template <class F>
MethodRow guarded_row(std::string method, F&& eval) {
    try {
        return make_row(std::move(method), eval());
    } catch (const ValidityError& e) {
        return MethodRow{std::move(method), std::nullopt, false, std::nullopt, std::nullopt,
                         std::string("outside validity: ") + e.what()};
    } catch (const DomainError& e) {
        return MethodRow{std::move(method), std::nullopt, false, std::nullopt, std::nullopt,
                         std::string("undefined: ") + e.what()};
    }
}

void fill_deviation(std::vector<MethodRow>& rows, std::optional<double> reference) {
    if (!reference) return;
    for (auto& row : rows) {
        if (row.value) row.deviation = std::abs(*row.value - *reference);
    }
}

}  // namespace

MethodComparison compare_methods(double p_gain, std::int64_t distance, const SimBudget& budget,
                                 const CompareOptions& options, const ProgressFn& progress) {
    const SimConfig config{TrialModel::doubling(p_gain), ruin_at_distance(distance), budget};
    validate(config);
    const std::int64_t horizon = options.dp_horizon > 0 ? options.dp_horizon : budget.max_steps;

    MethodComparison out{p_gain, distance, options.max_gains, horizon, budget, {}, {}};

    const auto exact = ruin_series(p_gain, distance, options.max_gains, CoefficientMode::exact);
    const auto paper = ruin_series(p_gain, distance, options.max_gains, CoefficientMode::paper);
    const auto dp = ruin_probability_dp(p_gain, distance, horizon);
    const auto sim = simulate(config, progress);

    auto& prob = out.ruin_probability;
    prob.push_back(make_row("series_exact", exact.cumulative(),
                            "first-passage counts, N <= " + std::to_string(options.max_gains)));
    prob.push_back(make_row("series_paper", paper.cumulative(),
                            "paper-mode counts, N <= " + std::to_string(options.max_gains)));
    prob.push_back(guarded_row("approx_arith_geometric",
                               [&] { return approx_arith_geometric(p_gain, distance); }));
    prob.push_back(guarded_row("approx_simplified",
                               [&] { return approx_simplified(p_gain, distance); }));
    prob.push_back(make_row("paper_final_form", paper_final_form(p_gain, distance),
                            "(q*p)^d, literal reading"));
    prob.push_back(make_row("classical_closed_form",
                            ruin_probability_closed_form(p_gain, distance), "min(1, (q/p)^d)"));
    prob.push_back(make_row("dp", dp.ruin_probability_within_horizon,
                            "reference, horizon " + std::to_string(horizon)));
    MethodRow mc = make_row("monte_carlo", sim.ruin_frequency,
                            std::to_string(sim.trials) + " trials, seed " +
                                std::to_string(sim.seed_echo));
    mc.standard_error = sim.standard_error;
    prob.push_back(std::move(mc));
    fill_deviation(prob, dp.ruin_probability_within_horizon);

    auto& time = out.expected_time;
    time.push_back(guarded_row("expected_time_paper",
                               [&] { return expected_time_paper(p_gain, distance); }));
    {
        auto classical = expected_time_classical(p_gain, distance);
        time.push_back(make_row("expected_time_classical", classical,
                                classical ? "d/(q-p)" : "divergent for p >= 1/2"));
    }
    time.push_back(make_row("dp_censored_mean", dp.expected_time_censored,
                            dp.expected_time_censored ? "reference, conditional on ruin"
                                                      : "no ruin within horizon"));
    MethodRow mc_time = make_row("monte_carlo_censored_mean", sim.mean_time_to_ruin,
                                 "conditional on ruin within max_steps");
    mc_time.standard_error = sim.mean_time_stderr;
    time.push_back(std::move(mc_time));
    fill_deviation(time, dp.expected_time_censored);
    return out;
}

}  // namespace ruinlab
