#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ruinlab/model.hpp"
#include "ruinlab/philox.hpp"

namespace ruinlab {

/// How the lattice walker consumes randomness.
///
/// per_step draws one uniform per trial. bulk does the same near the
/// barrier, but once the walker is h > kBulkMinHeight steps away it advances
/// h - 1 steps at once by drawing the number of gains from Binomial(h - 1, p);
/// no ruin is possible inside such a block, so the ruin-time law is unchanged.
enum class StepMode { per_step, bulk };

inline constexpr std::int64_t kBulkMinHeight = 32;

std::string_view to_string(StepMode mode);
StepMode parse_step_mode(std::string_view text);

/// Trial count, horizon and seed shared by every stochastic command.
struct SimBudget {
    std::uint64_t trials = 100'000;
    std::int64_t max_steps = 100'000;
    std::uint64_t seed = 0;
    /// Advisory; results do not depend on it.
    unsigned workers = 1;
    StepMode step_mode = StepMode::bulk;
};

struct SimConfig {
    TrialModel model;
    RuinSpec ruin;
    SimBudget budget;
};

struct SimResult {
    std::uint64_t trials;
    std::uint64_t ruined;
    std::uint64_t censored;
    double ruin_frequency;
    /// Binomial standard error of ruin_frequency.
    double standard_error;
    /// Normal-approximation 95% interval on the ruin probability, clipped to [0, 1].
    double ci_low;
    double ci_high;
    /// Mean ruin step among ruined trials (censored mean), with its standard
    /// error; empty when nothing was ruined.
    std::optional<double> mean_time_to_ruin;
    std::optional<double> mean_time_stderr;
    std::map<std::int64_t, std::uint64_t> time_histogram;
    std::uint64_t seed_echo;
    std::int64_t distance;
};

/// Called with (trials completed, total trials); may be invoked from worker
/// threads but never concurrently.
using ProgressFn = std::function<void(std::uint64_t, std::uint64_t)>;

/// Throws DomainError when trials == 0, workers == 0 or max_steps < distance.
void validate(const SimConfig& config);

/// Ruin step of a single lattice walk starting `distance` above the
/// barrier, or empty if still alive after `max_steps`.
std::optional<std::int64_t> lattice_ruin_step(double p_gain, std::int64_t distance,
                                              std::int64_t max_steps, TrialStream& stream,
                                              StepMode mode);

/// The same trial on the bankroll scale: multiply by (1 + gain_factor) or
/// (1 + loss_factor) per trial and stop once bankroll <= loss_level. One
/// uniform per trial, so it pairs with StepMode::per_step draw for draw.
std::optional<std::int64_t> bankroll_ruin_step(const TrialModel& model, double loss_level,
                                               std::int64_t max_steps, TrialStream& stream);

SimResult simulate(const SimConfig& config, const ProgressFn& progress = {});

/// One estimate in a method comparison.
struct MethodRow {
    std::string method;
    std::optional<double> value;
    bool valid;
    /// |value - reference|, when both exist.
    std::optional<double> deviation;
    std::optional<double> standard_error;
    std::string note;
};

struct MethodComparison {
    double p_gain;
    std::int64_t distance;
    std::int64_t max_gains;
    std::int64_t dp_horizon;
    SimBudget budget;
    std::vector<MethodRow> ruin_probability;
    std::vector<MethodRow> expected_time;
};

struct CompareOptions {
    std::int64_t max_gains = 200;
    /// DP horizon; 0 means use budget.max_steps so DP and simulation censor
    /// at the same step.
    std::int64_t dp_horizon = 0;
};

/// Aligns the series (both coefficient rules), the three closed-form
/// approximations, the classical limit, the DP and Monte Carlo for the
/// halving/doubling lattice at distance d. Deviations are measured against
/// the DP rows.
MethodComparison compare_methods(double p_gain, std::int64_t distance, const SimBudget& budget,
                                 const CompareOptions& options = {},
                                 const ProgressFn& progress = {});

}  // namespace ruinlab
