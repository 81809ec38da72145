// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../brute_force.hpp"
#include "ruinlab/cli.hpp"
#include "ruinlab/montecarlo.hpp"
#include "ruinlab/oracle.hpp"
#include "ruinlab/philox.hpp"
#include "ruinlab/series.hpp"
#include "ruinlab/transform.hpp"

using namespace ruinlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " AC" << id << ": " << detail << std::endl;
}

struct CliOutput {
    int code;
    std::string out;
};

CliOutput run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str()};
}

bool parity_holds(const SimResult& r, std::int64_t d, std::uint64_t& checked) {
    for (const auto& [t, n] : r.time_histogram) {
        checked += n;
        if (((t - d) % 2 + 2) % 2 != 0) return false;
    }
    return true;
}

void ac1() {
    const std::vector<std::string> args{"calibrate", "--loss-level", "0.25", "--format", "json"};
    const auto start = Clock::now();
    const auto r = run_cli(args);
    const double elapsed = seconds_since(start);
    std::int64_t distance = -1;
    if (r.code == 0) distance = Json::parse(r.out)["result"]["ruin"]["distance"].get<std::int64_t>();
    const bool ok = r.code == 0 && distance == 2 && elapsed < 1e-3;
    report(1, ok,
           fmt::format("calibrate --loss-level 0.25 -> distance {} in {:.3f} ms", distance,
                       elapsed * 1e3));
}

void ac2() {
    const auto start = Clock::now();
    bool agree = true;
    int cells = 0;
    for (int d = 1; d <= 6; ++d) {
        for (int n = 0; n <= 2; ++n) {
            const BigInt brute = ruinlab::testing::count_first_passage(d, n);
            const BigInt paper = paper_coefficient(d, n);
            const BigInt exact = exact_coefficient(d, n);
            agree = agree && paper == exact && exact == brute;
            ++cells;
        }
    }
    const double elapsed = seconds_since(start);
    report(2, agree && elapsed < 1.0,
           fmt::format("{} cells d=1..6, N=0..2: paper = exact = enumeration {} in {:.3f} s", cells,
                       agree ? "holds" : "VIOLATED", elapsed));
}

void ac3() {
    const BigInt paper = paper_coefficient(2, 3);
    const BigInt exact = exact_coefficient(2, 3);
    const auto brute = ruinlab::testing::count_first_passage(2, 3);
    const auto json = run_cli({"coefficients", "--distance", "2", "--max-gains", "3", "--format", "json"});
    const auto human = run_cli({"coefficients", "--distance", "2", "--max-gains", "3"});
    bool shown = json.code == 0 && human.code == 0;
    if (shown) {
        const auto row = Json::parse(json.out)["result"]["rows"][3];
        shown = row["paper"] == "16" && row["exact"] == "14" && row["brute_force"] == "14";
        // Human table row for N=3 carries both counts.
        std::istringstream in(human.out);
        bool line_found = false;
        for (std::string line; std::getline(in, line);) {
            if (line.find("16") != std::string::npos && line.find("14") != std::string::npos &&
                line.find("differs") != std::string::npos) {
                line_found = true;
            }
        }
        shown = shown && line_found;
    }
    const bool ok = paper == 16 && exact == 14 && brute == 14 && shown;
    report(3, ok,
           fmt::format("d=2 N=3: paper {}, exact {}, enumeration {}; coefficients report shows both: {}",
                       paper.str(), exact.str(), brute, shown ? "yes" : "no"));
}

void ac4() {
    const auto start = Clock::now();
    const double classical = std::pow(0.4 / 0.6, 3);
    const double series = ruin_series(0.6, 3, 200, CoefficientMode::exact).cumulative();
    const double dp = ruin_probability_dp(0.6, 3, 4000).ruin_probability_within_horizon;
    const double elapsed = seconds_since(start);
    const bool ok = std::abs(series - classical) <= 1e-6 && std::abs(dp - classical) <= 1e-6 &&
                    elapsed < 5.0;
    report(4, ok,
           fmt::format("p=0.6 d=3: series(N<=200) {:.9f}, dp(H=4000) {:.9f}, (q/p)^3 {:.9f}; "
                       "|dev| {:.2e} / {:.2e} in {:.3f} s",
                       series, dp, classical, std::abs(series - classical),
                       std::abs(dp - classical), elapsed));
}

void ac5() {
    const auto start = Clock::now();
    const auto r = ruin_probability_dp(0.5, 2, 1'000'000);
    const double elapsed = seconds_since(start);
    const bool ok = r.ruin_probability_within_horizon >= 0.998 && elapsed < 30.0;
    report(5, ok,
           fmt::format("p=0.5 d=2 H=1e6: ruin {:.6f} (survival {:.3e}) in {:.2f} s",
                       r.ruin_probability_within_horizon, r.survival_mass, elapsed));
}

SimResult ac6() {
    const double classical = std::pow(0.4 / 0.6, 3);
    SimConfig config{TrialModel::doubling(0.6), ruin_at_distance(3),
                     SimBudget{1'000'000, 100'000, 20240601, 1, StepMode::bulk}};
    auto start = Clock::now();
    const auto one = simulate(config);
    const double t1 = seconds_since(start);
    config.budget.workers = 8;
    start = Clock::now();
    const auto eight = simulate(config);
    const double t8 = seconds_since(start);

    const bool identical = one.ruined == eight.ruined && one.censored == eight.censored &&
                           one.ruin_frequency == eight.ruin_frequency &&
                           one.standard_error == eight.standard_error &&
                           one.mean_time_to_ruin == eight.mean_time_to_ruin &&
                           one.time_histogram == eight.time_histogram;
    const double z = (one.ruin_frequency - classical) / one.standard_error;
    const bool ok = std::abs(z) <= 4.0 && identical && t1 < 60.0 && t8 < 60.0;
    report(6, ok,
           fmt::format("p=0.6 d=3 1e6 trials seed {}: freq {:.6f} +/- {:.6f} ({:+.2f} SE); "
                       "1 vs 8 workers identical: {}; {:.2f} s / {:.2f} s",
                       config.budget.seed, one.ruin_frequency, one.standard_error, z,
                       identical ? "yes" : "no", t1, t8));
    return one;
}

void ac7() {
    const SimBudget budget{1'000'000, 100'000, 7, 1, StepMode::bulk};
    const auto cmp = compare_methods(0.4, 3, budget);
    std::optional<double> mc;
    std::optional<double> mc_se;
    std::optional<double> paper;
    for (const auto& row : cmp.expected_time) {
        if (row.method == "monte_carlo_censored_mean") {
            mc = row.value;
            mc_se = row.standard_error;
        }
        if (row.method == "expected_time_paper") paper = row.value;
    }
    const bool ok = mc && mc_se && paper && std::abs(*mc - 15.0) <= 3.0 * *mc_se;
    report(7, ok,
           fmt::format("p=0.4 d=3 1e6 trials: censored mean {:.4f} +/- {:.4f} vs d/(q-p) = 15 "
                       "({:+.2f} SE); expected_time_paper = {:.4f} (shown, not asserted)",
                       mc.value_or(NAN), mc_se.value_or(NAN),
                       mc && mc_se ? (*mc - 15.0) / *mc_se : NAN, paper.value_or(NAN)));
}

void ac8() {
    const TrialModel model(0.5, 0.75, -0.75);
    const auto r = rebalance(model, 0.75, -0.25);
    const double mean_after = model_mean(r.adjusted_model());
    const double drift = std::abs(mean_after - model_mean(model));
    const bool ok = r.p_loss_adjusted == 0.75 && drift <= 1e-12;
    report(8, ok,
           fmt::format("p=0.5 +0.75/-0.75 -> +0.75/-0.25: p_loss_adjusted {} ; |mean drift| {:.1e}",
                       format_double(r.p_loss_adjusted), drift));
}

void ac9() {
    const TrialModel model = TrialModel::doubling(0.5);
    const double loss_level = 0.25;
    const RuinSpec ruin = calibrate(model, loss_level);
    const auto start = Clock::now();
    std::uint64_t matched = 0;
    std::uint64_t ruined = 0;
    constexpr std::uint64_t kPairs = 10'000;
    for (std::uint64_t i = 0; i < kPairs; ++i) {
        TrialStream lattice_bits(4242, i);
        TrialStream bankroll_bits(4242, i);
        const auto a = lattice_ruin_step(model.p_gain(), ruin.distance, 100'000, lattice_bits,
                                         StepMode::per_step);
        const auto b = bankroll_ruin_step(model, loss_level, 100'000, bankroll_bits);
        if (a == b) ++matched;
        if (a) ++ruined;
    }
    const double elapsed = seconds_since(start);
    const bool ok = matched == kPairs && elapsed < 5.0;
    report(9, ok,
           fmt::format("{} paired trials at loss_factor -0.5, loss_level 0.25 (d={}): {} identical "
                       "ruin steps ({} ruined) in {:.3f} s",
                       kPairs, ruin.distance, matched, ruined, elapsed));
}

void ac10(const SimResult& mc) {
    std::uint64_t checked = 0;
    bool ok = parity_holds(mc, 3, checked);
    struct Cell {
        double p;
        std::int64_t d;
    };
    for (auto mode : {StepMode::bulk, StepMode::per_step}) {
        for (const Cell cell : {Cell{0.3, 1}, Cell{0.5, 2}, Cell{0.5, 7}, Cell{0.55, 40}}) {
            const SimConfig config{TrialModel::doubling(cell.p), ruin_at_distance(cell.d),
                                   SimBudget{50'000, 20'000, 99, 2, mode}};
            ok = parity_holds(simulate(config), cell.d, checked) && ok;
        }
    }
    report(10, ok && checked > 0,
           fmt::format("{} recorded ruin times across 9 runs, all t = d (mod 2): {}", checked,
                       ok ? "yes" : "no"));
}

}  // namespace

int main() {
    ac1();
    ac2();
    ac3();
    ac4();
    ac5();
    const SimResult mc = ac6();
    ac7();
    ac8();
    ac9();
    ac10(mc);
    std::cout << (failures == 0 ? "all acceptance criteria pass"
                                : fmt::format("{} acceptance criteria FAILED", failures))
              << std::endl;
    return failures == 0 ? 0 : 1;
}
