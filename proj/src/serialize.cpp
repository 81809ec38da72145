#include "ruinlab/serialize.hpp"

#include <locale>
#include <ostream>
#include <string>

#include <fmt/format.h>

namespace ruinlab {

namespace {

Json optional_number(const std::optional<double>& value) {
    return value ? Json(*value) : Json(nullptr);
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

/// Pins the classic locale on a stream for the guard's lifetime.
class ClassicLocale {
public:
    explicit ClassicLocale(std::ostream& out) : out_(out), saved_(out.imbue(std::locale::classic())) {}
    ~ClassicLocale() { out_.imbue(saved_); }
    ClassicLocale(const ClassicLocale&) = delete;
    ClassicLocale& operator=(const ClassicLocale&) = delete;

private:
    std::ostream& out_;
    std::locale saved_;
};

std::string csv_optional(const std::optional<double>& value) {
    return value ? format_double(*value) : std::string{};
}

}  // namespace

std::string format_double(double value) { return fmt::format("{}", value); }

Json to_json(const TrialModel& model) {
    return Json{{"p_gain", model.p_gain()},
                {"q_loss", model.q_loss()},
                {"gain_factor", model.gain_factor()},
                {"loss_factor", model.loss_factor()}};
}

Json to_json(const RuinSpec& ruin) {
    return Json{{"loss_level", ruin.loss_level},
                {"loss_factor", ruin.loss_factor},
                {"distance_exact", ruin.distance_exact},
                {"distance", ruin.distance},
                {"implied_loss_level", ruin.implied_loss_level}};
}

Json to_json(const SeriesReport& report) {
    Json terms = Json::array();
    for (const auto& term : report.terms) {
        terms.push_back(Json{{"n_gains", term.n_gains},
                             {"path_count", term.path_count.str()},
                             {"probability", term.probability},
                             {"cumulative", term.cumulative}});
    }
    return Json{{"p_gain", report.p_gain},
                {"distance", report.distance},
                {"coefficient_mode", std::string(to_string(report.coefficient_mode))},
                {"truncation", report.truncation},
                {"cumulative", report.cumulative()},
                {"tail_bound", optional_number(report.tail_bound)},
                {"terms", std::move(terms)}};
}

Json to_json(const AbsorptionResult& result) {
    return Json{{"p_gain", result.p_gain},
                {"distance", result.distance},
                {"horizon", result.horizon},
                {"ruin_probability_within_horizon", result.ruin_probability_within_horizon},
                {"expected_time_censored", optional_number(result.expected_time_censored)},
                {"survival_mass", result.survival_mass},
                {"pruned_mass", result.pruned_mass}};
}

Json to_json(const SimResult& result) {
    Json histogram = Json::array();
    for (const auto& [step, count] : result.time_histogram) {
        histogram.push_back(Json{{"step", step}, {"count", count}});
    }
    return Json{{"trials", result.trials},
                {"distance", result.distance},
                {"ruined", result.ruined},
                {"censored", result.censored},
                {"ruin_frequency", result.ruin_frequency},
                {"stderr", result.standard_error},
                {"ci95", Json::array({result.ci_low, result.ci_high})},
                {"mean_time_to_ruin", optional_number(result.mean_time_to_ruin)},
                {"mean_time_stderr", optional_number(result.mean_time_stderr)},
                {"seed_echo", result.seed_echo},
                {"time_histogram", std::move(histogram)}};
}

Json to_json(const TransformResult& result) {
    return Json{{"original", result.original ? to_json(*result.original) : Json(nullptr)},
                {"target_gain_factor", result.target_gain_factor},
                {"target_loss_factor", result.target_loss_factor},
                {"matched_mean", result.matched_mean},
                {"p_loss_adjusted", result.p_loss_adjusted},
                {"p_gain_adjusted", result.p_gain_adjusted}};
}

Json to_json(const RebalancedRuinInputs& inputs) {
    return Json{{"p_gain_adjusted", inputs.p_gain_adjusted},
                {"ruin", to_json(inputs.ruin)},
                {"warnings", inputs.warnings}};
}

Json to_json(const MethodRow& row) {
    return Json{{"method", row.method},
                {"value", optional_number(row.value)},
                {"valid", row.valid},
                {"deviation", optional_number(row.deviation)},
                {"standard_error", optional_number(row.standard_error)},
                {"note", row.note}};
}

Json to_json(const MethodComparison& comparison) {
    Json prob = Json::array();
    for (const auto& row : comparison.ruin_probability) prob.push_back(to_json(row));
    Json time = Json::array();
    for (const auto& row : comparison.expected_time) time.push_back(to_json(row));
    return Json{{"p_gain", comparison.p_gain},
                {"distance", comparison.distance},
                {"max_gains", comparison.max_gains},
                {"dp_horizon", comparison.dp_horizon},
                {"trials", comparison.budget.trials},
                {"max_steps", comparison.budget.max_steps},
                {"seed", comparison.budget.seed},
                {"ruin_probability", std::move(prob)},
                {"expected_time", std::move(time)}};
}

void write_series_csv(std::ostream& out, const SeriesReport& report) {
    const ClassicLocale classic(out);
    out << "N,count,probability,cumulative\n";
    for (const auto& term : report.terms) {
        out << term.n_gains << ',' << term.path_count.str() << ',' << format_double(term.probability)
            << ',' << format_double(term.cumulative) << '\n';
    }
}

void write_ruin_time_csv(std::ostream& out, const AbsorptionResult& result) {
    const ClassicLocale classic(out);
    out << "step,probability_mass\n";
    for (std::size_t t = 0; t < result.ruin_time_mass.size(); ++t) {
        if (result.ruin_time_mass[t] == 0.0) continue;
        out << t << ',' << format_double(result.ruin_time_mass[t]) << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const SimResult& result) {
    const ClassicLocale classic(out);
    out << "step,count\n";
    for (const auto& [step, count] : result.time_histogram) out << step << ',' << count << '\n';
}

void write_comparison_csv(std::ostream& out, const MethodComparison& comparison) {
    const ClassicLocale classic(out);
    out << "table,method,value,valid,deviation,standard_error,note\n";
    auto rows = [&](const char* table, const std::vector<MethodRow>& list) {
        for (const auto& row : list) {
            out << table << ',' << row.method << ',' << csv_optional(row.value) << ','
                << (row.valid ? "true" : "false") << ',' << csv_optional(row.deviation) << ','
                << csv_optional(row.standard_error) << ',' << csv_field(row.note) << '\n';
        }
    };
    rows("ruin_probability", comparison.ruin_probability);
    rows("expected_time", comparison.expected_time);
}

}  // namespace ruinlab
