#include "ruinlab/cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <locale>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "ruinlab/errors.hpp"

namespace ruinlab::cli {

namespace {

std::string trim(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::optional<double> to_double(const std::string& text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

double parse_real(const std::string& flag, const std::string& text) {
    const std::string t = trim(text);
    if (!t.empty() && t.back() == '%') {
        throw DomainError("--" + flag + ": percent input '" + t +
                          "' is not accepted; write it as a decimal fraction (50% -> 0.5)");
    }
    const auto value = to_double(t);
    if (!value) throw DomainError("--" + flag + ": '" + t + "' is not a finite decimal number");
    return *value;
}

double parse_probability(const std::string& flag, const std::string& text) {
    const double value = parse_real(flag, text);
    if (value < 0.0 || value > 1.0) {
        std::string hint;
        if (value > 1.0 && value <= 100.0) {
            hint = fmt::format("; did you mean {}?", format_double(value / 100.0));
        }
        throw DomainError("--" + flag + ": " + trim(text) +
                          " is outside [0, 1]; probabilities are decimals" + hint);
    }
    return value;
}

std::int64_t parse_integer(const std::string& flag, const std::string& text) {
    const std::string t = trim(text);
    std::int64_t value = 0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc{} && ptr == end && begin != end) return value;
    // Scientific shorthand like 1e6, only when it names an exact integer.
    const auto real = to_double(t);
    if (real && std::trunc(*real) == *real && std::abs(*real) <= 9.0e15) {
        return static_cast<std::int64_t>(*real);
    }
    throw DomainError("--" + flag + ": '" + t + "' is not an integer");
}

std::uint64_t parse_seed(const std::string& flag, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw DomainError("--" + flag + ": '" + t + "' is not an unsigned 64-bit integer");
    }
    return value;
}

Json to_json(const RunManifest& manifest) {
    Json params = Json::object();
    for (const auto& [key, value] : manifest.parameters) params[key] = value;
    return Json{{"command", manifest.command},
                {"parameters", std::move(params)},
                {"tool_version", manifest.tool_version},
                {"seed", manifest.seed ? Json(*manifest.seed) : Json(nullptr)}};
}

RunManifest manifest_from_json(const Json& json) {
    const Json& m = json.contains("manifest") ? json.at("manifest") : json;
    if (!m.is_object() || !m.contains("command") || !m.at("command").is_string() ||
        !m.contains("parameters") || !m.at("parameters").is_object()) {
        throw DomainError("manifest must be an object with 'command' and 'parameters'");
    }
    RunManifest out;
    out.command = m.at("command").get<std::string>();
    for (const auto& [key, value] : m.at("parameters").items()) {
        if (!value.is_string()) throw DomainError("manifest parameter '" + key + "' is not a string");
        out.parameters[key] = value.get<std::string>();
    }
    if (m.contains("tool_version") && m.at("tool_version").is_string()) {
        out.tool_version = m.at("tool_version").get<std::string>();
    }
    if (m.contains("seed") && m.at("seed").is_number_unsigned()) {
        out.seed = m.at("seed").get<std::uint64_t>();
    }
    return out;
}

namespace {

enum class Format { human, json, csv };

Format parse_format(const std::string& text) {
    if (text == "human") return Format::human;
    if (text == "json") return Format::json;
    if (text == "csv") return Format::csv;
    throw DomainError("format must be human, json or csv, got '" + text + "'");
}

/// A command's result in all three renderings.
struct Rendered {
    Json result;
    std::function<void(std::ostream&)> csv;
    std::function<void(std::ostream&)> human;
};

/// Flag values of one subcommand, stored as text exactly as resolved.
class Flags {
public:
    Flags(CLI::App& app, std::string command) : app_(app), command_(std::move(command)) {}

    void add(const std::string& name, const std::string& default_value, const std::string& help) {
        values_[name] = default_value;
        app_.add_option("--" + name, values_[name], help)->capture_default_str();
    }
    void required(const std::string& name, const std::string& help) {
        values_[name];
        app_.add_option("--" + name, values_[name], help)->required();
    }
    void optional(const std::string& name, const std::string& help) {
        values_[name];
        app_.add_option("--" + name, values_[name], help);
    }

    bool given(const std::string& name) const { return !values_.at(name).empty(); }
    const std::string& text(const std::string& name) const { return values_.at(name); }

    double probability(const std::string& name) const { return parse_probability(name, text(name)); }
    double real(const std::string& name) const { return parse_real(name, text(name)); }
    std::int64_t integer(const std::string& name) const { return parse_integer(name, text(name)); }
    std::uint64_t seed(const std::string& name) const { return parse_seed(name, text(name)); }

    std::int64_t positive(const std::string& name) const {
        const auto value = integer(name);
        if (value < 1) throw DomainError("--" + name + " must be >= 1, got " + text(name));
        return value;
    }

    RunManifest manifest() const {
        RunManifest m;
        m.command = command_;
        for (const auto& [key, value] : values_) {
            if (!value.empty()) m.parameters[key] = value;
        }
        return m;
    }

private:
    CLI::App& app_;
    std::string command_;
    std::map<std::string, std::string> values_;
};

using Handler = std::function<Rendered(const Flags&, RunManifest&, std::ostream& err)>;

struct Command {
    CLI::App* app;
    std::unique_ptr<Flags> flags;
    Handler handler;
};

// ---------------------------------------------------------------------------
// calibrate

Rendered do_calibrate(const Flags& f, RunManifest&, std::ostream&) {
    const TrialModel model(f.probability("p"), f.real("gain-factor"), f.real("loss-factor"));
    const RuinSpec ruin = calibrate(model, f.real("loss-level"));
    Rendered r;
    r.result = Json{{"model", to_json(model)}, {"ruin", to_json(ruin)}};
    r.csv = [ruin](std::ostream& out) {
        out << "loss_level,loss_factor,distance_exact,distance,implied_loss_level\n"
            << format_double(ruin.loss_level) << ',' << format_double(ruin.loss_factor) << ','
            << format_double(ruin.distance_exact) << ',' << ruin.distance << ','
            << format_double(ruin.implied_loss_level) << '\n';
    };
    r.human = [ruin](std::ostream& out) {
        fmt::print(out, "loss level          {}\n", format_double(ruin.loss_level));
        fmt::print(out, "loss factor         {}\n", format_double(ruin.loss_factor));
        fmt::print(out, "distance (exact)    {}\n", format_double(ruin.distance_exact));
        fmt::print(out, "distance (lattice)  {}\n", ruin.distance);
        fmt::print(out, "implied loss level  {}\n", format_double(ruin.implied_loss_level));
    };
    return r;
}

// ---------------------------------------------------------------------------
// series

Rendered do_series(const Flags& f, RunManifest&, std::ostream&) {
    auto report = std::make_shared<SeriesReport>(
        ruin_series(f.probability("p"), f.positive("distance"), f.integer("max-gains"),
                    parse_coefficient_mode(f.text("mode"))));
    Rendered r;
    r.result = to_json(*report);
    r.csv = [report](std::ostream& out) { write_series_csv(out, *report); };
    r.human = [report](std::ostream& out) {
        fmt::print(out, "ruin series  p={} d={} mode={}\n", format_double(report->p_gain),
                   report->distance, to_string(report->coefficient_mode));
        fmt::print(out, "{:>6}  {:>24}  {:>24}  {:>24}\n", "N", "count", "probability",
                   "cumulative");
        for (const auto& term : report->terms) {
            fmt::print(out, "{:>6}  {:>24}  {:>24}  {:>24}\n", term.n_gains, term.path_count.str(),
                       format_double(term.probability), format_double(term.cumulative));
        }
        fmt::print(out, "tail bound: {}\n",
                   report->tail_bound ? format_double(*report->tail_bound) : "unbounded");
    };
    return r;
}

// ---------------------------------------------------------------------------
// coefficients

/// Largest path length the coefficient table enumerates by brute force.
constexpr std::int64_t kTableEnumerationLength = 22;

Rendered do_coefficients(const Flags& f, RunManifest&, std::ostream&) {
    const auto d = f.positive("distance");
    const auto max_gains = f.integer("max-gains");
    if (max_gains < 0) throw DomainError("--max-gains must be >= 0");

    struct Row {
        std::int64_t n;
        BigInt paper;
        BigInt exact;
        std::optional<std::uint64_t> brute;
    };
    auto rows = std::make_shared<std::vector<Row>>();
    Json json_rows = Json::array();
    for (std::int64_t n = 0; n <= max_gains; ++n) {
        Row row{n, paper_coefficient(d, n), exact_coefficient(d, n), std::nullopt};
        if (d + 2 * n <= kTableEnumerationLength) row.brute = enumerate_first_passage(d, n).first_passage;
        json_rows.push_back(Json{{"n_gains", n},
                                 {"paper", row.paper.str()},
                                 {"exact", row.exact.str()},
                                 {"brute_force", row.brute ? Json(std::to_string(*row.brute))
                                                           : Json(nullptr)},
                                 {"agree", row.paper == row.exact}});
        rows->push_back(std::move(row));
    }
    Rendered r;
    r.result = Json{{"distance", d}, {"max_gains", max_gains}, {"rows", std::move(json_rows)}};
    r.csv = [rows](std::ostream& out) {
        out << "N,paper,exact,brute_force,agree\n";
        for (const auto& row : *rows) {
            out << row.n << ',' << row.paper.str() << ',' << row.exact.str() << ','
                << (row.brute ? std::to_string(*row.brute) : "") << ','
                << (row.paper == row.exact ? "true" : "false") << '\n';
        }
    };
    r.human = [rows, d](std::ostream& out) {
        fmt::print(out, "path counts at distance {}\n", d);
        fmt::print(out, "{:>6}  {:>20}  {:>20}  {:>12}\n", "N", "paper", "exact", "brute force");
        for (const auto& row : *rows) {
            fmt::print(out, "{:>6}  {:>20}  {:>20}  {:>12}{}\n", row.n, row.paper.str(),
                       row.exact.str(), row.brute ? std::to_string(*row.brute) : "-",
                       row.paper == row.exact ? "" : "  <- differs");
        }
    };
    return r;
}

// ---------------------------------------------------------------------------
// approx

Rendered do_approx(const Flags& f, RunManifest&, std::ostream&) {
    const double p = f.probability("p");
    const auto d = f.positive("distance");
    const std::string& form = f.text("form");
    double value = 0.0;
    if (form == "arith-geometric") {
        value = approx_arith_geometric(p, d);
    } else if (form == "simplified") {
        value = approx_simplified(p, d);
    } else if (form == "final") {
        value = paper_final_form(p, d);
    } else {
        throw DomainError("--form must be arith-geometric, simplified or final, got '" + form + "'");
    }
    Rendered r;
    r.result = Json{{"p_gain", p}, {"distance", d}, {"form", form}, {"value", value}};
    r.csv = [=](std::ostream& out) {
        out << "p_gain,distance,form,value\n"
            << format_double(p) << ',' << d << ',' << form << ',' << format_double(value) << '\n';
    };
    r.human = [=](std::ostream& out) {
        fmt::print(out, "{} approximation at p={} d={}: {}\n", form, format_double(p), d,
                   format_double(value));
    };
    return r;
}

// ---------------------------------------------------------------------------
// exact

Rendered do_exact(const Flags& f, RunManifest&, std::ostream&) {
    auto result = std::make_shared<AbsorptionResult>(
        ruin_probability_dp(f.probability("p"), f.positive("distance"), f.positive("horizon")));
    Rendered r;
    r.result = to_json(*result);
    r.csv = [result](std::ostream& out) { write_ruin_time_csv(out, *result); };
    r.human = [result](std::ostream& out) {
        fmt::print(out, "p={} d={} horizon={}\n", format_double(result->p_gain), result->distance,
                   result->horizon);
        fmt::print(out, "ruin within horizon     {}\n",
                   format_double(result->ruin_probability_within_horizon));
        fmt::print(out, "survival mass           {}\n", format_double(result->survival_mass));
        fmt::print(out, "censored mean ruin time {}\n",
                   result->expected_time_censored ? format_double(*result->expected_time_censored)
                                                  : "undefined");
    };
    return r;
}

// ---------------------------------------------------------------------------
// simulate / compare

ProgressFn progress_printer(const Flags& f, std::ostream& err, const char* label) {
    const std::string& quiet = f.text("quiet");
    if (quiet != "true" && quiet != "false") throw DomainError("--quiet must be true or false");
    if (quiet == "true") return {};
    auto last = std::make_shared<int>(-1);
    return [&err, last, label](std::uint64_t done, std::uint64_t total) {
        const int pct = static_cast<int>(100 * done / total);
        if (pct / 10 == *last / 10 && done != total) return;
        *last = pct;
        fmt::print(err, "{}: {}% ({}/{})\n", label, pct, done, total);
    };
}

SimBudget budget_from(const Flags& f) {
    SimBudget budget;
    budget.trials = static_cast<std::uint64_t>(f.positive("trials"));
    budget.max_steps = f.positive("max-steps");
    budget.seed = f.seed("seed");
    const auto workers = f.positive("workers");
    if (workers > 1024) throw DomainError("--workers must be <= 1024");
    budget.workers = static_cast<unsigned>(workers);
    budget.step_mode = parse_step_mode(f.text("step-mode"));
    return budget;
}

Rendered do_simulate(const Flags& f, RunManifest& manifest, std::ostream& err) {
    const double p = f.probability("p");
    const double gain = f.real("gain-factor");
    const double loss = f.real("loss-factor");
    const TrialModel model(p, gain, loss);
    RuinSpec ruin{};
    if (f.given("distance") == f.given("loss-level")) {
        throw DomainError("give exactly one of --distance or --loss-level");
    }
    if (f.given("distance")) {
        const auto d = f.positive("distance");
        ruin = RuinSpec{std::pow(1.0 + loss, static_cast<double>(d)), loss, static_cast<double>(d),
                        d, std::pow(1.0 + loss, static_cast<double>(d))};
    } else {
        ruin = calibrate(model, f.real("loss-level"));
    }
    const SimConfig config{model, ruin, budget_from(f)};
    manifest.seed = config.budget.seed;
    auto result = std::make_shared<SimResult>(simulate(config, progress_printer(f, err, "simulate")));

    Rendered r;
    r.result = Json{{"model", to_json(model)}, {"ruin", to_json(ruin)},
                    {"step_mode", std::string(to_string(config.budget.step_mode))},
                    {"max_steps", config.budget.max_steps}, {"simulation", to_json(*result)}};
    r.csv = [result](std::ostream& out) { write_histogram_csv(out, *result); };
    r.human = [result](std::ostream& out) {
        fmt::print(out, "trials {}  ruined {}  censored {}\n", result->trials, result->ruined,
                   result->censored);
        fmt::print(out, "ruin frequency {} +/- {} (95% CI [{}, {}])\n",
                   format_double(result->ruin_frequency), format_double(result->standard_error),
                   format_double(result->ci_low), format_double(result->ci_high));
        if (result->mean_time_to_ruin) {
            fmt::print(out, "mean time to ruin (censored) {} +/- {}\n",
                       format_double(*result->mean_time_to_ruin),
                       format_double(*result->mean_time_stderr));
        } else {
            fmt::print(out, "mean time to ruin (censored) undefined: no trial was ruined\n");
        }
        fmt::print(out, "seed {}\n", result->seed_echo);
    };
    return r;
}

void print_rows(std::ostream& out, const std::vector<MethodRow>& rows) {
    fmt::print(out, "  {:<28} {:>24} {:>12} {:>12}  {}\n", "method", "value", "|dev|", "stderr",
               "note");
    for (const auto& row : rows) {
        fmt::print(out, "  {:<28} {:>24} {:>12} {:>12}  {}\n", row.method,
                   row.value ? format_double(*row.value) : "n/a",
                   row.deviation ? fmt::format("{:.3e}", *row.deviation) : "-",
                   row.standard_error ? fmt::format("{:.3e}", *row.standard_error) : "-", row.note);
    }
}

Rendered do_compare(const Flags& f, RunManifest& manifest, std::ostream& err) {
    const double p = f.probability("p");
    const auto d = f.positive("distance");
    const SimBudget budget = budget_from(f);
    manifest.seed = budget.seed;
    CompareOptions options;
    options.max_gains = f.integer("max-gains");
    options.dp_horizon = f.integer("horizon");
    if (options.dp_horizon < 0) throw DomainError("--horizon must be >= 0");
    auto cmp = std::make_shared<MethodComparison>(
        compare_methods(p, d, budget, options, progress_printer(f, err, "compare")));
    Rendered r;
    r.result = to_json(*cmp);
    r.csv = [cmp](std::ostream& out) { write_comparison_csv(out, *cmp); };
    r.human = [cmp](std::ostream& out) {
        fmt::print(out, "p={} d={}  series N<={}  DP horizon {}  MC {} trials (seed {})\n",
                   format_double(cmp->p_gain), cmp->distance, cmp->max_gains, cmp->dp_horizon,
                   cmp->budget.trials, cmp->budget.seed);
        fmt::print(out, "ruin probability\n");
        print_rows(out, cmp->ruin_probability);
        fmt::print(out, "expected time to ruin\n");
        print_rows(out, cmp->expected_time);
    };
    return r;
}

// ---------------------------------------------------------------------------
// transform

/// Same keys, every value null (arrays empty).
Json null_leaves(const Json& shape) {
    if (shape.is_object()) {
        Json out = Json::object();
        for (const auto& [key, value] : shape.items()) out[key] = null_leaves(value);
        return out;
    }
    return shape.is_array() ? Json::array() : Json(nullptr);
}

Rendered do_transform(const Flags& f, RunManifest&, std::ostream&) {
    const TrialModel model(f.probability("p"), f.real("gain-factor"), f.real("loss-factor"));
    const auto result = rebalance(model, f.real("target-gain"), f.real("target-loss"));
    std::optional<RebalancedRuinInputs> inputs;
    if (f.given("loss-level")) inputs = rebalanced_ruin_inputs(result, f.real("loss-level"));

    Rendered r;
    r.result = to_json(result);
    r.result["ruin_inputs"] = inputs ? to_json(*inputs) : null_leaves(to_json(RebalancedRuinInputs{}));
    r.result["warnings"] = inputs ? Json(inputs->warnings) : Json::array();
    r.csv = [result, inputs](std::ostream& out) {
        out << "p_gain,gain_factor,loss_factor,target_gain_factor,target_loss_factor,matched_mean,"
               "p_loss_adjusted,p_gain_adjusted,distance_exact,distance,warnings\n";
        const auto& m = *result.original;
        out << format_double(m.p_gain()) << ',' << format_double(m.gain_factor()) << ','
            << format_double(m.loss_factor()) << ',' << format_double(result.target_gain_factor)
            << ',' << format_double(result.target_loss_factor) << ','
            << format_double(result.matched_mean) << ',' << format_double(result.p_loss_adjusted)
            << ',' << format_double(result.p_gain_adjusted) << ',';
        if (inputs) {
            std::string warnings;
            for (const auto& w : inputs->warnings) warnings += (warnings.empty() ? "" : ";") + w;
            out << format_double(inputs->ruin.distance_exact) << ',' << inputs->ruin.distance << ','
                << warnings;
        } else {
            out << ",,";
        }
        out << '\n';
    };
    r.human = [result, inputs](std::ostream& out) {
        fmt::print(out, "matched mean        {}\n", format_double(result.matched_mean));
        fmt::print(out, "target legs         +{} / {}\n", format_double(result.target_gain_factor),
                   format_double(result.target_loss_factor));
        fmt::print(out, "adjusted P(loss)    {}\n", format_double(result.p_loss_adjusted));
        fmt::print(out, "adjusted P(gain)    {}\n", format_double(result.p_gain_adjusted));
        if (inputs) {
            fmt::print(out, "distance            {} (exact {})\n", inputs->ruin.distance,
                       format_double(inputs->ruin.distance_exact));
            for (const auto& w : inputs->warnings) fmt::print(out, "warning: {}\n", w);
        }
    };
    return r;
}

// ---------------------------------------------------------------------------
// demo

struct YieldObservation {
    int year;
    double yield_pct;
};

/// Summer ten-year treasury yields used for the halving/doubling illustration.
constexpr std::array<YieldObservation, 3> kTreasuryYields{{{2011, 2.8}, {2012, 1.4}, {2013, 2.8}}};

Rendered do_demo(const Flags&, RunManifest&, std::ostream&) {
    const TrialModel model = TrialModel::doubling(0.5);
    const RuinSpec ruin = calibrate(model, 0.25);
    Json states = Json::array();
    std::int64_t position = 0;
    double path_probability = 1.0;
    std::int64_t lowest = 0;
    struct Line {
        int year;
        double yield;
        std::optional<int> move;
        std::int64_t position;
        double up;
        double down;
    };
    auto lines = std::make_shared<std::vector<Line>>();
    for (std::size_t i = 0; i < kTreasuryYields.size(); ++i) {
        const auto& obs = kTreasuryYields[i];
        std::optional<int> move;
        if (i > 0) {
            const double steps = std::log2(obs.yield_pct / kTreasuryYields[i - 1].yield_pct);
            const double rounded = std::round(steps);
            if (std::abs(steps - rounded) > 1e-9 || std::abs(rounded) != 1.0) {
                throw DomainError("yield path does not follow the halving/doubling lattice");
            }
            move = static_cast<int>(rounded);
            position += *move;
            lowest = std::min(lowest, position);
            path_probability *= *move > 0 ? model.p_gain() : model.q_loss();
        }
        const double up = obs.yield_pct * (1.0 + model.gain_factor());
        const double down = obs.yield_pct * (1.0 + model.loss_factor());
        lines->push_back(Line{obs.year, obs.yield_pct, move, position, up, down});
        states.push_back(Json{{"year", obs.year},
                              {"yield_pct", obs.yield_pct},
                              {"move", move ? Json(*move) : Json(nullptr)},
                              {"lattice_position", position},
                              {"next_if_gain_pct", up},
                              {"next_if_loss_pct", down}});
    }
    const bool ruined = -lowest >= ruin.distance;
    Rendered r;
    r.result = Json{{"model", to_json(model)},
                    {"ruin", to_json(ruin)},
                    {"states", std::move(states)},
                    {"path_probability", path_probability},
                    {"reached_ruin", ruined}};
    r.csv = [lines](std::ostream& out) {
        out << "year,yield_pct,move,lattice_position,next_if_gain_pct,next_if_loss_pct\n";
        for (const auto& l : *lines) {
            out << l.year << ',' << format_double(l.yield) << ','
                << (l.move ? std::to_string(*l.move) : "") << ',' << l.position << ','
                << format_double(l.up) << ',' << format_double(l.down) << '\n';
        }
    };
    r.human = [lines, path_probability, ruin, ruined](std::ostream& out) {
        fmt::print(out, "ten-year treasury yield on the +100% / -50% lattice\n");
        for (const auto& l : *lines) {
            fmt::print(out, "  {}  {:>4}%  move {:>2}  position {:>2}   next year: {}% or {}%\n",
                       l.year, format_double(l.yield),
                       l.move ? fmt::format("{:+d}", *l.move) : "--", l.position,
                       format_double(l.up), format_double(l.down));
        }
        fmt::print(out, "path probability at p=0.5: {}\n", format_double(path_probability));
        fmt::print(out, "ruin at loss level {} (distance {}): {}\n", format_double(ruin.loss_level),
                   ruin.distance, ruined ? "reached" : "not reached");
    };
    return r;
}

// ---------------------------------------------------------------------------

void emit(std::ostream& out, Format format, const RunManifest& manifest, const Rendered& r) {
    switch (format) {
        case Format::json: {
            Json doc{{"manifest", to_json(manifest)}, {"result", r.result}};
            out << doc.dump(2) << '\n';
            break;
        }
        case Format::csv:
            out << "# manifest: " << to_json(manifest).dump() << '\n';
            r.csv(out);
            break;
        case Format::human:
            r.human(out);
            out << "manifest: " << to_json(manifest).dump() << '\n';
            break;
    }
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::optional<std::string>& env_format, int depth);

int replay(const std::string& path, std::ostream& out, std::ostream& err,
           const std::optional<std::string>& env_format, int depth) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (path != "-") {
        file.open(path);
        if (!file) throw DomainError("cannot open manifest '" + path + "'");
        in = &file;
    }
    Json doc;
    try {
        doc = Json::parse(*in);
    } catch (const Json::parse_error& e) {
        throw DomainError(std::string("manifest is not valid JSON: ") + e.what());
    }
    const RunManifest manifest = manifest_from_json(doc);
    if (manifest.command == "replay") throw DomainError("a manifest cannot replay a replay");
    std::vector<std::string> replay_args{manifest.command};
    for (const auto& [key, value] : manifest.parameters) {
        replay_args.push_back("--" + key);
        replay_args.push_back(value);
    }
    return run_impl(replay_args, out, err, env_format, depth + 1);
}

int run_impl(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             const std::optional<std::string>& env_format, int depth) {
    CLI::App app{"Multiplicative gambler's-ruin calculator", "ruinlab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::map<std::string, Command> commands;
    auto add_command = [&](const std::string& name, const std::string& about, Handler handler) {
        CLI::App* sub = app.add_subcommand(name, about);
        Command cmd{sub, std::make_unique<Flags>(*sub, name), std::move(handler)};
        cmd.flags->optional("format", "human|json|csv (default: $RUINLAB_FORMAT or human)");
        return &commands.emplace(name, std::move(cmd)).first->second;
    };
    auto add_budget = [](Flags& f) {
        f.add("trials", "100000", "number of simulated trials");
        f.add("max-steps", "100000", "censoring horizon per trial");
        f.required("seed", "64-bit master seed");
        f.add("workers", "1", "worker threads (does not affect results)");
        f.add("step-mode", "bulk", "bulk|per-step");
        f.add("quiet", "false", "suppress progress on stderr (true|false)");
    };

    {
        auto* c = add_command("calibrate", "distance to a loss level", do_calibrate);
        c->flags->required("loss-level", "fraction of the initial bankroll, in (0,1)");
        c->flags->add("loss-factor", "-0.5", "signed loss per trial, in (-1,0)");
        c->flags->add("gain-factor", "1", "signed gain per trial, > 0");
        c->flags->add("p", "0.5", "gain probability");
    }
    {
        auto* c = add_command("series", "ruin-probability series partial sums", do_series);
        c->flags->required("p", "gain probability");
        c->flags->required("distance", "lattice distance d >= 1");
        c->flags->add("max-gains", "200", "last gain count N to include");
        c->flags->add("mode", "exact", "exact|paper path counts");
    }
    {
        auto* c = add_command("coefficients", "paper-mode vs exact vs enumerated path counts",
                              do_coefficients);
        c->flags->required("distance", "lattice distance d >= 1");
        c->flags->add("max-gains", "6", "last gain count N to tabulate");
    }
    {
        auto* c = add_command("approx", "closed-form ruin approximations", do_approx);
        c->flags->required("p", "gain probability");
        c->flags->required("distance", "lattice distance d >= 1");
        c->flags->add("form", "arith-geometric", "arith-geometric|simplified|final");
    }
    {
        auto* c = add_command("exact", "dynamic-programming ruin probability", do_exact);
        c->flags->required("p", "gain probability");
        c->flags->required("distance", "lattice distance d >= 1");
        c->flags->add("horizon", "100000", "number of trials considered");
    }
    {
        auto* c = add_command("simulate", "Monte Carlo ruin simulation", do_simulate);
        c->flags->required("p", "gain probability");
        c->flags->optional("distance", "lattice distance d >= 1");
        c->flags->optional("loss-level", "ruin threshold as a bankroll fraction");
        c->flags->add("gain-factor", "1", "signed gain per trial, > 0");
        c->flags->add("loss-factor", "-0.5", "signed loss per trial, in (-1,0)");
        add_budget(*c->flags);
    }
    {
        auto* c = add_command("transform", "rebalance probabilities onto new legs", do_transform);
        c->flags->required("p", "original gain probability");
        c->flags->required("gain-factor", "original gain leg");
        c->flags->required("loss-factor", "original loss leg");
        c->flags->required("target-gain", "new gain leg");
        c->flags->required("target-loss", "new loss leg");
        c->flags->optional("loss-level", "also compute the ruin distance on the new legs");
    }
    {
        auto* c = add_command("compare", "all estimators side by side", do_compare);
        c->flags->required("p", "gain probability");
        c->flags->required("distance", "lattice distance d >= 1");
        c->flags->add("max-gains", "200", "series truncation");
        c->flags->add("horizon", "0", "DP horizon (0: same as --max-steps)");
        add_budget(*c->flags);
    }
    add_command("demo", "treasury-yield halving/doubling walkthrough", do_demo);

    std::string manifest_path;
    CLI::App* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest");
    replay_cmd->add_option("manifest", manifest_path, "JSON output or manifest file ('-' = stdin)")
        ->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream sink_out;
        std::ostringstream sink_err;
        const int code = app.exit(e, sink_out, sink_err);
        out << sink_out.str();
        err << sink_err.str();
        return code == 0 ? kOk : kDomainError;
    }

    if (replay_cmd->parsed()) {
        if (depth > 0) throw DomainError("nested replay");
        return replay(manifest_path, out, err, env_format, depth);
    }

    for (auto& [name, cmd] : commands) {
        if (!cmd.app->parsed()) continue;
        const Flags& flags = *cmd.flags;
        std::string format_text = flags.given("format") ? flags.text("format")
                                  : env_format        ? *env_format
                                                      : "human";
        const Format format = parse_format(format_text);
        RunManifest manifest = flags.manifest();
        manifest.parameters["format"] = format_text;
        const Rendered rendered = cmd.handler(flags, manifest, err);
        emit(out, format, manifest, rendered);
        return kOk;
    }
    return kFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        std::optional<std::string> env_format) {
    // CSV and human output always use '.' decimals and no digit grouping.
    const std::locale saved = out.imbue(std::locale::classic());
    struct Restore {
        std::ostream& out;
        const std::locale& saved;
        ~Restore() { out.imbue(saved); }
    } restore{out, saved};
    try {
        return run_impl(args, out, err, env_format, 0);
    } catch (const ValidityError& e) {
        err << "error: " << e.what() << '\n';
        return kValidityError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    } catch (...) {
        err << "error: unknown failure\n";
        return kFailure;
    }
}

}  // namespace ruinlab::cli
