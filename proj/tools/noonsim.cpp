// Command-line front end: run, validate and list scenarios.
//
//   noonsim run <config.json | @builtin> [--seed U64] [--out PATH] [--format csv|json]
//   noonsim validate <config.json | @builtin>
//   noonsim list-scenarios
//   noonsim <kind> [--config PATH] [--set key=value ...] [--seed U64] [--out PATH] [--format csv|json]
//
// Exit codes: 0 success, 1 validation or I/O error, 2 numerical failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noonsim/errors.hpp"
#include "noonsim/scenario.hpp"

using namespace noonsim;

namespace {

struct OutputOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> timestamp;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--seed", o.seed, "Seed for sampled measurements and random draws (overrides the config)");
    cmd->add_option("--out", o.out, "Output path, '-' for stdout (overrides the config)");
    cmd->add_option("--format", o.format, "csv or json (overrides the config)")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--timestamp", o.timestamp, "Provenance timestamp to record instead of the current UTC time");
}

nlohmann::json load_document(const std::string& ref) {
    if (!ref.empty() && ref[0] == '@') return builtin_scenario(ref.substr(1)).config;
    return to_json(load_config(ref));
}

int execute(nlohmann::json doc, const OutputOptions& o) {
    if (o.seed) doc["seed"] = *o.seed;
    if (o.format) doc["output"]["format"] = *o.format;
    const ScenarioConfig config = parse_config(doc);
    const RunReport report = run_scenario(config, o.timestamp.value_or(utc_timestamp_now()));
    const std::string path = o.out.value_or(config.output.path.value_or("-"));
    emit(report, config.output.format, path);
    return 0;
}

template <class F>
int guarded(F&& body) {
    try {
        return body();
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact simulation of qubit-mediated N00N-state generation"};
    app.require_subcommand(1);

    std::string run_ref;
    OutputOptions run_opts;
    auto* run = app.add_subcommand("run", "Run a scenario config (path or @builtin)");
    run->add_option("config", run_ref, "Config path or @name of a built-in scenario")->required();
    add_output_options(run, run_opts);

    std::string validate_ref;
    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate->add_option("config", validate_ref, "Config path or @name of a built-in scenario")->required();

    auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");

    struct KindCommand {
        ScenarioKind kind;
        CLI::App* cmd = nullptr;
        std::optional<std::string> config;
        std::vector<std::string> sets;
        OutputOptions opts;
    };
    std::vector<KindCommand> kinds;
    kinds.reserve(all_scenario_kinds().size());
    for (ScenarioKind k : all_scenario_kinds()) {
        kinds.emplace_back();
        kinds.back().kind = k;
        KindCommand& kc = kinds.back();
        kc.cmd = app.add_subcommand(to_string(k), "Run a " + to_string(k) + " scenario from defaults and overrides");
        kc.cmd->add_option("--config", kc.config, "Start from this config instead of the defaults");
        kc.cmd->add_option("--set", kc.sets, "key=value override; bare keys address params")->take_all();
        add_output_options(kc.cmd, kc.opts);
    }

    CLI11_PARSE(app, argc, argv);

    if (*run) return guarded([&] { return execute(load_document(run_ref), run_opts); });

    if (*validate) {
        return guarded([&] {
            const ScenarioConfig c = parse_config(load_document(validate_ref));
            std::cout << "ok: " << to_string(c.kind) << '\n';
            return 0;
        });
    }

    if (*list) {
        for (const auto& b : builtin_scenarios())
            std::cout << '@' << b.name << '\t' << b.config.value("kind", "") << '\t' << b.summary << '\n';
        return 0;
    }

    for (auto& kc : kinds) {
        if (!*kc.cmd) continue;
        return guarded([&] {
            nlohmann::json doc = kc.config ? load_document(*kc.config) : to_json(default_config(kc.kind));
            if (doc.value("kind", "") != to_string(kc.kind))
                throw ValidationError("config kind '" + doc.value("kind", "") + "' does not match subcommand " +
                                      to_string(kc.kind));
            for (const auto& s : kc.sets) apply_override(doc, s);
            return execute(std::move(doc), kc.opts);
        });
    }
    return 1;
}
