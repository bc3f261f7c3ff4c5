#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "noonsim/report.hpp"
#include "noonsim/scenario.hpp"

using namespace noonsim;
using nlohmann::json;

namespace {

json builtin(const std::string& name) { return builtin_scenario(name).config; }

// Expects parse_config to reject the document with a message mentioning `needle`.
void rejects(const json& doc, const std::string& needle) {
    try {
        (void)parse_config(doc);
        FAIL("accepted: " << doc.dump());
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK_MESSAGE(msg.find(needle) != std::string::npos, msg);
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int tool(const std::string& args) {
    const std::string cmd = std::string("\"") + NOONSIM_TOOL_PATH + "\" " + args + " >/dev/null 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("every built-in scenario parses and echoes to an equal config") {
    REQUIRE(builtin_scenarios().size() >= all_scenario_kinds().size());
    std::set<std::string> kinds;
    for (const auto& b : builtin_scenarios()) {
        CAPTURE(b.name);
        const ScenarioConfig c = parse_config(b.config);
        kinds.insert(to_string(c.kind));
        const json echo = to_json(c);
        CHECK(parse_config(echo) == c);
        CHECK(to_json(parse_config(echo)) == echo);
        CHECK(parse_config_text(echo.dump()) == c);
    }
    CHECK(kinds.size() == all_scenario_kinds().size());
}

TEST_CASE("shipped files match the embedded scenarios") {
    for (const auto& b : builtin_scenarios()) {
        CAPTURE(b.name);
        const std::filesystem::path p = std::filesystem::path(NOONSIM_SCENARIO_DIR) / (b.name + ".json");
        REQUIRE(std::filesystem::exists(p));
        CHECK(load_config(p.string()) == parse_config(b.config));
    }
    CHECK_THROWS_AS(builtin_scenario("no-such-scenario"), ValidationError);
}

TEST_CASE("defaults validate for every kind") {
    for (ScenarioKind k : all_scenario_kinds()) {
        CAPTURE(to_string(k));
        const ScenarioConfig c = default_config(k);
        CHECK_NOTHROW(c.validate());
        CHECK(parse_config(to_json(c)) == c);
        CHECK(parse_scenario_kind(to_string(k)) == k);
    }
}

TEST_CASE("constraint violations are rejected with the field named") {
    json noon = builtin("noon-protocol");
    noon["params"]["N"] = {3};
    noon["params"]["truncation"] = 3;
    rejects(noon, "N+1 = 4");
    rejects(noon, "params.truncation");

    json floq = builtin("floquet-frequency");
    floq["params"]["nu_over_g"] = {10.0, 4.9};
    rejects(floq, "params.nu_over_g");

    json floq_zero = builtin("floquet-coupling");
    floq_zero["params"]["phi2"] = floq_zero["params"]["phi1"];
    rejects(floq_zero, "params.phi2");

    json ion = builtin("trapped-ion");
    ion["params"]["ratios"] = {0.02, 0.06};
    rejects(ion, "params.ratios");
    ion["params"]["ratios"] = {0.0};
    rejects(ion, "params.ratios");

    json hp = builtin("hp-sweep");
    hp["params"]["N0"] = {1};
    rejects(hp, "params.N0");

    json multi = builtin("multi-noon");
    multi["params"]["M"] = 12;
    rejects(multi, "params.M");

    json cmap = builtin("conditional-map-fock");
    cmap["params"]["psi1"] = {{"type", "coherent"}, {"alpha", 6.0}};
    rejects(cmap, "params.psi1");

    json outcomes = builtin("noon-protocol");
    outcomes["policy"]["outcomes"] = {0, 2};
    rejects(outcomes, "policy.outcomes");
    outcomes["policy"]["outcomes"] = {1, 1};
    rejects(outcomes, "policy.outcomes");

    json unknown = builtin("noon-protocol");
    unknown["params"]["Nmax"] = 4;
    rejects(unknown, "params.Nmax: unknown key");
    unknown = builtin("noon-protocol");
    unknown["colour"] = "blue";
    rejects(unknown, "colour: unknown key");

    json types = builtin("noon-protocol");
    types["params"]["omega"] = "fast";
    rejects(types, "params.omega");
    types = builtin("noon-protocol");
    types["kind"] = "noon";
    rejects(types, "kind");
    types = builtin("noon-protocol");
    types["output"]["format"] = "xml";
    rejects(types, "output.format");

    CHECK_THROWS_AS(parse_config_text("{ not json"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
}

TEST_CASE("random single-field mutations either validate or name a params path") {
    // Numeric fields pushed to zero, negative or huge: whatever the outcome, a
    // rejection must carry a params path. Joint constraints may name the
    // partner field (zeta = 0 makes chi vanish and blames phi2).
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, 2);
    for (const auto& b : builtin_scenarios()) {
        for (const auto& [key, value] : b.config["params"].items()) {
            if (!value.is_number()) continue;
            json doc = b.config;
            const double choices[] = {0.0, -1.0, 1e9};
            doc["params"][key] = choices[pick(rng)];
            try {
                (void)parse_config(doc);
            } catch (const ValidationError& e) {
                CHECK_MESSAGE(std::string(e.what()).find("params.") != std::string::npos, std::string(e.what()));
            }
        }
    }
}

TEST_CASE("overrides") {
    json doc = to_json(default_config(ScenarioKind::noon_protocol));
    apply_override(doc, "N=[2,3]");
    apply_override(doc, "output.format=json");
    apply_override(doc, "seed=17");
    apply_override(doc, "name=label with spaces");
    const ScenarioConfig c = parse_config(doc);
    CHECK(std::get<NoonScenario>(c.params).N == std::vector<std::size_t>{2, 3});
    CHECK(c.output.format == ReportFormat::json);
    CHECK(c.seed == 17);
    CHECK(c.name == "label with spaces");
    CHECK_THROWS_AS(apply_override(doc, "novalue"), ValidationError);
    CHECK_THROWS_AS(apply_override(doc, "=3"), ValidationError);
    CHECK_THROWS_AS(apply_override(doc, "seed.x=3"), ValidationError);
}

TEST_CASE("CSV and JSON emission") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1.0) == "1");
    CHECK(format_real(-2.5e-300) == "-2.5e-300");
    CHECK(format_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng) * std::pow(10.0, (i % 40) - 20);
        CHECK(std::stod(format_real(x)) == x);
    }

    RunReport r;
    r.kind = "test";
    Table t{"t", {{"x", "1/g", 1e-9, ColumnType::real}, {"n", "1", std::nullopt, ColumnType::integer},
                  {"s", "", std::nullopt, ColumnType::text}},
            {}};
    r.tables.push_back(t);
    CHECK(render(r, ReportFormat::csv) == "x [1/g],n [1],s\n");

    r.tables[0].add_row({0.1, std::int64_t{3}, std::string("a,b")});
    r.tables[0].add_row({std::numeric_limits<double>::quiet_NaN(), std::int64_t{-1}, std::string("q\"")});
    CHECK(render(r, ReportFormat::csv) == "x [1/g],n [1],s\n0.10000000000000001,3,\"a,b\"\nnan,-1,\"q\"\"\"\n");
    CHECK_THROWS_AS(r.tables[0].add_row({1.0, 2.0, std::string("x")}), ValidationError);
    CHECK_THROWS_AS(r.tables[0].add_row({1.0}), ValidationError);

    const json j = json::parse(render(r, ReportFormat::json));
    CHECK(j["schema_version"] == kReportSchemaVersion);
    CHECK(j["tables"][0]["columns"][0]["unit"] == "1/g");
    CHECK(j["tables"][0]["columns"][0]["tol"] == 1e-9);
    CHECK(j["tables"][0]["columns"][1]["tol"].is_null());
    CHECK(j["tables"][0]["rows"][1][0] == "nan");
    CHECK(j["tables"][0]["rows"][0][0].get<double>() == 0.1);

    const auto dir = std::filesystem::temp_directory_path() / "noonsim_test_cli";
    std::filesystem::create_directories(dir);
    emit(r, ReportFormat::csv, (dir / "out.csv").string());
    CHECK(read_file(dir / "out.csv") == render(r, ReportFormat::csv));
    CHECK_THROWS_AS(emit(r, ReportFormat::csv, (dir / "missing" / "out.csv").string()), IoError);
}

TEST_CASE("reports embed a config echo that re-validates") {
    for (const char* name : {"noon-protocol", "noon-protocol-sampled", "conditional-map-fock", "hp-sweep"}) {
        CAPTURE(name);
        const ScenarioConfig c = parse_config(builtin(name));
        const RunReport r = run_scenario(c, "2026-01-01T00:00:00Z");
        const json j = json::parse(render(r, ReportFormat::json));
        CHECK(parse_config(j["config"]) == c);
        CHECK(j["provenance"]["seed"] == c.seed);
        CHECK(j["provenance"]["timestamp"] == "2026-01-01T00:00:00Z");
        for (const auto& t : j["tables"])
            for (const auto& col : t["columns"]) CHECK((col["type"] == "text" || !col["unit"].get<std::string>().empty()));
    }
}

TEST_CASE("same config and seed give byte-identical output") {
    for (const char* name : {"noon-protocol-sampled", "metrology-table", "conditional-map-identical"}) {
        CAPTURE(name);
        const ScenarioConfig c = parse_config(builtin(name));
        for (ReportFormat f : {ReportFormat::csv, ReportFormat::json})
            CHECK(render(run_scenario(c, "t"), f) == render(run_scenario(c, "t"), f));
    }
    // A different seed moves the sampled outcomes.
    ScenarioConfig a = parse_config(builtin("noon-protocol-sampled"));
    std::string first = render(run_scenario(a, "t"), ReportFormat::csv);
    bool moved = false;
    for (std::uint64_t s = 1; s < 6 && !moved; ++s) {
        a.seed += s;
        moved = render(run_scenario(a, "t"), ReportFormat::csv) != first;
    }
    CHECK(moved);
}

TEST_CASE("sweep with no rows gives a header-only CSV") {
    json doc = builtin("trapped-ion");
    const ScenarioConfig c = parse_config(doc);
    RunReport r = run_scenario(c, "t");
    r.tables[0].rows.clear();
    const std::string csv = render(r, ReportFormat::csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
    CHECK(csv.rfind("ratio [1]", 0) == 0);
}

TEST_CASE("command-line exit codes") {
    const auto dir = std::filesystem::temp_directory_path() / "noonsim_test_cli";
    std::filesystem::create_directories(dir);
    CHECK(tool("list-scenarios") == 0);
    CHECK(tool("validate @noon-protocol") == 0);
    CHECK(tool("run @noon-protocol --timestamp x --out " + (dir / "a.csv").string()) == 0);
    CHECK(tool("run @noon-protocol --timestamp x --out " + (dir / "b.csv").string()) == 0);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(read_file(dir / "a.csv").rfind("N [1],", 0) == 0);
    CHECK(tool("noon-protocol --set N=[2] --set truncation=4 --timestamp x --format json --out " +
               (dir / "c.json").string()) == 0);
    CHECK(json::parse(read_file(dir / "c.json"))["config"]["params"]["N"] == json::array({2}));

    std::ofstream(dir / "bad.json") << R"({"kind": "noon-protocol", "params": {"N": [3], "truncation": 2}})";
    CHECK(tool("validate " + (dir / "bad.json").string()) == 1);
    CHECK(tool("run " + (dir / "bad.json").string()) == 1);
    CHECK(tool("run " + (dir / "missing.json").string()) == 1);
    CHECK(tool("run @noon-protocol --out " + (dir / "nodir" / "x.csv").string()) == 1);
    CHECK(tool("noon-protocol --set N=[0]") == 1);
    CHECK(tool("hp-sweep --config @noon-protocol") == 1);
}
