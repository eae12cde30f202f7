#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "beliefgraph/format.hpp"
#include "support/schema_check.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace beliefgraph;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

fs::path scratch_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "beliefgraph_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& stdin_data = "",
                  const std::string& env_prefix = "") {
    static int counter = 0;
    fs::path out_path = scratch_dir() / ("out" + std::to_string(counter));
    fs::path err_path = scratch_dir() / ("err" + std::to_string(counter));
    fs::path in_path = scratch_dir() / ("in" + std::to_string(counter));
    ++counter;
    write_file(in_path, stdin_data);
    std::string cmd = env_prefix + std::string(BELIEFGRAPH_CLI) + " " + args + " <" +
                      in_path.string() + " >" + out_path.string() + " 2>" + err_path.string();
    int raw = std::system(cmd.c_str());
    CliResult result;
    result.status = WEXITSTATUS(raw);
    result.out = slurp_file(out_path);
    result.err = slurp_file(err_path);
    return result;
}

std::string fig1_path() {
    return (fs::path(BELIEFGRAPH_DATA_DIR) / "fig1_covid.bgl").string();
}

testsupport::SchemaChecker load_schema(const std::string& name) {
    return testsupport::SchemaChecker(
        json::parse(slurp_file(fs::path(BELIEFGRAPH_SCHEMA_DIR) / name)));
}

void check_schema(const std::string& schema_name, const json& instance) {
    auto errors = load_schema(schema_name).check(instance);
    for (const std::string& e : errors)
        FAIL_CHECK((schema_name + ": " + e));
}

} // namespace

TEST_CASE("validate: empty document reports zero counts, exit 0") {
    fs::path empty = scratch_dir() / "empty.bgl";
    write_file(empty, "");
    CliResult r = run_cli("validate " + empty.string());
    CHECK(r.status == 0);
    CHECK(r.out == "0 nodes, 0 edges\n");
}

TEST_CASE("validate --json conforms to the shipped schema") {
    CliResult r = run_cli("validate " + fig1_path() + " --json");
    CHECK(r.status == 0);
    json payload = json::parse(r.out);
    check_schema("validate_report.schema.json", payload);
    CHECK(payload["nodes"] == 9);
    CHECK(payload["edges"] == 9);
    CHECK(payload["warnings"].empty());
}

TEST_CASE("validate --strict exits 1 on defaulted values, warnings go to stderr") {
    fs::path sloppy = scratch_dir() / "sloppy.bgl";
    write_file(sloppy, "belief a { text: \"x\" }\n");
    CliResult relaxed = run_cli("validate " + sloppy.string());
    CHECK(relaxed.status == 0);
    CHECK(relaxed.err.find("cred defaulted") != std::string::npos);
    CliResult strict = run_cli("validate " + sloppy.string() + " --strict");
    CHECK(strict.status == 1);
}

TEST_CASE("analyze --json: report matches schema and the hand-computed corpus facts") {
    CliResult r = run_cli("analyze " + fig1_path() + " --json");
    REQUIRE(r.status == 0);
    json report = json::parse(r.out);
    check_schema("graph_report.schema.json", report);

    CHECK(report["coherence"]["globally_coherent"] == false);
    CHECK(report["tension_zones"].size() == 2);
    CHECK(report["coherence"]["undermined"] ==
          json::array({"adverse_events_are_rare", "vaccines_reduce_severe_illness"}));

    // The credible-but-unsupported flag on assigned scores, resolved by
    // propagation (support mass backs the belief after all).
    bool saw_cu = false;
    for (const auto& entry : report["divergence_assigned"])
        if (entry["node"] == "vaccines_reduce_severe_illness")
            saw_cu = entry["class"] == "credible_unsupported";
    CHECK(saw_cu);
    REQUIRE(report["consistency_violations"].size() == 1);
    CHECK(report["consistency_violations"][0]["node"] == "vaccines_reduce_severe_illness");
    CHECK(report["consistency_violations"][0]["kind"] == "starved_low_conf");

    CHECK(report["islands"] ==
          json::array({json::array({"droplet_transmission", "masks_reduce_transmission"})}));
    CHECK(report["stats"]["component_count"] == 2);
    CHECK(report["propagation"]["converged"] == true);
    CHECK(report["propagation"]["damping"] == 1.0);
}

TEST_CASE("analyze reads json input and reports byte-identically to the bgl source") {
    fs::path exported = scratch_dir() / "fig1_for_analyze.json";
    REQUIRE(run_cli("export " + fig1_path() + " --to json --output " + exported.string()).status ==
            0);
    CliResult from_bgl = run_cli("analyze " + fig1_path() + " --json");
    CliResult from_json_file = run_cli("analyze " + exported.string() + " --json");
    REQUIRE(from_bgl.status == 0);
    REQUIRE(from_json_file.status == 0);
    CHECK(from_bgl.out == from_json_file.out);
}

TEST_CASE("analyze --strict exits 1 exactly when the audit finds violations") {
    CHECK(run_cli("analyze " + fig1_path() + " --strict").status == 1);
    fs::path clean = scratch_dir() / "clean.bgl";
    write_file(clean, "belief a { text: \"x\", cred: 0.5, conf: 0.5 }\n");
    CHECK(run_cli("analyze " + clean.string() + " --strict").status == 0);
}

TEST_CASE("analyze respects threshold flags") {
    // tau-high above every conf silences the starved-low-conf violation.
    CliResult r = run_cli("analyze " + fig1_path() + " --tau-high 0.95 --json");
    REQUIRE(r.status == 0);
    json report = json::parse(r.out);
    CHECK(report["thresholds"]["tau_high"] == 0.95);
    CHECK(report["consistency_violations"].empty());
}

TEST_CASE("extract: exact solve of the two-conflict example through the CLI") {
    fs::path file = scratch_dir() / "conflicts.bgl";
    write_file(file, "belief a { text: \"\", cred: 0.5, conf: 0.5 }\n"
                     "belief b { text: \"\", cred: 0.5, conf: 0.5 }\n"
                     "belief c { text: \"\", cred: 0.5, conf: 0.5 }\n"
                     "belief d { text: \"\", cred: 0.5, conf: 0.5 }\n"
                     "a -| b [w=1]\nc -| d [w=1]\n");
    CliResult r = run_cli("extract " + file.string() +
                          " --objective count --mode exact --json --enumerate 10");
    REQUIRE(r.status == 0);
    json payload = json::parse(r.out);
    check_schema("extraction_result.schema.json", payload);
    CHECK(payload["exact"] == true);
    CHECK(payload["score"] == 2.0);
    CHECK(payload["nodes"] == json::array({"a", "c"}));
    CHECK(payload["maximal_sets"].size() == 4);
    CHECK(payload["maximal_truncated"] == false);
}

TEST_CASE("propagate --json matches the schema; --write rewrites conf") {
    fs::path rewritten = scratch_dir() / "rewritten.json";
    CliResult r = run_cli("propagate " + fig1_path() + " --json --write " + rewritten.string());
    REQUIRE(r.status == 0);
    json payload = json::parse(r.out);
    check_schema("propagation_result.schema.json", payload);
    CHECK(payload["converged"] == true);
    double expected = (2.0 * 0.8 + 1.0 * 0.6) / 3.0;
    CHECK(payload["conf_out"]["vaccines_reduce_severe_illness"].get<double>() ==
          doctest::Approx(expected).epsilon(1e-12));

    BeliefSystem updated = from_json(slurp_file(rewritten));
    CHECK(updated.node(NodeId{"vaccines_reduce_severe_illness"}).conf ==
          doctest::Approx(expected).epsilon(1e-12));
    // cred and structure are untouched
    CHECK(updated.node(NodeId{"vaccines_reduce_severe_illness"}).cred == 0.9);
    CHECK(updated.edge_count() == 9);
}

TEST_CASE("diverge --json: schema plus the corpus divergence classes") {
    CliResult r = run_cli("diverge " + fig1_path() + " --json");
    REQUIRE(r.status == 0);
    json payload = json::parse(r.out);
    check_schema("divergence.schema.json", payload);
    CHECK(payload["conf_source"] == "assigned");
    bool cu = false, dr = false;
    for (const auto& entry : payload["entries"]) {
        if (entry["node"] == "vaccines_reduce_severe_illness")
            cu = entry["class"] == "credible_unsupported";
        if (entry["node"] == "vaccine_changes_dna")
            dr = entry["class"] == "dubious_reinforced";
    }
    CHECK(cu);
    CHECK(dr);

    CliResult p = run_cli("diverge " + fig1_path() + " --conf propagated --json");
    REQUIRE(p.status == 0);
    for (const auto& entry : json::parse(p.out)["entries"])
        if (entry["node"] == "vaccines_reduce_severe_illness")
            CHECK(entry["class"] == "aligned");
}

TEST_CASE("export --to json output re-parses to a structurally equal system") {
    fs::path exported = scratch_dir() / "fig1.json";
    CliResult r = run_cli("export " + fig1_path() + " --to json --output " + exported.string());
    REQUIRE(r.status == 0);
    json doc = json::parse(slurp_file(exported));
    check_schema("document.schema.json", doc);
    BeliefSystem via_cli = from_json(slurp_file(exported));
    BeliefSystem direct = parse_bgl(slurp_file(fig1_path())).system;
    CHECK(via_cli == direct);
}

TEST_CASE("export --to bgl round-trips through the CLI boundary") {
    fs::path exported = scratch_dir() / "fig1_export.bgl";
    CliResult r = run_cli("export " + fig1_path() + " --to bgl --output " + exported.string());
    REQUIRE(r.status == 0);
    BeliefSystem back = parse_bgl(slurp_file(exported)).system;
    CHECK(back == parse_bgl(slurp_file(fig1_path())).system);
}

TEST_CASE("export --to dot takes an overlay produced by analyze") {
    fs::path report_path = scratch_dir() / "fig1_report.json";
    REQUIRE(run_cli("analyze " + fig1_path() + " --json --output " + report_path.string()).status ==
            0);
    CliResult r = run_cli("export " + fig1_path() + " --to dot --overlay " + report_path.string());
    REQUIRE(r.status == 0);
    CHECK(r.out.find("digraph belief {") != std::string::npos);
    CHECK(r.out.find("style=bold, color=red") != std::string::npos); // contradictions styled
    CHECK(r.out.find("undermined") != std::string::npos);
    CHECK(r.out.find("divergent") != std::string::npos);

    CliResult g = run_cli("export " + fig1_path() + " --to graphml");
    REQUIRE(g.status == 0);
    CHECK(g.out.find("<graphml") != std::string::npos);
}

TEST_CASE("stdin input with explicit format") {
    CliResult r = run_cli("validate - --format bgl", "belief a { text: \"x\", cred: 1, conf: 0 }");
    CHECK(r.status == 0);
    CHECK(r.out == "1 nodes, 0 edges\n");
}

TEST_CASE("exit codes: input errors are 2, usage errors are 3") {
    fs::path bad_json = scratch_dir() / "bad.json";
    write_file(bad_json, "{\"nodes\": [");
    CliResult broken = run_cli("validate " + bad_json.string());
    CHECK(broken.status == 2);
    CHECK(!broken.err.empty());

    fs::path dangling = scratch_dir() / "dangling.bgl";
    write_file(dangling, "a -> b\n");
    CliResult dangle = run_cli("validate " + dangling.string() + " --json");
    CHECK(dangle.status == 2);
    json error_payload = json::parse(dangle.out);
    check_schema("error.schema.json", error_payload);
    CHECK(error_payload["error"]["code"] == "DanglingEdgeEndpoint");
    CHECK(error_payload["error"]["line"] == 1);

    CHECK(run_cli("validate " + scratch_dir().string() + "/absent.bgl").status == 2);
    fs::path odd = scratch_dir() / "odd.graph";
    write_file(odd, "");
    CHECK(run_cli("validate " + odd.string()).status == 2); // undetectable format

    CHECK(run_cli("frobnicate x").status == 3);                  // unknown subcommand
    CHECK(run_cli("validate").status == 3);                      // missing argument
    CHECK(run_cli("extract " + fig1_path()).status == 3);        // missing --objective
    CHECK(run_cli("export " + fig1_path() + " --to svg").status == 3);
    CHECK(run_cli("propagate " + fig1_path() + " --damping 0").status == 3);
    CHECK(run_cli("analyze " + fig1_path() + " --tau-high 2").status == 3);
    CHECK(run_cli("analyze " + fig1_path() + " --tau-high 0.2 --tau-low 0.4").status == 3);
}

TEST_CASE("schema violations carry their path in the error payload") {
    fs::path attack = scratch_dir() / "attack.json";
    write_file(attack, R"({"nodes":[{"id":"a","text":""},{"id":"b","text":""}],
                           "edges":[{"from":"a","to":"b","kind":"attack"}]})");
    CliResult r = run_cli("validate " + attack.string() + " --json");
    CHECK(r.status == 2);
    json payload = json::parse(r.out);
    CHECK(payload["error"]["code"] == "SchemaError");
    CHECK(payload["error"]["path"] == "edges[0].kind");
}

TEST_CASE("threads flag and environment fallback leave output identical") {
    CliResult serial = run_cli("analyze " + fig1_path() + " --json");
    CliResult flagged = run_cli("analyze " + fig1_path() + " --threads 4 --json");
    CliResult via_env = run_cli("analyze " + fig1_path() + " --json", "", "BELIEF_THREADS=4 ");
    REQUIRE(serial.status == 0);
    REQUIRE(flagged.status == 0);
    REQUIRE(via_env.status == 0);
    CHECK(serial.out == flagged.out);
    CHECK(serial.out == via_env.out);
}
