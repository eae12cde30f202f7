#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "beliefgraph/coherence.hpp"
#include "beliefgraph/core.hpp"
#include "beliefgraph/diagnostics.hpp"
#include "beliefgraph/extraction.hpp"
#include "beliefgraph/format.hpp"
#include "beliefgraph/propagation.hpp"

namespace bg = beliefgraph;

namespace {

enum ExitCode : int {
    kOk = 0,
    kViolations = 1, // strict-mode findings
    kInputError = 2,
    kUsageError = 3,
};

enum class InputFormat { Auto, Bgl, Json };

struct CommonOptions {
    std::string input;
    InputFormat format = InputFormat::Auto;
    std::string output; // empty: stdout
    bool json = false;
    bool text = false;

    bool want_json() const { return json && !text; }
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("file", opts.input, "input file (.bgl or .json), or - for stdin")->required();
    std::map<std::string, InputFormat> formats{
        {"auto", InputFormat::Auto}, {"bgl", InputFormat::Bgl}, {"json", InputFormat::Json}};
    cmd->add_option("--format", opts.format, "input format (default: by file extension)")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    cmd->add_option("--output", opts.output, "write stdout payload to this file instead");
    auto* json_flag = cmd->add_flag("--json", opts.json, "machine-readable output");
    cmd->add_flag("--text", opts.text, "human-readable output (default)")->excludes(json_flag);
}

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw bg::Error(bg::Errc::IoError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bg::ParseReport load_input(const CommonOptions& opts) {
    InputFormat format = opts.format;
    if (format == InputFormat::Auto) {
        std::string ext = std::filesystem::path(opts.input).extension().string();
        if (ext == ".bgl")
            format = InputFormat::Bgl;
        else if (ext == ".json")
            format = InputFormat::Json;
        else
            throw bg::Error(bg::Errc::IoError,
                            "cannot infer format of '" + opts.input + "'; pass --format");
    }
    std::string text = slurp(opts.input);
    return format == InputFormat::Bgl ? bg::parse_bgl(text) : bg::parse_json_document(text);
}

void emit(const CommonOptions& opts, const std::string& payload) {
    if (opts.output.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream out(opts.output, std::ios::binary);
    if (!out)
        throw bg::Error(bg::Errc::IoError, "cannot write '" + opts.output + "'");
    out << payload;
}

void print_warnings(const std::vector<bg::ParseWarning>& warnings) {
    for (const bg::ParseWarning& w : warnings) {
        if (w.line > 0)
            std::cerr << "warning: line " << w.line << ", col " << w.column << ": " << w.message
                      << "\n";
        else
            std::cerr << "warning: " << w.message << "\n";
    }
}

nlohmann::json warnings_json(const std::vector<bg::ParseWarning>& warnings) {
    nlohmann::json arr = nlohmann::json::array();
    for (const bg::ParseWarning& w : warnings)
        arr.push_back({{"line", w.line}, {"column", w.column}, {"message", w.message}});
    return arr;
}

int run_validate(const CommonOptions& opts, bool strict) {
    bg::ParseReport report = load_input(opts);
    print_warnings(report.warnings);
    if (opts.want_json()) {
        nlohmann::json j;
        j["nodes"] = report.system.node_count();
        j["edges"] = report.system.edge_count();
        j["warnings"] = warnings_json(report.warnings);
        j["strict"] = strict;
        emit(opts, j.dump());
    } else {
        emit(opts, fmt::format("{} nodes, {} edges", report.system.node_count(),
                               report.system.edge_count()));
    }
    return strict && !report.warnings.empty() ? kViolations : kOk;
}

struct AnalyzeOptions {
    bg::Thresholds thresholds;
    bg::PropagationConfig propagation;
    double damping = -1.0; // <0: resolved from graph shape
    bg::CoherenceOptions coherence;
    unsigned threads = 1;
    bool strict = false;
};

int run_analyze(const CommonOptions& opts, AnalyzeOptions& a) {
    if (a.damping >= 0.0)
        a.propagation.damping = a.damping;
    bg::ParseReport parsed = load_input(opts);
    print_warnings(parsed.warnings);
    bg::GraphReport report = bg::graph_report(parsed.system, a.thresholds, a.propagation,
                                              a.coherence, a.threads);
    if (opts.want_json()) {
        nlohmann::json j = report;
        emit(opts, j.dump());
    } else {
        emit(opts, bg::report_to_text(report));
    }
    return a.strict && !report.consistency_violations.empty() ? kViolations : kOk;
}

int run_extract(const CommonOptions& opts, bg::Objective objective, bg::SolveMode mode,
                std::size_t exact_limit, std::size_t enumerate_limit) {
    bg::ParseReport parsed = load_input(opts);
    print_warnings(parsed.warnings);
    bg::ExtractionResult best =
        bg::max_coherent_subgraph(parsed.system, objective, mode, exact_limit);
    bg::MaximalSetList maximal;
    if (enumerate_limit > 0)
        maximal = bg::enumerate_maximal_coherent(parsed.system, enumerate_limit);

    if (opts.want_json()) {
        nlohmann::json j;
        j["objective"] = std::string(bg::to_string(objective));
        j["exact"] = best.exact;
        j["score"] = best.score;
        nlohmann::json nodes = nlohmann::json::array();
        for (const bg::NodeId& id : best.nodes)
            nodes.push_back(id.value);
        j["nodes"] = std::move(nodes);
        if (enumerate_limit > 0) {
            nlohmann::json sets = nlohmann::json::array();
            for (const auto& set : maximal.sets) {
                nlohmann::json arr = nlohmann::json::array();
                for (const bg::NodeId& id : set)
                    arr.push_back(id.value);
                sets.push_back(std::move(arr));
            }
            j["maximal_sets"] = std::move(sets);
            j["maximal_truncated"] = maximal.truncated;
        }
        emit(opts, j.dump());
    } else {
        std::ostringstream out;
        out << "best " << bg::to_string(objective) << " = " << bg::format_double(best.score)
            << (best.exact ? " (exact)" : " (heuristic)") << "\nnodes:";
        for (const bg::NodeId& id : best.nodes)
            out << ' ' << id.value;
        out << "\n";
        if (enumerate_limit > 0) {
            out << "maximal coherent sets: " << maximal.sets.size()
                << (maximal.truncated ? " (truncated)" : "") << "\n";
            for (const auto& set : maximal.sets) {
                out << "  -";
                for (const bg::NodeId& id : set)
                    out << ' ' << id.value;
                out << "\n";
            }
        }
        emit(opts, out.str());
    }
    return kOk;
}

int run_propagate(const CommonOptions& opts, bg::PropagationConfig config, double damping,
                  const std::string& write_path) {
    if (damping >= 0.0)
        config.damping = damping;
    bg::ParseReport parsed = load_input(opts);
    print_warnings(parsed.warnings);
    bg::PropagationResult result = bg::propagate_confidence(parsed.system, config);

    if (!write_path.empty()) {
        std::vector<bg::BeliefNode> nodes = parsed.system.nodes();
        for (bg::BeliefNode& n : nodes)
            n.conf = result.conf_out.at(n.id);
        bg::BeliefSystem updated = bg::BeliefSystem::build(std::move(nodes), parsed.system.edges(),
                                                           parsed.system.metadata());
        std::ofstream out(write_path, std::ios::binary);
        if (!out)
            throw bg::Error(bg::Errc::IoError, "cannot write '" + write_path + "'");
        out << bg::to_json(updated);
    }

    if (opts.want_json()) {
        emit(opts, bg::propagation_result_json(result).dump());
    } else {
        std::ostringstream out;
        out << (result.converged ? "converged" : "did not converge") << " after "
            << result.iterations << " iterations (residual " << bg::format_double(result.residual)
            << ", damping " << bg::format_double(result.damping_used) << ")\n";
        for (const auto& [id, value] : result.conf_out)
            out << id.value << ": " << bg::format_double(value) << "\n";
        emit(opts, out.str());
    }
    return kOk;
}

int run_diverge(const CommonOptions& opts, bg::ConfSource source, bg::Thresholds thresholds) {
    bg::ParseReport parsed = load_input(opts);
    print_warnings(parsed.warnings);
    std::vector<bg::DivergenceEntry> entries =
        bg::divergence_map(parsed.system, thresholds, source);
    if (opts.want_json()) {
        nlohmann::json j;
        j["conf_source"] = source == bg::ConfSource::Assigned ? "assigned" : "propagated";
        j["thresholds"] = {{"tau_high", thresholds.tau_high},
                           {"tau_low", thresholds.tau_low},
                           {"sigma_strong", thresholds.sigma_strong}};
        j["entries"] = entries;
        emit(opts, j.dump());
    } else {
        std::ostringstream out;
        for (const bg::DivergenceEntry& e : entries)
            out << e.node.value << ": cred " << bg::format_double(e.cred) << ", conf "
                << bg::format_double(e.conf) << ", delta " << bg::format_double(e.delta) << " ("
                << bg::to_string(e.cls) << ")\n";
        emit(opts, out.str());
    }
    return kOk;
}

int run_export(const CommonOptions& opts, const std::string& target,
               const std::string& overlay_path) {
    bg::ParseReport parsed = load_input(opts);
    print_warnings(parsed.warnings);
    bg::DiagnosticsOverlay overlay;
    if (!overlay_path.empty())
        overlay = bg::overlay_from_report_json(slurp(overlay_path));
    std::string payload;
    if (target == "dot")
        payload = bg::to_dot(parsed.system, overlay);
    else if (target == "graphml")
        payload = bg::to_graphml(parsed.system, overlay);
    else if (target == "json")
        payload = bg::to_json(parsed.system);
    else
        payload = bg::render_bgl(parsed.system);
    emit(opts, payload);
    return kOk;
}

int map_error(const bg::Error& err, bool want_json) {
    std::cerr << "error: " << err.what() << "\n";
    if (want_json) {
        nlohmann::json j;
        j["error"] = {{"code", std::string(bg::errc_name(err.code()))},
                      {"message", err.what()}};
        if (err.line > 0) {
            j["error"]["line"] = err.line;
            j["error"]["column"] = err.column;
        }
        if (!err.path.empty())
            j["error"]["path"] = err.path;
        std::cout << j.dump() << "\n";
    }
    return err.code() == bg::Errc::InvalidParameter ? kUsageError : kInputError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"belief graph toolkit: validation, coherence diagnostics, confidence "
                 "propagation, coherent-subgraph extraction and format export"};
    app.require_subcommand(1);

    auto* validate = app.add_subcommand("validate", "parse and validate a document");
    CommonOptions validate_opts;
    bool strict = false;
    add_common(validate, validate_opts);
    validate->add_flag("--strict", strict, "exit 1 when the parse produced warnings");

    auto* analyze = app.add_subcommand("analyze", "full structural report");
    CommonOptions analyze_opts;
    AnalyzeOptions analyze_cfg;
    add_common(analyze, analyze_opts);
    analyze->add_option("--tau-high", analyze_cfg.thresholds.tau_high, "high-score cutoff");
    analyze->add_option("--tau-low", analyze_cfg.thresholds.tau_low, "low-score cutoff");
    analyze->add_option("--sigma", analyze_cfg.thresholds.sigma_strong, "strong-support mass");
    analyze->add_option("--damping", analyze_cfg.damping, "propagation damping in (0,1]");
    analyze->add_option("--tolerance", analyze_cfg.propagation.tolerance, "convergence tolerance");
    analyze->add_option("--max-iter", analyze_cfg.propagation.max_iterations, "iteration cap");
    analyze->add_option("--cycle-limit", analyze_cfg.coherence.cycle_limit,
                        "cycle enumeration budget (0 disables)");
    analyze->add_option("--chain-limit", analyze_cfg.coherence.chain_limit,
                        "chain enumeration budget (0 disables)");
    analyze->add_option("--chain-max-len", analyze_cfg.coherence.chain_max_len,
                        "max nodes per chain");
    analyze->add_flag("--qualification-undermines",
                      analyze_cfg.coherence.undermining_via_qualification,
                      "let undermining travel along qualification edges");
    analyze->add_option("--threads", analyze_cfg.threads, "parallel sub-analyses")
        ->envname("BELIEF_THREADS")
        ->check(CLI::Range(1u, 64u));
    analyze->add_flag("--strict", analyze_cfg.strict,
                      "exit 1 when the consistency audit finds violations");

    auto* extract = app.add_subcommand("extract", "maximum-score coherent subgraph");
    CommonOptions extract_opts;
    add_common(extract, extract_opts);
    std::string objective_name;
    std::string mode_name = "auto";
    std::size_t exact_limit = 40;
    std::size_t enumerate_limit = 0;
    extract->add_option("--objective", objective_name, "what to maximize")
        ->required()
        ->check(CLI::IsMember({"count", "cred", "conf"}));
    extract->add_option("--mode", mode_name, "solver choice")
        ->check(CLI::IsMember({"exact", "heuristic", "auto"}));
    extract->add_option("--exact-limit", exact_limit,
                        "auto mode: max conflicted vertices for the exact solver");
    extract->add_option("--enumerate", enumerate_limit,
                        "also list up to N maximal coherent sets");

    auto* propagate = app.add_subcommand("propagate", "derive structural confidence");
    CommonOptions propagate_opts;
    bg::PropagationConfig prop_cfg;
    double prop_damping = -1.0;
    std::string write_path;
    add_common(propagate, propagate_opts);
    propagate->add_option("--damping", prop_damping, "damping in (0,1]");
    propagate->add_option("--tolerance", prop_cfg.tolerance, "convergence tolerance");
    propagate->add_option("--max-iter", prop_cfg.max_iterations, "iteration cap");
    propagate->add_option("--write", write_path,
                          "write a copy of the document with conf replaced");

    auto* diverge = app.add_subcommand("diverge", "credibility/confidence divergence table");
    CommonOptions diverge_opts;
    add_common(diverge, diverge_opts);
    std::string conf_source = "assigned";
    bg::Thresholds diverge_thresholds;
    diverge->add_option("--conf", conf_source, "which confidence to use")
        ->check(CLI::IsMember({"assigned", "propagated"}));
    diverge->add_option("--tau-high", diverge_thresholds.tau_high, "high-score cutoff");
    diverge->add_option("--tau-low", diverge_thresholds.tau_low, "low-score cutoff");

    auto* export_cmd = app.add_subcommand("export", "convert to dot/graphml/json/bgl");
    CommonOptions export_opts;
    std::string export_to;
    std::string overlay_path;
    add_common(export_cmd, export_opts);
    export_cmd->add_option("--to", export_to, "target format")
        ->required()
        ->check(CLI::IsMember({"dot", "graphml", "json", "bgl"}));
    export_cmd->add_option("--overlay", overlay_path,
                           "graph report JSON used to style dot/graphml output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    const CommonOptions* active = nullptr;
    try {
        if (app.got_subcommand(validate)) {
            active = &validate_opts;
            return run_validate(validate_opts, strict);
        }
        if (app.got_subcommand(analyze)) {
            active = &analyze_opts;
            return run_analyze(analyze_opts, analyze_cfg);
        }
        if (app.got_subcommand(extract)) {
            active = &extract_opts;
            bg::Objective objective = objective_name == "cred"   ? bg::Objective::TotalCred
                                      : objective_name == "conf" ? bg::Objective::TotalConf
                                                                 : bg::Objective::Count;
            bg::SolveMode mode = mode_name == "exact"       ? bg::SolveMode::Exact
                                 : mode_name == "heuristic" ? bg::SolveMode::Heuristic
                                                            : bg::SolveMode::Auto;
            return run_extract(extract_opts, objective, mode, exact_limit, enumerate_limit);
        }
        if (app.got_subcommand(propagate)) {
            active = &propagate_opts;
            return run_propagate(propagate_opts, prop_cfg, prop_damping, write_path);
        }
        if (app.got_subcommand(diverge)) {
            active = &diverge_opts;
            return run_diverge(diverge_opts,
                               conf_source == "assigned" ? bg::ConfSource::Assigned
                                                         : bg::ConfSource::Propagated,
                               diverge_thresholds);
        }
        if (app.got_subcommand(export_cmd)) {
            active = &export_opts;
            return run_export(export_opts, export_to, overlay_path);
        }
    } catch (const bg::Error& err) {
        return map_error(err, active && active->want_json());
    }
    return kUsageError;
}
