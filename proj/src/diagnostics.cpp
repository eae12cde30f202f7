#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <future>
#include <sstream>
#include <unordered_set>

#include "beliefgraph/diagnostics.hpp"
#include "beliefgraph/extraction.hpp"
#include "beliefgraph/format.hpp"

namespace beliefgraph {

std::string_view to_string(DivergenceClass cls) {
    switch (cls) {
    case DivergenceClass::CredibleUnsupported: return "credible_unsupported";
    case DivergenceClass::DubiousReinforced: return "dubious_reinforced";
    case DivergenceClass::Aligned: return "aligned";
    case DivergenceClass::Indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

std::string_view to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::UnderminedHighConf: return "undermined_high_conf";
    case ViolationKind::StarvedLowConf: return "starved_low_conf";
    }
    return "undermined_high_conf";
}

namespace {

DivergenceClass classify(double cred, double conf, const Thresholds& th) {
    if (cred >= th.tau_high && conf <= th.tau_low)
        return DivergenceClass::CredibleUnsupported;
    if (cred <= th.tau_low && conf >= th.tau_high)
        return DivergenceClass::DubiousReinforced;
    if (std::abs(conf - cred) <= th.tau_high - th.tau_low)
        return DivergenceClass::Aligned;
    return DivergenceClass::Indeterminate;
}

} // namespace

std::vector<DivergenceEntry> divergence_map(const BeliefSystem& sys, const Thresholds& thresholds,
                                            ConfSource source, const PropagationConfig& config) {
    thresholds.validate();
    std::map<NodeId, double> propagated;
    if (source == ConfSource::Propagated)
        propagated = propagate_confidence(sys, config).conf_out;

    std::vector<DivergenceEntry> entries;
    entries.reserve(sys.node_count());
    for (const BeliefNode& n : sys.nodes()) {
        DivergenceEntry entry;
        entry.node = n.id;
        entry.cred = n.cred;
        entry.conf = source == ConfSource::Assigned ? n.conf : propagated.at(n.id);
        entry.delta = entry.conf - entry.cred;
        entry.cls = classify(entry.cred, entry.conf, thresholds);
        entries.push_back(std::move(entry));
    }
    std::sort(entries.begin(), entries.end(), [](const DivergenceEntry& a, const DivergenceEntry& b) {
        double da = std::abs(a.delta), db = std::abs(b.delta);
        if (da != db)
            return da > db;
        return a.node < b.node;
    });
    return entries;
}

std::vector<ConsistencyViolation> audit_confidence_consistency(const BeliefSystem& sys,
                                                               const Thresholds& thresholds) {
    thresholds.validate();
    std::vector<NodeId> undermined = undermined_set(sys);
    std::unordered_set<std::string_view> undermined_ids;
    undermined_ids.reserve(undermined.size());
    for (const NodeId& id : undermined)
        undermined_ids.insert(id.value);

    std::vector<ConsistencyViolation> violations;
    for (std::size_t i = 0; i < sys.node_count(); ++i) {
        const BeliefNode& n = sys.nodes()[i];
        if (n.conf >= thresholds.tau_high && undermined_ids.contains(n.id.value)) {
            violations.push_back({n.id, ViolationKind::UnderminedHighConf, n.conf, 0.0});
            continue;
        }
        if (n.conf > thresholds.tau_low)
            continue;
        double mass = 0.0;
        for (std::size_t e : sys.in_edge_indices(i)) {
            const Edge& edge = sys.edges()[e];
            if (edge.kind != EdgeKind::Support)
                continue;
            const BeliefNode& src = sys.node(edge.source);
            if (src.conf >= thresholds.tau_high && !undermined_ids.contains(src.id.value))
                mass += edge.weight * src.conf;
        }
        if (mass >= thresholds.sigma_strong)
            violations.push_back({n.id, ViolationKind::StarvedLowConf, n.conf, mass});
    }
    return violations; // node order, already deterministic
}

namespace {

std::size_t histogram_bin(double v) {
    auto bin = static_cast<long>(std::floor(v * 10.0 + 1e-9));
    return static_cast<std::size_t>(std::clamp(bin, 0L, 9L));
}

GraphStats compute_stats(const BeliefSystem& sys) {
    GraphStats stats;
    stats.node_count = sys.node_count();
    stats.edge_count = sys.edge_count();
    for (const BeliefNode& n : sys.nodes()) {
        ++stats.cred_histogram[histogram_bin(n.cred)];
        ++stats.conf_histogram[histogram_bin(n.conf)];
    }
    std::vector<std::size_t> parent(sys.node_count());
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : sys.edges()) {
        switch (e.kind) {
        case EdgeKind::Support: ++stats.support_edges; break;
        case EdgeKind::Qualification: ++stats.qualification_edges; break;
        case EdgeKind::Contradiction: ++stats.contradiction_edges; break;
        }
        parent[find(sys.index_of(e.source))] = find(sys.index_of(e.target));
    }
    std::map<std::size_t, std::size_t> sizes;
    for (std::size_t i = 0; i < parent.size(); ++i)
        ++sizes[find(i)];
    for (const auto& [root, size] : sizes)
        stats.component_sizes.push_back(size);
    std::sort(stats.component_sizes.rbegin(), stats.component_sizes.rend());
    return stats;
}

} // namespace

GraphReport graph_report(const BeliefSystem& sys, const Thresholds& thresholds,
                         const PropagationConfig& propagation, const CoherenceOptions& coherence,
                         unsigned threads) {
    thresholds.validate();
    propagation.validate();

    GraphReport report;
    report.thresholds = thresholds;
    report.coherence_options = coherence;

    PropagationResult prop;
    if (threads > 1) {
        auto prop_future = std::async(std::launch::async,
                                      [&] { return propagate_confidence(sys, propagation); });
        auto coherence_future = std::async(std::launch::async,
                                           [&] { return analyze_coherence(sys, thresholds, coherence); });
        report.islands = coherent_islands(sys);
        report.coherence = coherence_future.get();
        prop = prop_future.get();
    } else {
        prop = propagate_confidence(sys, propagation);
        report.coherence = analyze_coherence(sys, thresholds, coherence);
        report.islands = coherent_islands(sys);
    }
    report.propagation_converged = prop.converged;
    report.propagation_iterations = prop.iterations;
    report.propagation_residual = prop.residual;
    report.damping_used = prop.damping_used;

    for (const BeliefSystem& zone : tension_zones(sys)) {
        std::vector<NodeId> ids;
        ids.reserve(zone.node_count());
        for (const BeliefNode& n : zone.nodes())
            ids.push_back(n.id);
        report.tension_zones.push_back(std::move(ids));
    }

    report.divergence_assigned = divergence_map(sys, thresholds, ConfSource::Assigned);
    // Reuse the propagation run already performed.
    {
        std::vector<DivergenceEntry> entries;
        entries.reserve(sys.node_count());
        for (const BeliefNode& n : sys.nodes()) {
            DivergenceEntry entry;
            entry.node = n.id;
            entry.cred = n.cred;
            entry.conf = prop.conf_out.at(n.id);
            entry.delta = entry.conf - entry.cred;
            entry.cls = classify(entry.cred, entry.conf, thresholds);
            entries.push_back(std::move(entry));
        }
        std::sort(entries.begin(), entries.end(),
                  [](const DivergenceEntry& a, const DivergenceEntry& b) {
                      double da = std::abs(a.delta), db = std::abs(b.delta);
                      if (da != db)
                          return da > db;
                      return a.node < b.node;
                  });
        report.divergence_propagated = std::move(entries);
    }
    report.consistency_violations = audit_confidence_consistency(sys, thresholds);
    report.stats = compute_stats(sys);
    return report;
}

namespace {

nlohmann::json ids_json(const std::vector<NodeId>& ids) {
    nlohmann::json arr = nlohmann::json::array();
    for (const NodeId& id : ids)
        arr.push_back(id.value);
    return arr;
}

nlohmann::json id_lists_json(const std::vector<std::vector<NodeId>>& lists) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ids : lists)
        arr.push_back(ids_json(ids));
    return arr;
}

nlohmann::json edge_json(const Edge& e) {
    nlohmann::json j;
    j["from"] = e.source.value;
    j["to"] = e.target.value;
    j["kind"] = std::string(to_string(e.kind));
    j["weight"] = e.weight;
    return j;
}

} // namespace

void to_json(nlohmann::json& j, const DivergenceEntry& entry) {
    j["node"] = entry.node.value;
    j["cred"] = entry.cred;
    j["conf"] = entry.conf;
    j["delta"] = entry.delta;
    j["class"] = std::string(to_string(entry.cls));
}

void to_json(nlohmann::json& j, const ConsistencyViolation& violation) {
    j["node"] = violation.node.value;
    j["kind"] = std::string(to_string(violation.kind));
    j["conf"] = violation.conf;
    if (violation.kind == ViolationKind::StarvedLowConf)
        j["support_mass"] = violation.support_mass;
}

void to_json(nlohmann::json& j, const CoherenceReport& report) {
    j["globally_coherent"] = report.globally_coherent;
    j["contradiction_edges"] = nlohmann::json::array();
    for (const Edge& e : report.contradiction_edges)
        j["contradiction_edges"].push_back(edge_json(e));
    j["cycles_enumerated"] = report.cycles_enumerated;
    j["contradiction_cycles"] = id_lists_json(report.contradiction_cycles.items);
    j["cycles_truncated"] = report.contradiction_cycles.truncated;
    j["chains_enumerated"] = report.chains_enumerated;
    j["contradiction_chains"] = id_lists_json(report.contradiction_chains.items);
    j["chains_truncated"] = report.contradiction_chains.truncated;
    j["undermined"] = ids_json(report.undermined);
    j["undersupported"] = nlohmann::json::array();
    for (const UndersupportedBelief& u : report.undersupported) {
        nlohmann::json entry;
        entry["node"] = u.node.value;
        entry["reason"] = std::string(to_string(u.reason));
        j["undersupported"].push_back(std::move(entry));
    }
}

void to_json(nlohmann::json& j, const GraphReport& report) {
    j["thresholds"] = {{"tau_high", report.thresholds.tau_high},
                       {"tau_low", report.thresholds.tau_low},
                       {"sigma_strong", report.thresholds.sigma_strong}};
    j["coherence_options"] = {
        {"cycle_limit", report.coherence_options.cycle_limit},
        {"chain_limit", report.coherence_options.chain_limit},
        {"chain_max_len", report.coherence_options.chain_max_len},
        {"undermining_via_qualification", report.coherence_options.undermining_via_qualification}};
    j["coherence"] = report.coherence;
    j["tension_zones"] = id_lists_json(report.tension_zones);
    j["divergence_assigned"] = report.divergence_assigned;
    j["divergence_propagated"] = report.divergence_propagated;
    j["consistency_violations"] = report.consistency_violations;
    j["islands"] = id_lists_json(report.islands);
    j["propagation"] = {{"converged", report.propagation_converged},
                        {"iterations", report.propagation_iterations},
                        {"residual", report.propagation_residual},
                        {"damping", report.damping_used}};
    nlohmann::json stats;
    stats["node_count"] = report.stats.node_count;
    stats["edge_count"] = report.stats.edge_count;
    stats["support_edges"] = report.stats.support_edges;
    stats["qualification_edges"] = report.stats.qualification_edges;
    stats["contradiction_edges"] = report.stats.contradiction_edges;
    stats["cred_histogram"] = report.stats.cred_histogram;
    stats["conf_histogram"] = report.stats.conf_histogram;
    stats["component_count"] = report.stats.component_sizes.size();
    stats["component_sizes"] = report.stats.component_sizes;
    j["stats"] = std::move(stats);
}

nlohmann::json propagation_result_json(const PropagationResult& result) {
    nlohmann::json j;
    j["converged"] = result.converged;
    j["iterations"] = result.iterations;
    j["residual"] = result.residual;
    j["damping"] = result.damping_used;
    nlohmann::json conf = nlohmann::json::object();
    for (const auto& [id, value] : result.conf_out)
        conf[id.value] = value;
    j["conf_out"] = std::move(conf);
    return j;
}

std::string report_to_text(const GraphReport& report) {
    std::ostringstream out;
    const GraphStats& s = report.stats;
    out << "nodes: " << s.node_count << "  edges: " << s.edge_count << " (support "
        << s.support_edges << ", qualification " << s.qualification_edges << ", contradiction "
        << s.contradiction_edges << ")\n";
    out << "weak components: " << s.component_sizes.size();
    if (!s.component_sizes.empty()) {
        out << " (sizes";
        for (std::size_t size : s.component_sizes)
            out << ' ' << size;
        out << ")";
    }
    out << "\n";
    out << "globally coherent: " << (report.coherence.globally_coherent ? "yes" : "no") << "\n";

    out << "tension zones: " << report.tension_zones.size() << "\n";
    for (const auto& zone : report.tension_zones) {
        out << "  -";
        for (const NodeId& id : zone)
            out << ' ' << id.value;
        out << "\n";
    }
    if (report.coherence.cycles_enumerated) {
        out << "contradiction cycles: " << report.coherence.contradiction_cycles.items.size()
            << (report.coherence.contradiction_cycles.truncated ? " (truncated)" : "") << "\n";
    }
    if (report.coherence.chains_enumerated) {
        out << "contradiction chains: " << report.coherence.contradiction_chains.items.size()
            << (report.coherence.contradiction_chains.truncated ? " (truncated)" : "") << "\n";
    }
    out << "undermined:";
    if (report.coherence.undermined.empty())
        out << " none";
    for (const NodeId& id : report.coherence.undermined)
        out << ' ' << id.value;
    out << "\n";
    out << "undersupported: " << report.coherence.undersupported.size() << "\n";
    for (const UndersupportedBelief& u : report.coherence.undersupported)
        out << "  " << u.node.value << " (" << to_string(u.reason) << ")\n";

    out << "propagation: " << (report.propagation_converged ? "converged" : "did not converge")
        << " after " << report.propagation_iterations << " iterations (residual "
        << format_double(report.propagation_residual) << ", damping "
        << format_double(report.damping_used) << ")\n";

    auto print_divergent = [&](const char* title, const std::vector<DivergenceEntry>& entries) {
        std::size_t flagged = 0;
        for (const DivergenceEntry& e : entries)
            if (e.cls == DivergenceClass::CredibleUnsupported ||
                e.cls == DivergenceClass::DubiousReinforced)
                ++flagged;
        out << title << ": " << flagged << " divergent of " << entries.size() << "\n";
        for (const DivergenceEntry& e : entries) {
            if (e.cls != DivergenceClass::CredibleUnsupported &&
                e.cls != DivergenceClass::DubiousReinforced)
                continue;
            out << "  " << e.node.value << ": cred " << format_double(e.cred) << ", conf "
                << format_double(e.conf) << " -> " << to_string(e.cls) << "\n";
        }
    };
    print_divergent("divergence (assigned conf)", report.divergence_assigned);
    print_divergent("divergence (propagated conf)", report.divergence_propagated);

    out << "consistency violations: " << report.consistency_violations.size() << "\n";
    for (const ConsistencyViolation& v : report.consistency_violations) {
        out << "  " << v.node.value << ": " << to_string(v.kind) << " (conf "
            << format_double(v.conf);
        if (v.kind == ViolationKind::StarvedLowConf)
            out << ", support mass " << format_double(v.support_mass);
        out << ")\n";
    }

    out << "islands: " << report.islands.size() << "\n";
    for (const auto& island : report.islands) {
        out << "  -";
        for (const NodeId& id : island)
            out << ' ' << id.value;
        out << "\n";
    }
    return out.str();
}

} // namespace beliefgraph
