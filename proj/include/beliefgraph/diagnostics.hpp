#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "beliefgraph/coherence.hpp"
#include "beliefgraph/core.hpp"
#include "beliefgraph/propagation.hpp"
#include "beliefgraph/thresholds.hpp"

namespace beliefgraph {

enum class DivergenceClass {
    CredibleUnsupported, // cred >= tau_high and conf <= tau_low
    DubiousReinforced,   // cred <= tau_low and conf >= tau_high
    Aligned,             // neither, and |conf - cred| <= tau_high - tau_low
    Indeterminate,
};

std::string_view to_string(DivergenceClass cls);

struct DivergenceEntry {
    NodeId node;
    double cred = 0.0;
    double conf = 0.0;
    double delta = 0.0; // conf - cred
    DivergenceClass cls = DivergenceClass::Aligned;

    bool operator==(const DivergenceEntry&) const = default;
};

enum class ConfSource { Assigned, Propagated };

// One entry per node, classified from (cred, conf) against the thresholds,
// ordered by |delta| descending then id. conf comes from the stored scores
// or from a propagation run, as requested.
std::vector<DivergenceEntry> divergence_map(const BeliefSystem& sys, const Thresholds& thresholds,
                                            ConfSource source = ConfSource::Assigned,
                                            const PropagationConfig& config = {});

enum class ViolationKind {
    UnderminedHighConf, // high conf on a node undermined via contradiction
    StarvedLowConf,     // low conf despite strong un-undermined support
};

std::string_view to_string(ViolationKind kind);

struct ConsistencyViolation {
    NodeId node;
    ViolationKind kind;
    double conf = 0.0;
    double support_mass = 0.0; // sum of w * conf over qualifying supporters

    bool operator==(const ConsistencyViolation&) const = default;
};

// Checks the two assigned-confidence consistency conditions: no high-conf
// node may be undermined, and no low-conf node may carry support mass of at
// least sigma_strong from high-conf, un-undermined supporters. Empty result
// means the system is confidence-consistent under these thresholds.
std::vector<ConsistencyViolation> audit_confidence_consistency(const BeliefSystem& sys,
                                                               const Thresholds& thresholds);

struct GraphStats {
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::size_t support_edges = 0;
    std::size_t qualification_edges = 0;
    std::size_t contradiction_edges = 0;
    std::array<std::size_t, 10> cred_histogram{}; // fixed 0.1-wide bins
    std::array<std::size_t, 10> conf_histogram{};
    std::vector<std::size_t> component_sizes;     // weak components, descending
};

struct GraphReport {
    Thresholds thresholds;
    CoherenceOptions coherence_options;
    CoherenceReport coherence;
    std::vector<std::vector<NodeId>> tension_zones;
    std::vector<DivergenceEntry> divergence_assigned;
    std::vector<DivergenceEntry> divergence_propagated;
    std::vector<ConsistencyViolation> consistency_violations;
    std::vector<std::vector<NodeId>> islands;
    bool propagation_converged = false;
    int propagation_iterations = 0;
    double propagation_residual = 0.0;
    double damping_used = 1.0;
    GraphStats stats;
};

// Full snapshot: coherence diagnostics, tension zones, both divergence
// variants, the consistency audit, islands and summary statistics. With
// threads > 1 independent sub-analyses run concurrently; the assembled
// report is identical either way.
GraphReport graph_report(const BeliefSystem& sys, const Thresholds& thresholds = {},
                         const PropagationConfig& propagation = {},
                         const CoherenceOptions& coherence = {}, unsigned threads = 1);

// Serialization for CLI consumption; all object keys sort alphabetically so
// equal reports serialize byte-identically.
void to_json(nlohmann::json& j, const DivergenceEntry& entry);
void to_json(nlohmann::json& j, const ConsistencyViolation& violation);
void to_json(nlohmann::json& j, const CoherenceReport& report);
void to_json(nlohmann::json& j, const GraphReport& report);
nlohmann::json propagation_result_json(const PropagationResult& result);

std::string report_to_text(const GraphReport& report);

} // namespace beliefgraph
