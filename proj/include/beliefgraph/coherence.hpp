#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "beliefgraph/core.hpp"
#include "beliefgraph/thresholds.hpp"

namespace beliefgraph {

// Result list of a bounded enumeration. `truncated` is set exactly when the
// search was cut off by its budget, so the listing may be incomplete.
struct PathList {
    std::vector<std::vector<NodeId>> items;
    bool truncated = false;

    bool operator==(const PathList&) const = default;
};

enum class UndersupportReason { NoSupport, IncoherentSupport };

std::string_view to_string(UndersupportReason reason);

struct UndersupportedBelief {
    NodeId node;
    UndersupportReason reason;

    bool operator==(const UndersupportedBelief&) const = default;
};

struct CoherenceOptions {
    // Budget for simple-cycle enumeration: counts cycles examined, of which
    // the contradiction-bearing ones are reported. 0 disables the pass.
    std::size_t cycle_limit = 10000;
    // Budget for maximal-chain enumeration, same convention.
    std::size_t chain_limit = 10000;
    // Maximum number of nodes per reported chain.
    std::size_t chain_max_len = 8;
    // When set, undermining also travels along qualification edges.
    bool undermining_via_qualification = false;
};

struct CoherenceReport {
    bool globally_coherent = true;
    std::vector<Edge> contradiction_edges;
    bool cycles_enumerated = false;
    PathList contradiction_cycles;
    bool chains_enumerated = false;
    PathList contradiction_chains;
    std::vector<NodeId> undermined;
    std::vector<UndersupportedBelief> undersupported;
};

// True iff the subgraph induced by S carries no contradiction edge. Members
// of S must exist in sys.
bool is_locally_coherent(const BeliefSystem& sys, std::span<const NodeId> subset);

// True iff sys has no contradiction edge at all (equivalently, the whole
// node set is locally coherent).
bool is_globally_coherent(const BeliefSystem& sys);

// Forward closure, along support edges, of all contradiction-edge targets:
// the nodes whose standing rests on contradicted beliefs. Sorted output.
std::vector<NodeId> undermined_set(const BeliefSystem& sys,
                                   bool via_qualification = false);

// All simple directed cycles containing at least one contradiction edge,
// each rotated so its smallest node id leads, sorted lexicographically.
PathList find_contradiction_cycles(const BeliefSystem& sys, std::size_t limit = 10000);

// Maximal simple directed paths of at most max_len nodes containing at
// least one contradiction edge. Maximal: no single-node extension at either
// end stays simple and within the bound. max_len must be >= 2.
PathList find_contradiction_chains(const BeliefSystem& sys, std::size_t max_len,
                                   std::size_t limit = 10000);

// Nodes with conf >= tau_high whose incoming support is absent or comes
// only from undermined supporters.
std::vector<UndersupportedBelief> undersupported_beliefs(const BeliefSystem& sys,
                                                         const Thresholds& thresholds);

// One induced subgraph per weakly-connected cluster of contradiction edges;
// every contradiction edge of sys lands in exactly one zone.
std::vector<BeliefSystem> tension_zones(const BeliefSystem& sys);

CoherenceReport analyze_coherence(const BeliefSystem& sys, const Thresholds& thresholds,
                                  const CoherenceOptions& options = {});

} // namespace beliefgraph
