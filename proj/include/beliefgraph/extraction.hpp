#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "beliefgraph/core.hpp"

namespace beliefgraph {

// Undirected conflict structure: two nodes are in conflict iff a
// contradiction edge joins them in either direction. A node set is locally
// coherent exactly when it is an independent set of this graph.
struct ConflictGraph {
    std::vector<NodeId> vertices;                    // all nodes, sorted
    std::vector<std::pair<NodeId, NodeId>> conflicts; // normalized (u < v), sorted
};

ConflictGraph conflict_graph(const BeliefSystem& sys);

enum class Objective { Count, TotalCred, TotalConf };
enum class SolveMode { Exact, Heuristic, Auto };

std::string_view to_string(Objective objective);
std::string_view to_string(SolveMode mode);

struct ExtractionResult {
    std::vector<NodeId> nodes; // sorted
    double score = 0.0;
    bool exact = false;
};

// Best-scoring locally coherent node set. Nodes untouched by any conflict
// are always part of the solution; the solver only decides the conflicted
// ones. Exact mode runs branch-and-bound (greedy clique-cover bound,
// degeneracy branching) and breaks score ties toward the lexicographically
// smallest id set; heuristic mode greedily takes the best weight/(degree+1)
// vertex and never claims optimality. Auto picks exact while the conflicted
// vertex count is at most auto_exact_limit.
ExtractionResult max_coherent_subgraph(const BeliefSystem& sys, Objective objective,
                                       SolveMode mode = SolveMode::Auto,
                                       std::size_t auto_exact_limit = 40);

struct MaximalSetList {
    std::vector<std::vector<NodeId>> sets; // each sorted; list sorted
    bool truncated = false;
};

// All inclusion-maximal locally coherent node sets, enumerated by pivoting
// Bron-Kerbosch over the complement of the conflicted subgraph. Stops after
// `limit` sets and flags the cut. limit must be >= 1.
MaximalSetList enumerate_maximal_coherent(const BeliefSystem& sys, std::size_t limit);

// Weakly-connected components of the support/qualification subgraph that
// contain no endpoint of a contradiction edge: self-reinforcing clusters
// untouched by conflict.
std::vector<std::vector<NodeId>> coherent_islands(const BeliefSystem& sys);

} // namespace beliefgraph
