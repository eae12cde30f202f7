#pragma once

#include <map>
#include <optional>

#include "beliefgraph/core.hpp"

namespace beliefgraph {

struct PropagationConfig {
    // Step size toward the update in (0,1]. When unset, 1.0 is used if the
    // support subgraph is acyclic and 0.5 otherwise.
    std::optional<double> damping;
    double tolerance = 1e-9;   // max-norm convergence threshold
    int max_iterations = 10000;

    void validate() const {
        if (damping && !(*damping > 0.0 && *damping <= 1.0))
            throw Error(Errc::InvalidParameter, "damping must lie in (0,1]");
        if (!(tolerance > 0.0))
            throw Error(Errc::InvalidParameter, "tolerance must be positive");
        if (max_iterations < 1)
            throw Error(Errc::InvalidParameter, "max_iterations must be at least 1");
    }
};

struct PropagationResult {
    std::map<NodeId, double> conf_out;
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;     // final max-norm change
    double damping_used = 1.0;
};

// Derives structural confidence by damped Jacobi iteration of the weighted
// support average: a node with incoming support edges moves toward
// sum(w * conf(source)) / sum(w); a node without any keeps its assigned
// conf. Contradiction and qualification edges do not participate. Assigned
// scores are the starting point; the input system is never modified.
// Non-convergence is reported, not thrown.
PropagationResult propagate_confidence(const BeliefSystem& sys,
                                       const PropagationConfig& config = {});

// True when the subgraph of support edges has no directed cycle.
bool support_subgraph_is_acyclic(const BeliefSystem& sys);

} // namespace beliefgraph
