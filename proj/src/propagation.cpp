#include <algorithm>
#include <cmath>
#include <deque>

#include "beliefgraph/propagation.hpp"

namespace beliefgraph {

bool support_subgraph_is_acyclic(const BeliefSystem& sys) {
    std::size_t n = sys.node_count();
    std::vector<std::size_t> indegree(n, 0);
    for (const Edge& e : sys.edges())
        if (e.kind == EdgeKind::Support)
            ++indegree[sys.index_of(e.target)];
    std::deque<std::size_t> ready;
    for (std::size_t v = 0; v < n; ++v)
        if (indegree[v] == 0)
            ready.push_back(v);
    std::size_t visited = 0;
    while (!ready.empty()) {
        std::size_t v = ready.front();
        ready.pop_front();
        ++visited;
        for (std::size_t e : sys.out_edge_indices(v)) {
            const Edge& edge = sys.edges()[e];
            if (edge.kind != EdgeKind::Support)
                continue;
            std::size_t w = sys.index_of(edge.target);
            if (--indegree[w] == 0)
                ready.push_back(w);
        }
    }
    return visited == n;
}

PropagationResult propagate_confidence(const BeliefSystem& sys, const PropagationConfig& config) {
    config.validate();
    std::size_t n = sys.node_count();

    // Incoming support per node, plus the precomputed weight total.
    struct Incoming {
        std::vector<std::pair<std::size_t, double>> sources; // (node index, weight)
        double weight_sum = 0.0;
    };
    std::vector<Incoming> incoming(n);
    for (const Edge& e : sys.edges()) {
        if (e.kind != EdgeKind::Support)
            continue;
        std::size_t target = sys.index_of(e.target);
        incoming[target].sources.emplace_back(sys.index_of(e.source), e.weight);
        incoming[target].weight_sum += e.weight;
    }

    double damping = config.damping.value_or(support_subgraph_is_acyclic(sys) ? 1.0 : 0.5);

    std::vector<double> conf(n), next(n);
    for (std::size_t v = 0; v < n; ++v)
        conf[v] = sys.nodes()[v].conf;

    PropagationResult result;
    result.damping_used = damping;
    for (int iter = 1; iter <= config.max_iterations; ++iter) {
        double change = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            const Incoming& in = incoming[v];
            double updated;
            if (in.sources.empty()) {
                updated = conf[v]; // source belief: keeps its assigned score
            } else {
                double acc = 0.0;
                for (const auto& [src, w] : in.sources)
                    acc += w * conf[src];
                double average = acc / in.weight_sum;
                updated = (1.0 - damping) * conf[v] + damping * average;
                updated = std::clamp(updated, 0.0, 1.0); // guard fp drift
            }
            next[v] = updated;
            change = std::max(change, std::abs(updated - conf[v]));
        }
        conf.swap(next);
        result.iterations = iter;
        result.residual = change;
        if (change <= config.tolerance) {
            result.converged = true;
            break;
        }
    }
    for (std::size_t v = 0; v < n; ++v)
        result.conf_out.emplace(sys.nodes()[v].id, conf[v]);
    return result;
}

} // namespace beliefgraph
