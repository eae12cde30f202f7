#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "beliefgraph/coherence.hpp"

namespace beliefgraph {

std::string_view to_string(UndersupportReason reason) {
    switch (reason) {
    case UndersupportReason::NoSupport: return "no_support";
    case UndersupportReason::IncoherentSupport: return "incoherent_support";
    }
    return "no_support";
}

bool is_locally_coherent(const BeliefSystem& sys, std::span<const NodeId> subset) {
    std::vector<char> member(sys.node_count(), 0);
    for (const NodeId& id : subset)
        member[sys.index_of(id)] = 1; // throws UnknownNode for strays
    for (std::size_t i = 0; i < member.size(); ++i) {
        if (!member[i])
            continue;
        for (std::size_t e : sys.out_edge_indices(i)) {
            const Edge& edge = sys.edges()[e];
            if (edge.kind == EdgeKind::Contradiction && member[sys.index_of(edge.target)])
                return false;
        }
    }
    return true;
}

bool is_globally_coherent(const BeliefSystem& sys) {
    return std::none_of(sys.edges().begin(), sys.edges().end(),
                        [](const Edge& e) { return e.kind == EdgeKind::Contradiction; });
}

std::vector<NodeId> undermined_set(const BeliefSystem& sys, bool via_qualification) {
    std::vector<char> in_set(sys.node_count(), 0);
    std::deque<std::size_t> queue;
    for (const Edge& e : sys.edges()) {
        if (e.kind != EdgeKind::Contradiction)
            continue;
        std::size_t target = sys.index_of(e.target);
        if (!in_set[target]) {
            in_set[target] = 1;
            queue.push_back(target);
        }
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t e : sys.out_edge_indices(v)) {
            const Edge& edge = sys.edges()[e];
            bool transmits = edge.kind == EdgeKind::Support ||
                             (via_qualification && edge.kind == EdgeKind::Qualification);
            if (!transmits)
                continue;
            std::size_t w = sys.index_of(edge.target);
            if (!in_set[w]) {
                in_set[w] = 1;
                queue.push_back(w);
            }
        }
    }
    std::vector<NodeId> result;
    for (std::size_t i = 0; i < in_set.size(); ++i)
        if (in_set[i])
            result.push_back(sys.nodes()[i].id);
    return result; // nodes() is id-sorted, so this is too
}

namespace {

// Compact adjacency over node indices, with a kind lookup per ordered pair.
struct IndexedGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> out; // sorted targets
    std::vector<std::vector<std::size_t>> in;  // sorted sources
    std::unordered_map<std::uint64_t, EdgeKind> kind;

    explicit IndexedGraph(const BeliefSystem& sys) : n(sys.node_count()), out(n), in(n) {
        kind.reserve(sys.edge_count());
        for (const Edge& e : sys.edges()) {
            std::size_t u = sys.index_of(e.source);
            std::size_t v = sys.index_of(e.target);
            out[u].push_back(v);
            in[v].push_back(u);
            kind.emplace(static_cast<std::uint64_t>(u) * n + v, e.kind);
        }
        for (auto& lst : out)
            std::sort(lst.begin(), lst.end());
        for (auto& lst : in)
            std::sort(lst.begin(), lst.end());
    }

    EdgeKind kind_of(std::size_t u, std::size_t v) const {
        return kind.at(static_cast<std::uint64_t>(u) * n + v);
    }

    bool is_contradiction(std::size_t u, std::size_t v) const {
        return kind_of(u, v) == EdgeKind::Contradiction;
    }
};

// Iterative Tarjan over an index-vector adjacency restricted to `alive`.
std::vector<int> strongly_connected_components(std::size_t n,
                                               const std::vector<std::vector<std::size_t>>& out,
                                               const std::vector<char>& alive,
                                               int& component_count) {
    constexpr int kUnvisited = -1;
    std::vector<int> comp(n, kUnvisited), index(n, kUnvisited), lowlink(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    int next_index = 0;
    component_count = 0;

    struct Frame {
        std::size_t v;
        std::size_t edge_pos;
    };
    std::vector<Frame> call_stack;

    for (std::size_t root = 0; root < n; ++root) {
        if (!alive[root] || index[root] != kUnvisited)
            continue;
        call_stack.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call_stack.empty()) {
            Frame& frame = call_stack.back();
            std::size_t v = frame.v;
            if (frame.edge_pos < out[v].size()) {
                std::size_t w = out[v][frame.edge_pos++];
                if (!alive[w])
                    continue;
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call_stack.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                call_stack.pop_back();
                if (!call_stack.empty())
                    lowlink[call_stack.back().v] = std::min(lowlink[call_stack.back().v], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    while (true) {
                        std::size_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = component_count;
                        if (w == v)
                            break;
                    }
                    ++component_count;
                }
            }
        }
    }
    return comp;
}

// Johnson-style circuit enumeration with a budget on the number of simple
// cycles examined. Runs only inside strongly connected components that
// contain a contradiction edge; cycles found there that carry none still
// count toward the budget but are not reported.
class CycleEnumerator {
public:
    CycleEnumerator(const BeliefSystem& sys, const IndexedGraph& graph, std::size_t limit)
        : sys_(sys), graph_(graph), budget_(limit) {}

    PathList run() {
        PathList result;
        if (budget_ == 0)
            return result;

        std::vector<char> alive = contradiction_scc_vertices();

        // Repeatedly take the least vertex s of a nontrivial component of the
        // remaining subgraph and enumerate all circuits through s; every such
        // run yields at least one cycle, so the component recomputations are
        // charged to cycles examined.
        while (!stop_) {
            int count = 0;
            std::vector<int> comp = strongly_connected_components(graph_.n, graph_.out, alive, count);
            std::vector<std::size_t> comp_size(static_cast<std::size_t>(count), 0);
            for (std::size_t v = 0; v < graph_.n; ++v)
                if (alive[v])
                    ++comp_size[comp[v]];
            std::size_t s = graph_.n;
            for (std::size_t v = 0; v < graph_.n; ++v)
                if (alive[v] && comp_size[comp[v]] >= 2) {
                    s = v;
                    break;
                }
            if (s == graph_.n)
                break;
            scc_of_ = std::move(comp);
            root_component_ = scc_of_[s];
            blocked_.assign(graph_.n, 0);
            block_map_.assign(graph_.n, {});
            path_.clear();
            root_ = s;
            circuit(s, alive);
            alive[s] = 0;
        }

        std::sort(cycles_.begin(), cycles_.end());
        result.items = std::move(cycles_);
        result.truncated = stop_;
        return result;
    }

private:
    // Vertices of SCCs that contain at least one internal contradiction edge.
    std::vector<char> contradiction_scc_vertices() const {
        std::vector<char> all(graph_.n, 1);
        int count = 0;
        std::vector<int> comp = strongly_connected_components(graph_.n, graph_.out, all, count);
        std::vector<char> has_contra(static_cast<std::size_t>(count), 0);
        for (const Edge& e : sys_.edges()) {
            if (e.kind != EdgeKind::Contradiction)
                continue;
            std::size_t u = sys_.index_of(e.source);
            std::size_t v = sys_.index_of(e.target);
            if (comp[u] == comp[v])
                has_contra[comp[u]] = 1;
        }
        std::vector<char> keep(graph_.n, 0);
        for (std::size_t v = 0; v < graph_.n; ++v)
            keep[v] = has_contra[comp[v]];
        return keep;
    }

    void unblock(std::size_t v) {
        blocked_[v] = 0;
        for (std::size_t w : block_map_[v])
            if (blocked_[w])
                unblock(w);
        block_map_[v].clear();
    }

    bool circuit(std::size_t v, const std::vector<char>& alive) {
        bool found = false;
        path_.push_back(v);
        blocked_[v] = 1;
        for (std::size_t w : graph_.out[v]) {
            if (stop_)
                break;
            if (!alive[w] || scc_of_[w] != root_component_)
                continue;
            if (w == root_) {
                record_cycle();
                found = true;
            } else if (!blocked_[w]) {
                if (circuit(w, alive))
                    found = true;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (std::size_t w : graph_.out[v]) {
                if (!alive[w] || scc_of_[w] != root_component_)
                    continue;
                auto& lst = block_map_[w];
                if (std::find(lst.begin(), lst.end(), v) == lst.end())
                    lst.push_back(v);
            }
        }
        path_.pop_back();
        return found;
    }

    void record_cycle() {
        if (examined_ == budget_) {
            stop_ = true;
            return;
        }
        ++examined_;
        bool has_contradiction = false;
        for (std::size_t i = 0; i + 1 < path_.size(); ++i)
            if (graph_.is_contradiction(path_[i], path_[i + 1])) {
                has_contradiction = true;
                break;
            }
        if (!has_contradiction && graph_.is_contradiction(path_.back(), path_.front()))
            has_contradiction = true;
        if (!has_contradiction)
            return;
        std::vector<NodeId> cycle;
        cycle.reserve(path_.size());
        for (std::size_t v : path_)
            cycle.push_back(sys_.nodes()[v].id);
        cycles_.push_back(std::move(cycle));
    }

    const BeliefSystem& sys_;
    const IndexedGraph& graph_;
    std::size_t budget_;
    std::size_t examined_ = 0;
    bool stop_ = false;
    std::size_t root_ = 0;
    int root_component_ = 0;
    std::vector<int> scc_of_;
    std::vector<char> blocked_;
    std::vector<std::vector<std::size_t>> block_map_;
    std::vector<std::size_t> path_;
    std::vector<std::vector<NodeId>> cycles_;
};

// Bounded search for maximal simple paths that carry a contradiction edge.
// Prefixes that cannot pick one up within the length bound are cut using a
// reverse-BFS distance to the nearest contradiction-edge source.
class ChainEnumerator {
public:
    ChainEnumerator(const BeliefSystem& sys, const IndexedGraph& graph, std::size_t max_len,
                    std::size_t limit)
        : sys_(sys), graph_(graph), max_len_(max_len), budget_(limit) {
        compute_distance();
    }

    PathList run() {
        PathList result;
        if (budget_ == 0)
            return result;
        for (std::size_t start = 0; start < graph_.n && !stop_; ++start) {
            if (dist_[start] == kInf || 2 + dist_[start] > max_len_)
                continue;
            on_path_.assign(graph_.n, 0);
            path_.clear();
            extend(start, 0);
        }
        std::sort(chains_.begin(), chains_.end());
        result.items = std::move(chains_);
        result.truncated = stop_;
        return result;
    }

private:
    static constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();

    // dist_[v] = fewest edges from v to any node with an outgoing
    // contradiction edge (0 when v itself has one).
    void compute_distance() {
        dist_.assign(graph_.n, kInf);
        std::deque<std::size_t> queue;
        for (std::size_t v = 0; v < graph_.n; ++v)
            for (std::size_t w : graph_.out[v])
                if (graph_.is_contradiction(v, w) && dist_[v] == kInf) {
                    dist_[v] = 0;
                    queue.push_back(v);
                }
        while (!queue.empty()) {
            std::size_t v = queue.front();
            queue.pop_front();
            for (std::size_t u : graph_.in[v])
                if (dist_[u] == kInf) {
                    dist_[u] = dist_[v] + 1;
                    queue.push_back(u);
                }
        }
    }

    void extend(std::size_t v, std::size_t contradictions_on_path) {
        path_.push_back(v);
        on_path_[v] = 1;

        bool can_grow = false;
        if (path_.size() < max_len_) {
            for (std::size_t w : graph_.out[v]) {
                if (stop_)
                    break;
                if (on_path_[w])
                    continue;
                std::size_t c = contradictions_on_path + (graph_.is_contradiction(v, w) ? 1 : 0);
                // A contradiction edge must still be reachable in the nodes
                // we have left; otherwise the branch is dead.
                if (c == 0 && (dist_[w] == kInf || path_.size() + 1 + dist_[w] + 1 > max_len_))
                    continue;
                can_grow = true;
                extend(w, c);
            }
        }
        if (!can_grow && !stop_)
            finish_path(contradictions_on_path);

        on_path_[v] = 0;
        path_.pop_back();
    }

    void finish_path(std::size_t contradictions_on_path) {
        if (path_.size() < 2)
            return;
        // Front-extension possible => a longer path subsumes this one.
        if (path_.size() < max_len_)
            for (std::size_t u : graph_.in[path_.front()])
                if (!on_path_[u])
                    return;
        if (examined_ == budget_) {
            stop_ = true;
            return;
        }
        ++examined_;
        if (contradictions_on_path == 0)
            return;
        std::vector<NodeId> chain;
        chain.reserve(path_.size());
        for (std::size_t v : path_)
            chain.push_back(sys_.nodes()[v].id);
        chains_.push_back(std::move(chain));
    }

    const BeliefSystem& sys_;
    const IndexedGraph& graph_;
    std::size_t max_len_;
    std::size_t budget_;
    std::size_t examined_ = 0;
    bool stop_ = false;
    std::vector<std::size_t> dist_;
    std::vector<char> on_path_;
    std::vector<std::size_t> path_;
    std::vector<std::vector<NodeId>> chains_;
};

} // namespace

PathList find_contradiction_cycles(const BeliefSystem& sys, std::size_t limit) {
    IndexedGraph graph(sys);
    return CycleEnumerator(sys, graph, limit).run();
}

PathList find_contradiction_chains(const BeliefSystem& sys, std::size_t max_len,
                                   std::size_t limit) {
    if (max_len < 2)
        throw Error(Errc::InvalidParameter, "chain max_len must be at least 2");
    IndexedGraph graph(sys);
    return ChainEnumerator(sys, graph, max_len, limit).run();
}

std::vector<UndersupportedBelief> undersupported_beliefs(const BeliefSystem& sys,
                                                         const Thresholds& thresholds) {
    thresholds.validate();
    std::vector<NodeId> undermined = undermined_set(sys);
    std::unordered_set<std::string_view> undermined_ids;
    undermined_ids.reserve(undermined.size());
    for (const NodeId& id : undermined)
        undermined_ids.insert(id.value);

    std::vector<UndersupportedBelief> result;
    for (std::size_t i = 0; i < sys.node_count(); ++i) {
        const BeliefNode& n = sys.nodes()[i];
        if (n.conf < thresholds.tau_high)
            continue;
        bool has_support = false;
        bool has_sound_support = false;
        for (std::size_t e : sys.in_edge_indices(i)) {
            const Edge& edge = sys.edges()[e];
            if (edge.kind != EdgeKind::Support)
                continue;
            has_support = true;
            if (!undermined_ids.contains(edge.source.value))
                has_sound_support = true;
        }
        if (!has_support)
            result.push_back({n.id, UndersupportReason::NoSupport});
        else if (!has_sound_support)
            result.push_back({n.id, UndersupportReason::IncoherentSupport});
    }
    return result;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i)
            parent[i] = i;
    }

    std::size_t find(std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }

    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

} // namespace

std::vector<BeliefSystem> tension_zones(const BeliefSystem& sys) {
    UnionFind uf(sys.node_count());
    std::vector<char> touched(sys.node_count(), 0);
    for (const Edge& e : sys.edges()) {
        if (e.kind != EdgeKind::Contradiction)
            continue;
        std::size_t u = sys.index_of(e.source);
        std::size_t v = sys.index_of(e.target);
        touched[u] = touched[v] = 1;
        uf.unite(u, v);
    }
    std::map<std::size_t, std::vector<NodeId>> groups;
    for (std::size_t i = 0; i < sys.node_count(); ++i)
        if (touched[i])
            groups[uf.find(i)].push_back(sys.nodes()[i].id);

    std::vector<std::vector<NodeId>> ordered;
    ordered.reserve(groups.size());
    for (auto& [root, ids] : groups)
        ordered.push_back(std::move(ids)); // ids already ascending
    std::sort(ordered.begin(), ordered.end());

    std::vector<BeliefSystem> zones;
    zones.reserve(ordered.size());
    for (const auto& ids : ordered)
        zones.push_back(sys.induced_subgraph(ids));
    return zones;
}

CoherenceReport analyze_coherence(const BeliefSystem& sys, const Thresholds& thresholds,
                                  const CoherenceOptions& options) {
    CoherenceReport report;
    for (const Edge& e : sys.edges())
        if (e.kind == EdgeKind::Contradiction)
            report.contradiction_edges.push_back(e);
    report.globally_coherent = report.contradiction_edges.empty();
    if (options.cycle_limit > 0) {
        report.cycles_enumerated = true;
        report.contradiction_cycles = find_contradiction_cycles(sys, options.cycle_limit);
    }
    if (options.chain_limit > 0) {
        report.chains_enumerated = true;
        report.contradiction_chains =
            find_contradiction_chains(sys, options.chain_max_len, options.chain_limit);
    }
    report.undermined = undermined_set(sys, options.undermining_via_qualification);
    report.undersupported = undersupported_beliefs(sys, thresholds);
    return report;
}

} // namespace beliefgraph
