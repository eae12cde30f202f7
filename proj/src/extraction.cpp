#include <algorithm>
#include <map>

#include <boost/dynamic_bitset.hpp>

#include "beliefgraph/extraction.hpp"

namespace beliefgraph {

std::string_view to_string(Objective objective) {
    switch (objective) {
    case Objective::Count: return "count";
    case Objective::TotalCred: return "total_cred";
    case Objective::TotalConf: return "total_conf";
    }
    return "count";
}

std::string_view to_string(SolveMode mode) {
    switch (mode) {
    case SolveMode::Exact: return "exact";
    case SolveMode::Heuristic: return "heuristic";
    case SolveMode::Auto: return "auto";
    }
    return "auto";
}

ConflictGraph conflict_graph(const BeliefSystem& sys) {
    ConflictGraph graph;
    graph.vertices.reserve(sys.node_count());
    for (const BeliefNode& n : sys.nodes())
        graph.vertices.push_back(n.id);
    for (const Edge& e : sys.edges()) {
        if (e.kind != EdgeKind::Contradiction)
            continue;
        auto pair = e.source < e.target ? std::make_pair(e.source, e.target)
                                        : std::make_pair(e.target, e.source);
        graph.conflicts.push_back(std::move(pair));
    }
    std::sort(graph.conflicts.begin(), graph.conflicts.end());
    graph.conflicts.erase(std::unique(graph.conflicts.begin(), graph.conflicts.end()),
                          graph.conflicts.end());
    return graph;
}

namespace {

using Bitset = boost::dynamic_bitset<>;

double node_weight(const BeliefNode& n, Objective objective) {
    switch (objective) {
    case Objective::Count: return 1.0;
    case Objective::TotalCred: return n.cred;
    case Objective::TotalConf: return n.conf;
    }
    return 1.0;
}

// The conflicted part of the problem, over local vertex indices that follow
// the global (id-sorted) node order.
struct ConflictedSubgraph {
    std::vector<std::size_t> global;  // local -> global node index
    std::vector<Bitset> adj;          // conflict adjacency
    std::vector<double> weight;
    std::vector<std::size_t> order;   // degeneracy order (local indices)

    std::size_t size() const { return global.size(); }
};

ConflictedSubgraph build_conflicted(const BeliefSystem& sys, Objective objective) {
    std::size_t n = sys.node_count();
    std::vector<std::vector<std::size_t>> neighbors(n);
    for (const Edge& e : sys.edges()) {
        if (e.kind != EdgeKind::Contradiction)
            continue;
        std::size_t u = sys.index_of(e.source);
        std::size_t v = sys.index_of(e.target);
        neighbors[u].push_back(v);
        neighbors[v].push_back(u);
    }
    ConflictedSubgraph sub;
    std::vector<std::size_t> local_of(n, n);
    for (std::size_t v = 0; v < n; ++v)
        if (!neighbors[v].empty()) {
            local_of[v] = sub.global.size();
            sub.global.push_back(v);
        }
    std::size_t m = sub.global.size();
    sub.adj.assign(m, Bitset(m));
    sub.weight.resize(m);
    for (std::size_t lv = 0; lv < m; ++lv) {
        std::size_t v = sub.global[lv];
        sub.weight[lv] = node_weight(sys.nodes()[v], objective);
        for (std::size_t w : neighbors[v])
            sub.adj[lv].set(local_of[w]);
    }

    // Degeneracy order: repeatedly peel a minimum-degree vertex.
    std::vector<std::size_t> degree(m);
    for (std::size_t v = 0; v < m; ++v)
        degree[v] = sub.adj[v].count();
    Bitset remaining(m);
    remaining.set();
    sub.order.reserve(m);
    for (std::size_t step = 0; step < m; ++step) {
        std::size_t best = m;
        for (std::size_t v = remaining.find_first(); v != Bitset::npos;
             v = remaining.find_next(v))
            if (best == m || degree[v] < degree[best])
                best = v;
        sub.order.push_back(best);
        remaining.reset(best);
        for (std::size_t v = remaining.find_first(); v != Bitset::npos;
             v = remaining.find_next(v))
            if (sub.adj[best].test(v) && degree[v] > 0)
                --degree[v];
    }
    return sub;
}

// Canonical score: weights summed in ascending global node order, so equal
// node sets always produce the identical double.
double canonical_score(const BeliefSystem& sys, Objective objective, const Bitset& global_set) {
    double total = 0.0;
    for (std::size_t v = global_set.find_first(); v != Bitset::npos; v = global_set.find_next(v))
        total += node_weight(sys.nodes()[v], objective);
    return total;
}

// Branch-and-bound maximum-weight independent set over the conflicted
// subgraph. `base` holds globally forced nodes (conflict-free vertices plus
// any committed ones); the returned value is the best canonical score of
// base plus an independent candidate subset.
class ExactSolver {
public:
    ExactSolver(const BeliefSystem& sys, Objective objective, const ConflictedSubgraph& sub)
        : sys_(sys), objective_(objective), sub_(sub) {}

    // `candidates`: local vertices still open. `base_global`: forced nodes.
    double solve(const Bitset& candidates, const Bitset& base_global) {
        base_global_ = base_global;
        base_weight_ = canonical_score(sys_, objective_, base_global);
        best_ = -1.0;
        chosen_.resize(sub_.size());
        chosen_.reset();
        best_set_.resize(sys_.node_count());
        search(candidates, 0.0);
        return best_;
    }

    const Bitset& best_global_set() const { return best_set_; }

private:
    static constexpr double kSlack = 1e-11;

    double clique_cover_bound(const Bitset& candidates) const {
        // Greedy cover in degeneracy order; each clique can contribute at
        // most one vertex, so the sum of per-clique maxima bounds the rest.
        std::vector<Bitset> cliques;
        std::vector<double> clique_max;
        double bound = 0.0;
        for (std::size_t v : sub_.order) {
            if (!candidates.test(v))
                continue;
            bool placed = false;
            for (std::size_t k = 0; k < cliques.size(); ++k) {
                if (cliques[k].is_subset_of(sub_.adj[v])) {
                    cliques[k].set(v);
                    if (sub_.weight[v] > clique_max[k]) {
                        bound += sub_.weight[v] - clique_max[k];
                        clique_max[k] = sub_.weight[v];
                    }
                    placed = true;
                    break;
                }
            }
            if (!placed) {
                Bitset clique(sub_.size());
                clique.set(v);
                cliques.push_back(std::move(clique));
                clique_max.push_back(sub_.weight[v]);
                bound += sub_.weight[v];
            }
        }
        return bound;
    }

    void evaluate_leaf() {
        Bitset full = base_global_;
        for (std::size_t v = chosen_.find_first(); v != Bitset::npos; v = chosen_.find_next(v))
            full.set(sub_.global[v]);
        double value = canonical_score(sys_, objective_, full);
        if (value > best_) {
            best_ = value;
            best_set_ = std::move(full);
        }
    }

    void search(const Bitset& candidates, double running) {
        if (candidates.none()) {
            evaluate_leaf();
            return;
        }
        if (base_weight_ + running + clique_cover_bound(candidates) < best_ - kSlack)
            return;
        std::size_t branch = sub_.size();
        for (std::size_t v : sub_.order)
            if (candidates.test(v)) {
                branch = v;
                break;
            }
        // Include first: good solutions early tighten the bound.
        Bitset included = candidates;
        included.reset(branch);
        included -= sub_.adj[branch];
        chosen_.set(branch);
        search(included, running + sub_.weight[branch]);
        chosen_.reset(branch);

        Bitset excluded = candidates;
        excluded.reset(branch);
        search(excluded, running);
    }

    const BeliefSystem& sys_;
    Objective objective_;
    const ConflictedSubgraph& sub_;
    Bitset base_global_;
    double base_weight_ = 0.0;
    double best_ = -1.0;
    Bitset chosen_;
    Bitset best_set_;
};

Bitset free_vertex_set(const BeliefSystem& sys, const ConflictedSubgraph& sub) {
    Bitset base(sys.node_count());
    base.set();
    for (std::size_t v : sub.global)
        base.reset(v);
    return base;
}

ExtractionResult solve_exact(const BeliefSystem& sys, Objective objective,
                             const ConflictedSubgraph& sub) {
    Bitset free_set = free_vertex_set(sys, sub);
    ExactSolver solver(sys, objective, sub);
    Bitset all(sub.size());
    all.set();
    double best = solver.solve(all, free_set);

    // Rebuild the winning set greedily in id order: keep a vertex exactly
    // when the optimum stays reachable with it committed. This pins the
    // lexicographically smallest optimal id set.
    Bitset committed = free_set;
    Bitset blocked(sub.size());
    for (std::size_t v = 0; v < sub.size(); ++v) {
        if (blocked.test(v))
            continue;
        Bitset with_v = committed;
        with_v.set(sub.global[v]);
        Bitset candidates(sub.size());
        for (std::size_t u = v + 1; u < sub.size(); ++u)
            if (!blocked.test(u) && !sub.adj[v].test(u))
                candidates.set(u);
        if (solver.solve(candidates, with_v) == best) {
            committed = std::move(with_v);
            blocked |= sub.adj[v];
        }
    }

    ExtractionResult result;
    result.exact = true;
    result.score = canonical_score(sys, objective, committed);
    for (std::size_t v = committed.find_first(); v != Bitset::npos; v = committed.find_next(v))
        result.nodes.push_back(sys.nodes()[v].id);
    return result;
}

ExtractionResult solve_heuristic(const BeliefSystem& sys, Objective objective,
                                 const ConflictedSubgraph& sub) {
    Bitset chosen_global = free_vertex_set(sys, sub);
    Bitset alive(sub.size());
    alive.set();
    while (alive.any()) {
        std::size_t pick = Bitset::npos;
        double pick_ratio = -1.0;
        for (std::size_t v = alive.find_first(); v != Bitset::npos; v = alive.find_next(v)) {
            double degree = static_cast<double>((sub.adj[v] & alive).count());
            double ratio = sub.weight[v] / (degree + 1.0);
            if (ratio > pick_ratio) { // ties keep the smallest id
                pick_ratio = ratio;
                pick = v;
            }
        }
        chosen_global.set(sub.global[pick]);
        alive.reset(pick);
        alive -= sub.adj[pick];
    }
    ExtractionResult result;
    result.exact = false;
    result.score = canonical_score(sys, objective, chosen_global);
    for (std::size_t v = chosen_global.find_first(); v != Bitset::npos;
         v = chosen_global.find_next(v))
        result.nodes.push_back(sys.nodes()[v].id);
    return result;
}

} // namespace

ExtractionResult max_coherent_subgraph(const BeliefSystem& sys, Objective objective,
                                       SolveMode mode, std::size_t auto_exact_limit) {
    ConflictedSubgraph sub = build_conflicted(sys, objective);
    bool exact = mode == SolveMode::Exact ||
                 (mode == SolveMode::Auto && sub.size() <= auto_exact_limit);
    if (sub.size() == 0) {
        // Nothing conflicts; the whole graph is the provably best answer.
        ExtractionResult result;
        result.exact = true;
        Bitset all(sys.node_count());
        all.set();
        result.score = canonical_score(sys, objective, all);
        for (const BeliefNode& n : sys.nodes())
            result.nodes.push_back(n.id);
        return result;
    }
    return exact ? solve_exact(sys, objective, sub) : solve_heuristic(sys, objective, sub);
}

namespace {

// Pivoting Bron-Kerbosch over the complement of the conflicted subgraph;
// maximal cliques there are exactly the maximal independent conflict-vertex
// sets.
class MaximalSetEnumerator {
public:
    MaximalSetEnumerator(const BeliefSystem& sys, const ConflictedSubgraph& sub, std::size_t limit)
        : sys_(sys), sub_(sub), limit_(limit) {
        comp_adj_.reserve(sub.size());
        for (std::size_t v = 0; v < sub.size(); ++v) {
            Bitset row = ~sub.adj[v];
            row.reset(v);
            comp_adj_.push_back(std::move(row));
        }
        free_ids_.reserve(sys.node_count());
        Bitset free_set = free_vertex_set(sys, sub);
        for (std::size_t v = free_set.find_first(); v != Bitset::npos; v = free_set.find_next(v))
            free_ids_.push_back(sys.nodes()[v].id);
    }

    MaximalSetList run() {
        MaximalSetList result;
        if (sub_.size() == 0) {
            result.sets.push_back(free_ids_);
            return result;
        }
        Bitset r(sub_.size()), p(sub_.size()), x(sub_.size());
        p.set();
        expand(r, p, x);
        std::sort(sets_.begin(), sets_.end());
        result.sets = std::move(sets_);
        result.truncated = stop_;
        return result;
    }

private:
    void record(const Bitset& r) {
        if (sets_.size() == limit_) {
            stop_ = true;
            return;
        }
        std::vector<NodeId> set = free_ids_;
        for (std::size_t v = r.find_first(); v != Bitset::npos; v = r.find_next(v))
            set.push_back(sys_.nodes()[sub_.global[v]].id);
        std::sort(set.begin(), set.end());
        sets_.push_back(std::move(set));
    }

    void expand(Bitset& r, Bitset p, Bitset x) {
        if (stop_)
            return;
        if (p.none() && x.none()) {
            record(r);
            return;
        }
        // Pivot: vertex of P|X covering the most of P.
        std::size_t pivot = Bitset::npos;
        std::size_t pivot_cover = 0;
        Bitset both = p | x;
        for (std::size_t u = both.find_first(); u != Bitset::npos; u = both.find_next(u)) {
            std::size_t cover = (p & comp_adj_[u]).count();
            if (pivot == Bitset::npos || cover > pivot_cover) {
                pivot = u;
                pivot_cover = cover;
            }
        }
        Bitset ext = p & ~comp_adj_[pivot];
        for (std::size_t v = ext.find_first(); v != Bitset::npos; v = ext.find_next(v)) {
            if (stop_)
                return;
            r.set(v);
            expand(r, p & comp_adj_[v], x & comp_adj_[v]);
            r.reset(v);
            p.reset(v);
            x.set(v);
        }
    }

    const BeliefSystem& sys_;
    const ConflictedSubgraph& sub_;
    std::size_t limit_;
    std::vector<Bitset> comp_adj_;
    std::vector<NodeId> free_ids_;
    std::vector<std::vector<NodeId>> sets_;
    bool stop_ = false;
};

} // namespace

MaximalSetList enumerate_maximal_coherent(const BeliefSystem& sys, std::size_t limit) {
    if (limit < 1)
        throw Error(Errc::InvalidParameter, "enumeration limit must be at least 1");
    ConflictedSubgraph sub = build_conflicted(sys, Objective::Count);
    return MaximalSetEnumerator(sys, sub, limit).run();
}

std::vector<std::vector<NodeId>> coherent_islands(const BeliefSystem& sys) {
    std::size_t n = sys.node_count();
    std::vector<std::size_t> parent(n);
    for (std::size_t i = 0; i < n; ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> touched(n, 0);
    for (const Edge& e : sys.edges()) {
        std::size_t u = sys.index_of(e.source);
        std::size_t v = sys.index_of(e.target);
        if (e.kind == EdgeKind::Contradiction) {
            touched[u] = touched[v] = 1;
        } else {
            parent[find(u)] = find(v);
        }
    }
    std::vector<char> component_touched(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (touched[i])
            component_touched[find(i)] = 1;
    std::map<std::size_t, std::vector<NodeId>> groups;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t root = find(i);
        if (!component_touched[root])
            groups[root].push_back(sys.nodes()[i].id);
    }
    std::vector<std::vector<NodeId>> islands;
    islands.reserve(groups.size());
    for (auto& [root, ids] : groups)
        islands.push_back(std::move(ids));
    std::sort(islands.begin(), islands.end());
    return islands;
}

} // namespace beliefgraph
