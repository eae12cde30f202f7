#include "beliefgraph/core.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <unordered_set>

namespace beliefgraph {

std::string_view errc_name(Errc code) {
    switch (code) {
    case Errc::DuplicateNodeId: return "DuplicateNodeId";
    case Errc::DanglingEdgeEndpoint: return "DanglingEdgeEndpoint";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::ScoreOutOfRange: return "ScoreOutOfRange";
    case Errc::NonPositiveWeight: return "NonPositiveWeight";
    case Errc::InvalidNodeId: return "InvalidNodeId";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::IoError: return "IoError";
    }
    return "UnknownError";
}

std::string_view to_string(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::Support: return "support";
    case EdgeKind::Qualification: return "qualification";
    case EdgeKind::Contradiction: return "contradiction";
    }
    return "support";
}

std::optional<EdgeKind> edge_kind_from_string(std::string_view name) {
    if (name == "support") return EdgeKind::Support;
    if (name == "qualification") return EdgeKind::Qualification;
    if (name == "contradiction") return EdgeKind::Contradiction;
    return std::nullopt;
}

namespace {

bool score_in_range(double v) { return v >= 0.0 && v <= 1.0; }

Error node_error(Errc code, std::string message, std::size_t index) {
    Error err(code, std::move(message));
    err.node_index = index;
    return err;
}

Error edge_error(Errc code, std::string message, std::size_t index) {
    Error err(code, std::move(message));
    err.edge_index = index;
    return err;
}

} // namespace

BeliefSystem BeliefSystem::build(std::vector<BeliefNode> nodes, std::vector<Edge> edges,
                                 std::map<std::string, std::string> metadata) {
    // Node validation, input order: first violation wins.
    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const BeliefNode& n = nodes[i];
        if (n.id.value.empty())
            throw node_error(Errc::InvalidNodeId, "node id must be a non-empty string", i);
        if (!score_in_range(n.cred))
            throw node_error(Errc::ScoreOutOfRange,
                             fmt::format("node '{}': cred = {} outside [0,1]", n.id.value, n.cred), i);
        if (!score_in_range(n.conf))
            throw node_error(Errc::ScoreOutOfRange,
                             fmt::format("node '{}': conf = {} outside [0,1]", n.id.value, n.conf), i);
        if (!seen_ids.insert(n.id.value).second)
            throw node_error(Errc::DuplicateNodeId,
                             fmt::format("duplicate node id '{}'", n.id.value), i);
    }

    std::unordered_set<std::string> seen_pairs;
    seen_pairs.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge& e = edges[i];
        if (e.source == e.target)
            throw edge_error(Errc::SelfLoop,
                             fmt::format("self-loop on '{}' is not allowed", e.source.value), i);
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw edge_error(Errc::NonPositiveWeight,
                             fmt::format("edge '{}' -> '{}': weight = {} must be positive and finite",
                                         e.source.value, e.target.value, e.weight), i);
        if (!seen_ids.contains(e.source.value))
            throw edge_error(Errc::DanglingEdgeEndpoint,
                             fmt::format("edge source '{}' is not a declared node", e.source.value), i);
        if (!seen_ids.contains(e.target.value))
            throw edge_error(Errc::DanglingEdgeEndpoint,
                             fmt::format("edge target '{}' is not a declared node", e.target.value), i);
        std::string pair_key = e.source.value + '\x1f' + e.target.value;
        if (!seen_pairs.insert(std::move(pair_key)).second)
            throw edge_error(Errc::DuplicateEdge,
                             fmt::format("duplicate edge '{}' -> '{}'", e.source.value, e.target.value), i);
    }

    BeliefSystem sys;
    sys.nodes_ = std::move(nodes);
    sys.edges_ = std::move(edges);
    sys.metadata_ = std::move(metadata);
    std::sort(sys.nodes_.begin(), sys.nodes_.end(),
              [](const BeliefNode& a, const BeliefNode& b) { return a.id < b.id; });
    std::sort(sys.edges_.begin(), sys.edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });
    sys.rebuild_indexes();
    return sys;
}

void BeliefSystem::rebuild_indexes() {
    index_.clear();
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        index_.emplace(nodes_[i].id.value, i);
    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        out_[index_.find(edges_[e].source.value)->second].push_back(e);
        in_[index_.find(edges_[e].target.value)->second].push_back(e);
    }
    // out_ lists are already ordered because edges_ is sorted by
    // (source, target); in_ lists need an explicit sort by the same key.
    for (auto& lst : in_)
        std::sort(lst.begin(), lst.end(), [this](std::size_t a, std::size_t b) {
            return std::tie(edges_[a].source, edges_[a].target) <
                   std::tie(edges_[b].source, edges_[b].target);
        });
}

bool BeliefSystem::contains(const NodeId& id) const noexcept {
    return index_.contains(id.value);
}

std::size_t BeliefSystem::index_of(const NodeId& id) const {
    auto it = index_.find(id.value);
    if (it == index_.end())
        throw Error(Errc::UnknownNode, fmt::format("unknown node '{}'", id.value));
    return it->second;
}

const BeliefNode& BeliefSystem::node(const NodeId& id) const {
    return nodes_[index_of(id)];
}

std::span<const std::size_t> BeliefSystem::out_edge_indices(std::size_t node_index) const {
    return out_[node_index];
}

std::span<const std::size_t> BeliefSystem::in_edge_indices(std::size_t node_index) const {
    return in_[node_index];
}

std::vector<Edge> BeliefSystem::neighbors(const NodeId& id, Direction direction,
                                          std::optional<EdgeKind> kind_filter) const {
    std::size_t idx = index_of(id);
    const auto& list = direction == Direction::Out ? out_[idx] : in_[idx];
    std::vector<Edge> result;
    result.reserve(list.size());
    for (std::size_t e : list)
        if (!kind_filter || edges_[e].kind == *kind_filter)
            result.push_back(edges_[e]);
    return result;
}

BeliefSystem BeliefSystem::induced_subgraph(std::span<const NodeId> keep) const {
    std::unordered_set<std::string> members;
    members.reserve(keep.size());
    std::vector<BeliefNode> sub_nodes;
    sub_nodes.reserve(keep.size());
    for (const NodeId& id : keep) {
        std::size_t idx = index_of(id); // throws UnknownNode for strays
        if (members.insert(nodes_[idx].id.value).second)
            sub_nodes.push_back(nodes_[idx]);
    }
    std::vector<Edge> sub_edges;
    for (const Edge& e : edges_)
        if (members.contains(e.source.value) && members.contains(e.target.value))
            sub_edges.push_back(e);
    return build(std::move(sub_nodes), std::move(sub_edges), metadata_);
}

bool BeliefSystem::operator==(const BeliefSystem& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_ && metadata_ == other.metadata_;
}

} // namespace beliefgraph
