#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "beliefgraph/errors.hpp"

namespace beliefgraph {

// Node identifier: a non-empty, case-sensitive string token, unique within
// one system.
struct NodeId {
    std::string value;

    auto operator<=>(const NodeId&) const = default;
};

enum class EdgeKind {
    Support,
    Qualification,
    Contradiction,
};

std::string_view to_string(EdgeKind kind);
std::optional<EdgeKind> edge_kind_from_string(std::string_view name);

// One belief: opaque content plus the two score dimensions. `cred` is
// source trust, `conf` is structural support as assigned in the data;
// propagation derives a fresh conf map without touching this one.
struct BeliefNode {
    NodeId id;
    std::string content;
    double cred = 0.5;
    double conf = 0.5;

    bool operator==(const BeliefNode&) const = default;
};

// Directed epistemic relation. At most one edge per ordered (source, target)
// pair; self-loops are rejected at construction.
struct Edge {
    NodeId source;
    NodeId target;
    EdgeKind kind = EdgeKind::Support;
    double weight = 1.0;

    bool operator==(const Edge&) const = default;
};

enum class Direction { In, Out };

// Validated, immutable belief graph. Construction sorts nodes by id and
// edges by (source, target), so every accessor iterates deterministically.
// Safe to share across concurrent readers.
class BeliefSystem {
public:
    BeliefSystem() = default;

    // Validates and freezes the structure. Throws Error with the first
    // violation found, scanning nodes then edges in input order; the thrown
    // error carries the input index of the offending element.
    static BeliefSystem build(std::vector<BeliefNode> nodes, std::vector<Edge> edges,
                              std::map<std::string, std::string> metadata = {});

    const std::vector<BeliefNode>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::map<std::string, std::string>& metadata() const noexcept { return metadata_; }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    bool contains(const NodeId& id) const noexcept;
    // Throw UnknownNode when the id is absent.
    const BeliefNode& node(const NodeId& id) const;
    std::size_t index_of(const NodeId& id) const;

    // Edge indices (into edges()) incident to the node at `node_index`,
    // ordered by (source, target) of the referenced edge.
    std::span<const std::size_t> out_edge_indices(std::size_t node_index) const;
    std::span<const std::size_t> in_edge_indices(std::size_t node_index) const;

    // Incident edges of `id` in the given direction, optionally restricted
    // to one kind. Deterministic order.
    std::vector<Edge> neighbors(const NodeId& id, Direction direction,
                                std::optional<EdgeKind> kind_filter = std::nullopt) const;

    // Subgraph on `keep` (must all exist): exactly those nodes plus every
    // edge with both endpoints in the set. Scores and metadata preserved.
    BeliefSystem induced_subgraph(std::span<const NodeId> keep) const;

    // Structural equality: same nodes, edges and metadata.
    bool operator==(const BeliefSystem& other) const;

private:
    struct StringHash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept {
            return std::hash<std::string_view>{}(s);
        }
    };

    std::vector<BeliefNode> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, std::string> metadata_;
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::vector<std::size_t>> in_;

    void rebuild_indexes();
};

inline BeliefSystem build_system(std::vector<BeliefNode> nodes, std::vector<Edge> edges,
                                 std::map<std::string, std::string> metadata = {}) {
    return BeliefSystem::build(std::move(nodes), std::move(edges), std::move(metadata));
}

} // namespace beliefgraph

template <>
struct std::hash<beliefgraph::NodeId> {
    std::size_t operator()(const beliefgraph::NodeId& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};
