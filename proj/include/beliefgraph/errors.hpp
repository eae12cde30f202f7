#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace beliefgraph {

enum class Errc {
    DuplicateNodeId,
    DanglingEdgeEndpoint,
    SelfLoop,
    DuplicateEdge,
    ScoreOutOfRange,
    NonPositiveWeight,
    InvalidNodeId,
    UnknownNode,
    InvalidParameter,
    SyntaxError,
    SchemaError,
    IoError,
};

std::string_view errc_name(Errc code);

// Single exception type for the whole library. `code` identifies the failure
// class; the optional context fields are filled where they make sense
// (line/column by the BGL parser, path by the JSON loader, input indices by
// build-time validation so front ends can map errors back to source).
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

    int line = 0;     // 1-based, 0 = unset
    int column = 0;   // 1-based, 0 = unset
    std::string path; // JSON path such as "edges[0].kind", empty = unset

    std::optional<std::size_t> node_index; // offending element in build input
    std::optional<std::size_t> edge_index;

private:
    Errc code_;
};

} // namespace beliefgraph
