#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "beliefgraph/core.hpp"

namespace beliefgraph {

struct ParseWarning {
    int line = 0;   // 1-based; 0 when the source format carries no positions
    int column = 0;
    std::string message;

    bool operator==(const ParseWarning&) const = default;
};

// Parse outcome: the validated system plus one warning per applied default,
// ordered by source position.
struct ParseReport {
    BeliefSystem system;
    std::vector<ParseWarning> warnings;
};

// BGL, the authoring syntax:
//
//   belief a { text: "jam tomorrow", cred: 0.9, conf: 0.2 }
//   belief b { text: "jam yesterday" }        # cred/conf default to 0.5
//   a -> b                                    # support
//   a ~> b                                    # qualification
//   a -| b [w=2.5]                            # contradiction, weight 2.5
//
// '#' starts a comment running to end of line. Missing cred/conf default to
// 0.5 and a missing [w=...] defaults to 1.0, each with a warning. Build
// validation errors are re-thrown with the position of the offending
// declaration attached.
ParseReport parse_bgl(std::string_view text);

// Inverse of parse_bgl for systems whose node ids are BGL identifiers
// (letter followed by letters/digits/underscores); throws InvalidParameter
// otherwise. Metadata is not representable in BGL and is dropped.
std::string render_bgl(const BeliefSystem& sys);

// Canonical JSON document:
//   {"edges":[{"from","kind","to","weight"}...],
//    "metadata":{...},
//    "nodes":[{"conf","cred","id","text"}...]}
// Keys are emitted in sorted order; output is byte-deterministic for equal
// systems. A missing edge "kind" reads as support and a missing "weight" as
// 1.0; missing "cred"/"conf" read as 0.5. Each applied default is a warning
// in the report variant. Unknown keys and out-of-vocabulary kinds are
// SchemaError.
std::string to_json(const BeliefSystem& sys);
BeliefSystem from_json(std::string_view text);
ParseReport parse_json_document(std::string_view text);

// Node sets a DOT/GraphML export may highlight, typically lifted from a
// serialized analysis report.
struct DiagnosticsOverlay {
    std::set<NodeId> undermined;
    std::set<NodeId> divergent;
    std::set<NodeId> undersupported;

    bool empty() const {
        return undermined.empty() && divergent.empty() && undersupported.empty();
    }
};

// Builds an overlay from a serialized graph report (JSON text). Unknown or
// missing sections are simply skipped.
DiagnosticsOverlay overlay_from_report_json(std::string_view report_text);

// Graphviz digraph. Edge style encodes kind (support solid, qualification
// dashed, contradiction bold red); node labels carry id, cred and conf.
std::string to_dot(const BeliefSystem& sys, const DiagnosticsOverlay& overlay = {});

// GraphML re-encoding of the same attributes.
std::string to_graphml(const BeliefSystem& sys, const DiagnosticsOverlay& overlay = {});

// Shortest round-trip decimal form of a double (to_chars); shared by every
// textual emitter so equal values always print identically.
std::string format_double(double value);

} // namespace beliefgraph
