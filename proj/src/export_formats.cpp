#include <fmt/format.h>

#include <json.hpp>

#include "beliefgraph/format.hpp"

namespace beliefgraph {

namespace {

void append_dot_quoted(std::string& out, std::string_view text) {
    out.push_back('"');
    for (char c : text) {
        if (c == '"' || c == '\\')
            out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
}

std::string overlay_classes(const DiagnosticsOverlay& overlay, const NodeId& id) {
    std::string classes;
    auto add = [&](const char* name) {
        if (!classes.empty())
            classes.push_back(' ');
        classes += name;
    };
    if (overlay.undermined.contains(id))
        add("undermined");
    if (overlay.divergent.contains(id))
        add("divergent");
    if (overlay.undersupported.contains(id))
        add("undersupported");
    return classes;
}

const char* overlay_fill(const DiagnosticsOverlay& overlay, const NodeId& id) {
    if (overlay.undermined.contains(id))
        return "#f4cccc";
    if (overlay.divergent.contains(id))
        return "#fce5cd";
    if (overlay.undersupported.contains(id))
        return "#fff2cc";
    return nullptr;
}

void append_xml_escaped(std::string& out, std::string_view text) {
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
}

} // namespace

std::string to_dot(const BeliefSystem& sys, const DiagnosticsOverlay& overlay) {
    std::string out = "digraph belief {\n";
    if (!sys.nodes().empty()) {
        out += "  node [shape=box];\n";
    }
    for (const BeliefNode& n : sys.nodes()) {
        out += "  ";
        append_dot_quoted(out, n.id.value);
        out += " [label=";
        append_dot_quoted(out, fmt::format("{}\ncred={} conf={}", n.id.value,
                                           format_double(n.cred), format_double(n.conf)));
        std::string classes = overlay_classes(overlay, n.id);
        if (!classes.empty()) {
            out += ", class=";
            append_dot_quoted(out, classes);
            out += ", style=filled, fillcolor=";
            append_dot_quoted(out, overlay_fill(overlay, n.id));
        }
        out += "];\n";
    }
    for (const Edge& e : sys.edges()) {
        out += "  ";
        append_dot_quoted(out, e.source.value);
        out += " -> ";
        append_dot_quoted(out, e.target.value);
        switch (e.kind) {
        case EdgeKind::Support:
            out += " [style=solid";
            break;
        case EdgeKind::Qualification:
            out += " [style=dashed";
            break;
        case EdgeKind::Contradiction:
            out += " [style=bold, color=red, class=\"contradiction\"";
            break;
        }
        if (e.weight != 1.0) {
            out += ", label=";
            append_dot_quoted(out, format_double(e.weight));
        }
        out += "];\n";
    }
    out += "}\n";
    return out;
}

std::string to_graphml(const BeliefSystem& sys, const DiagnosticsOverlay& overlay) {
    std::string out =
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        "  <key id=\"text\" for=\"node\" attr.name=\"text\" attr.type=\"string\"/>\n"
        "  <key id=\"cred\" for=\"node\" attr.name=\"cred\" attr.type=\"double\"/>\n"
        "  <key id=\"conf\" for=\"node\" attr.name=\"conf\" attr.type=\"double\"/>\n"
        "  <key id=\"class\" for=\"node\" attr.name=\"class\" attr.type=\"string\"/>\n"
        "  <key id=\"kind\" for=\"edge\" attr.name=\"kind\" attr.type=\"string\"/>\n"
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        "  <graph id=\"belief\" edgedefault=\"directed\">\n";
    for (const BeliefNode& n : sys.nodes()) {
        out += "    <node id=\"";
        append_xml_escaped(out, n.id.value);
        out += "\">\n      <data key=\"text\">";
        append_xml_escaped(out, n.content);
        out += "</data>\n      <data key=\"cred\">";
        out += format_double(n.cred);
        out += "</data>\n      <data key=\"conf\">";
        out += format_double(n.conf);
        out += "</data>\n";
        std::string classes = overlay_classes(overlay, n.id);
        if (!classes.empty()) {
            out += "      <data key=\"class\">";
            append_xml_escaped(out, classes);
            out += "</data>\n";
        }
        out += "    </node>\n";
    }
    for (const Edge& e : sys.edges()) {
        out += "    <edge source=\"";
        append_xml_escaped(out, e.source.value);
        out += "\" target=\"";
        append_xml_escaped(out, e.target.value);
        out += "\">\n      <data key=\"kind\">";
        out += to_string(e.kind);
        out += "</data>\n      <data key=\"weight\">";
        out += format_double(e.weight);
        out += "</data>\n    </edge>\n";
    }
    out += "  </graph>\n</graphml>\n";
    return out;
}

DiagnosticsOverlay overlay_from_report_json(std::string_view report_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(report_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::SchemaError, fmt::format("overlay report: {}", e.what()));
    }
    DiagnosticsOverlay overlay;
    if (doc.contains("coherence") && doc["coherence"].is_object()) {
        const auto& coh = doc["coherence"];
        if (coh.contains("undermined") && coh["undermined"].is_array())
            for (const auto& id : coh["undermined"])
                if (id.is_string())
                    overlay.undermined.insert(NodeId{id.get<std::string>()});
        if (coh.contains("undersupported") && coh["undersupported"].is_array())
            for (const auto& entry : coh["undersupported"])
                if (entry.is_object() && entry.contains("node") && entry["node"].is_string())
                    overlay.undersupported.insert(NodeId{entry["node"].get<std::string>()});
    }
    if (doc.contains("divergence_assigned") && doc["divergence_assigned"].is_array()) {
        for (const auto& entry : doc["divergence_assigned"]) {
            if (!entry.is_object() || !entry.contains("class") || !entry.contains("node"))
                continue;
            std::string cls = entry["class"].is_string() ? entry["class"].get<std::string>() : "";
            if (cls == "credible_unsupported" || cls == "dubious_reinforced")
                overlay.divergent.insert(NodeId{entry["node"].get<std::string>()});
        }
    }
    return overlay;
}

} // namespace beliefgraph
