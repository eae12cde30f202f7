#include <fmt/format.h>

#include <json.hpp>

#include "beliefgraph/format.hpp"

namespace beliefgraph {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(std::string path, std::string message) {
    Error err(Errc::SchemaError, fmt::format("{}: {}", path, message));
    err.path = std::move(path);
    throw err;
}

double require_number(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_number())
        schema_error(path + "." + key, "expected a number");
    return v.get<double>();
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
    const json& v = obj.at(key);
    if (!v.is_string())
        schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (std::string_view a : allowed)
            if (key == a)
                known = true;
        if (!known)
            schema_error(path + "." + key, "unknown key");
    }
}

} // namespace

std::string to_json(const BeliefSystem& sys) {
    json doc;
    doc["nodes"] = json::array();
    for (const BeliefNode& n : sys.nodes()) {
        json jn;
        jn["id"] = n.id.value;
        jn["text"] = n.content;
        jn["cred"] = n.cred;
        jn["conf"] = n.conf;
        doc["nodes"].push_back(std::move(jn));
    }
    doc["edges"] = json::array();
    for (const Edge& e : sys.edges()) {
        json je;
        je["from"] = e.source.value;
        je["to"] = e.target.value;
        je["kind"] = std::string(to_string(e.kind));
        je["weight"] = e.weight;
        doc["edges"].push_back(std::move(je));
    }
    doc["metadata"] = json::object();
    for (const auto& [k, v] : sys.metadata())
        doc["metadata"][k] = v;
    return doc.dump();
}

ParseReport parse_json_document(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(Errc::SyntaxError, e.what());
    }
    if (!doc.is_object())
        schema_error("$", "document root must be an object");
    reject_unknown_keys(doc, "$", {"nodes", "edges", "metadata"});

    ParseReport report;
    std::vector<BeliefNode> nodes;
    std::vector<Edge> edges;
    std::map<std::string, std::string> metadata;

    if (doc.contains("nodes")) {
        if (!doc["nodes"].is_array())
            schema_error("nodes", "expected an array");
        std::size_t i = 0;
        for (const json& jn : doc["nodes"]) {
            std::string path = fmt::format("nodes[{}]", i);
            if (!jn.is_object())
                schema_error(path, "expected an object");
            reject_unknown_keys(jn, path, {"id", "text", "cred", "conf"});
            if (!jn.contains("id"))
                schema_error(path, "missing \"id\"");
            if (!jn.contains("text"))
                schema_error(path, "missing \"text\"");
            BeliefNode node;
            node.id = NodeId{require_string(jn, path, "id")};
            node.content = require_string(jn, path, "text");
            if (jn.contains("cred")) {
                node.cred = require_number(jn, path, "cred");
            } else {
                node.cred = 0.5;
                report.warnings.push_back({0, 0, path + ": cred defaulted to 0.5"});
            }
            if (jn.contains("conf")) {
                node.conf = require_number(jn, path, "conf");
            } else {
                node.conf = 0.5;
                report.warnings.push_back({0, 0, path + ": conf defaulted to 0.5"});
            }
            nodes.push_back(std::move(node));
            ++i;
        }
    }

    if (doc.contains("edges")) {
        if (!doc["edges"].is_array())
            schema_error("edges", "expected an array");
        std::size_t i = 0;
        for (const json& je : doc["edges"]) {
            std::string path = fmt::format("edges[{}]", i);
            if (!je.is_object())
                schema_error(path, "expected an object");
            reject_unknown_keys(je, path, {"from", "to", "kind", "weight"});
            if (!je.contains("from"))
                schema_error(path, "missing \"from\"");
            if (!je.contains("to"))
                schema_error(path, "missing \"to\"");
            Edge edge;
            edge.source = NodeId{require_string(je, path, "from")};
            edge.target = NodeId{require_string(je, path, "to")};
            if (je.contains("kind")) {
                std::string kind = require_string(je, path, "kind");
                auto parsed = edge_kind_from_string(kind);
                if (!parsed)
                    schema_error(path + ".kind",
                                 fmt::format("'{}' is not one of support|qualification|contradiction", kind));
                edge.kind = *parsed;
            } else {
                edge.kind = EdgeKind::Support;
                report.warnings.push_back({0, 0, path + ": kind defaulted to support"});
            }
            if (je.contains("weight")) {
                edge.weight = require_number(je, path, "weight");
            } else {
                edge.weight = 1.0;
                report.warnings.push_back({0, 0, path + ": weight defaulted to 1.0"});
            }
            edges.push_back(std::move(edge));
            ++i;
        }
    }

    if (doc.contains("metadata")) {
        if (!doc["metadata"].is_object())
            schema_error("metadata", "expected an object");
        for (const auto& [k, v] : doc["metadata"].items()) {
            if (!v.is_string())
                schema_error("metadata." + k, "expected a string value");
            metadata[k] = v.get<std::string>();
        }
    }

    try {
        report.system = BeliefSystem::build(std::move(nodes), std::move(edges), std::move(metadata));
    } catch (Error& err) {
        if (err.node_index)
            err.path = fmt::format("nodes[{}]", *err.node_index);
        else if (err.edge_index)
            err.path = fmt::format("edges[{}]", *err.edge_index);
        throw;
    }
    return report;
}

BeliefSystem from_json(std::string_view text) {
    return parse_json_document(text).system;
}

} // namespace beliefgraph
