#pragma once

// Just enough JSON-Schema to check the shipped report schemas: type,
// required, properties, additionalProperties, items, enum, plus a local
// $ref_local/$defs_local pair so the report schema can share one
// definition. Returns a list of violations; empty means valid.

#include <fmt/format.h>
#include <string>
#include <vector>

#include <json.hpp>

namespace testsupport {

class SchemaChecker {
public:
    explicit SchemaChecker(nlohmann::json schema) : root_(std::move(schema)) {}

    std::vector<std::string> check(const nlohmann::json& instance) const {
        std::vector<std::string> errors;
        visit(root_, instance, "$", errors);
        return errors;
    }

private:
    static bool type_matches(const std::string& type, const nlohmann::json& v) {
        if (type == "object") return v.is_object();
        if (type == "array") return v.is_array();
        if (type == "string") return v.is_string();
        if (type == "boolean") return v.is_boolean();
        if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
        if (type == "number") return v.is_number();
        return false;
    }

    void visit(const nlohmann::json& schema, const nlohmann::json& v, const std::string& path,
               std::vector<std::string>& errors) const {
        if (schema.contains("$ref_local")) {
            const std::string name = schema["$ref_local"].get<std::string>();
            visit(root_.at("$defs_local").at(name), v, path, errors);
            return;
        }
        if (schema.contains("type")) {
            const std::string type = schema["type"].get<std::string>();
            if (!type_matches(type, v)) {
                errors.push_back(fmt::format("{}: expected {}", path, type));
                return;
            }
        }
        if (schema.contains("enum")) {
            bool hit = false;
            for (const auto& allowed : schema["enum"])
                if (allowed == v)
                    hit = true;
            if (!hit)
                errors.push_back(fmt::format("{}: value not in enum", path));
        }
        if (v.is_object()) {
            if (schema.contains("required"))
                for (const auto& key : schema["required"])
                    if (!v.contains(key.get<std::string>()))
                        errors.push_back(
                            fmt::format("{}: missing required key '{}'", path,
                                        key.get<std::string>()));
            const nlohmann::json* props =
                schema.contains("properties") ? &schema["properties"] : nullptr;
            for (const auto& [key, value] : v.items()) {
                std::string child = path + "." + key;
                if (props && props->contains(key)) {
                    visit((*props)[key], value, child, errors);
                } else if (schema.contains("additionalProperties")) {
                    const auto& ap = schema["additionalProperties"];
                    if (ap.is_boolean() && !ap.get<bool>())
                        errors.push_back(fmt::format("{}: unexpected key", child));
                    else if (ap.is_object())
                        visit(ap, value, child, errors);
                }
            }
        }
        if (v.is_array() && schema.contains("items")) {
            std::size_t i = 0;
            for (const auto& item : v) {
                visit(schema["items"], item, fmt::format("{}[{}]", path, i), errors);
                ++i;
            }
        }
    }

    nlohmann::json root_;
};

} // namespace testsupport
