#include <cmath>

#include "internal.hpp"

namespace rons::cli {

// Generated from schema/summary.schema.json at configure time.
extern const char* const kSummarySchemaText;

namespace {

bool has_type(const Json& value, const std::string& type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "null") return value.is_null();
  if (type == "number") return value.is_number();
  if (type == "integer") {
    return value.is_number_integer() ||
           (value.is_number_float() && std::floor(value.get<double>()) == value.get<double>());
  }
  return false;
}

// JSON equality with 1 == 1.0, as the schema language defines it.
bool same_value(const Json& a, const Json& b) {
  if (a.is_number() && b.is_number()) return a.get<double>() == b.get<double>();
  return a == b;
}

void check(const Json& value, const Json& schema, const std::string& where,
           std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const Json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(value, t.get<std::string>());
    } else {
      for (const Json& option : t) ok = ok || has_type(value, option.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + t.dump() + ", got " + value.type_name());
      return;
    }
  }
  if (schema.contains("const") && !same_value(value, schema["const"])) {
    errors.push_back(where + ": expected " + schema["const"].dump());
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const Json& option : schema["enum"]) found = found || same_value(value, option);
    if (!found) errors.push_back(where + ": " + value.dump() + " is not one of " + schema["enum"].dump());
  }
  if (schema.contains("minimum") && value.is_number() && value.get<double>() < schema["minimum"].get<double>()) {
    errors.push_back(where + ": below minimum " + schema["minimum"].dump());
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const Json& key : schema["required"]) {
        if (!value.contains(key.get<std::string>())) {
          errors.push_back(where + ": missing required key \"" + key.get<std::string>() + "\"");
        }
      }
    }
    const Json properties = schema.value("properties", Json::object());
    for (const auto& [key, child] : value.items()) {
      const std::string path = where + "." + key;
      if (properties.contains(key)) {
        check(child, properties[key], path, errors);
      } else if (schema.contains("additionalProperties")) {
        const Json& extra = schema["additionalProperties"];
        if (extra.is_boolean()) {
          if (!extra.get<bool>()) errors.push_back(path + ": unexpected key");
        } else {
          check(child, extra, path, errors);
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      check(value[i], schema["items"], where + "[" + std::to_string(i) + "]", errors);
    }
  }
}

}  // namespace

const Json& summary_schema() {
  static const Json schema = Json::parse(kSummarySchemaText);
  return schema;
}

std::vector<std::string> validate_against_schema(const Json& document, const Json& schema) {
  std::vector<std::string> errors;
  check(document, schema, "$", errors);
  return errors;
}

}  // namespace rons::cli
