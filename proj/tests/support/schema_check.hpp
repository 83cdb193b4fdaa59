// Checks a JSON document against the draft-07 subset used by
// docs/report.schema.json: $ref into #/definitions, type, const, enum,
// required, properties, additionalProperties: false, items, minimum, maximum
// and exclusiveMinimum.
#ifndef EVONET_TESTS_SCHEMA_CHECK_HPP
#define EVONET_TESTS_SCHEMA_CHECK_HPP

#include <string>
#include <vector>

#include <json.hpp>

namespace evonet::testing {

class SchemaChecker {
 public:
  explicit SchemaChecker(nlohmann::json root) : root_(std::move(root)) {}

  std::vector<std::string> check(const nlohmann::json& doc) {
    errors_.clear();
    visit(root_, doc, "$");
    return errors_;
  }

 private:
  using Json = nlohmann::json;

  const Json& resolve(const Json& schema) const {
    if (!schema.contains("$ref")) return schema;
    const std::string ref = schema.at("$ref");
    const std::string prefix = "#/definitions/";
    return resolve(root_.at("definitions").at(ref.substr(prefix.size())));
  }

  static bool has_type(const Json& v, const std::string& t) {
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "null") return v.is_null();
    if (t == "integer") return v.is_number_integer();
    if (t == "number") return v.is_number();
    return false;
  }

  void fail(const std::string& where, const std::string& what) {
    errors_.push_back(where + ": " + what);
  }

  void visit(const Json& raw, const Json& v, const std::string& where) {
    const Json& s = resolve(raw);
    if (s.contains("type")) {
      const Json& t = s.at("type");
      bool ok = false;
      if (t.is_string()) {
        ok = has_type(v, t);
      } else {
        for (const auto& alt : t) ok = ok || has_type(v, alt);
      }
      if (!ok) return fail(where, "expected type " + t.dump());
    }
    if (s.contains("const") && v != s.at("const")) fail(where, "expected " + s.at("const").dump());
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s.at("enum")) found = found || e == v;
      if (!found) fail(where, v.dump() + " not in " + s.at("enum").dump());
    }
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s.at("minimum").get<double>()) fail(where, "below minimum");
      if (s.contains("maximum") && x > s.at("maximum").get<double>()) fail(where, "above maximum");
      if (s.contains("exclusiveMinimum") && !(x > s.at("exclusiveMinimum").get<double>())) {
        fail(where, "not above exclusiveMinimum");
      }
    }
    if (v.is_object()) {
      if (s.contains("required")) {
        for (const auto& key : s.at("required")) {
          if (!v.contains(key.get<std::string>())) fail(where, "missing " + key.dump());
        }
      }
      const Json empty = Json::object();
      const Json& props = s.contains("properties") ? s.at("properties") : empty;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (props.contains(it.key())) {
          visit(props.at(it.key()), it.value(), where + "." + it.key());
        } else if (s.contains("additionalProperties") && s.at("additionalProperties") == false) {
          fail(where, "unexpected key " + it.key());
        }
      }
    }
    if (v.is_array() && s.contains("items")) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        visit(s.at("items"), v[i], where + "[" + std::to_string(i) + "]");
      }
    }
  }

  Json root_;
  std::vector<std::string> errors_;
};

}  // namespace evonet::testing

#endif  // EVONET_TESTS_SCHEMA_CHECK_HPP
