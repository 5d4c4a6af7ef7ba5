#pragma once

// Configuration documents: TOML read with toml++ and flattened to dotted keys
// ("grid.r_min") carrying their source line. Dates, times and non-finite
// numbers are rejected.

#include <toml.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy::config {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Value {
  enum class Kind { boolean, integer, real, string, array };
  Kind kind = Kind::integer;
  bool b = false;
  std::int64_t i = 0;
  double d = 0.0;
  std::string s;
  std::vector<Value> items;
  int line = 0;

  bool is_number() const { return kind == Kind::integer || kind == Kind::real; }
  double number() const { return kind == Kind::integer ? double(i) : d; }
};

inline const char* kind_name(Value::Kind k)
{
  switch (k) {
  case Value::Kind::boolean: return "boolean";
  case Value::Kind::integer: return "integer";
  case Value::Kind::real: return "number";
  case Value::Kind::string: return "string";
  case Value::Kind::array: return "array";
  }
  return "value";
}

/// Flat document: dotted keys to values, in file order.
struct Document {
  std::map<std::string, Value> values;
  std::vector<std::string> order;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  const Value& at(const std::string& key) const { return values.at(key); }
};

namespace detail {

[[noreturn]] inline void fail(int line, const std::string& msg)
{
  throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

inline int line_of(const toml::node& n) { return int(n.source().begin.line); }

inline Value convert(const toml::node& n, const std::string& key)
{
  Value v;
  v.line = line_of(n);
  if (auto x = n.as_boolean()) {
    v.kind = Value::Kind::boolean;
    v.b = x->get();
  } else if (auto x = n.as_integer()) {
    v.kind = Value::Kind::integer;
    v.i = x->get();
  } else if (auto x = n.as_floating_point()) {
    if (!std::isfinite(x->get()))
      fail(v.line, "key '" + key + "': non-finite numbers are not accepted");
    v.kind = Value::Kind::real;
    v.d = x->get();
  } else if (auto x = n.as_string()) {
    v.kind = Value::Kind::string;
    v.s = x->get();
  } else if (auto x = n.as_array()) {
    v.kind = Value::Kind::array;
    for (const auto& item : *x) {
      if (item.is_table())
        fail(line_of(item), "key '" + key + "': tables inside arrays are not supported");
      v.items.push_back(convert(item, key));
    }
  } else {
    fail(v.line, "key '" + key + "': dates and times are not supported");
  }
  return v;
}

inline void flatten(const toml::table& t, const std::string& prefix, Document& doc)
{
  for (const auto& [k, node] : t) {
    const std::string key = prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
    if (auto sub = node.as_table())
      flatten(*sub, key, doc);
    else {
      doc.values[key] = convert(node, key);
      doc.order.push_back(key);
    }
  }
}

} // namespace detail

inline Document to_document(const toml::table& t)
{
  Document doc;
  detail::flatten(t, "", doc);
  std::stable_sort(doc.order.begin(), doc.order.end(), [&](const auto& a, const auto& b) {
    return doc.values.at(a).line < doc.values.at(b).line;
  });
  return doc;
}

inline Document parse(const std::string& text)
{
  try {
    return to_document(toml::parse(text));
  } catch (const toml::parse_error& e) {
    detail::fail(int(e.source().begin.line), std::string(e.description()));
  }
}

inline Document parse_file(const std::string& path)
{
  try {
    return to_document(toml::parse_file(path));
  } catch (const toml::parse_error& e) {
    if (e.source().begin.line == 0)
      throw ConfigError("cannot read config file '" + path + "': " + std::string(e.description()));
    detail::fail(int(e.source().begin.line), std::string(e.description()));
  }
}

} // namespace hardy::config
