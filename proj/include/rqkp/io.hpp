#pragma once

// Instance and report files. Both are JSON objects with a fixed field order;
// numbers are written with 17 significant digits so that parse(serialize(v))
// reproduces every double bit-for-bit.
//
// Instance, general form:
//   {"form": "general", "n": 2, "q": [...], "a": [...], "b": 1,
//    "c": [...], "l": [...], "u": [...]}
// Instance, reduced form (no q/l, zero lower bounds implied):
//   {"form": "reduced", "n": 2, "a": [...], "b": 1, "c": [...], "u": [...]}
// Report:
//   {"status": "...", "x": [...], "objective": ..., "lambda": ..., "gap": ...,
//    "phase": ..., "events_processed": ..., "time_ms": ...}

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rqkp/common.hpp"
#include "rqkp/model.hpp"

namespace rqkp {

using ParsedInstance = std::variant<GeneralInstance, ReducedInstance>;

namespace detail {

inline void append_array(std::string& out, const std::vector<double>& v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  out += ']';
}

inline const nlohmann::json& require_field(const nlohmann::json& j,
                                           const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError(name, std::string("missing field \"") + name + "\"");
  return *it;
}

inline double number_field(const nlohmann::json& j, const char* name) {
  const auto& f = require_field(j, name);
  if (!f.is_number())
    throw ParseError(name, std::string("field \"") + name + "\" must be a number");
  return f.get<double>();
}

inline std::vector<double> vector_field(const nlohmann::json& j,
                                        const char* name, int n) {
  const auto& f = require_field(j, name);
  if (!f.is_array())
    throw ParseError(name, std::string("field \"") + name + "\" must be an array");
  if (static_cast<int>(f.size()) != n)
    throw ParseError(name, std::string("field \"") + name + "\" must have length " +
                               std::to_string(n));
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!f[i].is_number())
      throw ParseError(name, std::string("field \"") + name +
                                 "\" has a non-numeric entry");
    out[i] = f[i].get<double>();
  }
  return out;
}

}  // namespace detail

inline std::string serialize_instance(const GeneralInstance& g) {
  std::string out = "{\"form\":\"general\",\"n\":" + std::to_string(g.n);
  out += ",\"q\":";
  detail::append_array(out, g.q);
  out += ",\"a\":";
  detail::append_array(out, g.a);
  out += ",\"b\":" + format_double(g.b);
  out += ",\"c\":";
  detail::append_array(out, g.c);
  out += ",\"l\":";
  detail::append_array(out, g.l);
  out += ",\"u\":";
  detail::append_array(out, g.u);
  out += "}\n";
  return out;
}

inline std::string serialize_instance(const ReducedInstance& r) {
  std::string out = "{\"form\":\"reduced\",\"n\":" + std::to_string(r.n);
  out += ",\"a\":";
  detail::append_array(out, r.a);
  out += ",\"b\":" + format_double(r.b);
  out += ",\"c\":";
  detail::append_array(out, r.c);
  out += ",\"u\":";
  detail::append_array(out, r.u);
  out += "}\n";
  return out;
}

inline ParsedInstance parse_instance(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", e.what());
  }
  if (!j.is_object()) throw ParseError("", "instance file must hold a JSON object");

  const auto& form = detail::require_field(j, "form");
  if (!form.is_string())
    throw ParseError("form", "field \"form\" must be a string");
  const std::string kind = form.get<std::string>();

  const auto& nf = detail::require_field(j, "n");
  if (!nf.is_number_integer() || nf.get<long long>() < 1)
    throw ParseError("n", "field \"n\" must be a positive integer");
  const int n = nf.get<int>();

  if (kind == "general") {
    GeneralInstance g;
    g.n = n;
    g.q = detail::vector_field(j, "q", n);
    g.a = detail::vector_field(j, "a", n);
    g.b = detail::number_field(j, "b");
    g.c = detail::vector_field(j, "c", n);
    g.l = detail::vector_field(j, "l", n);
    g.u = detail::vector_field(j, "u", n);
    return g;
  }
  if (kind == "reduced") {
    if (j.contains("q"))
      throw ParseError("q", "field \"q\" is not allowed in reduced form");
    if (j.contains("l"))
      throw ParseError("l", "field \"l\" is not allowed in reduced form");
    ReducedInstance r;
    r.n = n;
    r.a = detail::vector_field(j, "a", n);
    r.b = detail::number_field(j, "b");
    r.c = detail::vector_field(j, "c", n);
    r.u = detail::vector_field(j, "u", n);
    for (int i = 0; i < n; ++i)
      if (r.u[i] < 0.0)
        throw ParseError("u", "field \"u\" has a negative entry");
    // Identity back-transformation: the file already holds the reduced form.
    r.n_original = n;
    r.scale.assign(n, 1.0);
    r.shift.assign(n, 0.0);
    r.kept.resize(n);
    for (int i = 0; i < n; ++i) r.kept[i] = i;
    r.offset = 0.0;
    return r;
  }
  throw ParseError("form", "field \"form\" must be \"general\" or \"reduced\"");
}

inline std::string serialize_report(const SolveReport& rep) {
  std::string out = "{\"status\":\"";
  out += status_name(rep.status);
  out += "\",\"x\":";
  detail::append_array(out, rep.x);
  out += ",\"objective\":" + format_double(rep.objective);
  out += ",\"lambda\":" + format_double(rep.lambda);
  out += ",\"gap\":" + format_double(rep.gap);
  out += ",\"phase\":" + std::to_string(rep.phase);
  out += ",\"events_processed\":" + std::to_string(rep.events_processed);
  out += ",\"time_ms\":" + format_double(rep.time_ms);
  out += "}\n";
  return out;
}

inline SolveReport parse_report(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("", e.what());
  }
  if (!j.is_object()) throw ParseError("", "report file must hold a JSON object");

  SolveReport rep;
  const auto& st = detail::require_field(j, "status");
  if (!st.is_string()) throw ParseError("status", "field \"status\" must be a string");
  const std::string name = st.get<std::string>();
  if (name == "OPTIMAL")
    rep.status = Status::OPTIMAL;
  else if (name == "NEAR_OPTIMAL")
    rep.status = Status::NEAR_OPTIMAL;
  else if (name == "INFEASIBLE")
    rep.status = Status::INFEASIBLE;
  else
    throw ParseError("status", "unknown status \"" + name + "\"");

  const auto& xs = detail::require_field(j, "x");
  if (!xs.is_array()) throw ParseError("x", "field \"x\" must be an array");
  rep.x.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!xs[i].is_number())
      throw ParseError("x", "field \"x\" has a non-numeric entry");
    rep.x[i] = xs[i].get<double>();
  }
  rep.objective = detail::number_field(j, "objective");
  rep.lambda = detail::number_field(j, "lambda");
  rep.gap = detail::number_field(j, "gap");
  rep.phase = static_cast<int>(detail::number_field(j, "phase"));
  rep.events_processed =
      detail::require_field(j, "events_processed").get<long long>();
  rep.time_ms = detail::number_field(j, "time_ms");
  return rep;
}

}  // namespace rqkp
