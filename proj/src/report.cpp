#include <cmath>
#include <cstdio>
#include <fstream>

#include "etlab/harness.hpp"
#include "json.hpp"

namespace etlab::harness {

using json = nlohmann::json;

namespace {

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

void dump(const json& j, int indent, std::string& out) {
  const std::string pad(indent, ' ');
  const std::string inner(indent + 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann objects are std::map backed, so iteration is key-sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        dump(it.value(), indent + 2, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        dump(j[i], indent + 2, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump(-1, ' ', false, json::error_handler_t::replace);
  }
}

std::string canonical(const json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

json to_json(const ScalarSummary& s) {
  return {{"min", number(s.min)}, {"max", number(s.max)}, {"mean", number(s.mean)},
          {"spread", number(s.spread())}};
}

json to_json(const IdentityAggregate& a) {
  json j;
  j["id"] = a.id;
  j["conditionality"] = a.conditionality;
  j["rtol"] = number(a.rtol);
  if (a.skip_reason) {
    j["skip_reason"] = *a.skip_reason;
    j["pass"] = true;
    j["skipped"] = true;
    return j;
  }
  j["skipped"] = false;
  j["points"] = a.points;
  j["max_abs"] = number(a.max_abs);
  j["mean_abs"] = number(a.mean_abs);
  j["max_rel"] = number(a.max_rel);
  j["mean_rel"] = number(a.mean_rel);
  j["max_lhs"] = number(a.max_lhs);
  j["max_rhs"] = number(a.max_rhs);
  j["worst_point"] = numbers(a.worst_point);
  j["pass"] = a.pass;
  if (!a.errors.empty()) j["errors"] = a.errors;
  return j;
}

json to_json(const ExpectationCheck& c) {
  json j;
  j["name"] = c.name;
  j["expected"] = c.expected ? number(*c.expected) : json(nullptr);
  j["observed"] = number(c.observed);
  j["tolerance"] = number(c.tolerance);
  j["pass"] = c.pass;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

json to_json(const TargetReport& t) {
  json j;
  j["name"] = t.name;
  j["kind"] = t.kind;
  j["dim"] = t.dim;
  j["points_accepted"] = t.points_accepted;
  json rejected = json::object();
  for (const auto& r : t.rejected) {
    auto& slot = rejected[r.reason];
    slot = slot.is_null() ? 1 : slot.get<int>() + 1;
  }
  j["rejected"] = rejected;
  j["identities"] = json::array();
  for (const auto& a : t.identities) j["identities"].push_back(to_json(a));
  j["expectations"] = json::array();
  for (const auto& c : t.expectations) j["expectations"].push_back(to_json(c));
  j["scalars"] = json::object();
  for (const auto& [k, s] : t.scalars) j["scalars"][k] = to_json(s);
  if (t.big_lambda_constant) j["big_lambda_constant"] = *t.big_lambda_constant;
  if (t.error) j["error"] = *t.error;
  j["pass"] = t.pass;
  return j;
}

}  // namespace

std::string report_json(const Report& r) {
  json j;
  j["tool_version"] = r.tool_version;
  j["config"] = r.config;
  j["targets"] = json::array();
  for (const auto& t : r.targets) j["targets"].push_back(to_json(t));
  if (r.wall_time_s) j["wall_time_s"] = number(*r.wall_time_s);
  j["overall_pass"] = r.overall_pass;
  return canonical(j);
}

std::string report_json(const BoundaryIntegral& b) {
  json j;
  j["tool_version"] = kToolVersion;
  j["model"] = b.model;
  j["field"] = b.field;
  j["grid"] = b.grid;
  j["cyclic_axes"] = b.cyclic_axes;
  j["interior"] = number(b.interior);
  j["flux"] = number(b.flux);
  j["face_flux"] = json::object();
  for (const auto& [k, v] : b.face_flux) j["face_flux"][k] = number(v);
  j["abs_mismatch"] = number(b.abs_mismatch);
  j["rel_mismatch"] = number(b.rel_mismatch);
  j["evaluations"] = b.evaluations;
  j["pass"] = b.pass;
  return canonical(j);
}

void emit_report(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

}  // namespace etlab::harness
