#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "gevrey/multiseries.hpp"
#include "gevrey/odeforms.hpp"

namespace gevrey {

using Json = nlohmann::ordered_json;

// Parse failures carry a JSON-pointer-style path into the document.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& path, const std::string& what)
      : std::runtime_error("parse error at " + path + ": " + what) {}
};

namespace specio {

inline Rat parse_rational(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) {
    try {
      return Rat(j.get<std::string>());
    } catch (const std::exception&) {
      throw parse_error(path, "not a rational literal");
    }
  }
  if (!j.is_array() || j.size() != 2)
    throw parse_error(path, "expected [numerator, denominator]");
  auto part = [&](size_t i) -> Int {
    const Json& e = j[i];
    std::string p = path + "[" + std::to_string(i) + "]";
    if (e.is_number_integer()) return Int(e.get<long long>());
    if (e.is_string()) {
      try {
        return Int(e.get<std::string>());
      } catch (const std::exception&) {
        throw parse_error(p, "not an integer literal");
      }
    }
    throw parse_error(p, "expected integer or integer string");
  };
  Int num = part(0), den = part(1);
  if (den == 0) throw parse_error(path, "zero denominator");
  return Rat(num, den);
}

inline RatPoly parse_poly(const Json& j, const std::string& path) {
  if (!j.is_array()) throw parse_error(path, "expected coefficient array");
  std::vector<Rat> c;
  for (size_t i = 0; i < j.size(); ++i)
    c.push_back(parse_rational(j[i], path + "[" + std::to_string(i) + "]"));
  return RatPoly(c);
}

inline Json rational_json(const Rat& r) {
  Int num = numerator(r), den = denominator(r);
  const Int lim = Int(1) << 53;
  if (num > -lim && num < lim && den < lim)
    return Json::array({num.convert_to<long long>(), den.convert_to<long long>()});
  return Json::array({num.str(), den.str()});
}

inline Json poly_json(const RatPoly& p) {
  Json a = Json::array();
  for (int n = 0; n <= p.degree(); ++n) a.push_back(rational_json(p[n]));
  if (p.zero()) a.push_back(rational_json(Rat(0)));
  return a;
}

inline GPair parse_g(const Json& j, const std::string& path, std::optional<int> g_degree) {
  GPair g = zero_g();
  if (!j.is_array()) throw parse_error(path, "expected array of g terms");
  for (size_t i = 0; i < j.size(); ++i) {
    const Json& t = j[i];
    std::string tp = path + "[" + std::to_string(i) + "]";
    if (!t.is_object() || !t.contains("exponents") || !t.contains("coeff"))
      throw parse_error(tp, "expected {exponents: [dx,d1,d2], coeff: [rat, rat]}");
    const Json& e = t["exponents"];
    if (!e.is_array() || e.size() != 3) throw parse_error(tp + ".exponents", "expected [dx, d1, d2]");
    std::vector<int> exp;
    for (size_t k = 0; k < 3; ++k) {
      if (!e[k].is_number_integer() || e[k].get<long long>() < 0)
        throw parse_error(tp + ".exponents[" + std::to_string(k) + "]", "expected integer >= 0");
      exp.push_back(e[k].get<int>());
    }
    const Json& co = t["coeff"];
    if (!co.is_array() || co.size() != 2) throw parse_error(tp + ".coeff", "expected [rat, rat]");
    for (int comp = 0; comp < 2; ++comp) {
      Rat v = parse_rational(co[static_cast<size_t>(comp)],
                             tp + ".coeff[" + std::to_string(comp) + "]");
      if (!is_zero(v)) g[static_cast<size_t>(comp)].add_term(exp, v);
    }
  }
  if (g_degree) {
    g[0].set_trunc_degree(*g_degree);
    g[1].set_trunc_degree(*g_degree);
  }
  return g;
}

inline Json g_json(const GPair& g) {
  Json arr = Json::array();
  std::map<std::vector<int>, std::pair<Rat, Rat>> merged;
  for (const auto& [e, v] : g[0].terms()) merged[e].first = v;
  for (const auto& [e, v] : g[1].terms()) merged[e].second = v;
  for (const auto& [e, vv] : merged) {
    Json t;
    t["exponents"] = Json::array({e[0], e[1], e[2]});
    t["coeff"] = Json::array({rational_json(vv.first), rational_json(vv.second)});
    arr.push_back(t);
  }
  return arr;
}

}  // namespace specio

// Parse a system-spec file; validation runs automatically and a failing
// spec is rejected with the report's failing clauses.
inline SystemSpec parse_spec_json(const Json& doc) {
  using namespace specio;
  if (!doc.is_object()) throw parse_error("$", "expected an object");
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw parse_error("$.kind", "expected \"interlaced\" or \"finalform\"");
  std::string kind = doc["kind"].get<std::string>();
  auto get_int = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer())
      throw parse_error(std::string("$.") + key, "expected integer");
    return doc[key].get<int>();
  };
  std::optional<int> g_degree;
  if (doc.contains("g_degree")) {
    if (!doc["g_degree"].is_number_integer())
      throw parse_error("$.g_degree", "expected integer");
    g_degree = doc["g_degree"].get<int>();
  }
  GPair g = doc.contains("g") ? parse_g(doc["g"], "$.g", g_degree) : zero_g();

  SystemSpec out;
  if (kind == "interlaced") {
    InterlacedSpec s;
    s.q = get_int("q");
    s.r = get_int("r");
    s.a = parse_poly(doc.value("a", Json::array()), "$.a");
    s.b = parse_poly(doc.value("b", Json::array()), "$.b");
    if (doc.contains("c")) {
      const Json& c = doc["c"];
      if (!c.is_array() || c.size() != 2)
        throw parse_error("$.c", "expected two coefficient arrays");
      s.c = PolyVec{parse_poly(c[0], "$.c[0]"), parse_poly(c[1], "$.c[1]")};
    }
    s.g = g;
    out = s;
  } else if (kind == "finalform") {
    FinalFormSpec s;
    s.q = get_int("q");
    s.r = get_int("r");
    s.a = parse_poly(doc.value("a", Json::array()), "$.a");
    if (doc.contains("J")) {
      const Json& jm = doc["J"];
      if (!jm.is_array() || jm.size() != 2 || !jm[0].is_array() || jm[0].size() != 2 ||
          !jm[1].is_array() || jm[1].size() != 2)
        throw parse_error("$.J", "expected a 2x2 array of coefficient arrays");
      s.jmat = PolyMat{parse_poly(jm[0][0], "$.J[0][0]"), parse_poly(jm[0][1], "$.J[0][1]"),
                       parse_poly(jm[1][0], "$.J[1][0]"), parse_poly(jm[1][1], "$.J[1][1]")};
    }
    s.g = g;
    out = s;
  } else {
    throw parse_error("$.kind", "unknown kind \"" + kind + "\"");
  }

  ValidationReport rep = validate_system(out);
  if (!rep.valid())
    throw validation_error("spec failed validation: " + rep.failures());
  return out;
}

inline SystemSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("$", "cannot open " + path);
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_spec_json(doc);
}

inline Json spec_json(const SystemSpec& spec) {
  using namespace specio;
  Json doc;
  doc["format_version"] = 1;
  if (const auto* s = std::get_if<InterlacedSpec>(&spec)) {
    doc["kind"] = "interlaced";
    doc["q"] = s->q;
    doc["r"] = s->r;
    doc["a"] = poly_json(s->a);
    doc["b"] = poly_json(s->b);
    doc["c"] = Json::array({poly_json(s->c.x), poly_json(s->c.y)});
    doc["g"] = g_json(s->g);
    int gd = g_trunc_degree(s->g);
    if (gd != kExactDegree) doc["g_degree"] = gd;
  } else {
    const auto& ff = std::get<FinalFormSpec>(spec);
    doc["kind"] = "finalform";
    doc["q"] = ff.q;
    doc["r"] = ff.r;
    doc["a"] = poly_json(ff.a);
    doc["J"] = Json::array({Json::array({poly_json(ff.jmat.a), poly_json(ff.jmat.b)}),
                            Json::array({poly_json(ff.jmat.c), poly_json(ff.jmat.d)})});
    doc["g"] = g_json(ff.g);
    int gd = g_trunc_degree(ff.g);
    if (gd != kExactDegree) doc["g_degree"] = gd;
  }
  return doc;
}

// MultiSeries input for the witness/composition commands:
// {"vars": ["X","Z11",...], "terms": [{"exponents": [...], "coeff": rat}]}
inline RatMultiSeries parse_multiseries(const Json& doc, const std::string& path) {
  using namespace specio;
  if (!doc.is_object() || !doc.contains("vars") || !doc.contains("terms"))
    throw parse_error(path, "expected {vars: [...], terms: [...]}");
  std::vector<std::string> vars;
  for (size_t i = 0; i < doc["vars"].size(); ++i) {
    if (!doc["vars"][i].is_string())
      throw parse_error(path + ".vars[" + std::to_string(i) + "]", "expected string");
    vars.push_back(doc["vars"][i].get<std::string>());
  }
  int trunc = kExactDegree;
  if (doc.contains("degree")) trunc = doc["degree"].get<int>();
  RatMultiSeries f(vars, trunc);
  const Json& terms = doc["terms"];
  for (size_t i = 0; i < terms.size(); ++i) {
    std::string tp = path + ".terms[" + std::to_string(i) + "]";
    const Json& t = terms[i];
    if (!t.is_object() || !t.contains("exponents") || !t.contains("coeff"))
      throw parse_error(tp, "expected {exponents, coeff}");
    std::vector<int> e;
    for (const auto& x : t["exponents"]) e.push_back(x.get<int>());
    if (e.size() != vars.size()) throw parse_error(tp + ".exponents", "arity mismatch");
    f.add_term(e, parse_rational(t["coeff"], tp + ".coeff"));
  }
  return f;
}

}  // namespace gevrey
