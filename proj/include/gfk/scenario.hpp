#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include "json.hpp"

#include "gfk/global_colombeau.hpp"
#include "gfk/local_colombeau.hpp"
#include "gfk/manifold_distributions.hpp"
#include "gfk/mollifier.hpp"
#include "gfk/smoothing_kernels.hpp"

namespace gfk::scenario {

using json = nlohmann::ordered_json;

// Bad config: schema violation, dangling reference or an invalid value.
struct ConfigError : std::runtime_error {
  ConfigError(std::string ptr, const std::string& what) : std::runtime_error(what), pointer(std::move(ptr)) {}
  std::string pointer;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::filesystem::path scenario_dir() {
  if (const char* e = std::getenv("GFK_SCENARIO_DIR")) return e;
#ifdef GFK_SCENARIO_DIR
  return GFK_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

inline std::string schema_text() { return read_file(scenario_dir() / "scenario.schema.json"); }

// ---------------------------------------------------------------------------
// Validation

inline std::string pointer_string(const rapidjson::Pointer& p) {
  rapidjson::StringBuffer sb;
  p.StringifyUriFragment(sb);
  std::string s = sb.GetString();
  return s.size() > 1 ? s.substr(1) : "";  // drop the leading '#'
}

// Parses `text` and checks it against the shipped schema.
inline json validate_config(const std::string& text, const std::string& schema) {
  rapidjson::Document sd;
  if (sd.Parse(schema.c_str()).HasParseError()) throw std::runtime_error("scenario schema does not parse");
  rapidjson::SchemaDocument sdoc(sd);
  rapidjson::Document d;
  if (d.Parse(text.c_str()).HasParseError())
    throw ConfigError("", std::string("config is not valid JSON: ") + rapidjson::GetParseError_En(d.GetParseError()) +
                              " at offset " + std::to_string(d.GetErrorOffset()));
  rapidjson::SchemaValidator v(sdoc);
  if (!d.Accept(v)) {
    std::string ptr = pointer_string(v.GetInvalidDocumentPointer());
    std::string kw = v.GetInvalidSchemaKeyword();
    std::string msg = "keyword '" + kw + "' failed";
    if (kw == "required") {
      // name the missing property
      const rapidjson::Value* sch = v.GetInvalidSchemaPointer().Get(sd);
      const rapidjson::Value* at = v.GetInvalidDocumentPointer().Get(d);
      if (sch && at && at->IsObject() && sch->HasMember("required"))
        for (const auto& r : (*sch)["required"].GetArray())
          if (!at->HasMember(r.GetString())) {
            ptr += std::string("/") + r.GetString();
            msg = "required property is missing";
            break;
          }
    } else if (kw == "additionalProperties") {
      msg = "property not allowed here";
    }
    throw ConfigError(ptr, "schema violation at " + (ptr.empty() ? std::string("/") : ptr) + ": " + msg);
  }
  return json::parse(text);
}

// ---------------------------------------------------------------------------
// Objects

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<EpsilonLadder> ladder;
  std::filesystem::path out_dir = ".";
  int jobs = 1;
};

struct Context {
  json cfg;
  std::string name;
  ManifoldPtr m;  // null for a local domain
  Box omega{};
  int dim = 1;
  EpsilonLadder ladder;
  std::uint64_t seed = 0;
  std::map<std::string, Mollifier> mollifiers;
  std::map<std::string, KernelPtr> kernels;
  std::map<std::string, SmoothFunction> functions;
  std::map<std::string, VectorField> fields;
  std::map<std::string, MDistPtr> mdists;
  std::map<std::string, DistPtr> ldists;

  bool local() const { return !m; }

  template <class M>
  const typename M::mapped_type& get(const M& map, const std::string& id, const std::string& ptr,
                                     const char* what) const {
    auto it = map.find(id);
    if (it == map.end()) throw ConfigError(ptr, std::string("unknown ") + what + " '" + id + "' at " + ptr);
    return it->second;
  }
};

inline Point to_point(const json& a, int dim, const std::string& ptr) {
  if (static_cast<int>(a.size()) != dim) throw ConfigError(ptr, "point at " + ptr + " must have " + std::to_string(dim) + " coordinates");
  Point p{a[0].get<double>(), 0.0};
  if (dim > 1) p[1] = a[1].get<double>();
  return p;
}

inline Box to_box(const json& lo, const json& hi, int dim, const std::string& ptr) {
  Point a = to_point(lo, dim, ptr + "/lo"), b = to_point(hi, dim, ptr + "/hi");
  for (int i = 0; i < dim; ++i)
    if (!(b[i] > a[i])) throw ConfigError(ptr, "empty box at " + ptr);
  return dim == 1 ? Box::interval(a[0], b[0]) : Box::rect(a[0], b[0], a[1], b[1]);
}

inline Profile to_profile(const std::string& s) { return s == "skew" ? Profile::Skew : Profile::Bump; }

inline void build_manifold(Context& c) {
  const json& j = c.cfg["manifold"];
  std::string kind = j["kind"];
  double warp = j.value("warp", kind == "interval" ? 0.0 : 0.2);
  if (kind == "interval") {
    c.m = Manifold::interval(j.value("half_length", 2.0), warp);
  } else if (kind == "circle") {
    c.m = Manifold::circle(warp);
  } else if (kind == "torus") {
    c.m = Manifold::torus(warp);
  } else {
    if (!j.contains("lo") || !j.contains("hi")) throw ConfigError("/manifold", "a local domain needs lo and hi");
    c.dim = static_cast<int>(j["lo"].size());
    c.omega = to_box(j["lo"], j["hi"], c.dim, "/manifold");
    return;
  }
  c.dim = c.m->dim();
}

inline SmoothFunction build_function(const Context& c, const json& j, const std::string& ptr) {
  std::string id = j["id"];
  if (j.contains("product")) {
    const auto& a = c.get(c.functions, j["product"][0], ptr + "/product/0", "function");
    const auto& b = c.get(c.functions, j["product"][1], ptr + "/product/1", "function");
    SmoothFunction f = a * b;
    f.name = id;
    return f;
  }
  if (!j.contains("terms")) throw ConfigError(ptr, "function at " + ptr + " needs terms or product");
  int dim = j.value("dim", c.dim);
  std::vector<SmoothFunction::TrigTerm> terms;
  for (std::size_t i = 0; i < j["terms"].size(); ++i) {
    const json& t = j["terms"][i];
    SmoothFunction::TrigTerm tt;
    tt.amp = t["amp"];
    Point k = to_point(t["k"], dim, ptr + "/terms/" + std::to_string(i) + "/k");
    tt.k = {k[0], k[1]};
    tt.phase = t.value("phase", 0.0);
    terms.push_back(tt);
  }
  return SmoothFunction::trig(dim, terms, j.value("offset", 0.0), id);
}

inline void build_distribution(Context& c, const json& j, const std::string& ptr) {
  std::string id = j["id"], type = j["type"];
  auto need = [&](const char* k) -> const json& {
    if (!j.contains(k)) throw ConfigError(ptr + "/" + k, "distribution '" + id + "' of type " + type + " needs '" + k + "'");
    return j[k];
  };
  if (c.local()) {
    DistPtr u;
    if (type == "delta") u = delta_at(to_point(need("at"), c.dim, ptr + "/at"), c.dim, c.omega);
    else if (type == "heaviside") u = heaviside(need("at")[0].get<double>(), c.omega);
    else if (type == "pv") u = pv_inv_x(c.omega);
    else if (type == "regular") u = regular(c.get(c.functions, need("function"), ptr + "/function", "function"), c.omega);
    else if (type == "times")
      u = times(c.get(c.functions, need("function"), ptr + "/function", "function"), c.get(c.ldists, need("of"), ptr + "/of", "distribution"));
    else if (type == "lie") {
      const VectorField& X = c.get(c.fields, need("field"), ptr + "/field", "field");
      u = lie_derivative_dist(c.get(c.ldists, need("of"), ptr + "/of", "distribution"), LocalField{X.dim, X.comp});
    } else {
      std::vector<std::pair<double, DistPtr>> t;
      for (std::size_t i = 0; i < need("terms").size(); ++i)
        t.emplace_back(j["terms"][i]["coeff"].get<double>(),
                       c.get(c.ldists, j["terms"][i]["of"], ptr + "/terms/" + std::to_string(i) + "/of", "distribution"));
      u = combination(std::move(t));
    }
    if ((type == "heaviside" || type == "pv") && c.dim != 1) throw ConfigError(ptr, type + " needs a one-dimensional domain");
    c.ldists[id] = u;
    return;
  }
  MDistPtr u;
  if (type == "delta") u = m_delta(c.m, to_point(need("at"), c.dim, ptr + "/at"));
  else if (type == "heaviside") u = m_heaviside(c.m, j.contains("at") ? j["at"][0].get<double>() : 0.0);
  else if (type == "pv") u = m_pv(c.m);
  else if (type == "regular") u = m_regular(c.m, c.get(c.functions, need("function"), ptr + "/function", "function"));
  else if (type == "times")
    u = m_times(c.get(c.functions, need("function"), ptr + "/function", "function"), c.get(c.mdists, need("of"), ptr + "/of", "distribution"));
  else if (type == "lie")
    u = m_lie(c.get(c.mdists, need("of"), ptr + "/of", "distribution"), c.get(c.fields, need("field"), ptr + "/field", "field"));
  else {
    std::vector<std::pair<double, MDistPtr>> t;
    for (std::size_t i = 0; i < need("terms").size(); ++i)
      t.emplace_back(j["terms"][i]["coeff"].get<double>(),
                     c.get(c.mdists, j["terms"][i]["of"], ptr + "/terms/" + std::to_string(i) + "/of", "distribution"));
    u = m_combination(std::move(t));
  }
  c.mdists[id] = u;
}

inline NForm build_bump(const Context& c, const json& j, const std::string& ptr) {
  int a = j.value("chart", 0);
  if (a >= c.m->chart_count()) throw ConfigError(ptr + "/chart", "chart index out of range at " + ptr);
  Point p = to_point(j["center"], c.dim, ptr + "/center");
  if (!c.m->chart(a).contains(p)) throw ConfigError(ptr, "bump center outside its chart at " + ptr);
  return bump_form(c.m, a, p, j["radius"]);
}

inline EpsilonLadder to_ladder(const json& j) { return EpsilonLadder(j["eps0"], j["ratio"], j["length"]); }

inline Context build_context(const json& cfg, const Options& opt) {
  Context c;
  c.cfg = cfg;
  c.name = cfg["name"];
  try {
    build_manifold(c);
    c.ladder = opt.ladder ? *opt.ladder : cfg.contains("ladder") ? to_ladder(cfg["ladder"]) : EpsilonLadder{};
    c.seed = opt.seed ? *opt.seed : cfg.value("seed", std::uint64_t{0});
    auto each = [&](const char* key, auto&& fn) {
      if (!cfg.contains(key)) return;
      for (std::size_t i = 0; i < cfg[key].size(); ++i) {
        std::string ptr = std::string("/") + key + "/" + std::to_string(i);
        std::string id = cfg[key][i]["id"];
        try {
          fn(cfg[key][i], ptr, id);
        } catch (const DomainError& e) {
          throw ConfigError(ptr, std::string("invalid object at ") + ptr + ": " + e.what());
        }
      }
    };
    auto fresh = [&](const auto& map, const std::string& id, const std::string& ptr) {
      if (map.count(id)) throw ConfigError(ptr + "/id", "duplicate id '" + id + "' at " + ptr);
    };
    each("mollifiers", [&](const json& j, const std::string& ptr, const std::string& id) {
      fresh(c.mollifiers, id, ptr);
      c.mollifiers[id] = build_mollifier(j["dim"], j["q"], j.value("radius", 1.0), to_profile(j.value("profile", "bump")));
    });
    each("functions", [&](const json& j, const std::string& ptr, const std::string& id) {
      fresh(c.functions, id, ptr);
      c.functions[id] = build_function(c, j, ptr);
    });
    each("fields", [&](const json& j, const std::string& ptr, const std::string& id) {
      fresh(c.fields, id, ptr);
      VectorField X;
      X.dim = c.dim;
      X.name = id;
      if (static_cast<int>(j["components"].size()) != c.dim) throw ConfigError(ptr + "/components", "field needs one component per dimension");
      for (std::size_t i = 0; i < j["components"].size(); ++i)
        X.comp.push_back(c.get(c.functions, j["components"][i], ptr + "/components/" + std::to_string(i), "function"));
      c.fields[id] = X;
    });
    each("kernels", [&](const json& j, const std::string& ptr, const std::string& id) {
      if (c.local()) throw ConfigError(ptr, "kernels need a manifold, not a local domain");
      fresh(c.kernels, id, ptr);
      const Mollifier& mo = c.get(c.mollifiers, j["mollifier"], ptr + "/mollifier", "mollifier");
      NForm ref = j.contains("reference") ? build_bump(c, j["reference"], ptr + "/reference") : NForm{};
      c.kernels[id] = build_kernel(c.m, mo, ref, id);
    });
    each("distributions", [&](const json& j, const std::string& ptr, const std::string& id) {
      if (c.mdists.count(id) || c.ldists.count(id)) throw ConfigError(ptr + "/id", "duplicate id '" + id + "' at " + ptr);
      build_distribution(c, j, ptr);
    });
  } catch (const DomainError& e) {
    throw ConfigError("", e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Expressions

inline GGFPtr build_ggf(const Context& c, const json& e, const std::string& ptr) {
  const auto& [k, v] = *e.items().begin();
  std::string p = ptr + "/" + k;
  if (k == "iota") return g_iota(c.get(c.mdists, v, p, "distribution"));
  if (k == "sigma") return g_sigma(c.m, c.get(c.functions, v, p, "function"));
  if (k == "iota_minus_sigma") return g_iota_minus_sigma(c.m, c.get(c.functions, v, p, "function"));
  if (k == "sum") {
    std::vector<std::pair<double, GGFPtr>> t;
    for (std::size_t i = 0; i < v.size(); ++i) t.emplace_back(1.0, build_ggf(c, v[i], p + "/" + std::to_string(i)));
    return g_combination(std::move(t));
  }
  if (k == "difference") return g_difference(build_ggf(c, v[0], p + "/0"), build_ggf(c, v[1], p + "/1"));
  if (k == "product") return g_product(build_ggf(c, v[0], p + "/0"), build_ggf(c, v[1], p + "/1"));
  if (k == "scale") return g_combination({{v["c"].get<double>(), build_ggf(c, v["of"], p + "/of")}});
  if (k == "lie") return lie_derivative_global(build_ggf(c, v["of"], p + "/of"), c.get(c.fields, v["field"], p + "/field", "field"));
  throw ConfigError(p, "'" + k + "' is only available on a local domain");
}

inline GFPtr build_lgf(const Context& c, const json& e, const std::string& ptr) {
  const auto& [k, v] = *e.items().begin();
  std::string p = ptr + "/" + k;
  if (k == "iota") return iota(c.get(c.ldists, v, p, "distribution"));
  if (k == "sigma") return sigma(c.get(c.functions, v, p, "function"));
  if (k == "iota_minus_sigma") return iota_minus_sigma(c.get(c.functions, v, p, "function"));
  if (k == "sum") {
    std::vector<std::pair<double, GFPtr>> t;
    for (std::size_t i = 0; i < v.size(); ++i) t.emplace_back(1.0, build_lgf(c, v[i], p + "/" + std::to_string(i)));
    return gf_sum(std::move(t));
  }
  if (k == "difference") return gf_sum({{1.0, build_lgf(c, v[0], p + "/0")}, {-1.0, build_lgf(c, v[1], p + "/1")}});
  if (k == "product") return gf_product(build_lgf(c, v[0], p + "/0"), build_lgf(c, v[1], p + "/1"));
  if (k == "scale") return gf_sum({{v["c"].get<double>(), build_lgf(c, v["of"], p + "/of")}});
  if (k == "partial") {
    int i = v["axis"];
    if (i >= c.dim) throw ConfigError(p + "/axis", "axis out of range");
    return derivative_Di(build_lgf(c, v["of"], p + "/of"), i);
  }
  throw ConfigError(p, "'" + k + "' needs a manifold; use partial on a local domain");
}

inline Diffeo build_map(const json& j) { return Diffeo({AxisMap::warp(j["lo"], j["s"], j["w"])}); }

inline FamilyPtr build_family(const Context& c, const json& e, const std::string& ptr) {
  const auto& [k, v] = *e.items().begin();
  std::string p = ptr + "/" + k;
  if (k == "mollifier") return constant_family(c.get(c.mollifiers, v, p, "mollifier").base, v.get<std::string>());
  if (k == "transform") {
    const Mollifier& mo = c.get(c.mollifiers, v["mollifier"], p + "/mollifier", "mollifier");
    if (mo.dim != 1) throw ConfigError(p, "transported families are one-dimensional");
    auto src = constant_family(mo.base, v["mollifier"].get<std::string>());
    return transform_family(src, build_map(v["map"]), Box::interval(v["omega"][0], v["omega"][1]));
  }
  if (c.local()) throw ConfigError(p, "localize needs a manifold");
  int a = v["chart"];
  if (a >= c.m->chart_count()) throw ConfigError(p + "/chart", "chart index out of range");
  return localize_kernel(c.get(c.kernels, v["kernel"], p + "/kernel", "kernel"), a);
}

inline CompactGrid build_grid(const Context& c, const json& j, const std::string& ptr, std::uint64_t salt) {
  CompactGrid g;
  g.K = to_box(j["lo"], j["hi"], c.dim, ptr);
  g.per_axis = j.value("per_axis", c.dim > 1 ? 9 : 41);
  g.random = j.value("random", 0);
  g.seed = c.seed * 0x9E3779B97F4A7C15ull + salt;
  g.focus_per_axis = c.dim > 1 ? 21 : 41;
  return g;
}

// ---------------------------------------------------------------------------
// Claims

struct Trace {
  std::string series;
  std::vector<double> eps, values;
};

struct ClaimResult {
  std::string id, statement, type;
  int criterion = 0;
  bool outcome = false;   // verdict of the claimed property
  bool expected = true;
  bool pass = false;      // outcome == expected and any extra checks
  json details = json::object();
  std::vector<Trace> traces;
  double seconds = 0.0;
};

inline json estimate_json(const AsymptoticEstimate& e) {
  json j;
  j["order"] = std::isfinite(e.order) ? json(e.order) : json("inf");
  j["r2"] = e.r2;
  j["floor_hit"] = e.floor_hit;
  j["points_used"] = e.used;
  return j;
}

inline std::vector<KernelPtr> claim_kernels(const Context& c, const json& j, const std::string& ptr) {
  std::vector<KernelPtr> out;
  if (!j.contains("kernels")) throw ConfigError(ptr + "/kernels", "claim needs kernels on a manifold");
  for (std::size_t i = 0; i < j["kernels"].size(); ++i)
    out.push_back(c.get(c.kernels, j["kernels"][i], ptr + "/kernels/" + std::to_string(i), "kernel"));
  return out;
}

inline std::vector<FamilyPtr> claim_families(const Context& c, const json& j, const std::string& ptr) {
  std::vector<FamilyPtr> out;
  if (!j.contains("families")) throw ConfigError(ptr + "/families", "claim needs families on a local domain");
  for (std::size_t i = 0; i < j["families"].size(); ++i)
    out.push_back(build_family(c, j["families"][i], ptr + "/families/" + std::to_string(i)));
  return out;
}

// Largest admissible ladder start for weak families on K.
inline EpsilonLadder family_ladder(const EpsilonLadder& l, const std::vector<FamilyPtr>& fams, const Box& K) {
  double e = l.eps0;
  for (const auto& f : fams)
    if (f->weak && f->eps0) e = std::min(e, f->eps0(K));
  if (!(e > 0)) throw DomainError("family has no admissible eps on the grid");
  return EpsilonLadder(e, l.ratio, l.length);
}

inline std::string alpha_name(const MultiIndex& a, int dim) {
  return dim == 1 ? std::to_string(a.a[0]) : std::to_string(a.a[0]) + "," + std::to_string(a.a[1]);
}

inline bool check_orders(const json& j, ClaimResult& r, int k, const AsymptoticEstimate& e) {
  if (!j.contains("expect_orders")) return true;
  bool ok = true;
  for (const auto& x : j["expect_orders"])
    if (x["k"].get<int>() == k) ok = ok && std::abs(e.order - x["order"].get<double>()) <= x["tol"].get<double>();
  (void)r;
  return ok;
}

inline void run_moderate(const Context& c, const json& j, const std::string& ptr, ClaimResult& r, std::uint64_t salt) {
  CompactGrid K = build_grid(c, j["grid"], ptr + "/grid", salt);
  int kmax = j.value("k_max", 0);
  EpsilonLadder lad = j.contains("ladder") ? to_ladder(j["ladder"]) : c.ladder;
  bool orders_ok = true;
  json paths = json::array();
  if (c.local()) {
    GFPtr R = build_lgf(c, j["gf"], ptr + "/gf");
    auto fams = claim_families(c, j, ptr);
    auto rep = test_moderate(*R, K, fams, family_ladder(lad, fams, K.K), kmax);
    for (const auto& p : rep.orders) {
      json q = estimate_json(p.est);
      q["family"] = p.family;
      q["alpha"] = alpha_name(p.alpha, c.dim);
      paths.push_back(q);
      r.traces.push_back({p.family + "/alpha=" + alpha_name(p.alpha, c.dim), p.eps, p.values});
      orders_ok = orders_ok && check_orders(j, r, p.alpha.order(), p.est);
    }
    r.outcome = rep.pass;
    r.details["N"] = rep.N;
    r.details["min_order"] = rep.min_order;
    if (j.contains("expect_N")) orders_ok = orders_ok && rep.N == j["expect_N"].get<int>();
  } else {
    GGFPtr R = build_ggf(c, j["gf"], ptr + "/gf");
    auto v = test_global_moderate(*R, K, claim_kernels(c, j, ptr), lad, kmax);
    for (const auto& p : v.orders) {
      json q = estimate_json(p.est);
      q["kernel"] = p.kernel;
      q["k"] = p.k;
      paths.push_back(q);
      r.traces.push_back({p.kernel + "/k=" + std::to_string(p.k), p.eps, p.values});
      orders_ok = orders_ok && check_orders(j, r, p.k, p.est);
    }
    r.outcome = v.pass;
    r.details["N"] = v.N;
    r.details["min_order"] = std::isfinite(v.min_order) ? json(v.min_order) : json("inf");
    if (j.contains("expect_N")) orders_ok = orders_ok && v.N == j["expect_N"].get<int>();
  }
  r.details["paths"] = paths;
  r.details["expectations_met"] = orders_ok;
  r.outcome = r.outcome && orders_ok;
}

inline void run_negligible(const Context& c, const json& j, const std::string& ptr, ClaimResult& r, std::uint64_t salt) {
  CompactGrid K = build_grid(c, j["grid"], ptr + "/grid", salt);
  int kmax = j.value("k_max", 0);
  double rr = j["r"];
  EpsilonLadder lad = j.contains("ladder") ? to_ladder(j["ladder"]) : c.ladder;
  json paths = json::array();
  double min_order = kInf;
  if (c.local()) {
    GFPtr R = build_lgf(c, j["gf"], ptr + "/gf");
    auto fams = claim_families(c, j, ptr);
    auto rep = test_negligible(*R, K, {{0, fams}}, family_ladder(lad, fams, K.K), kmax, {rr});
    bool k0 = true;
    for (const auto& p : rep.by_m.front().second) {
      json q = estimate_json(p.est);
      q["family"] = p.family;
      q["alpha"] = alpha_name(p.alpha, c.dim);
      paths.push_back(q);
      r.traces.push_back({p.family + "/alpha=" + alpha_name(p.alpha, c.dim), p.eps, p.values});
      if (!p.est.floor_hit) min_order = std::min(min_order, p.est.order);
      if (p.alpha.order() == 0) k0 = k0 && big_o_holds(p.est, rr);
    }
    r.outcome = rep.pass;
    r.details["pass_k0"] = k0;
  } else {
    GGFPtr R = build_ggf(c, j["gf"], ptr + "/gf");
    auto v = test_global_negligible(*R, K, claim_kernels(c, j, ptr), lad, kmax, rr);
    for (const auto& p : v.orders) {
      json q = estimate_json(p.est);
      q["kernel"] = p.kernel;
      q["k"] = p.k;
      paths.push_back(q);
      r.traces.push_back({p.kernel + "/k=" + std::to_string(p.k), p.eps, p.values});
    }
    min_order = v.min_order;
    r.outcome = v.pass;
    r.details["pass_k0"] = v.pass_k0;
  }
  r.details["r"] = rr;
  r.details["min_order"] = std::isfinite(min_order) ? json(min_order) : json("inf");
  r.details["paths"] = paths;
  if (j.contains("max_order")) {
    bool below = min_order < j["max_order"].get<double>();
    r.details["below_max_order"] = below;
    r.details["max_order"] = j["max_order"];
  }
}

inline void run_associate(const Context& c, const json& j, const std::string& ptr, ClaimResult& r) {
  if (c.local()) throw ConfigError(ptr, "association needs a manifold");
  GGFPtr R = build_ggf(c, j["gf"], ptr + "/gf");
  MDistPtr target;
  if (j.contains("target") && !j["target"].is_null()) target = c.get(c.mdists, j["target"], ptr + "/target", "distribution");
  std::vector<NForm> om;
  for (std::size_t i = 0; i < j["omegas"].size(); ++i) om.push_back(build_bump(c, j["omegas"][i], ptr + "/omegas/" + std::to_string(i)));
  EpsilonLadder lad = j.contains("ladder") ? to_ladder(j["ladder"]) : EpsilonLadder(0.2, 0.7, 8);
  auto v = associate(*R, target, om, claim_kernels(c, j, ptr), lad, j.value("tol", 1e-3));
  json tr = json::array();
  double worst = 0.0;
  for (const auto& t : v.traces) {
    json q;
    q["kernel"] = t.kernel;
    q["omega"] = t.omega;
    q["limit"] = t.limit;
    q["target"] = t.target;
    q["error"] = std::abs(t.limit - t.target);
    q["spread"] = t.spread;
    q["pass"] = t.pass;
    worst = std::max(worst, std::abs(t.limit - t.target));
    tr.push_back(q);
    r.traces.push_back({t.kernel + "/omega=" + std::to_string(t.omega), t.eps, t.values});
  }
  r.outcome = v.pass;
  r.details["tol"] = v.tol;
  r.details["max_error"] = worst;
  r.details["omegas"] = tr;
}

inline void run_kernel_valid(const Context& c, const json& j, const std::string& ptr, ClaimResult& r) {
  if (c.local()) throw ConfigError(ptr, "kernels need a manifold");
  const KernelPtr& k = c.get(c.kernels, j["kernel"], ptr + "/kernel", "kernel");
  KernelGrid K{to_box(j["grid"]["lo"], j["grid"]["hi"], c.dim, ptr + "/grid"), j["grid"].value("per_axis", c.dim > 1 ? 3 : 21),
               j["grid"].value("q_per_axis", c.dim > 1 ? 13 : 41)};
  EpsilonLadder base = j.contains("ladder") ? to_ladder(j["ladder"]) : EpsilonLadder(0.25, 0.7, 12);
  EpsilonLadder lad(std::min(base.eps0, k->eps_K(K.K)), base.ratio, base.length);
  std::vector<std::string> modes = {"support", "growth", "grading"};
  if (j.contains("modes")) modes = j["modes"].get<std::vector<std::string>>();
  bool ok = true;
  r.details["eps_K"] = k->eps_K(K.K);
  for (const auto& mode : modes) {
    if (mode == "support") {
      json s = json::array();
      for (const auto& h : {Metric::flat(c.dim),
                            Metric::conformal(SmoothFunction::trig(c.dim, {{0.3, {1, 0}, 0.0}}, 0.0, "u"))}) {
        auto rep = validate_support(*k, K, lad, h);
        s.push_back({{"metric", h.name}, {"C", rep.C}, {"pass", rep.pass}});
        r.traces.push_back({"support/" + h.name, rep.eps, rep.ratio});
        ok = ok && rep.pass;
      }
      r.details["support"] = s;
    } else if (mode == "growth") {
      auto X = default_fields(*c.m);
      std::vector<std::array<int, 2>> kl = {{0, 0}, {0, 1}, {1, 0}};
      if (j.contains("growth")) kl = j["growth"].get<std::vector<std::array<int, 2>>>();
      json g = json::array();
      for (auto [kk, ll] : kl) {
        std::vector<VectorField> xs(X.begin(), X.begin() + kk), ys;
        for (int i = 0; i < ll; ++i) ys.push_back(X[(kk + i) % X.size()]);
        auto rep = validate_growth(*k, K, lad, xs, ys);
        json q = estimate_json(rep.est);
        q["k"] = kk;
        q["l"] = ll;
        q["required"] = rep.required;
        q["pass"] = rep.pass;
        g.push_back(q);
        r.traces.push_back({"growth/k=" + std::to_string(kk) + ",l=" + std::to_string(ll), rep.eps, rep.values});
        ok = ok && rep.pass;
      }
      r.details["growth"] = g;
    } else {
      int m = j.value("m", k->grading());
      json g = json::array();
      // independent sweeps, reduced in function order
      auto fs = grading_test_functions(c.m, std::max(1, m));
      std::vector<std::future<GradingReport>> jobs;
      for (const auto& f : fs)
        jobs.push_back(std::async(std::launch::async, [&k, &K, lad, f, m] { return validate_grading(*k, K, lad, f, m); }));
      for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto& f = fs[i];
        auto rep = jobs[i].get();
        json q = estimate_json(rep.est);
        q["function"] = f.name;
        q["pass"] = rep.pass;
        g.push_back(q);
        r.traces.push_back({"grading/" + f.name, rep.eps, rep.values});
        ok = ok && rep.pass;
      }
      r.details["grading_m"] = m;
      r.details["grading"] = g;
    }
  }
  r.outcome = ok;
}

inline void run_classify(const Context& c, const json& j, const std::string& ptr, ClaimResult& r, std::uint64_t salt) {
  FamilyPtr f = build_family(c, j["family"], ptr + "/family");
  CompactGrid K = build_grid(c, j["grid"], ptr + "/grid", salt);
  K.focus.clear();
  EpsilonLadder lad = j.contains("ladder") ? to_ladder(j["ladder"]) : c.ladder;
  if (j["family"].contains("localize")) {
    // grid given in intrinsic coordinates; the family lives in the chart
    const json& l = j["family"]["localize"];
    const Chart& ch = c.m->chart(l["chart"].get<int>());
    for (const Point& p : {K.K.lo, K.K.hi})
      if (!ch.contains(p)) throw ConfigError(ptr + "/grid", "grid must lie inside the chart");
    double ek = c.get(c.kernels, l["kernel"], ptr + "/family/localize/kernel", "kernel")->eps_K(K.K);
    K.K = ch.psi.image(Box{c.dim, ch.rep(K.K.lo), ch.rep(K.K.hi)});
    lad = EpsilonLadder(std::min(lad.eps0, ek), lad.ratio, lad.length);
  }
  lad = family_ladder(lad, {f}, K.K);
  int m = j["m"];
  auto rep = classify_test_object(*f, m, K, lad);
  json mo = json::array();
  for (const auto& o : rep.orders) {
    json q = estimate_json(o.est);
    q["alpha"] = alpha_name(o.alpha, f->dim);
    q["square"] = o.square;
    q["delta"] = o.delta;
    mo.push_back(q);
    std::vector<double> eps = lad.values();
    r.traces.push_back({"moment/alpha=" + alpha_name(o.alpha, f->dim), eps, {}});
  }
  // traces carry the moment sups; recompute once for the CSV
  for (std::size_t i = 0; i < rep.orders.size(); ++i) {
    const auto& al = rep.orders[i].alpha;
    for (double e : r.traces[i].eps) {
      double s = 0.0;
      for (const auto& x : K.points(e))
        s = std::max(s, std::abs((*f)(e, x).integrate([&](const Point& xi) { return monomial(xi, al, f->dim); })));
      r.traces[i].values.push_back(s);
    }
  }
  r.details["family"] = f->name;
  r.details["m"] = m;
  r.details["class"] = j["class"];
  r.details["ladder_eps0"] = lad.eps0;
  r.details["moments"] = mo;
  r.outcome = j["class"] == "square" ? rep.square : rep.delta;
}

// Random (phi, x) for local commutation checks: T_x S_eps of two mollifier
// profiles with supports inside the domain.
inline std::vector<std::pair<TestFunction, Point>> local_samples(const Context& c, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mollifier a = build_mollifier(c.dim, 2, 1.0), b = build_mollifier(c.dim, 3, 1.0, Profile::Skew);
  std::vector<std::pair<TestFunction, Point>> out;
  for (int i = 0; i < n; ++i) {
    double e = 0.02 + 0.3 * u(rng);
    Point x{0, 0};
    for (int d = 0; d < c.dim; ++d) {
      double lo = c.omega.lo[d] + 1.05 * e, hi = c.omega.hi[d] - 1.05 * e;
      x[d] = lo + (hi - lo) * u(rng);
    }
    out.emplace_back((i % 2 ? b : a).base.scale_translate(e, x), x);
  }
  return out;
}

inline void run_d_commutation(const Context& c, const json& j, const std::string& ptr, ClaimResult& r) {
  if (!c.local()) throw ConfigError(ptr, "d_commutation runs on a local domain");
  double tol = j.value("tol", 1e-12);
  auto S = local_samples(c, j.value("samples", 20), c.seed + 17);
  double worst = 0.0;
  json per = json::array();
  for (std::size_t k = 0; k < j["distributions"].size(); ++k) {
    const DistPtr& u = c.get(c.ldists, j["distributions"][k], ptr + "/distributions/" + std::to_string(k), "distribution");
    double w = 0.0;
    for (int i = 0; i < c.dim; ++i) {
      MultiIndex e{};
      e.a[i] = 1;
      auto lhs = derivative_Di(iota(u), i);
      auto rhs = iota(derivative(u, e));
      for (const auto& [phi, x] : S) {
        double a = lhs->eval(phi, x), b = rhs->eval(phi, x);
        w = std::max(w, std::abs(a - b) / (1 + std::abs(a) + std::abs(b)));
      }
    }
    per.push_back({{"distribution", j["distributions"][k]}, {"max_rel_diff", w}});
    worst = std::max(worst, w);
  }
  r.details["samples"] = S.size();
  r.details["tol"] = tol;
  r.details["max_rel_diff"] = worst;
  r.details["per_distribution"] = per;
  r.outcome = worst <= tol;
}

inline void run_lie_commutation(const Context& c, const json& j, const std::string& ptr, ClaimResult& r) {
  if (c.local()) throw ConfigError(ptr, "lie_commutation needs a manifold");
  const VectorField& X = c.get(c.fields, j["field"], ptr + "/field", "field");
  double tol = j.value("tol", 1e-9), fd_tol = j.value("fd_tol", 1e-6);
  int n = j.value("samples", 20);
  auto k = build_kernel(c.m, build_mollifier(c.dim, 2, 1.0));
  std::mt19937_64 rng(c.seed + 29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Box box = c.m->coordinate_box();
  std::vector<std::pair<NForm, Point>> S;
  for (int i = 0; i < n; ++i) {
    Point p{0, 0};
    for (int d = 0; d < c.dim; ++d) p[d] = box.lo[d] + (0.05 + 0.9 * u(rng)) * box.width(d);
    double e = 0.02 + 0.2 * u(rng);
    if (i % 2 == 0) {
      S.emplace_back(k->at(e, p), p);
    } else {
      Point q{0, 0};
      for (int d = 0; d < c.dim; ++d) q[d] = box.lo[d] + (0.2 + 0.6 * u(rng)) * box.width(d);
      double rad = 0.15 + 0.2 * u(rng);
      std::optional<NForm> w;
      for (int a = 0; a < c.m->chart_count() && !w; ++a) {
        if (!c.m->chart(a).contains(q)) continue;
        try {
          w = bump_form(c.m, a, q, rad);
        } catch (const DomainError&) {
        }
      }
      if (!w) throw DomainError("lie_commutation: no chart holds a sample bump");
      S.emplace_back(*w, p);
    }
  }
  double worst = 0.0, worst_fd = 0.0;
  json per = json::array();
  for (std::size_t i = 0; i < j["distributions"].size(); ++i) {
    const MDistPtr& d = c.get(c.mdists, j["distributions"][i], ptr + "/distributions/" + std::to_string(i), "distribution");
    auto lhs = lie_derivative_global(g_iota(d), X);
    auto fd = lie_derivative_global(without_channels(g_iota(d)), X);
    auto rhs = g_iota(m_lie(d, X));
    double w = 0.0, wf = 0.0;
    for (const auto& [form, p] : S) {
      double a = lhs->eval(form, p), b = rhs->eval(form, p), f = fd->eval(form, p);
      w = std::max(w, std::abs(a - b) / (1 + std::abs(b)));
      wf = std::max(wf, std::abs(f - b) / (1 + std::abs(b)));
    }
    per.push_back({{"distribution", j["distributions"][i]}, {"max_rel_diff", w}, {"max_rel_diff_fd", wf}});
    worst = std::max(worst, w);
    worst_fd = std::max(worst_fd, wf);
  }
  r.details["samples"] = n;
  r.details["tol"] = tol;
  r.details["fd_tol"] = fd_tol;
  r.details["max_rel_diff"] = worst;
  r.details["max_rel_diff_fd"] = worst_fd;
  r.details["per_distribution"] = per;
  r.outcome = worst <= tol && worst_fd <= fd_tol;
}

inline void run_pullback_commutation(const Context& c, const json& j, const std::string& ptr, ClaimResult& r) {
  if (!c.local() || c.dim != 1) throw ConfigError(ptr, "pullback_commutation runs on a one-dimensional local domain");
  Diffeo mu = build_map(j["map"]);
  Box dom = Box::interval(j["omega"][0], j["omega"][1]);
  Box img = mu.image(dom);
  if (!(img.lo[0] >= c.omega.lo[0] && img.hi[0] <= c.omega.hi[0]))
    throw ConfigError(ptr + "/omega", "the map must send omega into the scenario domain");
  Context sub = c;
  sub.omega = dom;
  auto S = local_samples(sub, j.value("samples", 20), c.seed + 41);
  double tol = j.value("tol", 1e-10), worst = 0.0;
  for (std::size_t i = 0; i < j["distributions"].size(); ++i) {
    const DistPtr& u = c.get(c.ldists, j["distributions"][i], ptr + "/distributions/" + std::to_string(i), "distribution");
    auto lhs = pullback_local(iota(u), mu);
    auto rhs = iota(pullback_dist(u, mu, dom));
    for (const auto& [phi, x] : S) {
      double a = lhs->eval(phi, x), b = rhs->eval(phi, x);
      worst = std::max(worst, std::abs(a - b) / (1 + std::abs(b)));
    }
  }
  r.details["samples"] = S.size();
  r.details["tol"] = tol;
  r.details["max_rel_diff"] = worst;
  r.outcome = worst <= tol;
}

inline void run_localization(const Context& c, const json& j, const std::string& ptr, ClaimResult& r, std::uint64_t salt) {
  if (c.local()) throw ConfigError(ptr, "localization needs a manifold");
  GGFPtr R = build_ggf(c, j["gf"], ptr + "/gf");
  const KernelPtr& k = c.get(c.kernels, j["kernel"], ptr + "/kernel", "kernel");
  int a = j["chart"];
  if (a >= c.m->chart_count()) throw ConfigError(ptr + "/chart", "chart index out of range");
  const Chart& ch = c.m->chart(a);
  CompactGrid Kg = build_grid(c, j["grid"], ptr + "/grid", salt);
  for (const Point& p : {Kg.K.lo, Kg.K.hi})
    if (!ch.contains(p)) throw ConfigError(ptr + "/grid", "grid must lie inside the chart");
  auto fam = localize_kernel(k, a);
  CompactGrid Kl = Kg;
  Kl.K = ch.psi.image(Box{c.dim, ch.rep(Kg.K.lo), ch.rep(Kg.K.hi)});
  Kl.random = 0;
  Kg.random = 0;
  double e0 = std::min({c.ladder.eps0, k->eps_K(Kg.K), fam->eps0(Kl.K)});
  EpsilonLadder lad(e0, c.ladder.ratio, c.ladder.length);
  if (j.contains("ladder")) lad = to_ladder(j["ladder"]);
  int kmax = j.value("k_max", 0);
  GFPtr L = local_rep_global(R, a);
  bool agree;
  if (j["mode"] == "moderate") {
    auto g = test_global_moderate(*R, Kg, {k}, lad, kmax);
    auto l = test_moderate(*L, Kl, {fam}, lad, kmax);
    r.details["global"] = {{"N", g.N}, {"pass", g.pass}};
    r.details["local"] = {{"N", l.N}, {"pass", l.pass}};
    agree = g.N == l.N && g.pass == l.pass;
  } else {
    double rr = j.value("r", 1.0);
    auto g = test_global_negligible(*R, Kg, {k}, lad, kmax, rr);
    auto l = test_negligible(*L, Kl, {{0, {fam}}}, lad, kmax, {rr});
    bool l0 = true;
    for (const auto& p : l.by_m.front().second)
      if (p.alpha.order() == 0) l0 = l0 && big_o_holds(p.est, rr);
    r.details["global"] = {{"pass", g.pass}, {"pass_k0", g.pass_k0}, {"min_order", g.min_order}};
    r.details["local"] = {{"pass", l.pass}, {"pass_k0", l0}};
    r.details["r"] = rr;
    agree = g.pass == l.pass && g.pass_k0 == l0;
  }
  r.details["ladder_eps0"] = lad.eps0;
  r.details["agree"] = agree;
  r.outcome = agree;
}

inline ClaimResult run_claim(const Context& c, std::size_t index) {
  const json& j = c.cfg["claims"][index];
  std::string ptr = "/claims/" + std::to_string(index);
  ClaimResult r;
  r.id = j["id"];
  r.type = j["type"];
  r.statement = j.value("statement", "");
  r.criterion = j.value("criterion", 0);
  r.expected = j.value("expect", true);
  auto t0 = std::chrono::steady_clock::now();
  std::uint64_t salt = index + 1;
  try {
    if (r.type == "mollifier_moments") {
      const Mollifier& mo = c.get(c.mollifiers, j["mollifier"], ptr + "/mollifier", "mollifier");
      auto mm = moments(mo.base, mo.moment_order);
      double ti = j.value("tol_integral", 1e-10), tm = j.value("tol_moment", 1e-8), e0 = 0.0, e1 = 0.0;
      for (const auto& [al, v] : mm) (al.order() == 0 ? e0 : e1) = std::max(al.order() == 0 ? e0 : e1, std::abs(al.order() == 0 ? v - 1.0 : v));
      r.details = {{"q", mo.moment_order}, {"dim", mo.dim}, {"radius", mo.radius}, {"profile", profile_name(mo.profile)},
                   {"integral_error", e0}, {"max_moment", e1}, {"rcond", mo.rcond}};
      r.outcome = e0 <= ti && e1 <= tm;
    } else if (r.type == "moderate") {
      run_moderate(c, j, ptr, r, salt);
    } else if (r.type == "negligible") {
      run_negligible(c, j, ptr, r, salt);
    } else if (r.type == "associate") {
      run_associate(c, j, ptr, r);
    } else if (r.type == "kernel_valid") {
      run_kernel_valid(c, j, ptr, r);
    } else if (r.type == "classify") {
      run_classify(c, j, ptr, r, salt);
    } else if (r.type == "d_commutation") {
      run_d_commutation(c, j, ptr, r);
    } else if (r.type == "lie_commutation") {
      run_lie_commutation(c, j, ptr, r);
    } else if (r.type == "pullback_commutation") {
      run_pullback_commutation(c, j, ptr, r);
    } else {
      run_localization(c, j, ptr, r, salt);
    }
  } catch (const DomainError& e) {
    throw ConfigError(ptr, std::string("claim '") + r.id + "' (" + ptr + "): " + e.what());
  }
  r.pass = r.outcome == r.expected;
  if (r.details.contains("below_max_order")) r.pass = r.pass && r.details["below_max_order"].get<bool>();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Scenario

struct RunResult {
  std::string name;
  json report;
  std::string traces_csv;
  json timing;
  std::vector<ClaimResult> claims;
  bool all_pass = false;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string o = "\"";
  for (char ch : s) o += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return o + "\"";
}

inline RunResult run_scenario(const json& cfg, const Options& opt) {
  Context c = build_context(cfg, opt);
  const std::size_t n = cfg["claims"].size();
  std::vector<std::optional<ClaimResult>> res(n);
  std::vector<std::exception_ptr> err(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        res[i] = run_claim(c, i);
      } catch (...) {
        err[i] = std::current_exception();
      }
    }
  };
  auto t0 = std::chrono::steady_clock::now();
  int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(n)));
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);

  RunResult out;
  out.name = c.name;
  out.all_pass = true;
  json claims = json::array();
  std::ostringstream csv;
  csv << "claim,series,eps,value\n";
  json timing = json::array();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) {
    ClaimResult& r = *res[i];
    if (!ids.insert(r.id).second) throw ConfigError("/claims/" + std::to_string(i) + "/id", "duplicate claim id '" + r.id + "'");
    json d;
    d["type"] = r.type;
    d["criterion"] = r.criterion;
    d["expected"] = r.expected;
    d["outcome"] = r.outcome;
    for (auto& [k, v] : r.details.items()) d[k] = v;
    claims.push_back({{"id", r.id}, {"paper_ref", r.statement}, {"pass", r.pass}, {"details", d}});
    for (const auto& t : r.traces)
      for (std::size_t k = 0; k < t.eps.size(); ++k)
        csv << csv_field(r.id) << ',' << csv_field(t.series) << ',' << format_double(t.eps[k]) << ','
            << format_double(k < t.values.size() ? t.values[k] : std::nan("")) << '\n';
    timing.push_back({{"id", r.id}, {"seconds", r.seconds}});
    out.all_pass = out.all_pass && r.pass;
    out.claims.push_back(std::move(r));
  }
  json meta;
  meta["schema_version"] = cfg["schema_version"];
  meta["manifold"] = c.local() ? std::string("omega") : c.m->name();
  json ks = json::array();
  for (const auto& [id, k] : c.kernels) ks.push_back(id);
  meta["kernels"] = ks;
  meta["seed"] = c.seed;
  meta["ladder"] = {{"eps0", c.ladder.eps0}, {"ratio", c.ladder.ratio}, {"length", c.ladder.length}};
  std::size_t passed = 0;
  for (const auto& r : out.claims) passed += r.pass;
  meta["claims_passed"] = passed;
  meta["claims_total"] = n;
  out.report["scenario"] = c.name;
  out.report["claims"] = claims;
  out.report["meta"] = meta;
  out.traces_csv = csv.str();
  auto wall = std::chrono::system_clock::now();
  out.timing["scenario"] = c.name;
  out.timing["finished_unix"] = std::chrono::duration_cast<std::chrono::seconds>(wall.time_since_epoch()).count();
  out.timing["total_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.timing["jobs"] = jobs;
  out.timing["claims"] = timing;
  return out;
}

// Writes <name>.report.json, <name>.traces.csv and <name>.timing.json.
inline void write_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / (r.name + ".report.json"), std::ios::binary) << r.report.dump(2) << '\n';
  std::ofstream(dir / (r.name + ".traces.csv"), std::ios::binary) << r.traces_csv;
  std::ofstream(dir / (r.name + ".timing.json"), std::ios::binary) << r.timing.dump(2) << '\n';
}

struct BuiltIn {
  std::string name, description;
  std::filesystem::path path;
};

inline std::vector<BuiltIn> builtin_scenarios() {
  std::vector<BuiltIn> out;
  auto dir = scenario_dir();
  if (!std::filesystem::exists(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json" || e.path().filename() == "scenario.schema.json") continue;
    json j = json::parse(read_file(e.path()), nullptr, false);
    if (j.is_discarded() || !j.contains("name")) continue;
    out.push_back({j["name"], j.value("description", ""), e.path()});
  }
  std::sort(out.begin(), out.end(), [](const BuiltIn& a, const BuiltIn& b) { return a.name < b.name; });
  return out;
}

// A path, or the name of a built-in scenario.
inline std::filesystem::path resolve_config(const std::string& arg) {
  if (std::filesystem::exists(arg)) return arg;
  for (const auto& b : builtin_scenarios())
    if (b.name == arg) return b.path;
  throw ConfigError("", "no such config file or built-in scenario: " + arg);
}

}  // namespace gfk::scenario
