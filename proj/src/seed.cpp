#include <algorithm>

#include "selfgraft/dynamics.hpp"
#include "selfgraft/grafting.hpp"

namespace selfgraft {

namespace {

const Json& need(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  return j.at(name);
}

template <typename T>
T get(const Json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ParseError(std::string("ill-typed value for ") + what);
  }
}

void check_roles(const GraftState& s, ValidationReport& out) {
  const auto& xs = s.system.dyn.tree();
  const auto& f = s.system.cover.vertex_map;
  auto image = [&](const Label& v) {
    auto it = f.find(v);
    return it == f.end() ? Label() : it->second;
  };
  ValidationReport r;
  for (const auto* role : {&s.fixed, &s.x0, &s.x1})
    if (!xs.contains(*role) || xs.is_leaf(*role))
      r.add("roles", *role, "role vertex is not an internal vertex of the dynamical tree");
  if (r.ok()) {
    if (s.x0 == s.x1) r.add("roles", s.x0, "grafting arc endpoints coincide");
    if (image(s.fixed) != s.fixed) r.add("fixed-vertex", s.fixed, "vertex is not fixed");
  }
  if (s.generation == 0) {
    // The seed cycle must be a genuine cycle of period four through x0.
    const auto& c = s.seed_cycle;
    bool ok = c.size() == 4 && std::find(c.begin(), c.end(), s.x0) != c.end() &&
              std::set<Label>(c.begin(), c.end()).size() == 4;
    for (std::size_t i = 0; ok && i < c.size(); ++i)
      ok = xs.contains(c[i]) && !xs.is_leaf(c[i]) && image(c[i]) == c[(i + 1) % c.size()];
    if (!ok) r.add("cycle", "seed", "missing period-4 cycle of internal vertices through x0");
  }
  out.append(r);
}

}  // namespace

GraftState load_seed(const Json& doc) {
  auto sys = read_system(doc);
  auto sh = doc.contains("shishikura") ? shishikura_from_json(doc["shishikura"]) : shishikura_of(sys);
  GraftState s{std::move(sys), std::move(sh)};
  const Json& roles = need(doc, "roles");
  s.fixed = get<Label>(need(roles, "fixed"), "roles.fixed");
  s.x0 = get<Label>(need(roles, "x0"), "roles.x0");
  s.x1 = get<Label>(need(roles, "x1"), "roles.x1");
  s.seed_cycle = get<std::vector<Label>>(need(roles, "cycle"), "roles.cycle");
  if (doc.contains("note")) s.note = get<std::string>(doc["note"], "note");
  if (doc.contains("expected_certified_cycles"))
    s.expected_certified_cycles = get<int>(doc["expected_certified_cycles"], "expected_certified_cycles");
  if (doc.contains("graft")) {
    const Json& g = doc["graft"];
    s.generation = get<int>(need(g, "generation"), "graft.generation");
    s.periods = get<std::vector<int>>(need(g, "periods"), "graft.periods");
    s.v0 = get<Label>(need(g, "v0"), "graft.v0");
    s.cycle = get<std::vector<Label>>(need(g, "cycle"), "graft.cycle");
    s.branch_b0 = get<std::set<Label>>(need(g, "branch_b0"), "graft.branch_b0");
    for (const auto& [c, prov] : need(g, "copies").items()) {
      if (!prov.is_array() || prov.size() != 2) throw ParseError("graft.copies entries are [index, original]");
      s.copies[c] = {get<int>(prov[0], "copy index"), get<Label>(prov[1], "copy original")};
    }
    s.involution = get<std::map<Label, Label>>(need(g, "involution"), "graft.involution");
  }

  ValidationReport r = validate_system(s.system);
  const bool cover_ok = r.ok();
  check_roles(s, r);
  if (cover_ok) {
    for (const auto* t : {&s.system.cover.source.tree(), &s.system.cover.target.tree(), &s.system.dyn.tree()})
      if (!is_stable(*t)) r.add("stability", "tree", "a tree of the system is not stable");
    const int d = global_degree(s.system.cover);
    if (d != 3) r.add("global-degree", "cover", "global degree is " + std::to_string(d) + ", expected 3");
    r.append(check_translation(s.system, s.shishikura));
  }
  if (r.ok() && s.expected_certified_cycles) {
    const int count = count_independent_nonmonomial_cycles(s.system);
    if (count != *s.expected_certified_cycles)
      r.add("certificates", "seed",
            "re-derived " + std::to_string(count) + " certified cycles, file records " +
                std::to_string(*s.expected_certified_cycles));
  }
  if (!r.ok()) throw SeedRejected("seed rejected", r);
  return s;
}

GraftState load_default_seed() { return load_seed(parse_json_text(default_seed_text())); }

Json state_to_json(const GraftState& s) {
  Json doc = system_to_json(s.system);
  doc["roles"] = {{"fixed", s.fixed}, {"x0", s.x0}, {"x1", s.x1}, {"cycle", s.seed_cycle}};
  doc["shishikura"] = shishikura_to_json(s.shishikura);
  if (s.note) doc["note"] = *s.note;
  if (s.expected_certified_cycles) doc["expected_certified_cycles"] = *s.expected_certified_cycles;
  if (s.generation > 0) {
    Json& g = doc["graft"];
    g["generation"] = s.generation;
    g["periods"] = s.periods;
    g["v0"] = s.v0;
    g["cycle"] = s.cycle;
    g["branch_b0"] = s.branch_b0;
    g["involution"] = s.involution;
    g["copies"] = Json::object();
    for (const auto& [c, prov] : s.copies) g["copies"][c] = Json::array({prov.first, prov.second});
  }
  return doc;
}

}  // namespace selfgraft
