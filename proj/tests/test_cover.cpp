#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "selfgraft/cover.hpp"
#include "selfgraft/grafting.hpp"
#include "selfgraft/serialize.hpp"
#include "support/oracles.hpp"
#include "support/random_covers.hpp"

using namespace selfgraft;

namespace {

TreeCover identity_cover(const CombinatorialTree& t) {
  std::map<Label, Label> f;
  for (const auto& v : t.vertices()) f[v] = v;
  std::map<Edge, int> deg;
  for (const auto& e : t.edges()) deg[e] = 1;
  return make_cover(t, t, f, deg);
}

const DynamicalTreeSystem& seed() {
  static const DynamicalTreeSystem sys = load_default_seed().system;
  return sys;
}

// Every admissible pair for every edge, counted independently.
void check_counting_formula(const TreeCover& c) {
  auto adj = oracle::adjacency(c.source.tree());
  const auto& zs = c.target.tree();
  for (const auto& e : c.source.tree().edges()) {
    const int stored = c.degree_towards(e.a, e.b);
    CHECK(stored == c.degree_towards(e.b, e.a));
    auto side = branch(zs, c.image(e.a), c.image(e.b));
    auto one = oracle::side_counts(c, adj, e.a, e.b);
    auto other = oracle::side_counts(c, adj, e.b, e.a);
    for (const auto& z : zs.leaves())
      for (const auto& z2 : zs.leaves()) {
        if (side.count(z) == side.count(z2)) continue;
        CHECK(std::abs(one[z] - one[z2]) == stored);
        CHECK(std::abs(other[z] - other[z2]) == stored);
      }
  }
}

}  // namespace

TEST_CASE("attaching points must be distinct and cover exactly the edges") {
  CombinatorialTree t({"o", "a", "b", "c"}, {"a", "b", "c"}, {{"o", "a"}, {"o", "b"}, {"o", "c"}});
  CHECK_NOTHROW(MarkedTreeOfSpheres(t, {{"o", {{"a", "0"}, {"b", "1"}, {"c", "inf"}}}}));
  CHECK_THROWS_AS(MarkedTreeOfSpheres(t, {{"o", {{"a", "0"}, {"b", "0"}, {"c", "inf"}}}}), std::invalid_argument);
  CHECK_THROWS_AS(MarkedTreeOfSpheres(t, {{"o", {{"a", "0"}, {"b", "1"}}}}), std::invalid_argument);
  CHECK_THROWS_AS(MarkedTreeOfSpheres(t, {}), std::invalid_argument);
  MarkedTreeOfSpheres s(t, {{"o", {{"a", "0"}, {"b", "1"}, {"c", "inf"}}}});
  CHECK(s.neighbor_at("o", "inf") == "c");
  CHECK(s.points("o") == std::vector<Label>{"0", "1", "inf"});
}

TEST_CASE("identity covers validate with degree one everywhere") {
  std::mt19937 rng(21);
  for (int round = 0; round < 10; ++round) {
    auto c = identity_cover(randomized::stable_tree(rng, randomized::uniform(rng, 3, 10)));
    CHECK(validate_cover(c).ok());
    CHECK(global_degree(c) == 1);
    CHECK(critical_leaves(c).empty());
    auto ls = c.target.tree().leaves();
    for (const auto& e : c.source.tree().edges()) {
      auto side = branch(c.target.tree(), e.a, e.b);
      for (const auto& z : ls)
        for (const auto& z2 : ls)
          if (side.count(z) != side.count(z2)) CHECK(edge_degree_by_counting(c, e, z, z2) == 1);
    }
    const auto& vs = c.source.tree().vertices();
    CHECK(check_arc_degree(c, vs.front(), vs.back()));
  }
}

TEST_CASE("the seed cover validates with degree three") {
  const auto& c = seed().cover;
  CHECK(validate_cover(c).ok());
  CHECK(validate_system(seed()).ok());
  CHECK(global_degree(c) == 3);
  CHECK(critical_leaves(c) == std::set<Label>{"a1", "a2", "qa1", "qa4"});
  CHECK(critical_values(c) == std::set<Label>{"a1", "a2", "a3", "a4"});
  CHECK(c.vertex_degree("x") == 3);
  CHECK(c.vertex_degree("c1") == 2);
  CHECK(c.vertex_degree("c3") == 1);
}

TEST_CASE("bumping one local degree is reported at that vertex") {
  auto c = seed().cover;
  c.local_degree["c3"]["a3"] += 1;
  auto r = validate_cover(c);
  CHECK(r.mentions("riemann-hurwitz"));
  CHECK(r.mentions("local-cover"));
  for (const auto& v : r.violations)
    if (v.kind == "riemann-hurwitz" || v.kind == "local-cover") CHECK(v.where == "c3");
}

TEST_CASE("each invariant has its own violation kind") {
  SUBCASE("vertex map") {
    auto c = seed().cover;
    c.vertex_map.erase("g2");
    CHECK(validate_cover(c).mentions("vertex-map"));
    c = seed().cover;
    c.vertex_map["g2"] = "a2";
    CHECK(validate_cover(c).mentions("vertex-map"));
  }
  SUBCASE("edge map and equivariance") {
    auto c = seed().cover;
    c.vertex_map["g2"] = "c4";
    auto r = validate_cover(c);
    CHECK(r.mentions("edge-map"));
    CHECK(r.mentions("equivariance"));
  }
  SUBCASE("edge consistency") {
    auto c = seed().cover;
    c.portrait["b1"].degree = 2;
    CHECK(validate_cover(c).mentions("edge-consistency"));
  }
  SUBCASE("portrait") {
    auto c = seed().cover;
    c.portrait["b1"].image = "b3";
    CHECK(validate_cover(c).mentions("portrait"));
  }
  SUBCASE("global degree") {
    auto c = seed().cover;
    c.vertex_map["pp1"] = "r";
    c.portrait["pp1"].image = "r";
    auto r = validate_cover(c);
    CHECK(r.mentions("global-degree"));
    CHECK(r.mentions("local-cover"));
    CHECK_THROWS_AS(global_degree(c), CorruptCover);
  }
  SUBCASE("structure") {
    auto c = seed().cover;
    c.local_degree["c1"].erase("b1");
    CHECK(validate_cover(c).mentions("structure"));
  }
}

TEST_CASE("counting formula equals stored degrees on the seed") {
  const auto& c = seed().cover;
  check_counting_formula(c);
  // Cycle edges, through the library entry point.
  for (const auto& [a, b] : std::vector<std::pair<Label, Label>>{{"x", "c1"}, {"x", "c2"}, {"x", "c3"}, {"x", "c4"}}) {
    Edge e(a, b);
    const Label z = c.image(b) == "c1" ? "a1" : "a" + c.image(b).substr(1);
    CHECK(edge_degree_by_counting(c, e, z, "p") == c.degree_towards(a, b));
  }
  CHECK_THROWS_AS(edge_degree_by_counting(c, Edge("x", "c1"), "a3", "b3"), std::invalid_argument);
}

TEST_CASE("random covers satisfy every invariant") {
  std::mt19937 rng(22);
  for (int round = 0; round < 60; ++round) {
    auto c = randomized::cover(rng, 20);
    auto r = validate_cover(c);
    REQUIRE_MESSAGE(r.ok(), r.to_text());
    const int d = global_degree(c);
    std::map<Label, int> fibre;
    for (const auto& [y, img] : c.portrait) fibre[img.image] += img.degree;
    for (const auto& [z, n] : fibre) CHECK(n == d);
    // Ramification summed over each fibre of internal vertices.
    std::map<Label, int> ram, expected;
    for (const auto& v : c.source.tree().internal_vertices()) {
      for (const auto& [p, deg] : c.local_degree.at(v)) ram[c.image(v)] += deg - 1;
      expected[c.image(v)] += 2 * c.vertex_degree(v) - 2;
    }
    CHECK(ram == expected);
    check_counting_formula(c);
  }
}

TEST_CASE("arc degree on a grafted copy and after a mutation") {
  auto s = generate(1);
  const auto& c = s.system.cover;
  const Label root = copy_label("c1", 1, 2);
  CHECK(check_arc_degree(c, "v2@g1", copy_label("a1", 1, 2)));
  CHECK(check_arc_degree(c, root, copy_label("b1", 1, 2)));
  CHECK(edge_degree_by_counting(c, Edge(s.v0, s.x0), "a2", "b1") == 2);
  CHECK_THROWS_AS(check_arc_degree(seed().cover, "b2", "x"), std::invalid_argument);

  auto broken = seed().cover;
  broken.local_degree["c3"]["x"] = 2;
  CHECK_FALSE(check_arc_degree(broken, "c3", "x"));
}

TEST_CASE("projection onto all leaves is the identity") {
  const auto& c = seed().cover;
  auto zs = c.target.tree().leaves();
  auto p = project_cover(c, std::set<Label>(zs.begin(), zs.end()));
  CHECK(canonical_cover(p) == canonical_cover(c));
}

TEST_CASE("projection of the seed onto the critical values plus one leaf") {
  const auto& c = seed().cover;
  auto zprime = critical_values(c);
  zprime.insert("p");
  auto p = project_cover(c, zprime);
  CHECK(validate_cover(p).ok());
  CHECK(is_compatible(p.target.tree(), c.target.tree()));
  CHECK(is_compatible(p.source.tree(), c.source.tree()));
  auto ref = oracle::project(c, zprime);
  auto tv = p.target.tree().vertices();
  CHECK(std::set<Label>(tv.begin(), tv.end()) == ref.target_vertices);
  CHECK(global_degree(p) == 3);
}

TEST_CASE("a vertex separating only two kept leaves disappears") {
  const auto& c = seed().cover;
  // c3 keeps a3 and the direction back to x; b3 is dropped.
  std::set<Label> zprime{"a1", "a2", "a3", "a4", "b1", "b2", "b4", "p"};
  auto p = project_cover(c, zprime);
  CHECK_FALSE(p.target.tree().contains("c3"));
  CHECK(p.target.tree().contains("c2"));
  CHECK(validate_cover(p).ok());
}

TEST_CASE("projection preconditions") {
  const auto& c = seed().cover;
  CHECK_THROWS_AS(project_cover(c, {"a1", "a2"}), std::invalid_argument);
  CHECK_THROWS_AS(project_cover(c, {"a1", "a2", "a3", "p"}), std::invalid_argument);
  CHECK_THROWS_AS(project_cover(c, {"a1", "a2", "a3", "a4", "nope"}), std::invalid_argument);
}

TEST_CASE("random projections agree with the triple reconstruction and compose") {
  std::mt19937 rng(23);
  for (int round = 0; round < 40; ++round) {
    auto c = randomized::cover(rng, 14);
    auto ls = c.target.tree().leaves();
    std::shuffle(ls.begin(), ls.end(), rng);
    auto zprime = critical_values(c);
    for (const auto& z : ls)
      if (zprime.size() < 3 || randomized::uniform(rng, 0, 1)) zprime.insert(z);
    auto p = project_cover(c, zprime);
    REQUIRE(validate_cover(p).ok());
    auto ref = oracle::project(c, zprime);
    auto te = p.target.tree().edges(), se = p.source.tree().edges();
    CHECK(std::set<Edge>(te.begin(), te.end()) == ref.target_edges);
    CHECK(std::set<Edge>(se.begin(), se.end()) == ref.source_edges);
    CHECK(p.vertex_map == ref.vertex_map);
    for (const auto& [uw, d] : ref.degree) CHECK(p.degree_towards(uw.first, uw.second) == d);

    auto smaller = zprime;
    for (const auto& z : ls)
      if (smaller.size() > 3 && !critical_values(c).count(z) && smaller.count(z) && randomized::uniform(rng, 0, 1))
        smaller.erase(z);
    if (smaller.size() >= 3)
      CHECK(canonical_cover(project_cover(p, smaller)) == canonical_cover(project_cover(c, smaller)));
  }
}

TEST_CASE("canonical serialization round-trips") {
  const auto& sys = seed();
  auto doc = system_to_json(sys);
  auto back = read_system(parse_json_text(canonical_dump(doc)));
  CHECK(back == sys);
  CHECK(canonical_dump(system_to_json(back)) == canonical_dump(doc));
  std::mt19937 rng(24);
  for (int round = 0; round < 10; ++round) {
    auto c = randomized::cover(rng, 12);
    Json j;
    write_cover(j, c);
    CHECK(read_cover(parse_json_text(canonical_dump(j))) == c);
  }
  CHECK_THROWS_AS(parse_json_text("{\"source\": "), ParseError);
  CHECK_THROWS_AS(read_cover(parse_json_text("{\"source\": 3}")), ParseError);
  CHECK_THROWS_AS(read_cover(parse_json_text("[]")), ParseError);
}

TEST_CASE("tree map translation of the seed") {
  const auto& sys = seed();
  auto sh = shishikura_of(sys);
  CHECK(check_translation(sys, sh).ok());
  CHECK(sh.tau.at("c4") == "c1");
  CHECK(sh.tau.at("p") == "r");
  CHECK(sh.degree.at(Edge("c1", "x")) == 2);

  auto altered = sh;
  altered.degree[Edge("c2", "x")] = 1;
  auto r = check_translation(sys, altered);
  REQUIRE(r.mentions("translation"));
  CHECK(r.violations.front().where == "c2-x");

  auto renamed = sh;
  renamed.tree = relabel(sh.tree, {{"x", "hub"}});
  renamed.tau.erase("x");
  renamed.tau["hub"] = "hub";
  renamed.degree.clear();
  for (const auto& [e, d] : sh.degree) renamed.degree[Edge(e.a == "x" ? "hub" : e.a, e.b == "x" ? "hub" : e.b)] = d;
  for (auto& [v, img] : renamed.tau)
    if (img == "x") img = "hub";
  CHECK(check_translation(sys, renamed).ok());
}
