#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "selfgraft/tree.hpp"
#include "support/oracles.hpp"
#include "support/random_covers.hpp"

using namespace selfgraft;

namespace {

CombinatorialTree star(const std::vector<Label>& leaves) {
  std::vector<Label> vs{"o"};
  std::vector<Edge> es;
  for (const auto& l : leaves) {
    vs.push_back(l);
    es.emplace_back("o", l);
  }
  return CombinatorialTree(vs, leaves, es);
}

// Two centers u, w; leaves a, b on u and c, d on w.
CombinatorialTree quartet(const Label& a, const Label& b, const Label& c, const Label& d) {
  return CombinatorialTree({"u", "w", a, b, c, d}, {a, b, c, d},
                           {{"u", a}, {"u", b}, {"u", "w"}, {"w", c}, {"w", d}});
}

}  // namespace

TEST_CASE("construction rejects malformed trees") {
  CHECK_THROWS_AS(CombinatorialTree({"a"}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(CombinatorialTree({"a", "a"}, {}, {{"a", "a"}}), std::invalid_argument);
  CHECK_THROWS_AS(CombinatorialTree({"a", "b", "c"}, {"a"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CombinatorialTree({"a", "b", "c", "d"}, {"a", "b"}, {{"a", "b"}, {"c", "d"}, {"c", "d"}}),
                  std::invalid_argument);
  // leaf of degree two
  CHECK_THROWS_AS(CombinatorialTree({"a", "b", "c"}, {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CombinatorialTree({"a", "b"}, {"a", "z"}, {{"a", "b"}}), std::invalid_argument);
}

TEST_CASE("basic accessors") {
  auto t = quartet("a", "b", "c", "d");
  CHECK(t.size() == 6);
  CHECK(t.leaves() == std::vector<Label>{"a", "b", "c", "d"});
  CHECK(t.internal_vertices() == std::vector<Label>{"u", "w"});
  CHECK(t.neighbors("u") == std::vector<Label>{"a", "b", "w"});
  CHECK(t.has_edge("w", "u"));
  CHECK_FALSE(t.has_edge("a", "c"));
  CHECK(is_stable(t));
  CHECK(arc(t, "a", "d") == std::vector<Label>{"a", "u", "w", "d"});
  CHECK(annulus(t, "a", "d") == std::set<Label>{"u", "w", "b", "c"});
  CHECK(annulus(t, "u", "w").empty());
  CHECK(branch(t, "u", "w") == std::set<Label>{"w", "c", "d"});
  CHECK(separating_vertex(t, "a", "b", "c") == "u");
  CHECK(separating_vertex(t, "c", "a", "d") == "w");
  CHECK_THROWS_AS(separating_vertex(t, "a", "a", "c"), std::invalid_argument);
}

TEST_CASE("path-like trees are not stable") {
  CombinatorialTree t({"a", "m", "b"}, {"a", "b"}, {{"a", "m"}, {"m", "b"}});
  CHECK_FALSE(is_stable(t));
}

TEST_CASE("arcs and separation agree with the brute-force oracle") {
  std::mt19937 rng(11);
  for (int round = 0; round < 40; ++round) {
    auto t = randomized::stable_tree(rng, randomized::uniform(rng, 3, 9));
    auto adj = oracle::adjacency(t);
    const auto& vs = t.vertices();
    for (const auto& v : vs)
      for (const auto& w : vs) CHECK(arc(t, v, w) == oracle::path(t, v, w));
    for (int trial = 0; trial < 60; ++trial) {
      const auto& v = randomized::pick(rng, vs);
      const auto& a = randomized::pick(rng, vs);
      const auto& b = randomized::pick(rng, vs);
      const auto& c = randomized::pick(rng, vs);
      if (a == b || b == c || a == c) continue;
      CHECK(separates(t, v, a, b, c) == oracle::separates(adj, v, a, b, c));
    }
  }
}

TEST_CASE("separating vertex of three leaves is the oracle's unique separator") {
  std::mt19937 rng(12);
  for (int round = 0; round < 30; ++round) {
    auto t = randomized::stable_tree(rng, randomized::uniform(rng, 3, 10));
    auto adj = oracle::adjacency(t);
    auto ls = t.leaves();
    for (int trial = 0; trial < 20; ++trial) {
      const auto& a = randomized::pick(rng, ls);
      const auto& b = randomized::pick(rng, ls);
      const auto& c = randomized::pick(rng, ls);
      if (a == b || b == c || a == c) continue;
      int count = 0;
      for (const auto& v : t.vertices()) count += oracle::separates(adj, v, a, b, c) ? 1 : 0;
      CHECK(count == 1);
      CHECK(oracle::separates(adj, separating_vertex(t, a, b, c), a, b, c));
    }
  }
}

TEST_CASE("compatibility matches the quadruple definition") {
  std::mt19937 rng(13);
  int agreed_true = 0, agreed_false = 0;
  for (int round = 0; round < 60; ++round) {
    auto t2 = randomized::stable_tree(rng, randomized::uniform(rng, 4, 8));
    auto ls = t2.leaves();
    std::shuffle(ls.begin(), ls.end(), rng);
    std::set<Label> subset(ls.begin(), ls.begin() + randomized::uniform(rng, 3, static_cast<int>(ls.size())));
    auto t1 = restrict_to_leaves(t2, subset).tree;
    bool fast = is_compatible(t1, t2);
    CHECK(fast == oracle::is_compatible(t1, t2));
    CHECK(fast);

    // Swapping two leaf labels usually breaks compatibility.
    std::map<Label, Label> swap{{ls[0], ls[1]}, {ls[1], ls[0]}};
    auto t3 = relabel(t2, swap);
    bool verdict = is_compatible(t3, t2);
    CHECK(verdict == oracle::is_compatible(t3, t2));
    (verdict ? agreed_true : agreed_false)++;
  }
  CHECK(agreed_false > 0);
}

TEST_CASE("a vertex missing from the larger tree breaks compatibility") {
  auto t1 = quartet("a", "b", "c", "d");
  auto t2 = star({"a", "b", "c", "d"});
  CHECK_FALSE(is_compatible(t1, t2));
  CHECK(is_compatible(restrict_to_leaves(t1, {"a", "b", "c"}).tree, t1));
}

TEST_CASE("spanned vertices and leaf restriction match the oracle") {
  std::mt19937 rng(14);
  for (int round = 0; round < 40; ++round) {
    auto t = randomized::stable_tree(rng, randomized::uniform(rng, 3, 12));
    auto ls = t.leaves();
    std::shuffle(ls.begin(), ls.end(), rng);
    std::set<Label> subset(ls.begin(), ls.begin() + randomized::uniform(rng, 3, static_cast<int>(ls.size())));
    auto kept = spanned_vertices(t, subset);
    CHECK(kept == oracle::spanned(t, subset));
    auto res = restrict_to_leaves(t, subset);
    auto edges = res.tree.edges();
    CHECK(std::set<Edge>(edges.begin(), edges.end()) == oracle::induced_edges(t, kept));
    CHECK(is_stable(res.tree));
    CHECK(is_compatible(res.tree, t));
    for (const auto& [pair, step] : res.first_step) CHECK(oracle::path(t, pair.first, pair.second)[1] == step);
  }
}

TEST_CASE("restriction rejects sets that are not closed under medians") {
  auto t = quartet("a", "b", "c", "d");
  CHECK_THROWS_AS(restrict_to(t, {"a", "c", "d"}, {"a", "c", "d"}), std::invalid_argument);
  CHECK_THROWS_AS(restrict_to_leaves(t, {"a", "b"}), std::invalid_argument);
}

TEST_CASE("embedding recovers a relabeling of internal vertices") {
  std::mt19937 rng(15);
  for (int round = 0; round < 50; ++round) {
    auto t = randomized::stable_tree(rng, randomized::uniform(rng, 3, 16));
    std::map<Label, Label> rename;
    auto internal = t.internal_vertices();
    auto shuffled = internal;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t i = 0; i < internal.size(); ++i) rename[internal[i]] = "r" + shuffled[i];
    auto t2 = relabel(t, rename);
    auto emb = embed_by_triples(t, t2);
    REQUIRE(emb.ok());
    CHECK(emb.relabeling == rename);
    CHECK(relabel(t, emb.relabeling) == t2);
    CHECK(assert_stable_equality(relabel(t, emb.relabeling), t2));
  }
}

TEST_CASE("embedding reports a separating triple when topologies differ") {
  auto t1 = quartet("a", "b", "c", "d");
  auto t2 = quartet("a", "c", "b", "d");
  auto emb = embed_by_triples(t1, t2);
  REQUIRE_FALSE(emb.ok());
  const auto& [x, y, z] = *emb.conflict;
  auto leaf_blocks = [&](const CombinatorialTree& t) {
    auto comp = oracle::components_without(oracle::adjacency(t), separating_vertex(t, x, y, z));
    std::set<std::set<Label>> blocks;
    std::map<int, std::set<Label>> by;
    for (const auto& l : t.leaves()) by[comp.at(l)].insert(l);
    for (const auto& [k, b] : by) blocks.insert(b);
    return blocks;
  };
  CHECK(leaf_blocks(t1) != leaf_blocks(t2));
  CHECK_THROWS_AS(embed_by_triples(t1, CombinatorialTree({"a", "m", "b"}, {"a", "b"}, {{"a", "m"}, {"m", "b"}})),
                  std::invalid_argument);
}

TEST_CASE("stable equality needs compatibility and equal leaves") {
  auto t1 = quartet("a", "b", "c", "d");
  CHECK(assert_stable_equality(t1, t1));
  CHECK_THROWS_AS(assert_stable_equality(t1, quartet("a", "c", "b", "d")), std::invalid_argument);
  CHECK_THROWS_AS(assert_stable_equality(t1, star({"a", "b", "c"})), std::invalid_argument);
}
