#include "selfgraft/grafting.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "selfgraft/dynamics.hpp"

namespace selfgraft {

Label cycle_label(int i, int generation) {
  return "v" + std::to_string(i) + "@g" + std::to_string(generation);
}

Label copy_label(const Label& original, int generation, int index) {
  return original + "@g" + std::to_string(generation) + "#" + std::to_string(index);
}

namespace {

// Mutable edge-list form of a tree, turned into a CombinatorialTree at the end.
struct TreeDraft {
  std::vector<Label> vertices;
  std::vector<Label> leaves;
  std::vector<Edge> edges;

  explicit TreeDraft(const CombinatorialTree& t)
      : vertices(t.vertices()), leaves(t.leaves()), edges(t.edges()) {}

  void subdivide(const Edge& e, const Label& mid) {
    auto it = std::find(edges.begin(), edges.end(), e);
    if (it == edges.end()) throw std::logic_error("subdivide: missing edge " + e.a + "-" + e.b);
    edges.erase(it);
    vertices.push_back(mid);
    edges.emplace_back(e.a, mid);
    edges.emplace_back(mid, e.b);
  }

  // Hangs a relabeled copy of `branch` (rooted at `root`) from `at`.
  template <typename Rename>
  void hang_copy(const CombinatorialTree& from, const std::set<Label>& branch, const Label& root,
                 const Label& at, Rename rename) {
    for (const auto& u : branch) {
      vertices.push_back(rename(u));
      if (from.is_leaf(u)) leaves.push_back(rename(u));
    }
    for (const auto& e : from.edges())
      if (branch.count(e.a) && branch.count(e.b)) edges.emplace_back(rename(e.a), rename(e.b));
    edges.emplace_back(at, rename(root));
  }

  CombinatorialTree build() const { return CombinatorialTree(vertices, leaves, edges); }
};

std::vector<Edge> edge_cycle(const CombinatorialTree& t, const Label& x0, const Label& x1,
                             const std::function<Label(const Label&)>& f,
                             const std::function<bool(const Edge&)>& admissible) {
  auto path = arc(t, x0, x1);
  if (path.size() < 2) throw GraftFailure("grafting arc is degenerate", {});
  const Edge first(path[0], path[1]);
  std::vector<Edge> cycle{first};
  for (std::size_t guard = 0; guard <= t.size(); ++guard) {
    const Edge& cur = cycle.back();
    if (!admissible(cur)) break;
    Edge next(f(cur.a), f(cur.b));
    if (!t.has_edge(next.a, next.b)) break;
    if (next == first) return cycle;
    if (std::find(cycle.begin(), cycle.end(), next) != cycle.end()) break;
    cycle.push_back(next);
  }
  ValidationReport r;
  r.add("graft", first.a + "-" + first.b, "edge of the grafting arc is not periodic");
  throw GraftFailure("grafting edge is not periodic", r);
}

std::map<Label, Label> swap_map(const std::set<Label>& b0, int generation, int k) {
  std::map<Label, Label> iota;
  for (const auto& u : b0) {
    iota[u] = copy_label(u, generation, k);
    iota[copy_label(u, generation, k)] = u;
  }
  return iota;
}

Label swapped(const std::map<Label, Label>& m, const Label& v) {
  auto it = m.find(v);
  return it == m.end() ? v : it->second;
}

}  // namespace

std::vector<Edge> grafting_edges(const DynamicalTreeSystem& sys, const Label& x0, const Label& x1) {
  const auto& ys = sys.cover.source.tree();
  const auto& zs = sys.cover.target.tree();
  return edge_cycle(
      sys.dyn.tree(), x0, x1, [&](const Label& v) { return sys.cover.image(v); },
      [&](const Edge& e) { return ys.has_edge(e.a, e.b) && zs.has_edge(e.a, e.b); });
}

ShishikuraMap graft_tree_map(const ShishikuraMap& sh, const Label& x0, const Label& x1, int generation) {
  auto tau = [&](const Label& v) {
    auto it = sh.tau.find(v);
    if (it == sh.tau.end()) throw GraftFailure("tree map undefined at " + v, {});
    return it->second;
  };
  auto eps = edge_cycle(sh.tree, x0, x1, tau, [](const Edge&) { return true; });
  const int k = static_cast<int>(eps.size());
  const Label other = eps[0].a == x0 ? eps[0].b : eps[0].a;
  const auto b0 = branch(sh.tree, other, x0);

  TreeDraft draft(sh.tree);
  std::map<Edge, int> degree;
  for (const auto& [e, d] : sh.degree) degree[e] = d;
  for (int i = 0; i < k; ++i) {
    const Label vi = cycle_label(i, generation);
    const int d = degree.at(eps[i]);
    degree.erase(eps[i]);
    draft.subdivide(eps[i], vi);
    degree[Edge(eps[i].a, vi)] = d;
    degree[Edge(vi, eps[i].b)] = d;
  }
  for (int idx = 1; idx <= k; ++idx) {
    const Label at = cycle_label(idx == k ? 0 : idx, generation);
    auto rename = [&](const Label& u) { return copy_label(u, generation, idx); };
    draft.hang_copy(sh.tree, b0, x0, at, rename);
    for (const auto& e : sh.tree.edges())
      if (b0.count(e.a) && b0.count(e.b)) degree[Edge(rename(e.a), rename(e.b))] = 1;
    degree[Edge(at, rename(x0))] = 1;
  }

  const auto iota = swap_map(b0, generation, k);
  ShishikuraMap out{draft.build(), {}, std::move(degree)};
  for (const auto& v : sh.tree.vertices()) out.tau[v] = swapped(iota, tau(v));
  for (int i = 0; i < k; ++i) out.tau[cycle_label(i, generation)] = cycle_label((i + 1) % k, generation);
  for (int idx = 1; idx <= k; ++idx)
    for (const auto& u : b0)
      out.tau[copy_label(u, generation, idx)] = swapped(iota, copy_label(u, generation, idx == k ? 1 : idx + 1));
  return out;
}

GraftState graft_step(const GraftState& s) {
  const int gen = s.generation + 1;
  const auto& cover = s.system.cover;
  const auto& ys = cover.source.tree();
  const auto& zs = cover.target.tree();
  const auto& xs = s.system.dyn.tree();

  const auto eps = grafting_edges(s.system, s.x0, s.x1);
  const int k = static_cast<int>(eps.size());
  const Label other = eps[0].a == s.x0 ? eps[0].b : eps[0].a;
  const auto b0_target = branch(zs, other, s.x0);
  const auto b0_dyn = branch(xs, other, s.x0);
  auto index_of_branch = [&](int i) { return i == 0 ? k : i; };  // copy hanging at v_i

  // Target: subdivide the cycle of edges and hang B_1..B_k.
  TreeDraft target(zs);
  for (int i = 0; i < k; ++i) target.subdivide(eps[i], cycle_label(i, gen));
  for (int i = 0; i < k; ++i) {
    const int idx = index_of_branch(i);
    target.hang_copy(zs, b0_target, s.x0, cycle_label(i, gen),
                     [&](const Label& u) { return copy_label(u, gen, idx); });
  }

  // Dynamical tree: the same operation restricted to X.
  TreeDraft dyn(xs);
  for (int i = 0; i < k; ++i) dyn.subdivide(eps[i], cycle_label(i, gen));
  for (int i = 0; i < k; ++i) {
    const int idx = index_of_branch(i);
    dyn.hang_copy(xs, b0_dyn, s.x0, cycle_label(i, gen),
                  [&](const Label& u) { return copy_label(u, gen, idx); });
  }

  // Source: lift. Every preimage edge of eps[i] is subdivided over v_i and
  // carries one degree-1 copy of the branch at v_i per unit of degree.
  TreeDraft source(ys);
  std::map<Label, Label> image = cover.vertex_map;
  std::map<Edge, int> degree;
  for (const auto& e : ys.edges()) degree[e] = cover.degree_towards(e.a, e.b);

  std::map<Edge, std::vector<Edge>> preimages;
  for (const auto& e : ys.edges()) {
    Edge fe(cover.image(e.a), cover.image(e.b));
    if (std::find(eps.begin(), eps.end(), fe) != eps.end()) preimages[fe].push_back(e);
  }
  int fresh = 0;
  for (int i = 0; i < k; ++i) {
    const Edge& named = eps[static_cast<std::size_t>((i + k - 1) % k)];
    const int named_idx = index_of_branch((i + k - 1) % k);
    const int idx = index_of_branch(i);
    int j = 0;
    for (const auto& e : preimages[eps[i]]) {
      const bool is_named = e == named;
      const Label mid = is_named ? cycle_label((i + k - 1) % k, gen)
                                 : "u" + std::to_string(i) + "@g" + std::to_string(gen) + "/" +
                                       std::to_string(++j);
      const int d = degree.at(e);
      degree.erase(e);
      source.subdivide(e, mid);
      degree[Edge(e.a, mid)] = d;
      degree[Edge(mid, e.b)] = d;
      image[mid] = cycle_label(i, gen);
      for (int m = 0; m < d; ++m) {
        const bool named_copy = is_named && m == 0;
        const int tag = named_copy ? 0 : ++fresh;
        auto rename = [&](const Label& u) {
          return named_copy ? copy_label(u, gen, named_idx)
                            : copy_label(u, gen, idx) + "/" + std::to_string(tag);
        };
        source.hang_copy(zs, b0_target, s.x0, mid, rename);
        for (const auto& u : b0_target) image[rename(u)] = copy_label(u, gen, idx);
        for (const auto& be : zs.edges())
          if (b0_target.count(be.a) && b0_target.count(be.b)) degree[Edge(rename(be.a), rename(be.b))] = 1;
        degree[Edge(mid, rename(s.x0))] = 1;
      }
    }
    if (std::find(preimages[eps[i]].begin(), preimages[eps[i]].end(), named) ==
        preimages[eps[i]].end()) {
      ValidationReport r;
      r.add("graft", named.a + "-" + named.b, "edge does not map onto the next edge of the cycle");
      throw GraftFailure("grafting edge cycle does not lift", r);
    }
  }

  const auto involution = swap_map(b0_target, gen, k);
  for (auto& [y, z] : image) z = swapped(involution, z);

  std::optional<DynamicalTreeSystem> system;
  try {
    system = DynamicalTreeSystem{make_cover(source.build(), target.build(), image, degree),
                                 MarkedTreeOfSpheres::with_default_points(dyn.build())};
  } catch (const std::invalid_argument& e) {
    ValidationReport r;
    r.add("graft", "construction", e.what());
    throw GraftFailure("graft step produced an ill-formed tree", r);
  }
  GraftState out{std::move(*system), graft_tree_map(s.shishikura, s.x0, s.x1, gen)};
  out.involution = involution;
  out.fixed = s.fixed;
  out.x0 = s.x0;
  out.x1 = s.x1;
  out.seed_cycle = s.seed_cycle;
  out.generation = gen;
  out.periods = s.periods;
  out.periods.push_back(k);
  out.v0 = cycle_label(0, gen);
  for (int i = 0; i < k; ++i) out.cycle.push_back(cycle_label(i, gen));
  out.branch_b0 = b0_target;
  for (int idx = 1; idx <= k; ++idx)
    for (const auto& u : b0_target) out.copies[copy_label(u, gen, idx)] = {idx, u};

  auto report = check_graft(s, out);
  if (!report.ok()) throw GraftFailure("graft step postconditions failed", report);
  return out;
}

FundamentalTriple fundamental_triple(const GraftState& s) {
  FundamentalTriple t;
  t.k = static_cast<int>(s.cycle.size());
  if (t.k == 0) return t;
  const auto& cover = s.system.cover;
  const auto& ys = cover.source.tree();
  t.v0_periodic = true;
  for (int j = 1; j <= t.k; ++j) {
    auto r = iterate_vertex(s.system, s.v0, j);
    bool back = !r.escaped() && r.vertex == s.v0;
    if (back != (j == t.k)) t.v0_periodic = false;
  }
  Label at = s.v0, dir = copy_label(s.x0, s.generation, t.k);
  t.bk_return_degree = 1;
  for (int j = 0; j < t.k; ++j) {
    if (!ys.has_edge(at, dir)) {
      t.bk_return_degree = 0;
      break;
    }
    t.bk_return_degree *= cover.degree_towards(at, dir);
    at = cover.image(at);
    dir = cover.image(dir);
  }
  t.bk_lands_on = dir;
  if (ys.has_edge(s.v0, s.x0)) t.b0_degree = cover.degree_towards(s.v0, s.x0);
  return t;
}

ValidationReport check_graft(const GraftState& before, const GraftState& after) {
  ValidationReport r = validate_system(after.system);
  if (!r.ok()) return r;
  const auto& old_x = before.system.dyn.tree();
  const auto& new_x = after.system.dyn.tree();
  const auto& new_z = after.system.cover.target.tree();
  const auto& cover = after.system.cover;
  const int k = static_cast<int>(after.cycle.size());
  const int gen = after.generation;

  for (const auto* t : {&cover.source.tree(), &new_z, &new_x})
    if (!is_stable(*t)) r.add("stability", "tree", "a tree of the grafted system is not stable");
  if (!is_compatible(old_x, new_x))
    r.add("graft", "tree", "previous dynamical tree is not compatible with the new one");
  if (global_degree(cover) != 3) r.add("global-degree", "cover", "degree changed");

  if (k < 2) r.add("graft", "cycle", "period of the new cycle is " + std::to_string(k));
  auto path = arc(new_x, after.x0, after.x1);
  if (path.size() < 2 || path[1] != after.v0)
    r.add("graft", after.v0, "v0 is not the vertex of the arc closest to x0");
  for (int i = 0; i < k; ++i) {
    const Label& vi = after.cycle[static_cast<std::size_t>(i)];
    if (new_x.degree(vi) != 3) r.add("graft", vi, "cycle vertex does not have three branches");
    if (cover.image(vi) != after.cycle[static_cast<std::size_t>((i + 1) % k)])
      r.add("graft", vi, "cycle vertex does not map to the next one");
  }

  const auto& old_z = before.system.cover.target.tree();
  for (int idx = 1; idx <= k; ++idx) {
    const Label root = copy_label(after.x0, gen, idx);
    const Label at = after.cycle[static_cast<std::size_t>(idx == k ? 0 : idx)];
    if (!new_z.has_edge(at, root)) r.add("graft", root, "copy is not attached to its cycle vertex");
    for (const auto& e : old_z.edges())
      if (after.branch_b0.count(e.a) && after.branch_b0.count(e.b) &&
          !new_z.has_edge(copy_label(e.a, gen, idx), copy_label(e.b, gen, idx)))
        r.add("graft", root, "copy is not isomorphic to B0 at edge " + e.a + "-" + e.b);
  }
  for (const auto& [c, prov] : after.copies) {
    if (old_z.contains(c)) r.add("graft", c, "copy label collides with an existing vertex");
    if (!new_x.contains(c)) continue;
    const auto& [idx, u] = prov;
    const Label expected = swapped(after.involution, copy_label(u, gen, idx == k ? 1 : idx + 1));
    if (cover.image(c) != expected) r.add("graft", c, "maps to " + cover.image(c) + ", expected " + expected);
  }
  for (const auto& [a, b] : after.involution)
    if (swapped(after.involution, b) != a) r.add("graft", a, "swap is not an involution");

  r.append(check_translation(after.system, after.shishikura));

  auto triple = fundamental_triple(after);
  if (!triple.holds(after.x0)) {
    std::ostringstream msg;
    msg << "k=" << triple.k << " periodic=" << triple.v0_periodic << " B_k degree "
        << triple.bk_return_degree << " onto " << triple.bk_lands_on << ", B0 degree " << triple.b0_degree;
    r.add("fundamental", after.v0, msg.str());
  }
  return r;
}

GraftState generate(int n) {
  if (n < 0) throw std::invalid_argument("generate: negative count");
  GraftState s = load_default_seed();
  for (int i = 0; i < n; ++i) s = graft_step(s);
  return s;
}

}  // namespace selfgraft
