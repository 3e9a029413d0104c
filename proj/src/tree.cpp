#include "selfgraft/tree.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace selfgraft {

Edge::Edge(Label x, Label y) {
  if (y < x) std::swap(x, y);
  a = std::move(x);
  b = std::move(y);
}

CombinatorialTree::CombinatorialTree(std::vector<Label> vertices, std::vector<Label> leaves,
                                     std::vector<Edge> edges) {
  auto impl = std::make_shared<Impl>();
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw std::invalid_argument("tree: duplicate vertex label");
  if (vertices.size() < 2) throw std::invalid_argument("tree: needs at least two vertices");
  impl->labels = std::move(vertices);
  for (std::size_t i = 0; i < impl->labels.size(); ++i)
    impl->index.emplace(impl->labels[i], static_cast<int>(i));
  impl->adjacency.resize(impl->labels.size());
  impl->leaf.assign(impl->labels.size(), false);

  auto lookup = [&](const Label& v) {
    auto it = impl->index.find(v);
    if (it == impl->index.end()) throw std::invalid_argument("tree: unknown vertex '" + v + "'");
    return it->second;
  };
  for (const auto& l : leaves) {
    int i = lookup(l);
    if (impl->leaf[static_cast<std::size_t>(i)])
      throw std::invalid_argument("tree: duplicate leaf '" + l + "'");
    impl->leaf[static_cast<std::size_t>(i)] = true;
  }
  std::set<Edge> seen;
  for (const auto& e : edges) {
    Edge n(e.a, e.b);
    if (n.a == n.b) throw std::invalid_argument("tree: self loop at '" + n.a + "'");
    if (!seen.insert(n).second)
      throw std::invalid_argument("tree: duplicate edge " + n.a + "-" + n.b);
    int i = lookup(n.a), j = lookup(n.b);
    impl->adjacency[static_cast<std::size_t>(i)].push_back(j);
    impl->adjacency[static_cast<std::size_t>(j)].push_back(i);
  }
  if (seen.size() + 1 != impl->labels.size())
    throw std::invalid_argument("tree: edge count does not match vertex count");
  for (auto& adj : impl->adjacency) std::sort(adj.begin(), adj.end());

  std::vector<bool> reached(impl->labels.size(), false);
  std::deque<int> queue{0};
  reached[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : impl->adjacency[static_cast<std::size_t>(u)])
      if (!reached[static_cast<std::size_t>(w)]) {
        reached[static_cast<std::size_t>(w)] = true;
        ++count;
        queue.push_back(w);
      }
  }
  if (count != impl->labels.size()) throw std::invalid_argument("tree: not connected");

  for (std::size_t i = 0; i < impl->labels.size(); ++i) {
    auto deg = impl->adjacency[i].size();
    if (impl->leaf[i] && deg != 1)
      throw std::invalid_argument("tree: leaf '" + impl->labels[i] + "' must have one edge");
    if (!impl->leaf[i] && deg == 0)
      throw std::invalid_argument("tree: isolated vertex '" + impl->labels[i] + "'");
  }
  impl_ = std::move(impl);
}

std::vector<Label> CombinatorialTree::leaves() const {
  std::vector<Label> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (impl_->leaf[i]) out.push_back(impl_->labels[i]);
  return out;
}

std::vector<Label> CombinatorialTree::internal_vertices() const {
  std::vector<Label> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (!impl_->leaf[i]) out.push_back(impl_->labels[i]);
  return out;
}

std::vector<Edge> CombinatorialTree::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (int j : impl_->adjacency[i])
      if (static_cast<std::size_t>(j) > i) out.emplace_back(impl_->labels[i], label(j));
  std::sort(out.begin(), out.end());
  return out;
}

bool CombinatorialTree::contains(const Label& v) const { return impl_->index.count(v) != 0; }

int CombinatorialTree::index_of(const Label& v) const {
  auto it = impl_->index.find(v);
  if (it == impl_->index.end()) throw std::invalid_argument("tree: unknown vertex '" + v + "'");
  return it->second;
}

bool CombinatorialTree::is_leaf(const Label& v) const { return is_leaf_index(index_of(v)); }

bool CombinatorialTree::has_edge(const Label& u, const Label& v) const {
  if (!contains(u) || !contains(v)) return false;
  const auto& adj = adjacent(index_of(u));
  return std::binary_search(adj.begin(), adj.end(), index_of(v));
}

std::size_t CombinatorialTree::degree(const Label& v) const { return adjacent(index_of(v)).size(); }

std::vector<Label> CombinatorialTree::neighbors(const Label& v) const {
  std::vector<Label> out;
  for (int j : adjacent(index_of(v))) out.push_back(label(j));
  return out;
}

bool CombinatorialTree::operator==(const CombinatorialTree& other) const {
  if (impl_ == other.impl_) return true;
  return vertices() == other.vertices() && leaves() == other.leaves() && edges() == other.edges();
}

namespace {

std::vector<int> parents_from(const CombinatorialTree& t, int root) {
  std::vector<int> parent(t.size(), -2);
  parent[static_cast<std::size_t>(root)] = -1;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : t.adjacent(u))
      if (parent[static_cast<std::size_t>(w)] == -2) {
        parent[static_cast<std::size_t>(w)] = u;
        queue.push_back(w);
      }
  }
  return parent;
}

std::set<Label> component_avoiding(const CombinatorialTree& t, int start,
                                   const std::vector<int>& blocked) {
  std::vector<bool> seen(t.size(), false);
  for (int b : blocked) seen[static_cast<std::size_t>(b)] = true;
  std::set<Label> out;
  std::deque<int> queue{start};
  seen[static_cast<std::size_t>(start)] = true;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    out.insert(t.label(u));
    for (int w : t.adjacent(u))
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = true;
        queue.push_back(w);
      }
  }
  return out;
}

// Canonical block numbering of `members` by the direction each one takes
// from the removed vertex; returns the number of blocks.
std::size_t canonical_blocks(const std::vector<int>& direction, const std::vector<int>& members,
                             std::vector<int>& out) {
  out.clear();
  std::map<int, int> ids;
  for (int m : members) {
    int d = direction[static_cast<std::size_t>(m)];
    auto [it, fresh] = ids.emplace(d, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return ids.size();
}

}  // namespace

std::vector<int> direction_table(const CombinatorialTree& t, int root) {
  std::vector<int> dir(t.size(), -2);
  dir[static_cast<std::size_t>(root)] = -1;
  std::deque<int> queue;
  for (int w : t.adjacent(root)) {
    dir[static_cast<std::size_t>(w)] = w;
    queue.push_back(w);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (int w : t.adjacent(u))
      if (dir[static_cast<std::size_t>(w)] == -2) {
        dir[static_cast<std::size_t>(w)] = dir[static_cast<std::size_t>(u)];
        queue.push_back(w);
      }
  }
  return dir;
}

std::vector<Label> arc(const CombinatorialTree& t, const Label& v, const Label& w) {
  int iv = t.index_of(v), iw = t.index_of(w);
  auto parent = parents_from(t, iv);
  std::vector<Label> path;
  for (int u = iw; u != -1; u = parent[static_cast<std::size_t>(u)]) path.push_back(t.label(u));
  std::reverse(path.begin(), path.end());
  return path;
}

std::set<Label> annulus(const CombinatorialTree& t, const Label& v, const Label& w) {
  auto path = arc(t, v, w);
  if (path.size() <= 2) return {};
  return component_avoiding(t, t.index_of(path[1]), {t.index_of(v), t.index_of(w)});
}

std::set<Label> branch(const CombinatorialTree& t, const Label& v, const Label& toward) {
  if (!t.has_edge(v, toward))
    throw std::invalid_argument("branch: edge " + v + "-" + toward + " is not adjacent");
  return component_avoiding(t, t.index_of(toward), {t.index_of(v)});
}

Label separating_vertex(const CombinatorialTree& t, const Label& a, const Label& b,
                        const Label& c) {
  if (a == b || b == c || a == c)
    throw std::invalid_argument("separating_vertex: leaves must be distinct");
  for (const auto* l : {&a, &b, &c})
    if (!t.is_leaf(*l)) throw std::invalid_argument("separating_vertex: '" + *l + "' is not a leaf");
  int ia = t.index_of(a);
  auto parent = parents_from(t, ia);
  std::vector<bool> on_path(t.size(), false);
  for (int u = t.index_of(b); u != -1; u = parent[static_cast<std::size_t>(u)])
    on_path[static_cast<std::size_t>(u)] = true;
  int u = t.index_of(c);
  while (!on_path[static_cast<std::size_t>(u)]) u = parent[static_cast<std::size_t>(u)];
  return t.label(u);
}

bool separates(const CombinatorialTree& t, const Label& v, const Label& u1, const Label& u2,
               const Label& u3) {
  if (v == u1 || v == u2 || v == u3) return false;
  auto dir = direction_table(t, t.index_of(v));
  int d1 = dir[static_cast<std::size_t>(t.index_of(u1))];
  int d2 = dir[static_cast<std::size_t>(t.index_of(u2))];
  int d3 = dir[static_cast<std::size_t>(t.index_of(u3))];
  return d1 != d2 && d2 != d3 && d1 != d3;
}

bool is_stable(const CombinatorialTree& t) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!t.is_leaf_index(static_cast<int>(i)) && t.adjacent(static_cast<int>(i)).size() < 3)
      return false;
  return true;
}

bool is_compatible(const CombinatorialTree& t1, const CombinatorialTree& t2) {
  for (const auto& v : t1.vertices())
    if (!t2.contains(v)) return false;
  // Separation by v is determined by the partition of the other t1-vertices
  // into components of the tree minus v. With at most two blocks nothing is
  // separated; with three or more blocks the relation determines the
  // partition, so the relations agree iff the partitions agree.
  std::vector<int> in1, in2, blocks1, blocks2;
  for (std::size_t i = 0; i < t1.size(); ++i) {
    const Label& v = t1.label(static_cast<int>(i));
    auto dir1 = direction_table(t1, static_cast<int>(i));
    auto dir2 = direction_table(t2, t2.index_of(v));
    in1.clear();
    in2.clear();
    for (std::size_t j = 0; j < t1.size(); ++j) {
      if (j == i) continue;
      in1.push_back(static_cast<int>(j));
      in2.push_back(t2.index_of(t1.label(static_cast<int>(j))));
    }
    auto n1 = canonical_blocks(dir1, in1, blocks1);
    auto n2 = canonical_blocks(dir2, in2, blocks2);
    if (n1 <= 2 && n2 <= 2) continue;
    if (blocks1 != blocks2) return false;
  }
  return true;
}

Embedding embed_by_triples(const CombinatorialTree& t1, const CombinatorialTree& t2) {
  if (!is_stable(t1) || !is_stable(t2))
    throw std::invalid_argument("embed_by_triples: both trees must be stable");
  auto leaves1 = t1.leaves();
  for (const auto& l : leaves1)
    if (!t2.contains(l) || !t2.is_leaf(l))
      throw std::invalid_argument("embed_by_triples: leaf '" + l + "' missing from second tree");

  std::vector<int> members1, members2;
  for (const auto& l : leaves1) {
    members1.push_back(t1.index_of(l));
    members2.push_back(t2.index_of(l));
  }
  auto triple_of = [&](const std::vector<int>& blocks) {
    std::array<Label, 3> out;
    std::size_t found = 0;
    std::set<int> used;
    for (std::size_t i = 0; i < blocks.size() && found < 3; ++i)
      if (used.insert(blocks[i]).second) out[found++] = leaves1[i];
    return out;
  };

  std::map<std::vector<int>, int> second;
  std::vector<int> blocks;
  for (std::size_t w = 0; w < t2.size(); ++w) {
    if (t2.is_leaf_index(static_cast<int>(w))) continue;
    if (canonical_blocks(direction_table(t2, static_cast<int>(w)), members2, blocks) >= 3)
      second.emplace(blocks, static_cast<int>(w));
  }

  Embedding out;
  std::set<int> matched;
  for (std::size_t u = 0; u < t1.size(); ++u) {
    if (t1.is_leaf_index(static_cast<int>(u))) continue;
    canonical_blocks(direction_table(t1, static_cast<int>(u)), members1, blocks);
    auto it = second.find(blocks);
    if (it == second.end()) {
      out.relabeling.clear();
      out.conflict = triple_of(blocks);
      return out;
    }
    matched.insert(it->second);
    out.relabeling.emplace(t1.label(static_cast<int>(u)), t2.label(it->second));
  }
  for (const auto& [key, w] : second)
    if (!matched.count(w)) {
      out.relabeling.clear();
      out.conflict = triple_of(key);
      return out;
    }
  return out;
}

bool assert_stable_equality(const CombinatorialTree& t1, const CombinatorialTree& t2) {
  if (!is_stable(t1) || !is_stable(t2))
    throw std::invalid_argument("assert_stable_equality: trees must be stable");
  if (t1.leaves() != t2.leaves())
    throw std::invalid_argument("assert_stable_equality: leaf sets differ");
  if (!is_compatible(t1, t2))
    throw std::invalid_argument("assert_stable_equality: first tree is not compatible with second");
  return t1.vertices() == t2.vertices() && t1.edges() == t2.edges();
}

CombinatorialTree relabel(const CombinatorialTree& t, const std::map<Label, Label>& mapping) {
  auto rename = [&](const Label& v) {
    auto it = mapping.find(v);
    return it == mapping.end() ? v : it->second;
  };
  std::vector<Label> vertices, leaves;
  std::vector<Edge> edges;
  for (const auto& v : t.vertices()) vertices.push_back(rename(v));
  for (const auto& l : t.leaves()) leaves.push_back(rename(l));
  for (const auto& e : t.edges()) edges.emplace_back(rename(e.a), rename(e.b));
  return CombinatorialTree(std::move(vertices), std::move(leaves), std::move(edges));
}

Restriction restrict_to(const CombinatorialTree& t, const std::set<Label>& keep,
                        const std::set<Label>& leaves) {
  for (const auto& l : leaves)
    if (!keep.count(l)) throw std::invalid_argument("restrict_to: leaf '" + l + "' not kept");
  std::vector<bool> kept(t.size(), false);
  for (const auto& v : keep) kept[static_cast<std::size_t>(t.index_of(v))] = true;

  std::map<std::pair<Label, Label>, Label> first_step;
  std::set<Edge> edges;
  for (const auto& u : keep) {
    int iu = t.index_of(u);
    for (int start : t.adjacent(iu)) {
      // Walk through dropped vertices until kept ones are reached.
      std::deque<std::pair<int, int>> queue{{start, iu}};
      while (!queue.empty()) {
        auto [x, from] = queue.front();
        queue.pop_front();
        if (kept[static_cast<std::size_t>(x)]) {
          first_step[{u, t.label(x)}] = t.label(start);
          edges.emplace(u, t.label(x));
          continue;
        }
        for (int y : t.adjacent(x))
          if (y != from) queue.emplace_back(y, x);
      }
    }
  }
  if (edges.size() + 1 != keep.size())
    throw std::invalid_argument("restrict_to: kept vertices are not closed under medians");
  Restriction out{CombinatorialTree(std::vector<Label>(keep.begin(), keep.end()),
                                    std::vector<Label>(leaves.begin(), leaves.end()),
                                    std::vector<Edge>(edges.begin(), edges.end())),
                  std::move(first_step)};
  return out;
}

std::set<Label> spanned_vertices(const CombinatorialTree& t, const std::set<Label>& leaves) {
  std::vector<int> marked(t.size(), 0);
  for (const auto& l : leaves) marked[static_cast<std::size_t>(t.index_of(l))] = 1;
  int total = static_cast<int>(leaves.size());
  // Root at 0, accumulate counts bottom-up.
  auto parent = parents_from(t, 0);
  std::vector<int> order;
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    order.push_back(u);
    for (int w : t.adjacent(u))
      if (w != parent[static_cast<std::size_t>(u)]) queue.push_back(w);
  }
  std::vector<int> below(t.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    int u = *it;
    below[static_cast<std::size_t>(u)] += marked[static_cast<std::size_t>(u)];
    int p = parent[static_cast<std::size_t>(u)];
    if (p >= 0) below[static_cast<std::size_t>(p)] += below[static_cast<std::size_t>(u)];
  }
  std::set<Label> out(leaves.begin(), leaves.end());
  for (std::size_t u = 0; u < t.size(); ++u) {
    int directions = 0;
    for (int w : t.adjacent(static_cast<int>(u))) {
      int count = (w == parent[u]) ? total - below[u] : below[static_cast<std::size_t>(w)];
      if (count > 0) ++directions;
    }
    if (directions >= 3) out.insert(t.label(static_cast<int>(u)));
  }
  return out;
}

Restriction restrict_to_leaves(const CombinatorialTree& t, const std::set<Label>& leaves) {
  if (leaves.size() < 3) throw std::invalid_argument("restrict_to_leaves: needs three leaves");
  for (const auto& l : leaves)
    if (!t.is_leaf(l)) throw std::invalid_argument("restrict_to_leaves: '" + l + "' is not a leaf");
  return restrict_to(t, spanned_vertices(t, leaves), leaves);
}

}  // namespace selfgraft
