#include "selfgraft/cover.hpp"

#include <algorithm>
#include <sstream>

namespace selfgraft {

MarkedTreeOfSpheres::MarkedTreeOfSpheres(CombinatorialTree tree, Attachments attachments)
    : tree_(std::move(tree)), attachments_(std::move(attachments)) {
  for (const auto& v : tree_.internal_vertices()) {
    auto it = attachments_.find(v);
    if (it == attachments_.end())
      throw std::invalid_argument("sphere tree: no attaching points at '" + v + "'");
    auto nbrs = tree_.neighbors(v);
    if (it->second.size() != nbrs.size())
      throw std::invalid_argument("sphere tree: attaching points at '" + v +
                                  "' do not match its edges");
    auto& rev = reverse_[v];
    for (const auto& n : nbrs) {
      auto p = it->second.find(n);
      if (p == it->second.end())
        throw std::invalid_argument("sphere tree: edge " + v + "-" + n + " has no attaching point");
      if (!rev.emplace(p->second, n).second)
        throw std::invalid_argument("sphere tree: attaching point '" + p->second +
                                    "' used twice at '" + v + "'");
    }
  }
  for (const auto& [v, pts] : attachments_)
    if (!tree_.contains(v) || tree_.is_leaf(v))
      throw std::invalid_argument("sphere tree: attaching points given for '" + v +
                                  "', which is not an internal vertex");
}

MarkedTreeOfSpheres MarkedTreeOfSpheres::with_default_points(CombinatorialTree tree) {
  Attachments att;
  for (const auto& v : tree.internal_vertices())
    for (const auto& n : tree.neighbors(v)) att[v][n] = n;
  return MarkedTreeOfSpheres(std::move(tree), std::move(att));
}

const Label& MarkedTreeOfSpheres::point(const Label& v, const Label& neighbor) const {
  auto it = attachments_.find(v);
  if (it == attachments_.end()) throw std::invalid_argument("no sphere at '" + v + "'");
  auto p = it->second.find(neighbor);
  if (p == it->second.end())
    throw std::invalid_argument("no edge " + v + "-" + neighbor + " at sphere");
  return p->second;
}

const Label& MarkedTreeOfSpheres::neighbor_at(const Label& v, const Label& pt) const {
  auto it = reverse_.find(v);
  if (it == reverse_.end()) throw std::invalid_argument("no sphere at '" + v + "'");
  auto n = it->second.find(pt);
  if (n == it->second.end()) throw std::invalid_argument("no point '" + pt + "' at '" + v + "'");
  return n->second;
}

std::vector<Label> MarkedTreeOfSpheres::points(const Label& v) const {
  std::vector<Label> out;
  for (const auto& [n, p] : attachments_.at(v)) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

const Label& TreeCover::image(const Label& v) const {
  auto it = vertex_map.find(v);
  if (it == vertex_map.end()) throw std::invalid_argument("cover: '" + v + "' has no image");
  return it->second;
}

int TreeCover::degree_towards(const Label& v, const Label& neighbor) const {
  if (source.tree().is_leaf(v)) return portrait.at(v).degree;
  return local_degree.at(v).at(source.point(v, neighbor));
}

int TreeCover::vertex_degree(const Label& v) const {
  if (source.tree().is_leaf(v)) return portrait.at(v).degree;
  const Label& w = image(v);
  const Label first = target.tree().neighbors(w).front();
  int sum = 0;
  for (const auto& n : source.tree().neighbors(v))
    if (image(n) == first) sum += degree_towards(v, n);
  return sum;
}

TreeCover make_cover(const CombinatorialTree& source, const CombinatorialTree& target,
                     const std::map<Label, Label>& vertex_map, const std::map<Edge, int>& degrees) {
  TreeCover c{MarkedTreeOfSpheres::with_default_points(source),
              MarkedTreeOfSpheres::with_default_points(target), vertex_map, {}, {}};
  auto degree_of = [&](const Label& u, const Label& w) {
    auto it = degrees.find(Edge(u, w));
    if (it == degrees.end()) throw std::invalid_argument("make_cover: no degree for " + u + "-" + w);
    return it->second;
  };
  for (const auto& v : source.internal_vertices())
    for (const auto& n : source.neighbors(v)) c.local_degree[v][n] = degree_of(v, n);
  for (const auto& y : source.leaves())
    c.portrait[y] = LeafImage{vertex_map.at(y), degree_of(y, source.neighbors(y).front())};
  return c;
}

bool ValidationReport::mentions(const std::string& kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

void ValidationReport::add(std::string kind, std::string where, std::string detail) {
  violations.push_back({std::move(kind), std::move(where), std::move(detail)});
}

void ValidationReport::append(const ValidationReport& other) {
  violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const auto& v : violations) out << "[" << v.kind << "] " << v.where << ": " << v.detail << "\n";
  return out.str();
}

ValidationReport validate_cover(const TreeCover& c) {
  ValidationReport r;
  const auto& ys = c.source.tree();
  const auto& zs = c.target.tree();

  bool map_ok = true;
  for (const auto& v : ys.vertices()) {
    auto it = c.vertex_map.find(v);
    if (it == c.vertex_map.end() || !zs.contains(it->second)) {
      r.add("vertex-map", v, "no image in the target tree");
      map_ok = false;
    } else if (ys.is_leaf(v) != zs.is_leaf(it->second)) {
      r.add("vertex-map", v, "leaf/internal type not preserved by image " + it->second);
    }
  }
  for (const auto& [v, w] : c.vertex_map)
    if (!ys.contains(v)) r.add("vertex-map", v, "mapped vertex is not in the source tree");
  if (!map_ok) return r;

  for (const auto& e : ys.edges()) {
    const auto &fa = c.image(e.a), &fb = c.image(e.b);
    if (!zs.has_edge(fa, fb))
      r.add("edge-map", e.a + "-" + e.b, "image " + fa + "-" + fb + " is not an edge");
  }

  // Portrait: leaf images and degrees.
  for (const auto& y : ys.leaves()) {
    auto it = c.portrait.find(y);
    if (it == c.portrait.end()) {
      r.add("portrait", y, "leaf missing from the portrait");
    } else {
      if (it->second.image != c.image(y))
        r.add("portrait", y, "portrait image " + it->second.image + " differs from vertex map");
      if (it->second.degree < 1) r.add("portrait", y, "non-positive degree");
    }
  }
  for (const auto& [y, img] : c.portrait)
    if (!ys.contains(y) || !ys.is_leaf(y)) r.add("portrait", y, "not a source leaf");
  if (r.mentions("portrait")) return r;

  for (const auto& v : ys.internal_vertices()) {
    auto ld = c.local_degree.find(v);
    if (ld == c.local_degree.end()) {
      r.add("structure", v, "no local degrees");
      continue;
    }
    auto pts = c.source.points(v);
    std::vector<Label> keys;
    for (const auto& [p, d] : ld->second) keys.push_back(p);
    if (keys != pts) {
      r.add("structure", v, "local degrees are not given on exactly the attaching points");
      continue;
    }
    bool positive = true;
    for (const auto& [p, d] : ld->second)
      if (d < 1) {
        r.add("structure", v, "non-positive local degree at point " + p);
        positive = false;
      }
    if (!positive) continue;

    const Label& w = c.image(v);
    if (zs.is_leaf(w)) continue;
    // Equivariance: i_v(e) goes to i_{F(v)}(F(e)); tally the fibres.
    std::map<Label, int> fibre;
    for (const auto& p : c.target.points(w)) fibre[p] = 0;
    int total = 0, ramification = 0;
    bool equivariant = true;
    for (const auto& n : ys.neighbors(v)) {
      const Label& fn = c.image(n);
      if (!zs.has_edge(w, fn)) {
        r.add("equivariance", v, "point " + c.source.point(v, n) + " has no image point at " + w);
        equivariant = false;
        continue;
      }
      int d = ld->second.at(c.source.point(v, n));
      fibre[c.target.point(w, fn)] += d;
      total += d;
      ramification += d - 1;
    }
    if (!equivariant) continue;
    int dv = fibre.begin()->second;
    for (const auto& [p, s] : fibre)
      if (s != dv || s == 0) {
        std::ostringstream msg;
        msg << "fibre over " << w << ":" << p << " has degree " << s << ", expected " << dv;
        r.add("local-cover", v, msg.str());
      }
    if (ramification != 2 * dv - 2) {
      std::ostringstream msg;
      msg << "sum of (local degree - 1) is " << ramification << ", expected " << 2 * dv - 2;
      r.add("riemann-hurwitz", v, msg.str());
    }
    (void)total;
  }
  if (r.mentions("structure")) return r;

  for (const auto& e : ys.edges()) {
    bool la = ys.is_leaf(e.a), lb = ys.is_leaf(e.b);
    int da = c.degree_towards(e.a, e.b);
    int db = c.degree_towards(e.b, e.a);
    if (da != db) {
      std::ostringstream msg;
      msg << "local degrees " << da << " at " << e.a << " and " << db << " at " << e.b;
      r.add("edge-consistency", e.a + "-" + e.b, msg.str());
    }
    (void)la;
    (void)lb;
  }

  std::map<Label, int> preimages;
  for (const auto& z : zs.leaves()) preimages[z] = 0;
  for (const auto& [y, img] : c.portrait)
    if (preimages.count(img.image)) preimages[img.image] += img.degree;
  int d = -1;
  for (const auto& [z, s] : preimages) {
    if (s == 0) {
      r.add("global-degree", z, "target leaf has no preimage");
      continue;
    }
    if (d < 0) d = s;
    if (s != d) {
      std::ostringstream msg;
      msg << "leaf preimages count " << s << ", other leaves count " << d;
      r.add("global-degree", z, msg.str());
    }
  }
  return r;
}

int global_degree(const TreeCover& c) {
  std::map<Label, int> preimages;
  for (const auto& z : c.target.tree().leaves()) preimages[z] = 0;
  for (const auto& [y, img] : c.portrait) preimages[img.image] += img.degree;
  int d = -1;
  for (const auto& [z, s] : preimages) {
    if (d < 0) d = s;
    if (s != d || s == 0) throw CorruptCover("global degree: inconsistent count at leaf " + z);
  }
  return d;
}

std::set<Label> critical_leaves(const TreeCover& c) {
  std::set<Label> out;
  for (const auto& [y, img] : c.portrait)
    if (img.degree >= 2) out.insert(y);
  return out;
}

std::set<Label> critical_values(const TreeCover& c) {
  std::set<Label> out;
  for (const auto& y : critical_leaves(c)) out.insert(c.portrait.at(y).image);
  return out;
}

int edge_degree_by_counting(const TreeCover& c, const Edge& e, const Label& z, const Label& z2) {
  const auto& ys = c.source.tree();
  const auto& zs = c.target.tree();
  if (!ys.has_edge(e.a, e.b)) throw std::invalid_argument("edge_degree_by_counting: not an edge");
  const Label &fa = c.image(e.a), &fb = c.image(e.b);
  auto target_side = branch(zs, fa, fb);
  if (!zs.is_leaf(z) || !zs.is_leaf(z2))
    throw std::invalid_argument("edge_degree_by_counting: z and z2 must be target leaves");
  if (target_side.count(z) == target_side.count(z2))
    throw std::invalid_argument("edge_degree_by_counting: " + z + " and " + z2 +
                                " lie on the same side of the image edge");
  auto count = [&](const std::set<Label>& side) {
    int nz = 0, nz2 = 0;
    for (const auto& y : side) {
      auto it = c.portrait.find(y);
      if (it == c.portrait.end()) continue;
      if (it->second.image == z) nz += it->second.degree;
      if (it->second.image == z2) nz2 += it->second.degree;
    }
    return std::abs(nz - nz2);
  };
  int one = count(branch(ys, e.a, e.b));
  int other = count(branch(ys, e.b, e.a));
  if (one != other)
    throw CorruptCover("edge_degree_by_counting: components of " + e.a + "-" + e.b + " disagree");
  return one;
}

TreeCover project_cover(const TreeCover& c, const std::set<Label>& zprime) {
  const auto& ys = c.source.tree();
  const auto& zs = c.target.tree();
  if (zprime.size() < 3) throw std::invalid_argument("project_cover: needs at least three leaves");
  for (const auto& z : zprime)
    if (!zs.contains(z) || !zs.is_leaf(z))
      throw std::invalid_argument("project_cover: '" + z + "' is not a target leaf");
  for (const auto& v : critical_values(c))
    if (!zprime.count(v))
      throw std::invalid_argument("project_cover: missing critical value '" + v + "'");

  Restriction target = restrict_to_leaves(zs, zprime);
  std::set<Label> kept_target(target.tree.vertices().begin(), target.tree.vertices().end());
  std::set<Label> yprime, kept_source;
  for (const auto& v : ys.vertices())
    if (kept_target.count(c.image(v))) {
      kept_source.insert(v);
      if (ys.is_leaf(v)) yprime.insert(v);
    }
  if (spanned_vertices(ys, yprime) != kept_source)
    throw CorruptCover("project_cover: preimages of the projected target are not the spanned vertices");
  Restriction source = restrict_to(ys, kept_source, yprime);

  auto inherit = [](const MarkedTreeOfSpheres& old, const Restriction& res) {
    MarkedTreeOfSpheres::Attachments att;
    for (const auto& v : res.tree.internal_vertices())
      for (const auto& n : res.tree.neighbors(v)) att[v][n] = old.point(v, res.first_step.at({v, n}));
    return MarkedTreeOfSpheres(res.tree, std::move(att));
  };

  TreeCover out{inherit(c.source, source), inherit(c.target, target), {}, {}, {}};
  for (const auto& v : kept_source) out.vertex_map[v] = c.image(v);
  for (const auto& v : source.tree.internal_vertices())
    for (const auto& n : source.tree.neighbors(v)) {
      const Label& p = out.source.point(v, n);
      out.local_degree[v][p] = c.local_degree.at(v).at(p);
    }
  for (const auto& y : yprime) out.portrait[y] = c.portrait.at(y);
  return out;
}

bool check_arc_degree(const TreeCover& c, const Label& v, const Label& v2) {
  const auto& ys = c.source.tree();
  auto crit = critical_leaves(c);
  for (const auto& u : annulus(ys, v, v2))
    if (crit.count(u))
      throw std::invalid_argument("check_arc_degree: annulus contains critical leaf '" + u + "'");
  auto path = arc(ys, v, v2);
  if (path.size() < 2) return true;
  int d = c.degree_towards(path[0], path[1]);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (c.degree_towards(path[i], path[i + 1]) != d) return false;
    if (c.degree_towards(path[i + 1], path[i]) != d) return false;
  }
  for (std::size_t i = 1; i + 1 < path.size(); ++i)
    if (c.vertex_degree(path[i]) != d) return false;
  std::vector<Label> image;
  for (const auto& u : path) image.push_back(c.image(u));
  return image == arc(c.target.tree(), c.image(v), c.image(v2));
}

ValidationReport validate_system(const DynamicalTreeSystem& sys) {
  ValidationReport r = validate_cover(sys.cover);
  const auto& ys = sys.cover.source.tree();
  const auto& zs = sys.cover.target.tree();
  const auto& xs = sys.dyn.tree();
  bool contained = true;
  for (const auto& v : xs.vertices()) {
    if (!ys.contains(v) || !zs.contains(v)) {
      r.add("dynamics", v, "vertex of the dynamical tree missing from source or target");
      contained = false;
    } else if (xs.is_leaf(v) && (!ys.is_leaf(v) || !zs.is_leaf(v))) {
      r.add("dynamics", v, "marked leaf is not a leaf of both source and target");
      contained = false;
    }
  }
  if (!contained) return r;
  if (!is_compatible(xs, ys)) r.add("dynamics", "source", "dynamical tree is not compatible");
  if (!is_compatible(xs, zs)) r.add("dynamics", "target", "dynamical tree is not compatible");
  if (r.mentions("dynamics")) return r;
  for (const auto& v : xs.internal_vertices())
    for (const auto& u : xs.neighbors(v)) {
      const Label& p = sys.dyn.point(v, u);
      const Label ys_step = arc(ys, v, u)[1];
      const Label zs_step = arc(zs, v, u)[1];
      if (ys.is_leaf(v) || sys.cover.source.point(v, ys_step) != p)
        r.add("dynamics", v + "->" + u, "attaching point differs in the source tree");
      if (zs.is_leaf(v) || sys.cover.target.point(v, zs_step) != p)
        r.add("dynamics", v + "->" + u, "attaching point differs in the target tree");
    }
  return r;
}

ShishikuraMap shishikura_of(const DynamicalTreeSystem& sys) {
  const auto& xs = sys.dyn.tree();
  const auto& ys = sys.cover.source.tree();
  ShishikuraMap out{xs, {}, {}};
  for (const auto& v : xs.vertices()) out.tau[v] = sys.cover.image(v);
  for (const auto& e : xs.edges()) {
    const Label& from = xs.is_leaf(e.a) ? e.b : e.a;
    const Label& to = from == e.a ? e.b : e.a;
    out.degree[e] = sys.cover.degree_towards(from, arc(ys, from, to)[1]);
  }
  return out;
}

ValidationReport check_translation(const DynamicalTreeSystem& sys, const ShishikuraMap& sh) {
  ValidationReport r;
  const auto& xs = sys.dyn.tree();
  const auto& ys = sys.cover.source.tree();
  if (!is_stable(sh.tree) || !is_stable(xs)) {
    r.add("translation", "tree", "tree map and dynamical tree must both be stable");
    return r;
  }
  if (sh.tree.leaves() != xs.leaves()) {
    r.add("translation", "tree", "leaf sets differ");
    return r;
  }
  auto emb = embed_by_triples(sh.tree, xs);
  if (!emb.ok()) {
    const auto& t = *emb.conflict;
    r.add("translation", "tree", "partitions disagree on leaves " + t[0] + "," + t[1] + "," + t[2]);
    return r;
  }
  auto phi = [&](const Label& v) {
    auto it = emb.relabeling.find(v);
    return it == emb.relabeling.end() ? v : it->second;
  };
  auto relabeled = relabel(sh.tree, emb.relabeling);
  if (!(relabeled == xs)) r.add("translation", "tree", "tree differs from the dynamical tree");
  if (!is_compatible(relabeled, ys))
    r.add("translation", "tree", "tree is not compatible with the source tree");
  if (!r.ok()) return r;

  for (const auto& v : sh.tree.vertices()) {
    auto it = sh.tau.find(v);
    if (it == sh.tau.end()) {
      r.add("translation", v, "tree map undefined");
      continue;
    }
    const Label expected = sh.tree.contains(it->second) ? phi(it->second) : it->second;
    const Label& actual = sys.cover.image(phi(v));
    if (expected != actual) r.add("translation", v, "maps to " + actual + ", tree map says " + expected);
  }
  for (const auto& e : sh.tree.edges()) {
    auto it = sh.degree.find(e);
    if (it == sh.degree.end()) {
      r.add("translation", e.a + "-" + e.b, "edge has no degree");
      continue;
    }
    const Label a = phi(sh.tree.is_leaf(e.a) ? e.b : e.a);
    const Label b = phi(a == phi(e.a) ? e.b : e.a);
    int actual = sys.cover.degree_towards(a, arc(ys, a, b)[1]);
    if (actual != it->second) {
      std::ostringstream msg;
      msg << "local degree " << actual << ", tree map degree " << it->second;
      r.add("translation", e.a + "-" + e.b, msg.str());
    }
  }
  return r;
}

}  // namespace selfgraft
