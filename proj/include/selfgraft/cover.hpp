#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfgraft/tree.hpp"

namespace selfgraft {

/// A tree whose internal vertices carry a sphere with one distinct attaching
/// point per adjacent edge. Spheres have no further structure: a sphere is
/// its set of attaching points.
class MarkedTreeOfSpheres {
 public:
  using Attachments = std::map<Label, std::map<Label, Label>>;  // vertex -> neighbor -> point

  /// Throws std::invalid_argument unless every internal vertex assigns
  /// pairwise distinct points to exactly its adjacent edges.
  MarkedTreeOfSpheres(CombinatorialTree tree, Attachments attachments);

  /// Attaching point of each edge named after the neighbor across it.
  static MarkedTreeOfSpheres with_default_points(CombinatorialTree tree);

  const CombinatorialTree& tree() const { return tree_; }
  const Attachments& attachments() const { return attachments_; }
  const Label& point(const Label& v, const Label& neighbor) const;
  const Label& neighbor_at(const Label& v, const Label& point) const;
  /// Points of the sphere at v (the set X_v).
  std::vector<Label> points(const Label& v) const;

  bool operator==(const MarkedTreeOfSpheres&) const = default;

 private:
  CombinatorialTree tree_;
  Attachments attachments_;
  std::map<Label, std::map<Label, Label>> reverse_;  // vertex -> point -> neighbor
};

struct LeafImage {
  Label image;
  int degree = 1;
  bool operator==(const LeafImage&) const = default;
};

/// Map of trees of spheres with local degrees at every attaching point of
/// the source. Kept structurally loose so that broken covers can be
/// represented and reported on by validate_cover.
struct TreeCover {
  MarkedTreeOfSpheres source;
  MarkedTreeOfSpheres target;
  std::map<Label, Label> vertex_map;
  std::map<Label, std::map<Label, int>> local_degree;  // internal source vertex -> point -> degree
  std::map<Label, LeafImage> portrait;                // source leaf -> image and degree

  const Label& image(const Label& v) const;
  /// Local degree at v of the edge towards `neighbor`; for a leaf v this is
  /// its portrait degree.
  int degree_towards(const Label& v, const Label& neighbor) const;
  /// deg(f_v), read off the preimages of the first point of F(v).
  int vertex_degree(const Label& v) const;

  bool operator==(const TreeCover&) const = default;
};

/// Cover with default attaching points, local degrees read from per-edge
/// degrees and the portrait derived from the leaf edges.
TreeCover make_cover(const CombinatorialTree& source, const CombinatorialTree& target,
                     const std::map<Label, Label>& vertex_map, const std::map<Edge, int>& degrees);

struct Violation {
  std::string kind;
  std::string where;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool mentions(const std::string& kind) const;
  void add(std::string kind, std::string where, std::string detail);
  void append(const ValidationReport& other);
  std::string to_text() const;
};

struct CorruptCover : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Violation kinds: structure, vertex-map, edge-map, equivariance,
/// local-cover, edge-consistency, riemann-hurwitz, global-degree, portrait.
ValidationReport validate_cover(const TreeCover& c);

/// Common number of leaf preimages, counted with degree, over every target
/// leaf. Throws CorruptCover when the counts disagree.
int global_degree(const TreeCover& c);

/// Source leaves of degree at least two.
std::set<Label> critical_leaves(const TreeCover& c);
/// Images of the critical leaves.
std::set<Label> critical_values(const TreeCover& c);

/// |#(D ∩ F^-1(z)) - #(D ∩ F^-1(z2))| with multiplicity, D a component of the
/// source minus the edge e. Both components are evaluated and must agree
/// (CorruptCover otherwise). z and z2 must lie on different sides of F(e).
int edge_degree_by_counting(const TreeCover& c, const Edge& e, const Label& z, const Label& z2);

/// Unique cover over the leaf subset zprime compatible with c. Requires
/// |zprime| >= 3 and every critical value in zprime (std::invalid_argument).
TreeCover project_cover(const TreeCover& c, const std::set<Label>& zprime);

/// Whether every edge and interior vertex of [v, v2] shares one degree and
/// F maps the arc onto [F(v), F(v2)]. Requires that the annulus between v
/// and v2 contains no critical leaf (std::invalid_argument).
bool check_arc_degree(const TreeCover& c, const Label& v, const Label& v2);

/// A cover together with a tree of spheres over X compatible with both its
/// source and its target, with matching attaching points.
struct DynamicalTreeSystem {
  TreeCover cover;
  MarkedTreeOfSpheres dyn;

  bool operator==(const DynamicalTreeSystem&) const = default;
};

/// validate_cover plus the compatibility of the dynamical tree (kind
/// "dynamics").
ValidationReport validate_system(const DynamicalTreeSystem& sys);

/// Shishikura-style tree map: a tree with leaves, the induced vertex map
/// (images may leave the tree) and the degree of the map on each edge.
struct ShishikuraMap {
  CombinatorialTree tree;
  std::map<Label, Label> tau;
  std::map<Edge, int> degree;
};

/// Restriction of a system to its dynamical tree, read as a tree map.
ShishikuraMap shishikura_of(const DynamicalTreeSystem& sys);

/// Cross-checks a tree map against a system: the tree equals the dynamical
/// tree after relabeling, embeds in the source tree, F agrees with tau and
/// local degrees agree with edge degrees. Mismatches use kind "translation".
ValidationReport check_translation(const DynamicalTreeSystem& sys, const ShishikuraMap& shishikura);

}  // namespace selfgraft
