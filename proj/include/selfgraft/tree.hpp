#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace selfgraft {

using Label = std::string;

/// Unordered vertex pair, stored with first <= second.
struct Edge {
  Label a;
  Label b;

  Edge() = default;
  Edge(Label x, Label y);

  auto operator<=>(const Edge&) const = default;
  bool operator==(const Edge&) const = default;
};

/// Finite combinatorial tree with a distinguished set of leaves.
///
/// Values are immutable: every editing operation returns a new tree. Copies
/// share the underlying storage. Labels are kept in sorted order so that
/// index-based traversals are deterministic.
class CombinatorialTree {
 public:
  /// Throws std::invalid_argument unless the data describes a tree with at
  /// least two vertices, unique labels, leaves of degree exactly one and no
  /// isolated internal vertex.
  CombinatorialTree(std::vector<Label> vertices, std::vector<Label> leaves,
                    std::vector<Edge> edges);

  std::size_t size() const { return impl_->labels.size(); }
  const std::vector<Label>& vertices() const { return impl_->labels; }
  std::vector<Label> leaves() const;
  std::vector<Label> internal_vertices() const;
  std::vector<Edge> edges() const;

  bool contains(const Label& v) const;
  bool is_leaf(const Label& v) const;
  bool has_edge(const Label& u, const Label& v) const;
  std::size_t degree(const Label& v) const;
  /// Sorted neighbor labels.
  std::vector<Label> neighbors(const Label& v) const;

  // Index-level access for traversal-heavy algorithms.
  int index_of(const Label& v) const;  // throws std::invalid_argument
  const Label& label(int i) const { return impl_->labels[static_cast<std::size_t>(i)]; }
  const std::vector<int>& adjacent(int i) const {
    return impl_->adjacency[static_cast<std::size_t>(i)];
  }
  bool is_leaf_index(int i) const { return impl_->leaf[static_cast<std::size_t>(i)]; }

  bool operator==(const CombinatorialTree& other) const;

 private:
  struct Impl {
    std::vector<Label> labels;
    std::map<Label, int> index;
    std::vector<std::vector<int>> adjacency;
    std::vector<bool> leaf;
  };
  std::shared_ptr<const Impl> impl_;
};

/// Vertices from v to w along the unique path, both ends included.
std::vector<Label> arc(const CombinatorialTree& t, const Label& v, const Label& w);

/// Component of t minus {v, w} that contains the interior of the arc [v, w].
/// Empty when v and w are adjacent.
std::set<Label> annulus(const CombinatorialTree& t, const Label& v, const Label& w);

/// Component of t minus {v} on the side of the edge from v to `toward`.
std::set<Label> branch(const CombinatorialTree& t, const Label& v, const Label& toward);

/// For every vertex, the neighbor of `root` through which it is reached.
/// The entry for root itself is -1.
std::vector<int> direction_table(const CombinatorialTree& t, int root);

/// Unique vertex whose removal puts the three distinct leaves in three
/// distinct components.
Label separating_vertex(const CombinatorialTree& t, const Label& a, const Label& b,
                        const Label& c);

/// True when v, different from u1, u2, u3, has them in three distinct
/// components of t minus {v}.
bool separates(const CombinatorialTree& t, const Label& v, const Label& u1, const Label& u2,
               const Label& u3);

bool is_stable(const CombinatorialTree& t);

/// The compatibility relation t1 ◁ t2: every vertex of t1 is a vertex of t2
/// and separation of vertex triples by vertices of t1 agrees in both trees.
bool is_compatible(const CombinatorialTree& t1, const CombinatorialTree& t2);

struct Embedding {
  /// internal(t1) -> internal(t2); empty on failure.
  std::map<Label, Label> relabeling;
  /// Leaf triple whose separating vertices induce different partitions.
  std::optional<std::array<Label, 3>> conflict;

  bool ok() const { return !conflict.has_value(); }
};

/// Matches internal vertices of t1 with internal vertices of t2 through the
/// leaf partitions they induce. Both trees must be stable and the leaves of
/// t1 must be leaves of t2 (std::invalid_argument otherwise).
Embedding embed_by_triples(const CombinatorialTree& t1, const CombinatorialTree& t2);

/// Requires t1 ◁ t2, equal leaf sets and both trees stable
/// (std::invalid_argument otherwise); returns whether the trees coincide.
bool assert_stable_equality(const CombinatorialTree& t1, const CombinatorialTree& t2);

/// Renames vertices; labels missing from the map are kept.
CombinatorialTree relabel(const CombinatorialTree& t, const std::map<Label, Label>& mapping);

/// Tree on a median-closed subset of vertices: two kept vertices are adjacent
/// when the arc between them has no other kept vertex.
struct Restriction {
  CombinatorialTree tree;
  /// For every ordered pair (u, w) adjacent in the restricted tree, the
  /// neighbor of u in the original tree on the arc towards w.
  std::map<std::pair<Label, Label>, Label> first_step;
};

/// Throws std::invalid_argument if `keep` is not closed under medians or
/// does not contain `leaves`.
Restriction restrict_to(const CombinatorialTree& t, const std::set<Label>& keep,
                        const std::set<Label>& leaves);

/// Vertices of t that are in `leaves` or separate at least three of them.
std::set<Label> spanned_vertices(const CombinatorialTree& t, const std::set<Label>& leaves);

/// Stable tree with leaf set `leaves` compatible with t.
Restriction restrict_to_leaves(const CombinatorialTree& t, const std::set<Label>& leaves);

}  // namespace selfgraft
