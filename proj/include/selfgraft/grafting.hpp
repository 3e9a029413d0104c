#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "selfgraft/cover.hpp"
#include "selfgraft/serialize.hpp"

namespace selfgraft {

/// Rejected seed document, with the checks that failed.
struct SeedRejected : std::runtime_error {
  ValidationReport report;
  SeedRejected(const std::string& what, ValidationReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

/// A graft step whose output failed one of its postconditions.
struct GraftFailure : std::runtime_error {
  ValidationReport report;
  GraftFailure(const std::string& what, ValidationReport r)
      : std::runtime_error(what), report(std::move(r)) {}
};

/// Checks on the newest cycle: v0 returns after k > 1 steps, the B_k
/// direction returns onto x0 with degree 1 and the edge from v0 to x0 has
/// degree 2.
struct FundamentalTriple {
  int k = 0;
  bool v0_periodic = false;
  int bk_return_degree = 0;
  Label bk_lands_on;
  int b0_degree = 0;

  bool holds(const Label& x0) const {
    return k > 1 && v0_periodic && bk_return_degree == 1 && bk_lands_on == x0 && b0_degree == 2;
  }
};

struct GraftState {
  GraftState(DynamicalTreeSystem sys, ShishikuraMap tree_map)
      : system(std::move(sys)), shishikura(std::move(tree_map)) {}

  DynamicalTreeSystem system;
  /// Tree map maintained by its own recurrence and cross-checked against
  /// the system after every step.
  ShishikuraMap shishikura;
  Label fixed, x0, x1;
  std::vector<Label> seed_cycle;
  int generation = 0;
  std::vector<int> periods;  // k of every graft step so far

  // Seed-only extras, kept so that the seed round-trips.
  std::optional<int> expected_certified_cycles;
  std::optional<std::string> note;

  // Data of the newest step (empty for the seed).
  Label v0;
  std::vector<Label> cycle;  // v0, ..., v_{k-1}
  std::set<Label> branch_b0;
  std::map<Label, std::pair<int, Label>> copies;  // copy -> (index, original in B0)
  std::map<Label, Label> involution;              // B0 <-> B_k, both directions
};

/// Text of the shipped seed document.
const std::string& default_seed_text();

/// Parses and checks a seed or generated document. Throws ParseError for
/// schema problems and SeedRejected when a check fails.
GraftState load_seed(const Json& doc);
GraftState load_default_seed();

Json state_to_json(const GraftState& s);

/// Grafting arc edges, followed under F until they close up. Throws
/// GraftFailure when the first edge is not periodic.
std::vector<Edge> grafting_edges(const DynamicalTreeSystem& sys, const Label& x0, const Label& x1);

/// One self-grafting step. All postconditions are checked; any failure
/// throws GraftFailure with the collected report.
GraftState graft_step(const GraftState& s);

/// load_default_seed followed by n graft steps.
GraftState generate(int n);

/// The same step performed on a bare tree map: subdivide the cycle of
/// edges, hang copies of B0, compose with the swap of B0 and B_k.
ShishikuraMap graft_tree_map(const ShishikuraMap& sh, const Label& x0, const Label& x1, int generation);

FundamentalTriple fundamental_triple(const GraftState& s);

/// Postconditions of a step from `before` to `after`, as a report.
ValidationReport check_graft(const GraftState& before, const GraftState& after);

/// Labels used for grafted vertices.
Label cycle_label(int i, int generation);
Label copy_label(const Label& original, int generation, int index);

}  // namespace selfgraft
