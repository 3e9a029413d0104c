#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "selfgraft/cover.hpp"
#include "selfgraft/serialize.hpp"

namespace selfgraft {

struct IterateResult {
  /// Last vertex reached inside the dynamical tree.
  Label vertex;
  /// Step at which the image left the dynamical tree, if it did.
  std::optional<int> escaped_at;
  /// Image that fell outside, when escaped.
  std::optional<Label> escaped_to;

  bool escaped() const { return escaped_at.has_value(); }
};

/// Applies F `steps` times starting at a vertex of the dynamical tree.
/// Throws std::invalid_argument when v is not a vertex of both the
/// dynamical tree and the source tree.
IterateResult iterate_vertex(const DynamicalTreeSystem& sys, const Label& v, int steps);

/// Where one attaching point of the cycle's first sphere goes after going
/// once around the cycle. `point` is empty when an intermediate direction
/// has no counterpart in the dynamical tree.
struct ReturnImage {
  std::optional<Label> point;  // attaching point of the target sphere at v
  int degree = 1;              // composed local degree
  bool operator==(const ReturnImage&) const = default;
};

struct SphereCycle {
  std::vector<Label> vertices;  // v, F(v), ..., starting at the smallest label
  int period = 0;
  int return_degree = 1;  // product of the sphere degrees along the cycle
  /// Source attaching point at vertices[0] -> image after `period` steps.
  std::map<Label, ReturnImage> return_map;

  const Label& first() const { return vertices.front(); }
  bool fully_tracked() const;
  bool operator==(const SphereCycle&) const = default;
};

/// Return data of the cycle through v (which must be periodic).
SphereCycle cycle_through(const DynamicalTreeSystem& sys, const Label& v);

/// Periodic internal vertices of the dynamical tree grouped into cycles,
/// ordered by their smallest label.
std::vector<SphereCycle> find_cycles(const DynamicalTreeSystem& sys);

bool is_critical_cycle(const SphereCycle& c);

/// Consistency of the return data: positive degrees, fibres of total
/// degree at most the return degree, and every critical fixed point of the
/// return map carries the full return degree. Returns the problems found.
std::vector<std::string> cycle_invariant_problems(const SphereCycle& c);

enum class WitnessType { TotallyRamifiedWithSecondPreimage, CriticalCount };

struct NonMonomialCertificate {
  Label cycle;  // smallest vertex of the cycle
  WitnessType type = WitnessType::CriticalCount;
  // TotallyRamifiedWithSecondPreimage: `ramified_direction` has the full
  // return degree and `other_direction` lands on that same point with
  // degree `other_degree`.
  Label landing_point;
  Label ramified_direction;
  Label other_direction;
  int other_degree = 0;
  // CriticalCount
  std::vector<Label> critical_points;
  bool fully_tracked = false;

  char letter() const { return type == WitnessType::TotallyRamifiedWithSecondPreimage ? 'a' : 'b'; }
};

/// Searches the return data for a witness against a power-map shape.
/// Throws std::invalid_argument for a non-critical cycle.
std::optional<NonMonomialCertificate> non_monomial_certificate(const SphereCycle& c);
std::optional<NonMonomialCertificate> non_monomial_certificate(const DynamicalTreeSystem& sys,
                                                               const SphereCycle& c);

/// Recomputes the cycle from the system and checks the stored witness.
bool recheck_certificate(const DynamicalTreeSystem& sys, const NonMonomialCertificate& cert);

/// Pairwise vertex-disjoint critical cycles carrying a certificate.
int count_independent_nonmonomial_cycles(const DynamicalTreeSystem& sys);

struct AnalysisReport {
  std::vector<SphereCycle> cycles;
  std::vector<std::optional<NonMonomialCertificate>> certificates;  // parallel to cycles
  int critical_cycles = 0;
  int certified_cycles = 0;
};

AnalysisReport analyze(const DynamicalTreeSystem& sys);
Json analysis_to_json(const AnalysisReport& report);

}  // namespace selfgraft
