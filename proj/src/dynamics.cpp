#include "selfgraft/dynamics.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace selfgraft {

namespace {

bool has_point(const MarkedTreeOfSpheres& s, const Label& v, const Label& point) {
  auto it = s.attachments().find(v);
  if (it == s.attachments().end()) return false;
  for (const auto& [n, p] : it->second)
    if (p == point) return true;
  return false;
}

// Vertices of the cycle through v, in orbit order, or empty if v is not
// periodic inside the dynamical tree.
std::vector<Label> orbit_cycle(const DynamicalTreeSystem& sys, const Label& v) {
  const auto& xs = sys.dyn.tree();
  std::vector<Label> orbit{v};
  Label cur = v;
  for (std::size_t step = 0; step < xs.size(); ++step) {
    cur = sys.cover.image(cur);
    if (!xs.contains(cur) || !sys.cover.source.tree().contains(cur)) return {};
    if (cur == v) return orbit;
    orbit.push_back(cur);
  }
  return {};
}

}  // namespace

IterateResult iterate_vertex(const DynamicalTreeSystem& sys, const Label& v, int steps) {
  if (!sys.dyn.tree().contains(v) || !sys.cover.source.tree().contains(v))
    throw std::invalid_argument("iterate_vertex: '" + v + "' is not in the dynamical tree");
  if (steps < 0) throw std::invalid_argument("iterate_vertex: negative step count");
  IterateResult r{v, std::nullopt, std::nullopt};
  for (int s = 1; s <= steps; ++s) {
    const Label& next = sys.cover.image(r.vertex);
    if (!sys.dyn.tree().contains(next)) {
      r.escaped_at = s;
      r.escaped_to = next;
      return r;
    }
    r.vertex = next;
  }
  return r;
}

bool SphereCycle::fully_tracked() const {
  return std::all_of(return_map.begin(), return_map.end(),
                     [](const auto& kv) { return kv.second.point.has_value(); });
}

SphereCycle cycle_through(const DynamicalTreeSystem& sys, const Label& v) {
  auto orbit = orbit_cycle(sys, v);
  if (orbit.empty()) throw std::invalid_argument("cycle_through: '" + v + "' is not periodic");
  std::rotate(orbit.begin(), std::min_element(orbit.begin(), orbit.end()), orbit.end());

  const auto& cover = sys.cover;
  const auto& ys = cover.source.tree();
  SphereCycle c;
  c.vertices = orbit;
  c.period = static_cast<int>(orbit.size());
  for (const auto& u : orbit) c.return_degree *= cover.vertex_degree(u);
  if (ys.is_leaf(orbit.front())) return c;

  for (const auto& n : ys.neighbors(orbit.front())) {
    Label cur = orbit.front(), dir = n;
    ReturnImage img;
    for (int i = 0; i < c.period; ++i) {
      img.degree *= cover.degree_towards(cur, dir);
      const Label& w = orbit[static_cast<std::size_t>((i + 1) % c.period)];
      const Label point = cover.target.point(w, cover.image(dir));
      if (i + 1 == c.period) {
        img.point = point;
        break;
      }
      if (!has_point(sys.dyn, w, point)) break;
      dir = cover.source.neighbor_at(w, point);
      cur = w;
    }
    c.return_map[cover.source.point(orbit.front(), n)] = img;
  }
  return c;
}

std::vector<SphereCycle> find_cycles(const DynamicalTreeSystem& sys) {
  std::set<Label> seen;
  std::vector<SphereCycle> out;
  for (const auto& v : sys.dyn.tree().internal_vertices()) {
    if (seen.count(v)) continue;
    auto orbit = orbit_cycle(sys, v);
    if (orbit.empty()) continue;
    bool internal = std::none_of(orbit.begin(), orbit.end(),
                                 [&](const Label& u) { return sys.dyn.tree().is_leaf(u); });
    seen.insert(orbit.begin(), orbit.end());
    if (internal) out.push_back(cycle_through(sys, v));
  }
  std::sort(out.begin(), out.end(),
            [](const SphereCycle& a, const SphereCycle& b) { return a.first() < b.first(); });
  return out;
}

bool is_critical_cycle(const SphereCycle& c) { return c.return_degree >= 2; }

std::vector<std::string> cycle_invariant_problems(const SphereCycle& c) {
  std::vector<std::string> problems;
  if (c.period < 1 || static_cast<int>(c.vertices.size()) != c.period)
    problems.push_back("period does not match the vertex list");
  if (c.return_degree < 1) problems.push_back("return degree below one");
  std::map<Label, int> fibre;
  for (const auto& [p, img] : c.return_map) {
    if (img.degree < 1) problems.push_back("non-positive degree at " + p);
    if (img.point) fibre[*img.point] += img.degree;
    if (img.point && *img.point == p && img.degree >= 2 && img.degree != c.return_degree)
      problems.push_back("critical fixed point " + p + " has degree " + std::to_string(img.degree));
  }
  for (const auto& [p, total] : fibre)
    if (total > c.return_degree) problems.push_back("fibre over " + p + " exceeds the return degree");
  return problems;
}

std::optional<NonMonomialCertificate> non_monomial_certificate(const SphereCycle& c) {
  if (!is_critical_cycle(c))
    throw std::invalid_argument("non_monomial_certificate: cycle through " + c.first() +
                                " is not critical");
  // A power map only sends its totally ramified points onto each other,
  // with full degree. Look for a totally ramified point that is hit by a
  // direction of smaller degree.
  const int big = c.return_degree;
  for (const auto& [p, img] : c.return_map) {
    if (img.degree != big) continue;
    for (const auto& [q, other] : c.return_map) {
      if (q == p || other.point != p || other.degree >= big) continue;
      NonMonomialCertificate cert;
      cert.cycle = c.first();
      cert.type = WitnessType::TotallyRamifiedWithSecondPreimage;
      cert.landing_point = p;
      cert.ramified_direction = p;
      cert.other_direction = q;
      cert.other_degree = other.degree;
      return cert;
    }
  }
  NonMonomialCertificate cert;
  cert.cycle = c.first();
  cert.type = WitnessType::CriticalCount;
  cert.fully_tracked = c.fully_tracked();
  // A partial degree of two or more already makes the composed point critical.
  for (const auto& [p, img] : c.return_map)
    if (img.degree >= 2) cert.critical_points.push_back(p);
  const auto n = cert.critical_points.size();
  if ((cert.fully_tracked && n != 2) || n > 2) return cert;
  return std::nullopt;
}

std::optional<NonMonomialCertificate> non_monomial_certificate(const DynamicalTreeSystem& sys,
                                                               const SphereCycle& c) {
  (void)sys;
  return non_monomial_certificate(c);
}

bool recheck_certificate(const DynamicalTreeSystem& sys, const NonMonomialCertificate& cert) {
  SphereCycle c;
  try {
    c = cycle_through(sys, cert.cycle);
  } catch (const std::invalid_argument&) {
    return false;
  }
  if (c.first() != cert.cycle || !is_critical_cycle(c)) return false;
  if (cert.type == WitnessType::TotallyRamifiedWithSecondPreimage) {
    auto r = c.return_map.find(cert.ramified_direction);
    auto o = c.return_map.find(cert.other_direction);
    if (r == c.return_map.end() || o == c.return_map.end() || r == o) return false;
    return cert.landing_point == cert.ramified_direction && r->second.degree == c.return_degree &&
           o->second.point == cert.landing_point && o->second.degree == cert.other_degree &&
           o->second.degree < c.return_degree;
  }
  std::vector<Label> critical;
  for (const auto& [p, img] : c.return_map)
    if (img.degree >= 2) critical.push_back(p);
  if (critical != cert.critical_points || c.fully_tracked() != cert.fully_tracked) return false;
  return (cert.fully_tracked && critical.size() != 2) || critical.size() > 2;
}

AnalysisReport analyze(const DynamicalTreeSystem& sys) {
  AnalysisReport r;
  r.cycles = find_cycles(sys);
  std::set<Label> used;
  for (const auto& c : r.cycles) {
    std::optional<NonMonomialCertificate> cert;
    if (is_critical_cycle(c)) {
      ++r.critical_cycles;
      cert = non_monomial_certificate(c);
    }
    bool disjoint = std::none_of(c.vertices.begin(), c.vertices.end(),
                                 [&](const Label& u) { return used.count(u) > 0; });
    if (cert && disjoint) {
      used.insert(c.vertices.begin(), c.vertices.end());
      ++r.certified_cycles;
    }
    r.certificates.push_back(cert);
  }
  return r;
}

int count_independent_nonmonomial_cycles(const DynamicalTreeSystem& sys) {
  return analyze(sys).certified_cycles;
}

Json analysis_to_json(const AnalysisReport& report) {
  Json doc;
  doc["cycles"] = Json::array();
  doc["certificates"] = Json::array();
  for (std::size_t i = 0; i < report.cycles.size(); ++i) {
    const auto& c = report.cycles[i];
    Json jc;
    jc["vertices"] = c.vertices;
    jc["period"] = c.period;
    jc["return_degree"] = c.return_degree;
    jc["critical"] = is_critical_cycle(c);
    jc["return_map"] = Json::object();
    for (const auto& [p, img] : c.return_map)
      jc["return_map"][p] = {{"point", img.point ? Json(*img.point) : Json()}, {"degree", img.degree}};
    doc["cycles"].push_back(jc);
    if (!report.certificates[i]) continue;
    const auto& cert = *report.certificates[i];
    Json w;
    if (cert.type == WitnessType::TotallyRamifiedWithSecondPreimage) {
      w = {{"landing_point", cert.landing_point},
           {"ramified_direction", cert.ramified_direction},
           {"other_direction", cert.other_direction},
           {"other_degree", cert.other_degree}};
    } else {
      w = {{"critical_points", cert.critical_points}, {"fully_tracked", cert.fully_tracked}};
    }
    doc["certificates"].push_back(
        {{"cycle", cert.cycle}, {"type", std::string(1, cert.letter())}, {"witness", w}});
  }
  doc["counts"] = {{"cycles", report.cycles.size()},
                   {"critical", report.critical_cycles},
                   {"certified", report.certified_cycles}};
  return doc;
}

}  // namespace selfgraft
