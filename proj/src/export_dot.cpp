#include "selfgraft/export_dot.hpp"

#include <array>
#include <map>
#include <sstream>

#include "selfgraft/dynamics.hpp"

namespace selfgraft {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

constexpr std::array<const char*, 8> kPalette = {"lightblue", "gold",      "palegreen", "salmon",
                                                 "plum",      "lightgray", "orange",    "cyan"};

}  // namespace

std::string export_dot(const TreeCover& cover, const std::optional<MarkedTreeOfSpheres>& dyn) {
  const auto& ys = cover.source.tree();
  std::map<Label, std::string> fill;
  std::map<Label, bool> fixed;
  if (dyn) {
    auto cycles = find_cycles(DynamicalTreeSystem{cover, *dyn});
    std::size_t colour = 0;
    for (const auto& c : cycles) {
      if (c.period == 1) {
        fixed[c.first()] = true;
        continue;
      }
      for (const auto& v : c.vertices) fill[v] = kPalette[colour % kPalette.size()];
      ++colour;
    }
  }

  std::ostringstream out;
  out << "graph selfgraft {\n";
  out << "  node [shape=circle];\n";
  for (const auto& v : ys.vertices()) {
    out << "  " << quoted(v) << " [";
    if (fixed.count(v))
      out << "shape=doublecircle";
    else if (ys.is_leaf(v))
      out << "shape=box";
    else
      out << "shape=circle";
    if (auto it = fill.find(v); it != fill.end()) out << ", style=filled, fillcolor=" << it->second;
    out << ", xlabel=" << quoted(cover.image(v)) << "];\n";
  }
  for (const auto& e : ys.edges())
    out << "  " << quoted(e.a) << " -- " << quoted(e.b) << " [label=\"" << cover.degree_towards(e.a, e.b)
        << "\"];\n";
  out << "}\n";
  return out.str();
}

}  // namespace selfgraft
