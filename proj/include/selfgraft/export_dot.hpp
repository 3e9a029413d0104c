#pragma once

#include <optional>
#include <string>

#include "selfgraft/cover.hpp"

namespace selfgraft {

/// DOT text of the source tree: edges carry their degree, leaves are boxes.
/// With a dynamical tree, periodic cycles are filled (one colour per cycle)
/// and fixed vertices are drawn as double circles.
std::string export_dot(const TreeCover& cover, const std::optional<MarkedTreeOfSpheres>& dyn = std::nullopt);

}  // namespace selfgraft
