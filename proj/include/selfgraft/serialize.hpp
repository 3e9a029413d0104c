#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "selfgraft/cover.hpp"

namespace selfgraft {

using Json = nlohmann::json;

inline constexpr const char* kFormatTag = "selfgraft-cover/1";

/// Malformed or schema-violating input.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json tree_to_json(const CombinatorialTree& t);
CombinatorialTree tree_from_json(const Json& j);

Json spheres_to_json(const MarkedTreeOfSpheres& s);
MarkedTreeOfSpheres spheres_from_json(const Json& tree, const Json& attachments);

/// Writes the cover fields (source, target, attachments, vertex_map,
/// local_degrees, portrait) into `doc`.
void write_cover(Json& doc, const TreeCover& c);
TreeCover read_cover(const Json& doc);

/// Cover plus a `dynamics` section when present.
Json system_to_json(const DynamicalTreeSystem& sys);
DynamicalTreeSystem read_system(const Json& doc);
bool has_dynamics(const Json& doc);

Json shishikura_to_json(const ShishikuraMap& sh);
ShishikuraMap shishikura_from_json(const Json& j);

/// Canonical text: sorted keys, two-space indent, trailing newline.
std::string canonical_dump(const Json& doc);
std::string canonical_cover(const TreeCover& c);

Json parse_json_text(const std::string& text);
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace selfgraft
