#include "selfgraft/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace selfgraft {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name))
    throw ParseError(std::string("missing field '") + name + "'");
  return j.at(name);
}

template <typename T>
T as(const Json& j, const std::string& what) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw ParseError("ill-typed value for " + what);
  }
}

}  // namespace

Json tree_to_json(const CombinatorialTree& t) {
  Json j;
  j["vertices"] = t.vertices();
  j["leaves"] = t.leaves();
  auto edges = t.edges();
  std::sort(edges.begin(), edges.end());
  Json arr = Json::array();
  for (const auto& e : edges) arr.push_back({e.a, e.b});
  j["edges"] = arr;
  return j;
}

CombinatorialTree tree_from_json(const Json& j) {
  auto vertices = as<std::vector<Label>>(field(j, "vertices"), "vertices");
  auto leaves = as<std::vector<Label>>(field(j, "leaves"), "leaves");
  std::vector<Edge> edges;
  for (const auto& e : field(j, "edges")) {
    auto pair = as<std::vector<Label>>(e, "edge");
    if (pair.size() != 2) throw ParseError("edge must have two endpoints");
    edges.emplace_back(pair[0], pair[1]);
  }
  try {
    return CombinatorialTree(std::move(vertices), std::move(leaves), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

Json spheres_to_json(const MarkedTreeOfSpheres& s) {
  Json j = Json::object();
  for (const auto& [v, pts] : s.attachments())
    for (const auto& [n, p] : pts) j[v][n] = p;
  return j;
}

MarkedTreeOfSpheres spheres_from_json(const Json& tree, const Json& attachments) {
  auto t = tree_from_json(tree);
  auto att = as<MarkedTreeOfSpheres::Attachments>(attachments, "attachments");
  try {
    return MarkedTreeOfSpheres(std::move(t), std::move(att));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

void write_cover(Json& doc, const TreeCover& c) {
  doc["format"] = kFormatTag;
  doc["source"] = tree_to_json(c.source.tree());
  doc["target"] = tree_to_json(c.target.tree());
  doc["attachments"]["source"] = spheres_to_json(c.source);
  doc["attachments"]["target"] = spheres_to_json(c.target);
  doc["vertex_map"] = c.vertex_map;
  doc["local_degrees"] = Json::object();
  for (const auto& [v, pts] : c.local_degree)
    for (const auto& [p, d] : pts) doc["local_degrees"][v][p] = d;
  doc["portrait"] = Json::object();
  for (const auto& [y, img] : c.portrait) doc["portrait"][y] = {{"image", img.image}, {"degree", img.degree}};
}

TreeCover read_cover(const Json& doc) {
  if (!doc.is_object()) throw ParseError("document is not a JSON object");
  if (doc.contains("format") && doc["format"] != kFormatTag)
    throw ParseError("unsupported format tag");
  const Json& att = field(doc, "attachments");
  TreeCover c{spheres_from_json(field(doc, "source"), field(att, "source")),
              spheres_from_json(field(doc, "target"), field(att, "target")),
              as<std::map<Label, Label>>(field(doc, "vertex_map"), "vertex_map"),
              as<std::map<Label, std::map<Label, int>>>(field(doc, "local_degrees"), "local_degrees"),
              {}};
  for (const auto& [y, img] : field(doc, "portrait").items())
    c.portrait[y] = LeafImage{as<Label>(field(img, "image"), "portrait image"),
                              as<int>(field(img, "degree"), "portrait degree")};
  return c;
}

Json system_to_json(const DynamicalTreeSystem& sys) {
  Json doc;
  write_cover(doc, sys.cover);
  doc["dynamics"]["tree"] = tree_to_json(sys.dyn.tree());
  doc["dynamics"]["attachments"] = spheres_to_json(sys.dyn);
  return doc;
}

bool has_dynamics(const Json& doc) { return doc.is_object() && doc.contains("dynamics"); }

DynamicalTreeSystem read_system(const Json& doc) {
  const Json& dyn = field(doc, "dynamics");
  return DynamicalTreeSystem{read_cover(doc),
                             spheres_from_json(field(dyn, "tree"), field(dyn, "attachments"))};
}

Json shishikura_to_json(const ShishikuraMap& sh) {
  Json j;
  j["tree"] = tree_to_json(sh.tree);
  j["map"] = sh.tau;
  Json degrees = Json::array();
  for (const auto& [e, d] : sh.degree) degrees.push_back({e.a, e.b, d});
  j["degrees"] = degrees;
  return j;
}

ShishikuraMap shishikura_from_json(const Json& j) {
  ShishikuraMap sh{tree_from_json(field(j, "tree")), as<std::map<Label, Label>>(field(j, "map"), "map"),
                   {}};
  for (const auto& row : field(j, "degrees")) {
    if (!row.is_array() || row.size() != 3) throw ParseError("degree entry must be [a, b, degree]");
    sh.degree[Edge(as<Label>(row[0], "edge"), as<Label>(row[1], "edge"))] = as<int>(row[2], "degree");
  }
  return sh;
}

std::string canonical_dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string canonical_cover(const TreeCover& c) {
  Json doc;
  write_cover(doc, c);
  return canonical_dump(doc);
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace selfgraft
