#include "selfgraft/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <sstream>

#include "selfgraft/dynamics.hpp"
#include "selfgraft/export_dot.hpp"
#include "selfgraft/grafting.hpp"
#include "selfgraft/serialize.hpp"

namespace selfgraft {

namespace {

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

int cmd_generate(int n, const std::string& path, std::ostream& out, std::ostream& err) {
  if (n < 0) {
    err << "generate: count must be non-negative\n";
    return kSemantic;
  }
  std::optional<GraftState> state;
  try {
    state = generate(n);
  } catch (const GraftFailure& e) {
    err << e.what() << "\n" << e.report.to_text();
    return kConstruction;
  } catch (const SeedRejected& e) {
    err << e.what() << "\n" << e.report.to_text();
    return kConstruction;
  }
  const GraftState& s = *state;
  emit(path, canonical_dump(state_to_json(s)), out);
  if (!path.empty() && path != "-") {
    out << "generation " << s.generation << ": " << s.system.cover.source.tree().size() << " source vertices, "
        << s.system.cover.target.tree().size() << " target vertices";
    if (!s.periods.empty()) {
      out << ", periods";
      for (int k : s.periods) out << " " << k;
    }
    out << "\n";
  }
  return kOk;
}

ValidationReport validate_document(const Json& doc) {
  if (doc.is_object() && doc.contains("roles")) {
    try {
      load_seed(doc);
      return {};
    } catch (const SeedRejected& e) {
      return e.report;
    }
  }
  if (has_dynamics(doc)) {
    auto sys = read_system(doc);
    auto r = validate_system(sys);
    if (!r.ok()) return r;
    if (!is_stable(sys.dyn.tree())) r.add("stability", "dynamics", "dynamical tree is not stable");
    auto sh = doc.contains("shishikura") ? shishikura_from_json(doc["shishikura"]) : shishikura_of(sys);
    r.append(check_translation(sys, sh));
    return r;
  }
  return validate_cover(read_cover(doc));
}

int cmd_validate(const std::string& path, std::ostream& out) {
  auto report = validate_document(read_json_file(path));
  if (report.ok()) {
    out << "valid\n";
    return kOk;
  }
  out << report.to_text();
  return kSemantic;
}

int cmd_analyze(const std::string& path, const std::string& report_path, std::ostream& out,
                std::ostream& err) {
  auto doc = read_json_file(path);
  if (!has_dynamics(doc)) {
    err << "analyze: document has no dynamics section\n";
    return kSemantic;
  }
  auto sys = read_system(doc);
  auto check = validate_system(sys);
  if (!check.ok()) {
    out << check.to_text();
    return kSemantic;
  }
  auto report = analyze(sys);
  for (std::size_t i = 0; i < report.cycles.size(); ++i) {
    const auto& c = report.cycles[i];
    out << "cycle";
    for (const auto& v : c.vertices) out << " " << v;
    out << " | period " << c.period << " | return degree " << c.return_degree;
    if (report.certificates[i]) out << " | certificate (" << report.certificates[i]->letter() << ")";
    out << "\n";
  }
  out << "certified cycles: " << report.certified_cycles << "\n";
  if (!report_path.empty()) write_text_file(report_path, canonical_dump(analysis_to_json(report)));
  return kOk;
}

std::set<Label> split_leaves(const std::string& list) {
  std::set<Label> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.insert(item);
  return out;
}

// Dynamical tree restricted to the marked leaves that survive the projection.
std::optional<MarkedTreeOfSpheres> project_dynamics(const MarkedTreeOfSpheres& dyn, const TreeCover& projected) {
  std::set<Label> kept;
  const auto& ys = projected.source.tree();
  const auto& zs = projected.target.tree();
  for (const auto& l : dyn.tree().leaves())
    if (ys.contains(l) && zs.contains(l)) kept.insert(l);
  if (kept.size() < 3) return std::nullopt;
  auto res = restrict_to_leaves(dyn.tree(), kept);
  MarkedTreeOfSpheres::Attachments att;
  for (const auto& v : res.tree.internal_vertices())
    for (const auto& n : res.tree.neighbors(v)) att[v][n] = dyn.point(v, res.first_step.at({v, n}));
  MarkedTreeOfSpheres out(res.tree, att);
  if (!validate_system(DynamicalTreeSystem{projected, out}).ok()) return std::nullopt;
  return out;
}

int cmd_project(const std::string& path, const std::string& leaves, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  auto doc = read_json_file(path);
  auto cover = read_cover(doc);
  auto report = validate_cover(cover);
  if (!report.ok()) {
    out << report.to_text();
    return kSemantic;
  }
  std::optional<TreeCover> projection;
  try {
    projection = project_cover(cover, split_leaves(leaves));
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kSemantic;
  }
  const TreeCover& projected = *projection;
  Json result;
  std::optional<MarkedTreeOfSpheres> dyn;
  if (has_dynamics(doc)) dyn = project_dynamics(read_system(doc).dyn, projected);
  if (dyn) {
    result = system_to_json(DynamicalTreeSystem{projected, *dyn});
  } else {
    write_cover(result, projected);
    if (has_dynamics(doc)) out << "dynamical tree dropped: fewer than three marked leaves survive\n";
  }
  emit(out_path, canonical_dump(result), out);
  return kOk;
}

int cmd_export(const std::string& path, const std::string& format, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  if (format != "dot") {
    err << "export: unknown format '" << format << "'\n";
    return kSemantic;
  }
  auto doc = read_json_file(path);
  auto cover = read_cover(doc);
  auto report = validate_cover(cover);
  if (!report.ok()) {
    out << report.to_text();
    return kSemantic;
  }
  std::optional<MarkedTreeOfSpheres> dyn;
  if (has_dynamics(doc)) dyn = read_system(doc).dyn;
  emit(out_path, export_dot(cover, dyn), out);
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trees of spheres: generate, validate, analyze, project and export self-grafted systems",
               "selfgraft"};
  app.require_subcommand(1);

  int count = 0;
  std::string input, output, leaves, format = "dot";
  auto* gen = app.add_subcommand("generate", "write the system after n graft steps");
  gen->add_option("-n", count, "number of graft steps")->required();
  gen->add_option("-o", output, "output path (standard output if omitted)");
  auto* val = app.add_subcommand("validate", "check a cover or system file");
  val->add_option("path", input)->required();
  auto* ana = app.add_subcommand("analyze", "list cycles and non-monomial certificates");
  ana->add_option("path", input)->required();
  ana->add_option("-o", output, "write the JSON report here");
  auto* pro = app.add_subcommand("project", "project a cover onto a subset of target leaves");
  pro->add_option("path", input)->required();
  pro->add_option("--leaves", leaves, "comma-separated target leaves")->required();
  pro->add_option("-o", output, "output path (standard output if omitted)");
  auto* exp = app.add_subcommand("export", "export the source tree as a graph");
  exp->add_option("path", input)->required();
  exp->add_option("--format", format, "output format (dot)");
  exp->add_option("-o", output, "output path (standard output if omitted)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kSemantic;
  }

  try {
    if (gen->parsed()) return cmd_generate(count, output, out, err);
    if (val->parsed()) return cmd_validate(input, out);
    if (ana->parsed()) return cmd_analyze(input, output, out, err);
    if (pro->parsed()) return cmd_project(input, leaves, output, out, err);
    if (exp->parsed()) return cmd_export(input, format, output, out, err);
  } catch (const IoError& e) {
    err << e.what() << "\n";
    return kInputOutput;
  } catch (const ParseError& e) {
    err << e.what() << "\n";
    return kInputOutput;
  } catch (const CorruptCover& e) {
    err << e.what() << "\n";
    return kSemantic;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kSemantic;
  }
  return kSemantic;
}

}  // namespace selfgraft
