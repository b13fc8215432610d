#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "steklov/analysis.hpp"
#include "steklov/eig.hpp"
#include "steklov/mesh_io.hpp"
#include "steklov/meshgen.hpp"
#include "steklov/vem.hpp"
#include "steklov/vtk.hpp"

namespace steklov::cli {

namespace {

struct MeshSource {
  std::string mesh_file;
  std::string domain;
  std::string family;
  int n = 8;
  int level = 0;
};

struct Options {
  MeshSource src;
  std::string output;
  double alpha = 1.0;
  ElementSize h_measure = ElementSize::SqrtArea;
  int k = 6;
  std::string vtk;
  std::string coo;
  bool serial = false;
  std::vector<int> ns;
  int levels = 4;
  std::string csv;
  std::string md;
};

StabilizationSpec stabilization(const Options& o) { return {o.alpha, o.h_measure}; }

void add_stabilization_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "Stabilization exponent in h_K^alpha")->check(CLI::Range(0.25, 2.0));
  const std::map<std::string, ElementSize> measures{{"sqrt-area", ElementSize::SqrtArea},
                                                    {"diameter", ElementSize::Diameter}};
  cmd->add_option("--h-measure", o.h_measure, "Length scale h_K: sqrt-area | diameter")
      ->transform(CLI::CheckedTransformer(measures, CLI::ignore_case));
}

int mesh_error_code(const Error& e) { return e.code() == Errc::Io ? kIoError : kInvalidInput; }

void add_source_options(CLI::App* cmd, MeshSource& src, bool with_file) {
  if (with_file) cmd->add_option("--mesh", src.mesh_file, "Mesh JSON file");
  cmd->add_option("--domain", src.domain, "square | rotated-t | lshape");
  cmd->add_option("--family", src.family, "t1 | t2 | t3 | t4 | t5 | t6 | t6l");
  cmd->add_option("--N,-N", src.n, "Refinement parameter N");
  cmd->add_option("--level", src.level, "Corner refinement level (t6l)");
}

Family checked_family(const MeshSource& src) {
  if (src.family.empty()) throw Error(Errc::InvalidArgument, "--family is required");
  const Family f = parse_family(src.family);
  if (!src.domain.empty() && parse_domain(src.domain) != domain_of(f).shape)
    throw Error(Errc::InvalidArgument, "family " + src.family + " does not mesh domain " + src.domain);
  return f;
}

PolygonalMesh load_mesh(const MeshSource& src) {
  if (!src.mesh_file.empty()) return read_mesh_json(std::filesystem::path(src.mesh_file));
  return generate(checked_family(src), src.n, src.level);
}

void print_quality(std::ostream& out, const PolygonalMesh& mesh) {
  const auto q = quality_report(mesh);
  std::size_t empty = 0;
  for (const auto& c : q.cells) empty += c.empty_kernel ? 1 : 0;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "vertices %zu\ncells %zu\nboundary edges %zu\nh_max %.6g\nmin star ratio %.6g\nmin edge ratio %.6g\n"
                "non-star-shaped cells %zu\n",
                mesh.num_vertices(), mesh.num_cells(), mesh.boundary_edges().size(), mesh.h_max(), q.min_star_ratio,
                q.min_edge_ratio, empty);
  out << buf;
}

int cmd_mesh(const Options& o, std::ostream& out, std::ostream& err) {
  PolygonalMesh mesh;
  try {
    mesh = generate(checked_family(o.src), o.src.n, o.src.level);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  print_quality(out, mesh);
  if (!o.output.empty()) {
    try {
      write_mesh_json(std::filesystem::path(o.output), mesh);
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return kIoError;
    }
    out << "wrote " << o.output << '\n';
  }
  return kOk;
}

int cmd_check_mesh(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.src.mesh_file.empty()) {
    err << "error: --mesh is required\n";
    return kInvalidInput;
  }
  try {
    const auto mesh = read_mesh_json(std::filesystem::path(o.src.mesh_file));
    print_quality(out, mesh);
    out << "valid\n";
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return mesh_error_code(e);
  }
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err) {
  PolygonalMesh mesh;
  try {
    mesh = load_mesh(o.src);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return mesh_error_code(e);
  }
  const auto mode = o.serial ? ExecutionMode::Serial : ExecutionMode::Parallel;
  GlobalSystem sys;
  EigenResult res;
  try {
    sys = assemble_global(mesh, stabilization(o), {mode, false});
    res = solve_steklov(sys, o.k, mode);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::InvalidArgument ? kInvalidInput : kSolverFailure;
  }

  char buf[128];
  std::snprintf(buf, sizeof buf, "dofs %zu\nalpha %.6g\n", mesh.num_vertices(), o.alpha);
  out << buf;
  for (std::size_t i = 0; i < res.lambdas.size(); ++i) {
    std::snprintf(buf, sizeof buf, "lambda_%zu %.10f residual %.3e\n", i + 1, res.lambdas[i], res.residuals[i]);
    out << buf;
  }

  try {
    if (!o.vtk.empty()) {
      std::vector<PointField> fields;
      for (std::size_t i = 0; i < res.lambdas.size(); ++i)
        fields.emplace_back("mode_" + std::to_string(i + 1), eigenfunction_field(res, mesh, static_cast<int>(i)));
      std::ofstream f(o.vtk);
      if (!f) throw Error(Errc::Io, "cannot write " + o.vtk);
      write_vtk(f, mesh, fields);
      out << "wrote " << o.vtk << '\n';
    }
    if (!o.coo.empty()) {
      for (const auto& [suffix, m] : {std::pair{"_A.coo", &sys.A}, std::pair{"_B.coo", &sys.B}}) {
        const std::string path = o.coo + suffix;
        std::ofstream f(path);
        if (!f) throw Error(Errc::Io, "cannot write " + path);
        write_coo(f, *m);
        out << "wrote " << path << '\n';
      }
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  return kOk;
}

int cmd_study(const Options& o, std::ostream& out, std::ostream& err) {
  Family family;
  try {
    family = checked_family(o.src);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  const StudyOptions opts{o.serial ? ExecutionMode::Serial : ExecutionMode::Parallel, true};
  ConvergenceStudy study;
  try {
    if (family == Family::T6L) {
      study = run_refinement_study(o.src.n, o.levels, stabilization(o), o.k, opts);
    } else {
      if (o.ns.empty()) throw Error(Errc::InvalidArgument, "--Ns is required");
      if (o.ns.size() == 1) err << "warning: a single level gives no convergence order\n";
      study = run_study(family, o.ns, stabilization(o), o.k, opts);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::InvalidArgument || e.code() == Errc::InvalidN ? kInvalidInput : kSolverFailure;
  }

  write_study_markdown(out, study);
  try {
    if (!o.md.empty()) {
      std::ofstream f(o.md);
      if (!f) throw Error(Errc::Io, "cannot write " + o.md);
      write_study_markdown(f, study);
    }
    if (!o.csv.empty()) {
      std::ofstream f(o.csv);
      if (!f) throw Error(Errc::Io, "cannot write " + o.csv);
      write_study_csv(f, study);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
  if (!study.ok()) {
    for (const auto& l : study.levels)
      if (l.failed) err << "error: level " << l.n << " FAILED: " << l.failure << '\n';
    return kSolverFailure;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lowest-order virtual element solver for the Steklov eigenvalue problem", "steklov"};
  app.require_subcommand(1);
  Options o;

  auto* mesh = app.add_subcommand("mesh", "Generate a mesh family member and write it as JSON");
  add_source_options(mesh, o.src, false);
  mesh->add_option("-o,--output", o.output, "Output JSON path");

  auto* solve = app.add_subcommand("solve", "Assemble and solve for the lowest eigenpairs");
  add_source_options(solve, o.src, true);
  solve->add_option("--k", o.k, "Number of eigenpairs")->check(CLI::PositiveNumber);
  add_stabilization_options(solve, o);
  solve->add_option("--vtk", o.vtk, "Write eigenfunctions as legacy VTK");
  solve->add_option("--coo", o.coo, "Write A and B as coordinate text with this path prefix");
  solve->add_flag("--serial", o.serial, "Disable OpenMP kernels");

  auto* study = app.add_subcommand("study", "Convergence study over several refinement levels");
  add_source_options(study, o.src, false);
  study->add_option("--Ns", o.ns, "Comma separated N values")->delimiter(',');
  study->add_option("--levels", o.levels, "Highest corner refinement level (t6l)");
  study->add_option("--k", o.k, "Number of eigenvalues")->check(CLI::PositiveNumber);
  add_stabilization_options(study, o);
  study->add_option("--csv", o.csv, "CSV output path");
  study->add_option("--md", o.md, "Markdown output path");
  study->add_flag("--serial", o.serial, "Disable OpenMP kernels");

  auto* check = app.add_subcommand("check-mesh", "Validate a mesh file and report quality");
  check->add_option("--mesh", o.src.mesh_file, "Mesh JSON file")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kInvalidInput;
  }

  if (*mesh) return cmd_mesh(o, out, err);
  if (*solve) return cmd_solve(o, out, err);
  if (*study) return cmd_study(o, out, err);
  return cmd_check_mesh(o, out, err);
}

}  // namespace steklov::cli
