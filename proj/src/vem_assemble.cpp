#include <exception>
#include <iomanip>
#include <ostream>

#include "steklov/vem.hpp"

namespace steklov {

namespace {

std::vector<Eigen::MatrixXd> local_matrices(const PolygonalMesh& mesh, const StabilizationSpec& spec,
                                            ExecutionMode mode) {
  const auto nc = static_cast<long>(mesh.num_cells());
  std::vector<Eigen::MatrixXd> locals(mesh.num_cells());
  if (mode == ExecutionMode::Serial) {
    for (long c = 0; c < nc; ++c) locals[static_cast<std::size_t>(c)] = local_stiffness(mesh.geometry(static_cast<Index>(c)), spec);
    return locals;
  }
  // exceptions cannot leave an OpenMP region; capture the first one and rethrow
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long c = 0; c < nc; ++c) {
    try {
      locals[static_cast<std::size_t>(c)] = local_stiffness(mesh.geometry(static_cast<Index>(c)), spec);
    } catch (...) {
#pragma omp critical(steklov_assembly_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return locals;
}

}  // namespace

GlobalSystem assemble_global(const PolygonalMesh& mesh, const StabilizationSpec& spec, const AssemblyOptions& options) {
  validate(spec);
  const auto n = static_cast<Index>(mesh.num_vertices());
  const auto locals = local_matrices(mesh, spec, options.mode);

  std::vector<Eigen::Triplet<double>> triplets;
  std::size_t nnz = 0;
  for (const auto& a : locals) nnz += static_cast<std::size_t>(a.size());
  triplets.reserve(nnz);
  const std::size_t nc = mesh.num_cells();
  for (std::size_t k = 0; k < nc; ++k) {
    const std::size_t c = options.reverse_cell_order ? nc - 1 - k : k;
    const auto& ids = mesh.geometry(static_cast<Index>(c)).global_ids;
    const auto& a = locals[c];
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = 0; j < ids.size(); ++j)
        triplets.emplace_back(ids[i], ids[j], a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }

  GlobalSystem sys;
  sys.n_dofs = n;
  sys.A.resize(n, n);
  sys.A.setFromTriplets(triplets.begin(), triplets.end());

  triplets.clear();
  for (const auto& e : mesh.boundary_edges()) {
    if (e.marker != BoundaryMarker::Gamma0) continue;
    const auto& verts = mesh.vertices();
    const auto m = boundary_mass_edge(distance(verts[static_cast<std::size_t>(e.v[0])], verts[static_cast<std::size_t>(e.v[1])]));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) triplets.emplace_back(e.v[static_cast<std::size_t>(i)], e.v[static_cast<std::size_t>(j)], m(i, j));
  }
  sys.B.resize(n, n);
  sys.B.setFromTriplets(triplets.begin(), triplets.end());
  sys.Ahat = sys.A + sys.B;
  sys.gamma0_dofs = mesh.gamma0_vertices();
  return sys;
}

void write_coo(std::ostream& out, const SparseMatrix& m) {
  const auto old = out.precision(17);
  for (Eigen::Index k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
  out.precision(old);
}

}  // namespace steklov
