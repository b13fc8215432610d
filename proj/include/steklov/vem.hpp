#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "steklov/mesh.hpp"

namespace steklov {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Length scale h_K in the stabilization weight h_K^alpha. SqrtArea equals the side on
/// squares and is the default; Diameter is the max vertex distance.
enum class ElementSize { SqrtArea, Diameter };

/// Stabilization weight h_K^alpha in front of the boundary tangential-derivative form.
struct StabilizationSpec {
  double alpha = 1.0;
  ElementSize size = ElementSize::SqrtArea;
};

double element_size(const ElementGeometry& geom, ElementSize size);

/// Throws InvalidArgument unless alpha lies in [0.25, 2].
void validate(const StabilizationSpec& spec);

/// Dof-to-projection maps of one element (dofs = vertex values in cycle order).
struct ProjectorMaps {
  Eigen::Matrix<double, 2, Eigen::Dynamic> G;  // dofs -> constant gradient of the P1 projection
  Eigen::RowVectorXd mean_row;                 // dofs -> boundary mean
  Eigen::MatrixXd P;                           // dofs -> vertex values of the P1 projection
};

struct LocalOperators {
  ProjectorMaps proj;
  Eigen::MatrixXd S;  // stabilization
  Eigen::MatrixXd A;  // consistency + stability stiffness
};

/// Closed-form P1 energy projection anchored by the boundary mean. The gradient comes from
/// the divergence theorem over the piecewise-linear trace, so no volume quadrature is used.
ProjectorMaps local_projector(const ElementGeometry& geom);

/// h_K^alpha sum_e (d_e d_e^T) / |e| with d_e the signed endpoint incidence of edge e.
Eigen::MatrixXd stability_matrix(const ElementGeometry& geom, const StabilizationSpec& spec);

/// |K| G^T G + (I - P)^T S (I - P).
Eigen::MatrixXd local_stiffness(const ElementGeometry& geom, const StabilizationSpec& spec);

LocalOperators local_operators(const ElementGeometry& geom, const StabilizationSpec& spec);

/// a_h^K(w, v) evaluated from the factors, |K| (G w).(G v) + ((I - P) w)^T S ((I - P) v).
/// Unlike w^T A_K v it keeps full relative accuracy when a tiny edge puts O(h/|e|) entries in A_K.
double local_form(const LocalOperators& ops, double area, const Eigen::VectorXd& w, const Eigen::VectorXd& v);

/// Exact mass of two linear traces on an edge: (length / 6) [[2, 1], [1, 2]].
Eigen::Matrix2d boundary_mass_edge(double length);

/// Discrete energy seminorm: sum over cells of |K| |G w|^2 + S(w - mean, w - mean).
double triple_norm(const PolygonalMesh& mesh, const Eigen::VectorXd& dofs, const StabilizationSpec& spec);

enum class ExecutionMode { Parallel, Serial };

struct AssemblyOptions {
  ExecutionMode mode = ExecutionMode::Parallel;
  bool reverse_cell_order = false;  // scatter cells last-to-first
};

struct GlobalSystem {
  SparseMatrix A;     // stiffness
  SparseMatrix B;     // Gamma0 boundary mass
  SparseMatrix Ahat;  // A + B
  Index n_dofs = 0;
  std::vector<Index> gamma0_dofs;
};

/// Local operators are computed cell-parallel (OpenMP) or serially; the scatter is always
/// sequential in cell order, so both modes produce bitwise identical matrices.
GlobalSystem assemble_global(const PolygonalMesh& mesh, const StabilizationSpec& spec,
                             const AssemblyOptions& options = {});

/// Coordinate-format dump "row col value" per line, 0-based, full precision.
void write_coo(std::ostream& out, const SparseMatrix& m);

}  // namespace steklov
