#pragma once

#include "ssnmg/types.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace ssnmg {

/// Coefficients of a function in V_j: its values at the interior nodes of
/// level j. Boundary values are implicitly zero.
struct FeVector {
    int level = 0;
    Vector values;
};

/// One uniform grid of the unit interval (d = 1) or unit square (d = 2).
///
/// Nodes are addressed two ways. A *grid id* runs lexicographically (x
/// fastest) over all (n+1)^d nodes including the boundary; an *interior
/// index* runs lexicographically over the (n-1)^d interior nodes that carry
/// unknowns. In 2D every grid square is split into two right triangles along
/// its slope -1 diagonal:
///
///     lower: (i, j), (i+1, j), (i, j+1)
///     upper: (i+1, j), (i+1, j+1), (i, j+1)
///
/// and element 2 * (j * n + i) + {0, 1} refers to the lower/upper triangle of
/// square (i, j). In 1D element i is the interval [i h, (i+1) h].
class LevelMesh {
public:
    LevelMesh(int dim, int level, int subdivisions);

    int dim() const noexcept { return dim_; }
    int level() const noexcept { return level_; }
    int subdivisions() const noexcept { return n_; }
    double h() const noexcept { return 1.0 / n_; }
    Index num_interior() const noexcept { return num_interior_; }
    Index num_grid_nodes() const noexcept { return num_grid_; }
    Index num_elements() const noexcept { return num_elements_; }
    int vertices_per_element() const noexcept { return dim_ + 1; }
    double element_volume() const noexcept;

    Index grid_id(int ix, int iy = 0) const noexcept;
    std::array<int, 2> grid_coords(Index grid_id) const noexcept;
    /// -1 for boundary nodes.
    Index interior_of_grid(Index grid_id) const noexcept { return interior_of_grid_[grid_id]; }
    Index grid_of_interior(Index interior) const noexcept { return grid_of_interior_[interior]; }
    std::array<double, 2> coordinates(Index interior) const noexcept;

    /// Vertices (grid ids) of element e.
    std::span<const Index> element(Index e) const noexcept;
    /// Elements containing interior node i, i.e. the support of its hat function.
    std::span<const Index> elements_of_node(Index interior) const noexcept;
    /// Grid ids of all nodes sharing an element with interior node i (self excluded).
    std::span<const Index> neighbors(Index interior) const noexcept;

    /// Vertex-quadrature weights w_i = nu^{-1} * sum of volumes of elements containing node i.
    const Vector& weights() const noexcept { return weights_; }

    /// Interior index of the coarse node coinciding with fine node i, or -1.
    /// Only meaningful for level >= 1.
    Index coarse_of_fine(Index fine_interior) const noexcept { return coarse_of_fine_[fine_interior]; }
    /// Interior index on this level of the node coinciding with a level-(j-1) node.
    Index fine_of_coarse(Index coarse_interior) const noexcept { return fine_of_coarse_[coarse_interior]; }
    /// Element of level j-1 that contains element e of this level.
    Index parent_element(Index e) const noexcept { return parent_element_[e]; }

private:
    void build_elements();
    void build_incidence();
    void build_nesting();

    int dim_;
    int level_;
    int n_;
    Index num_interior_;
    Index num_grid_;
    Index num_elements_;

    std::vector<Index> interior_of_grid_;
    std::vector<Index> grid_of_interior_;
    std::vector<Index> element_vertices_;  // stride dim_ + 1

    std::vector<Index> node_element_offsets_;
    std::vector<Index> node_elements_;
    std::vector<Index> neighbor_offsets_;
    std::vector<Index> neighbor_ids_;

    Vector weights_;

    std::vector<Index> coarse_of_fine_;
    std::vector<Index> fine_of_coarse_;
    std::vector<Index> parent_element_;
};

/// Nested uniform grids T_0 c T_1 c ... with n_j = n0 * 2^j subdivisions per side.
///
/// Holds the per-level-pair interpolation matrices J_j (N_j x N_{j-1}) and the
/// consistent mass matrices. Immutable after construction.
class MeshHierarchy {
public:
    /// Throws std::invalid_argument if dim is not 1 or 2, n0 < 2, or num_levels < 1.
    MeshHierarchy(int dim, int n0, int num_levels);

    int dim() const noexcept { return dim_; }
    int num_levels() const noexcept { return static_cast<int>(levels_.size()); }
    int finest() const noexcept { return num_levels() - 1; }
    int refinement_factor() const noexcept { return 2; }

    const LevelMesh& level(int j) const;

    /// J_j: interpolation from level j-1 into level j (j >= 1).
    const SparseMatrix& interpolation(int j) const;
    /// Consistent (exactly integrated) P1 mass matrix on interior nodes.
    const SparseMatrix& mass(int j) const;

    FeVector zeros(int j) const;
    /// Nodal interpolant of f on level j.
    FeVector nodal_interpolant(int j, const std::function<double(double, double)>& f) const;

    /// <u, v>_j = sum_i w_i u_i v_i.
    double discrete_inner(const FeVector& u, const FeVector& v) const;
    /// Exact L2 inner product of the piecewise-linear functions.
    double l2_inner(const FeVector& u, const FeVector& v) const;

    /// Prolongation V_{j-1} -> V_j; the result is the same function.
    FeVector interpolate(const FeVector& u) const;
    /// R_{j-1} = 2^{-d} J_j^T, the adjoint of interpolation in <.,.>_j.
    FeVector restrict(const FeVector& u) const;

private:
    void check_level(int j) const;

    int dim_;
    std::vector<LevelMesh> levels_;
    std::vector<SparseMatrix> interpolation_;  // index 0 unused
    std::vector<SparseMatrix> mass_;
};

MeshHierarchy build_hierarchy(int dim, int n0, int num_levels);

/// P1 stiffness matrix with homogeneous Dirichlet conditions (interior rows/columns only).
SparseMatrix assemble_stiffness(const LevelMesh& mesh);
/// Consistent P1 mass matrix on interior nodes.
SparseMatrix assemble_mass(const LevelMesh& mesh);
/// J_j from the coarse level to `fine`.
SparseMatrix assemble_interpolation(const LevelMesh& coarse, const LevelMesh& fine);

}  // namespace ssnmg
