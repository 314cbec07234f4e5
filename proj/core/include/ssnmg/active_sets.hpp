#pragma once

#include "ssnmg/mesh.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ssnmg {

/// Sorted, duplicate-free set of interior node indices on one level: the
/// nodes whose non-negativity constraint is currently slack.
class InactiveSet {
public:
    InactiveSet() = default;
    /// Sorts and deduplicates; throws std::invalid_argument on indices outside [0, num_nodes).
    InactiveSet(int level, std::vector<Index> indices, Index num_nodes);

    static InactiveSet all(const LevelMesh& mesh);
    static InactiveSet none(const LevelMesh& mesh);

    int level() const noexcept { return level_; }
    Index num_nodes() const noexcept { return num_nodes_; }
    Index size() const noexcept { return static_cast<Index>(indices_.size()); }
    bool empty() const noexcept { return indices_.empty(); }
    std::span<const Index> indices() const noexcept { return indices_; }
    bool contains(Index i) const noexcept;

    /// Per-node membership flags of length num_nodes().
    std::vector<char> mask() const;
    /// Sorted indices not in the set (the active set).
    std::vector<Index> complement() const;
    bool is_subset_of(const InactiveSet& other) const;

    /// Single line: "level num_nodes : i0 i1 ...".
    std::string to_line() const;
    static InactiveSet from_line(std::string_view line);

    friend bool operator==(const InactiveSet&, const InactiveSet&) = default;

private:
    int level_ = 0;
    Index num_nodes_ = 0;
    std::vector<Index> indices_;
};

/// Axis-aligned closed box; only the x range is used in 1D.
struct Region {
    std::array<double, 2> lower{0.0, 0.0};
    std::array<double, 2> upper{1.0, 1.0};
};

/// Union of the supports of the basis functions of an inactive set:
/// every element with at least one inactive vertex.
struct InactiveDomain {
    int level = 0;
    std::vector<Index> elements;  ///< sorted element ids of this level
    double volume = 0.0;
};

/// Numerical interior/boundary decomposition of a fine inactive domain
/// relative to its coarsened inactive set.
struct InactiveGeometry {
    int level = 0;                                  ///< fine level j
    InactiveDomain inactive_domain;                 ///< Omega_j^in (fine elements)
    std::vector<Index> numerical_interior_elements; ///< coarse elements of Int_n Omega_j^in
    double numerical_interior_volume = 0.0;
    double numerical_boundary_measure = 0.0;        ///< mu_j^in
};

/// Coarse node i is inactive iff its coincident fine node and all of that
/// node's fine element-neighbours are inactive. Equivalent to
/// supp(phi_i^{(j-1)}) c Omega_j^in on these meshes.
InactiveSet coarsen_inactive(const InactiveSet& fine, const MeshHierarchy& hierarchy);

/// Inactive sets from `fine.level()` down to `base_level`, index k - base_level holding level k.
std::vector<InactiveSet> coarsen_chain(const InactiveSet& fine, int base_level, const MeshHierarchy& hierarchy);

InactiveDomain inactive_domain(const InactiveSet& set, const MeshHierarchy& hierarchy);

InactiveGeometry geometry(const InactiveSet& fine, const InactiveSet& coarse, const MeshHierarchy& hierarchy);

/// All interior nodes of `level` whose coordinates lie in the closed region.
InactiveSet inactive_from_region(int level, const Region& region, const MeshHierarchy& hierarchy);

/// Fine nodes of level `coarse_domain.level + 1` whose basis support lies in the coarse inactive domain.
InactiveSet grid_sequencing_guess(const InactiveDomain& coarse_domain, const MeshHierarchy& hierarchy);

}  // namespace ssnmg
