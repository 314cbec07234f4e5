#include "ssnmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ssnmg {

namespace {

// Fine-grid offsets from a node to its element neighbours. For the slope -1
// triangulation these are also the midpoints of the coarse edges leaving a
// coarse node.
constexpr std::array<std::array<int, 2>, 2> kNeighborOffsets1d{{{1, 0}, {-1, 0}}};
constexpr std::array<std::array<int, 2>, 6> kNeighborOffsets2d{
    {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}}};

}  // namespace

LevelMesh::LevelMesh(int dim, int level, int subdivisions)
    : dim_(dim), level_(level), n_(subdivisions) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("mesh dimension must be 1 or 2");
    if (subdivisions < 2) throw std::invalid_argument("a level needs at least 2 subdivisions");

    const Index side = n_ + 1;
    num_grid_ = dim_ == 1 ? side : side * side;
    num_interior_ = dim_ == 1 ? Index(n_ - 1) : Index(n_ - 1) * Index(n_ - 1);
    num_elements_ = dim_ == 1 ? Index(n_) : 2 * Index(n_) * Index(n_);

    interior_of_grid_.assign(num_grid_, -1);
    grid_of_interior_.resize(num_interior_);
    Index next = 0;
    const int ny = dim_ == 1 ? 0 : n_;
    for (int iy = 0; iy <= ny; ++iy) {
        for (int ix = 0; ix <= n_; ++ix) {
            const bool boundary = ix == 0 || ix == n_ || (dim_ == 2 && (iy == 0 || iy == n_));
            if (boundary) continue;
            interior_of_grid_[grid_id(ix, iy)] = next;
            grid_of_interior_[next] = grid_id(ix, iy);
            ++next;
        }
    }

    build_elements();
    build_incidence();

    weights_ = Vector::Zero(num_interior_);
    const double share = element_volume() / vertices_per_element();
    for (Index e = 0; e < num_elements_; ++e) {
        for (Index g : element(e)) {
            const Index i = interior_of_grid_[g];
            if (i >= 0) weights_[i] += share;
        }
    }

    if (level_ > 0) build_nesting();
}

double LevelMesh::element_volume() const noexcept {
    const double h = 1.0 / n_;
    return dim_ == 1 ? h : 0.5 * h * h;
}

Index LevelMesh::grid_id(int ix, int iy) const noexcept {
    return Index(iy) * (n_ + 1) + ix;
}

std::array<int, 2> LevelMesh::grid_coords(Index id) const noexcept {
    return {static_cast<int>(id % (n_ + 1)), static_cast<int>(id / (n_ + 1))};
}

std::array<double, 2> LevelMesh::coordinates(Index interior) const noexcept {
    const auto [ix, iy] = grid_coords(grid_of_interior_[interior]);
    return {static_cast<double>(ix) / n_, static_cast<double>(iy) / n_};
}

std::span<const Index> LevelMesh::element(Index e) const noexcept {
    const std::size_t stride = static_cast<std::size_t>(vertices_per_element());
    return {element_vertices_.data() + static_cast<std::size_t>(e) * stride, stride};
}

std::span<const Index> LevelMesh::elements_of_node(Index interior) const noexcept {
    const auto begin = static_cast<std::size_t>(node_element_offsets_[interior]);
    const auto end = static_cast<std::size_t>(node_element_offsets_[interior + 1]);
    return {node_elements_.data() + begin, end - begin};
}

std::span<const Index> LevelMesh::neighbors(Index interior) const noexcept {
    const auto begin = static_cast<std::size_t>(neighbor_offsets_[interior]);
    const auto end = static_cast<std::size_t>(neighbor_offsets_[interior + 1]);
    return {neighbor_ids_.data() + begin, end - begin};
}

void LevelMesh::build_elements() {
    element_vertices_.reserve(static_cast<std::size_t>(num_elements_ * vertices_per_element()));
    if (dim_ == 1) {
        for (int i = 0; i < n_; ++i) {
            element_vertices_.push_back(grid_id(i));
            element_vertices_.push_back(grid_id(i + 1));
        }
        return;
    }
    for (int j = 0; j < n_; ++j) {
        for (int i = 0; i < n_; ++i) {
            for (Index v : {grid_id(i, j), grid_id(i + 1, j), grid_id(i, j + 1)})
                element_vertices_.push_back(v);
            for (Index v : {grid_id(i + 1, j), grid_id(i + 1, j + 1), grid_id(i, j + 1)})
                element_vertices_.push_back(v);
        }
    }
}

void LevelMesh::build_incidence() {
    std::vector<std::vector<Index>> node_elems(static_cast<std::size_t>(num_interior_));
    for (Index e = 0; e < num_elements_; ++e) {
        for (Index g : element(e)) {
            const Index i = interior_of_grid_[g];
            if (i >= 0) node_elems[i].push_back(e);
        }
    }

    node_element_offsets_.assign(1, 0);
    neighbor_offsets_.assign(1, 0);
    std::vector<Index> nbrs;
    for (Index i = 0; i < num_interior_; ++i) {
        const Index self = grid_of_interior_[i];
        nbrs.clear();
        for (Index e : node_elems[i]) {
            node_elements_.push_back(e);
            for (Index g : element(e))
                if (g != self) nbrs.push_back(g);
        }
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        neighbor_ids_.insert(neighbor_ids_.end(), nbrs.begin(), nbrs.end());
        node_element_offsets_.push_back(static_cast<Index>(node_elements_.size()));
        neighbor_offsets_.push_back(static_cast<Index>(neighbor_ids_.size()));
    }
}

void LevelMesh::build_nesting() {
    const int nc = n_ / 2;
    const auto coarse_interior = [&](int cx, int cy) -> Index {
        if (cx <= 0 || cx >= nc) return -1;
        if (dim_ == 1) return cx - 1;
        if (cy <= 0 || cy >= nc) return -1;
        return Index(cy - 1) * (nc - 1) + (cx - 1);
    };

    coarse_of_fine_.assign(num_interior_, -1);
    const Index num_coarse = dim_ == 1 ? Index(nc - 1) : Index(nc - 1) * Index(nc - 1);
    fine_of_coarse_.assign(num_coarse, -1);
    for (Index i = 0; i < num_interior_; ++i) {
        const auto [ix, iy] = grid_coords(grid_of_interior_[i]);
        if (ix % 2 != 0 || iy % 2 != 0) continue;
        const Index c = coarse_interior(ix / 2, iy / 2);
        coarse_of_fine_[i] = c;
        if (c >= 0) fine_of_coarse_[c] = i;
    }

    // The parent is the coarse element holding the fine centroid. Working with
    // vertex-coordinate sums keeps this in exact integer arithmetic: the centroid
    // in coarse units is sum / (2 * (dim + 1)).
    parent_element_.resize(num_elements_);
    const int scale = 2 * vertices_per_element();
    for (Index e = 0; e < num_elements_; ++e) {
        int sx = 0;
        int sy = 0;
        for (Index g : element(e)) {
            const auto [x, y] = grid_coords(g);
            sx += x;
            sy += y;
        }
        const int cx = sx / scale;
        if (dim_ == 1) {
            parent_element_[e] = cx;
            continue;
        }
        const int cy = sy / scale;
        const int local = (sx - scale * cx) + (sy - scale * cy);
        parent_element_[e] = 2 * (Index(cy) * nc + cx) + (local < scale ? 0 : 1);
    }
}

// ---------------------------------------------------------------------------

MeshHierarchy::MeshHierarchy(int dim, int n0, int num_levels) : dim_(dim) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (n0 < 2) throw std::invalid_argument("n0 must be at least 2");
    if (num_levels < 1) throw std::invalid_argument("num_levels must be positive");

    levels_.reserve(static_cast<std::size_t>(num_levels));
    for (int j = 0; j < num_levels; ++j) levels_.emplace_back(dim, j, n0 << j);

    interpolation_.resize(static_cast<std::size_t>(num_levels));
    mass_.reserve(static_cast<std::size_t>(num_levels));
    for (int j = 0; j < num_levels; ++j) {
        mass_.push_back(assemble_mass(levels_[j]));
        if (j > 0) interpolation_[j] = assemble_interpolation(levels_[j - 1], levels_[j]);
    }
}

void MeshHierarchy::check_level(int j) const {
    if (j < 0 || j >= num_levels())
        throw std::out_of_range("level " + std::to_string(j) + " is not in the hierarchy");
}

const LevelMesh& MeshHierarchy::level(int j) const {
    check_level(j);
    return levels_[j];
}

const SparseMatrix& MeshHierarchy::interpolation(int j) const {
    check_level(j);
    if (j == 0) throw std::out_of_range("level 0 has no coarser level");
    return interpolation_[j];
}

const SparseMatrix& MeshHierarchy::mass(int j) const {
    check_level(j);
    return mass_[j];
}

FeVector MeshHierarchy::zeros(int j) const {
    return {j, Vector::Zero(level(j).num_interior())};
}

FeVector MeshHierarchy::nodal_interpolant(int j, const std::function<double(double, double)>& f) const {
    const LevelMesh& mesh = level(j);
    FeVector out{j, Vector(mesh.num_interior())};
    for (Index i = 0; i < mesh.num_interior(); ++i) {
        const auto [x, y] = mesh.coordinates(i);
        out.values[i] = f(x, y);
    }
    return out;
}

double MeshHierarchy::discrete_inner(const FeVector& u, const FeVector& v) const {
    if (u.level != v.level) throw std::invalid_argument("discrete_inner: level mismatch");
    const Vector& w = level(u.level).weights();
    if (u.values.size() != w.size() || v.values.size() != w.size())
        throw std::invalid_argument("discrete_inner: vector length does not match level");
    return (w.array() * u.values.array() * v.values.array()).sum();
}

double MeshHierarchy::l2_inner(const FeVector& u, const FeVector& v) const {
    if (u.level != v.level) throw std::invalid_argument("l2_inner: level mismatch");
    return u.values.dot(mass(u.level) * v.values);
}

FeVector MeshHierarchy::interpolate(const FeVector& u) const {
    check_level(u.level);
    if (u.level == finest()) throw std::invalid_argument("interpolate: already on the finest level");
    return {u.level + 1, interpolation(u.level + 1) * u.values};
}

FeVector MeshHierarchy::restrict(const FeVector& u) const {
    check_level(u.level);
    if (u.level == 0) throw std::invalid_argument("restrict: level 0 has no coarser level");
    const double scale = 1.0 / (1 << dim_);
    return {u.level - 1, scale * (interpolation(u.level).transpose() * u.values)};
}

MeshHierarchy build_hierarchy(int dim, int n0, int num_levels) {
    return MeshHierarchy(dim, n0, num_levels);
}

// ---------------------------------------------------------------------------

namespace {

template <typename LocalMatrix>
SparseMatrix assemble(const LevelMesh& mesh, LocalMatrix&& local) {
    const int nv = mesh.vertices_per_element();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.num_elements() * nv * nv));
    Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto verts = mesh.element(e);
        local(verts, k);
        for (int a = 0; a < nv; ++a) {
            const Index ia = mesh.interior_of_grid(verts[a]);
            if (ia < 0) continue;
            for (int b = 0; b < nv; ++b) {
                const Index ib = mesh.interior_of_grid(verts[b]);
                if (ib >= 0 && k(a, b) != 0.0) triplets.emplace_back(ia, ib, k(a, b));
            }
        }
    }
    SparseMatrix m(mesh.num_interior(), mesh.num_interior());
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

}  // namespace

SparseMatrix assemble_stiffness(const LevelMesh& mesh) {
    const double n = mesh.subdivisions();
    if (mesh.dim() == 1) {
        return assemble(mesh, [n](std::span<const Index>, Eigen::Matrix3d& k) {
            k(0, 0) = k(1, 1) = n;
            k(0, 1) = k(1, 0) = -n;
        });
    }
    // The 2D stiffness is scale invariant, so integer grid coordinates give
    // exact entries.
    return assemble(mesh, [&mesh](std::span<const Index> verts, Eigen::Matrix3d& k) {
        std::array<std::array<int, 2>, 3> p{};
        for (int a = 0; a < 3; ++a) p[a] = mesh.grid_coords(verts[a]);
        std::array<double, 3> b{};
        std::array<double, 3> c{};
        for (int a = 0; a < 3; ++a) {
            const auto& p1 = p[(a + 1) % 3];
            const auto& p2 = p[(a + 2) % 3];
            b[a] = p1[1] - p2[1];
            c[a] = p2[0] - p1[0];
        }
        const double twice_area =
            std::abs(double((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1])));
        for (int a = 0; a < 3; ++a)
            for (int q = 0; q < 3; ++q) k(a, q) = (b[a] * b[q] + c[a] * c[q]) / (2.0 * twice_area);
    });
}

SparseMatrix assemble_mass(const LevelMesh& mesh) {
    const double vol = mesh.element_volume();
    if (mesh.dim() == 1) {
        return assemble(mesh, [vol](std::span<const Index>, Eigen::Matrix3d& k) {
            k(0, 0) = k(1, 1) = vol / 3.0;
            k(0, 1) = k(1, 0) = vol / 6.0;
        });
    }
    return assemble(mesh, [vol](std::span<const Index>, Eigen::Matrix3d& k) {
        k.setConstant(vol / 12.0);
        k.diagonal().setConstant(vol / 6.0);
    });
}

SparseMatrix assemble_interpolation(const LevelMesh& coarse, const LevelMesh& fine) {
    if (fine.subdivisions() != 2 * coarse.subdivisions() || fine.dim() != coarse.dim())
        throw std::invalid_argument("assemble_interpolation: levels are not nested");

    std::vector<Eigen::Triplet<double>> triplets;
    const auto add_neighbours = [&](const auto& offsets, Index c, int fx, int fy) {
        for (const auto& [dx, dy] : offsets) {
            const Index i = fine.interior_of_grid(fine.grid_id(fx + dx, fy + dy));
            if (i >= 0) triplets.emplace_back(i, c, 0.5);
        }
    };
    for (Index c = 0; c < coarse.num_interior(); ++c) {
        const auto [cx, cy] = coarse.grid_coords(coarse.grid_of_interior(c));
        const int fx = 2 * cx;
        const int fy = 2 * cy;
        triplets.emplace_back(fine.interior_of_grid(fine.grid_id(fx, fy)), c, 1.0);
        if (fine.dim() == 1)
            add_neighbours(kNeighborOffsets1d, c, fx, fy);
        else
            add_neighbours(kNeighborOffsets2d, c, fx, fy);
    }
    SparseMatrix j(fine.num_interior(), coarse.num_interior());
    j.setFromTriplets(triplets.begin(), triplets.end());
    j.makeCompressed();
    return j;
}

}  // namespace ssnmg
