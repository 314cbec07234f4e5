#include "ssnmg/active_sets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ssnmg {

InactiveSet::InactiveSet(int level, std::vector<Index> indices, Index num_nodes)
    : level_(level), num_nodes_(num_nodes), indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= num_nodes_))
        throw std::invalid_argument("InactiveSet: index outside [0, num_nodes)");
}

InactiveSet InactiveSet::all(const LevelMesh& mesh) {
    std::vector<Index> idx(static_cast<std::size_t>(mesh.num_interior()));
    for (Index i = 0; i < mesh.num_interior(); ++i) idx[i] = i;
    return {mesh.level(), std::move(idx), mesh.num_interior()};
}

InactiveSet InactiveSet::none(const LevelMesh& mesh) {
    return {mesh.level(), {}, mesh.num_interior()};
}

bool InactiveSet::contains(Index i) const noexcept {
    return std::binary_search(indices_.begin(), indices_.end(), i);
}

std::vector<char> InactiveSet::mask() const {
    std::vector<char> m(static_cast<std::size_t>(num_nodes_), 0);
    for (Index i : indices_) m[i] = 1;
    return m;
}

std::vector<Index> InactiveSet::complement() const {
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(num_nodes_ - size()));
    auto it = indices_.begin();
    for (Index i = 0; i < num_nodes_; ++i) {
        if (it != indices_.end() && *it == i)
            ++it;
        else
            out.push_back(i);
    }
    return out;
}

bool InactiveSet::is_subset_of(const InactiveSet& other) const {
    return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(), indices_.end());
}

std::string InactiveSet::to_line() const {
    std::ostringstream os;
    os << level_ << ' ' << num_nodes_ << " :";
    for (Index i : indices_) os << ' ' << i;
    return os.str();
}

InactiveSet InactiveSet::from_line(std::string_view line) {
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("InactiveSet::from_line: missing ':'");
    std::istringstream head{std::string(line.substr(0, colon))};
    int level = 0;
    Index n = 0;
    if (!(head >> level >> n)) throw std::invalid_argument("InactiveSet::from_line: bad header");

    std::vector<Index> idx;
    std::string_view rest = line.substr(colon + 1);
    while (!rest.empty()) {
        const auto start = rest.find_first_not_of(" \t\r\n");
        if (start == std::string_view::npos) break;
        rest.remove_prefix(start);
        Index value = 0;
        const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
        if (ec != std::errc()) throw std::invalid_argument("InactiveSet::from_line: bad index");
        idx.push_back(value);
        rest.remove_prefix(static_cast<std::size_t>(ptr - rest.data()));
    }
    return {level, std::move(idx), n};
}

InactiveSet coarsen_inactive(const InactiveSet& fine, const MeshHierarchy& hierarchy) {
    if (fine.level() < 1) throw std::invalid_argument("coarsen_inactive: level 0 has no coarser level");
    const LevelMesh& fm = hierarchy.level(fine.level());
    const LevelMesh& cm = hierarchy.level(fine.level() - 1);
    if (fine.num_nodes() != fm.num_interior()) throw std::invalid_argument("coarsen_inactive: set does not match level");

    const auto in = fine.mask();
    std::vector<Index> out;
    for (Index c = 0; c < cm.num_interior(); ++c) {
        const Index f = fm.fine_of_coarse(c);
        if (!in[f]) continue;
        bool keep = true;
        for (Index g : fm.neighbors(f)) {
            const Index i = fm.interior_of_grid(g);
            if (i < 0 || !in[i]) {
                keep = false;
                break;
            }
        }
        if (keep) out.push_back(c);
    }
    return {cm.level(), std::move(out), cm.num_interior()};
}

std::vector<InactiveSet> coarsen_chain(const InactiveSet& fine, int base_level, const MeshHierarchy& hierarchy) {
    if (base_level < 0 || base_level > fine.level())
        throw std::invalid_argument("coarsen_chain: base level out of range");
    std::vector<InactiveSet> chain(static_cast<std::size_t>(fine.level() - base_level + 1));
    chain.back() = fine;
    for (int k = fine.level(); k > base_level; --k)
        chain[k - 1 - base_level] = coarsen_inactive(chain[k - base_level], hierarchy);
    return chain;
}

InactiveDomain inactive_domain(const InactiveSet& set, const MeshHierarchy& hierarchy) {
    const LevelMesh& mesh = hierarchy.level(set.level());
    if (set.num_nodes() != mesh.num_interior()) throw std::invalid_argument("inactive_domain: set does not match level");
    std::vector<char> touched(static_cast<std::size_t>(mesh.num_elements()), 0);
    for (Index i : set.indices())
        for (Index e : mesh.elements_of_node(i)) touched[e] = 1;

    InactiveDomain d;
    d.level = set.level();
    for (Index e = 0; e < mesh.num_elements(); ++e)
        if (touched[e]) d.elements.push_back(e);
    d.volume = static_cast<double>(d.elements.size()) * mesh.element_volume();
    return d;
}

InactiveGeometry geometry(const InactiveSet& fine, const InactiveSet& coarse, const MeshHierarchy& hierarchy) {
    if (fine.level() < 1 || coarse.level() != fine.level() - 1)
        throw std::invalid_argument("geometry: coarse set must live one level below the fine set");
    const LevelMesh& fm = hierarchy.level(fine.level());
    const LevelMesh& cm = hierarchy.level(coarse.level());
    if (coarse.num_nodes() != cm.num_interior()) throw std::invalid_argument("geometry: coarse set does not match level");

    InactiveGeometry g;
    g.level = fine.level();
    g.inactive_domain = inactive_domain(fine, hierarchy);

    // A coarse element lies in the fine inactive domain iff all its children do.
    const Index children = fm.num_elements() / cm.num_elements();
    std::vector<Index> inside(static_cast<std::size_t>(cm.num_elements()), 0);
    for (Index e : g.inactive_domain.elements) ++inside[fm.parent_element(e)];

    const auto coarse_in = coarse.mask();
    for (Index t = 0; t < cm.num_elements(); ++t) {
        if (inside[t] != children) continue;
        bool admissible = true;
        for (Index v : cm.element(t)) {
            const Index c = cm.interior_of_grid(v);
            if (c >= 0 && !coarse_in[c]) {
                admissible = false;
                break;
            }
        }
        if (admissible) g.numerical_interior_elements.push_back(t);
    }
    g.numerical_interior_volume = static_cast<double>(g.numerical_interior_elements.size()) * cm.element_volume();
    g.numerical_boundary_measure = std::max(0.0, g.inactive_domain.volume - g.numerical_interior_volume);
    return g;
}

InactiveSet inactive_from_region(int level, const Region& region, const MeshHierarchy& hierarchy) {
    const LevelMesh& mesh = hierarchy.level(level);
    const int n = mesh.subdivisions();
    // Index range [ceil(lo * n), floor(hi * n)], nudged so that region bounds
    // that are exact multiples of h land on the node.
    const auto range = [n](double lo, double hi) {
        const double eps = 1e-12;
        return std::array<long, 2>{static_cast<long>(std::ceil(lo * n - eps)), static_cast<long>(std::floor(hi * n + eps))};
    };
    const auto rx = range(region.lower[0], region.upper[0]);
    const auto ry = mesh.dim() == 2 ? range(region.lower[1], region.upper[1]) : std::array<long, 2>{0, 0};

    std::vector<Index> idx;
    for (Index i = 0; i < mesh.num_interior(); ++i) {
        const auto [ix, iy] = mesh.grid_coords(mesh.grid_of_interior(i));
        if (ix < rx[0] || ix > rx[1]) continue;
        if (mesh.dim() == 2 && (iy < ry[0] || iy > ry[1])) continue;
        idx.push_back(i);
    }
    return {level, std::move(idx), mesh.num_interior()};
}

InactiveSet grid_sequencing_guess(const InactiveDomain& coarse_domain, const MeshHierarchy& hierarchy) {
    const int fine_level = coarse_domain.level + 1;
    const LevelMesh& fm = hierarchy.level(fine_level);
    const LevelMesh& cm = hierarchy.level(coarse_domain.level);
    std::vector<char> in_domain(static_cast<std::size_t>(cm.num_elements()), 0);
    for (Index t : coarse_domain.elements) in_domain[t] = 1;

    std::vector<Index> idx;
    for (Index i = 0; i < fm.num_interior(); ++i) {
        const auto elems = fm.elements_of_node(i);
        if (std::all_of(elems.begin(), elems.end(), [&](Index e) { return in_domain[fm.parent_element(e)] != 0; }))
            idx.push_back(i);
    }
    return {fine_level, std::move(idx), fm.num_interior()};
}

}  // namespace ssnmg
