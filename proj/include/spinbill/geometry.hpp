#pragma once

// Billiard shapes as occupied-site masks on the square lattice.
//
// Sites are indexed row-major: m runs over i fastest, then j, both ascending,
// skipping empty cells. Bonds join occupied cells at Manhattan distance 1
// with free (non-periodic) boundaries.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinbill/random.hpp"

namespace spinbill {

struct SiteCoord {
    int i = 0;
    int j = 0;

    friend bool operator==(const SiteCoord&, const SiteCoord&) = default;
};

enum class ShapeTag { rectangle, quarter_stadium, custom };

using Bond = std::pair<int, int>;

/// A mask over a bounding box, with both directions of the site index and
/// the nearest-neighbor bond list. Immutable once built.
class BilliardGeometry {
public:
    /// Row-major mask (`mask[j * lx + i]`). Throws if no cell is set.
    BilliardGeometry(ShapeTag tag, int lx, int ly, std::vector<bool> mask)
        : tag_(tag), lx_(lx), ly_(ly), occupied_(std::move(mask))
    {
        if (lx_ < 1 || ly_ < 1)
            throw std::invalid_argument("geometry: bounding box must be at least 1x1");
        if (occupied_.size() != static_cast<std::size_t>(lx_) * ly_)
            throw std::invalid_argument("geometry: mask size does not match bounding box");

        index_.assign(occupied_.size(), -1);
        for (int j = 0; j < ly_; ++j)
            for (int i = 0; i < lx_; ++i)
                if (occupied_[cell(i, j)]) {
                    index_[cell(i, j)] = static_cast<int>(coords_.size());
                    coords_.push_back({i, j});
                }
        if (coords_.empty())
            throw std::invalid_argument("geometry: mask has no occupied site");

        adjacency_.resize(coords_.size());
        for (int m = 0; m < num_sites(); ++m) {
            const auto [i, j] = coords_[m];
            if (const int r = index_of({i + 1, j}); r >= 0)
                bonds_.emplace_back(m, r);
            if (const int u = index_of({i, j + 1}); u >= 0)
                bonds_.emplace_back(m, u);
        }
        for (const auto& [a, b] : bonds_) {
            adjacency_[a].push_back(b);
            adjacency_[b].push_back(a);
        }
        for (auto& nb : adjacency_)
            std::sort(nb.begin(), nb.end());

        if (!connected())
            warnings_.push_back("geometry: occupied sites form more than one connected component");
    }

    ShapeTag shape_tag() const noexcept { return tag_; }
    int lx() const noexcept { return lx_; }
    int ly() const noexcept { return ly_; }
    int num_sites() const noexcept { return static_cast<int>(coords_.size()); }

    bool in_box(SiteCoord s) const noexcept
    {
        return s.i >= 0 && s.j >= 0 && s.i < lx_ && s.j < ly_;
    }

    bool occupied(SiteCoord s) const noexcept
    {
        return in_box(s) && occupied_[cell(s.i, s.j)];
    }

    /// Site index of `s`, or -1 when `s` is empty or outside the box.
    int index_of(SiteCoord s) const noexcept
    {
        return in_box(s) ? index_[cell(s.i, s.j)] : -1;
    }

    SiteCoord coord_of(int m) const
    {
        check_index(m);
        return coords_[m];
    }

    const std::vector<SiteCoord>& coords() const noexcept { return coords_; }
    const std::vector<Bond>& bonds() const noexcept { return bonds_; }
    const std::vector<bool>& mask() const noexcept { return occupied_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    const std::vector<int>& neighbors(int m) const
    {
        check_index(m);
        return adjacency_[m];
    }

    int max_degree() const noexcept
    {
        std::size_t d = 0;
        for (const auto& nb : adjacency_)
            d = std::max(d, nb.size());
        return static_cast<int>(d);
    }

    bool connected() const
    {
        std::vector<char> seen(coords_.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const int m = stack.back();
            stack.pop_back();
            for (int n : adjacency_[m])
                if (!seen[n]) {
                    seen[n] = 1;
                    ++reached;
                    stack.push_back(n);
                }
        }
        return reached == coords_.size();
    }

private:
    std::size_t cell(int i, int j) const noexcept
    {
        return static_cast<std::size_t>(j) * lx_ + i;
    }

    void check_index(int m) const
    {
        if (m < 0 || m >= num_sites())
            throw std::invalid_argument("geometry: site index " + std::to_string(m) + " out of range");
    }

    ShapeTag tag_;
    int lx_;
    int ly_;
    std::vector<bool> occupied_;
    std::vector<int> index_;
    std::vector<SiteCoord> coords_;
    std::vector<Bond> bonds_;
    std::vector<std::vector<int>> adjacency_;
    std::vector<std::string> warnings_;
};

inline BilliardGeometry build_rectangle(int lx, int ly)
{
    if (lx < 1 || ly < 1)
        throw std::invalid_argument("build_rectangle: dimensions must be positive");
    return BilliardGeometry(ShapeTag::rectangle, lx, ly,
                            std::vector<bool>(static_cast<std::size_t>(lx) * ly, true));
}

/// Quarter of a Bunimovich stadium: a straight section of width `a` followed
/// by a quarter disk of radius R-1 centred at (a-1, 0), boundary inclusive.
inline BilliardGeometry build_quarter_stadium(int a, int radius)
{
    if (a < 1 || radius < 1)
        throw std::invalid_argument("build_quarter_stadium: parameters must be positive");
    const int lx = a + radius - 1;
    const int ly = radius;
    const long r2 = static_cast<long>(radius - 1) * (radius - 1);
    std::vector<bool> mask(static_cast<std::size_t>(lx) * ly, false);
    for (int j = 0; j < ly; ++j)
        for (int i = 0; i < lx; ++i) {
            const long di = i - a + 1;
            mask[static_cast<std::size_t>(j) * lx + i] = i < a || di * di + static_cast<long>(j) * j <= r2;
        }
    return BilliardGeometry(ShapeTag::quarter_stadium, lx, ly, std::move(mask));
}

/// `rows[j][i]` is true for an occupied cell. Rows must share one length.
inline BilliardGeometry build_custom(const std::vector<std::vector<bool>>& rows)
{
    if (rows.empty() || rows.front().empty())
        throw std::invalid_argument("build_custom: empty mask");
    const int lx = static_cast<int>(rows.front().size());
    const int ly = static_cast<int>(rows.size());
    std::vector<bool> mask;
    mask.reserve(static_cast<std::size_t>(lx) * ly);
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != lx)
            throw std::invalid_argument("build_custom: ragged mask rows");
        mask.insert(mask.end(), row.begin(), row.end());
    }
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
        throw std::invalid_argument("build_custom: mask has no occupied site");
    return BilliardGeometry(ShapeTag::custom, lx, ly, std::move(mask));
}

struct DefectConfig {
    double p_defect = 0.0;
    std::uint64_t seed = 0;
    std::vector<SiteCoord> protected_sites{{0, 0}};
};

/// Removes each unprotected occupied site with probability `p_defect`.
///
/// One uniform draw is consumed per occupied site in index order, protected
/// or not, so the removal pattern of a given seed does not depend on which
/// sites are protected. The bounding box is kept.
inline BilliardGeometry apply_defects(const BilliardGeometry& g, const DefectConfig& d)
{
    if (!(d.p_defect >= 0.0 && d.p_defect <= 1.0))
        throw std::invalid_argument("apply_defects: p_defect must lie in [0, 1]");
    for (const auto& s : d.protected_sites)
        if (!g.occupied(s))
            throw std::invalid_argument("apply_defects: protected site (" + std::to_string(s.i) + "," +
                                        std::to_string(s.j) + ") is not occupied");

    std::mt19937_64 rng(d.seed);
    std::vector<bool> mask = g.mask();
    for (const auto& s : g.coords()) {
        const bool hit = uniform01(rng) < d.p_defect;
        const bool keep = std::find(d.protected_sites.begin(), d.protected_sites.end(), s) !=
                          d.protected_sites.end();
        if (hit && !keep)
            mask[static_cast<std::size_t>(s.j) * g.lx() + s.i] = false;
    }
    if (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }))
        throw std::invalid_argument("apply_defects: every site was removed");
    return BilliardGeometry(g.shape_tag(), g.lx(), g.ly(), std::move(mask));
}

// Text grid: "Lx Ly" then Ly lines of '#'/'.', first line is row j = 0.

inline void write_mask(std::ostream& os, const BilliardGeometry& g)
{
    os << g.lx() << ' ' << g.ly() << '\n';
    for (int j = 0; j < g.ly(); ++j) {
        for (int i = 0; i < g.lx(); ++i)
            os << (g.occupied({i, j}) ? '#' : '.');
        os << '\n';
    }
}

inline BilliardGeometry read_mask(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw std::invalid_argument("mask file: missing header line");
    std::istringstream header(line);
    int lx = 0, ly = 0;
    if (!(header >> lx >> ly) || lx < 1 || ly < 1)
        throw std::invalid_argument("mask file: header must be two positive integers 'Lx Ly'");

    std::vector<std::vector<bool>> rows;
    while (static_cast<int>(rows.size()) < ly && std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (static_cast<int>(line.size()) != lx)
            throw std::invalid_argument("mask file: row " + std::to_string(rows.size()) + " has length " +
                                        std::to_string(line.size()) + ", expected " + std::to_string(lx));
        std::vector<bool> row(lx);
        for (int i = 0; i < lx; ++i) {
            if (line[i] != '#' && line[i] != '.')
                throw std::invalid_argument("mask file: unexpected character '" + std::string(1, line[i]) +
                                            "' in row " + std::to_string(rows.size()));
            row[i] = line[i] == '#';
        }
        rows.push_back(std::move(row));
    }
    if (static_cast<int>(rows.size()) != ly)
        throw std::invalid_argument("mask file: expected " + std::to_string(ly) + " rows");
    return build_custom(rows);
}

} // namespace spinbill
