// Shared tetrahedralized-grid scaffolding for implicit-surface polygonization
// and implicit-curve extraction.
#ifndef ATLAS_SRC_TET_GRID_HPP
#define ATLAS_SRC_TET_GRID_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "atlas/mesh.hpp"

namespace atlas::detail {

// Six-tetrahedra decomposition of the unit cube around the 0-6 diagonal.
// Corner numbering: bit0 = +x, bit1 = +y, bit2 = +z.
inline constexpr std::array<std::array<int, 4>, 6> kCubeTets = {{
    {0, 1, 3, 7},
    {0, 1, 5, 7},
    {0, 2, 3, 7},
    {0, 2, 6, 7},
    {0, 4, 5, 7},
    {0, 4, 6, 7},
}};

struct TetGrid {
    Box3 box;
    int nx, ny, nz;  // cells per axis
    std::vector<double> values;  // (nx+1)*(ny+1)*(nz+1) node samples

    TetGrid(const std::function<double(const Vec3&)>& field, const Box3& b, int res_x, int res_y,
            int res_z)
        : box(b), nx(res_x), ny(res_y), nz(res_z) {
        values.resize(static_cast<size_t>(nx + 1) * (ny + 1) * (nz + 1));
        for (int k = 0; k <= nz; ++k)
            for (int j = 0; j <= ny; ++j)
                for (int i = 0; i <= nx; ++i) values[node_id(i, j, k)] = field(node_pos(i, j, k));
    }

    size_t node_id(int i, int j, int k) const {
        return (static_cast<size_t>(k) * (ny + 1) + j) * (nx + 1) + i;
    }
    Vec3 node_pos(int i, int j, int k) const {
        return {box.lo.x + (box.hi.x - box.lo.x) * i / nx,
                box.lo.y + (box.hi.y - box.lo.y) * j / ny,
                box.lo.z + (box.hi.z - box.lo.z) * k / nz};
    }
    // corner c (0..7) of cell (i,j,k)
    void corner(int i, int j, int k, int c, int& ci, int& cj, int& ck) const {
        ci = i + (c & 1);
        cj = j + ((c >> 1) & 1);
        ck = k + ((c >> 2) & 1);
    }
};

}  // namespace atlas::detail

#endif
