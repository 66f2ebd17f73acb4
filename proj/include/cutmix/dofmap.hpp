#pragma once

#include "cutmix/mesh.hpp"

namespace cutmix {

/// Global numbering of the doubled spaces, block layout [p1 | p2 | u1 | u2].
/// Within each flux block edges are ordered by edge id with two moments each;
/// scalar blocks are ordered by cell id. Edges and cells of cut elements carry
/// degrees of freedom in both subdomain blocks.
struct DofMap {
    std::array<std::vector<int>, 2> edge_base; // per side, absolute index of edge's first dof, -1 if absent
    std::array<std::vector<int>, 2> cell_dof;  // per side, absolute index of cell dof, -1 if absent
    std::array<int, 2> p_offset{0, 0};
    std::array<int, 2> u_offset{0, 0};
    std::array<int, 2> n_edges_side{0, 0};
    std::array<int, 2> n_cells_side{0, 0};
    int total = 0;

    int p_dof(int side, int edge, int moment) const { return edge_base[side][edge] + moment; }
    int u_dof(int side, int cell) const { return cell_dof[side][cell]; }

    /// Six flux dofs of a cell in local dof order (edge-major, moment-minor).
    std::array<int, 6> cell_p_dofs(const Triangulation& tri, int side, int cell) const {
        std::array<int, 6> d;
        for (int j = 0; j < 3; ++j) {
            const int base = edge_base[side][tri.cell_edges[cell][j]];
            d[2 * j + 0] = base;
            d[2 * j + 1] = base + 1;
        }
        return d;
    }
};

inline DofMap build_dofmap(const Triangulation& tri, const MeshClassification& cls) {
    DofMap dm;
    std::array<std::vector<char>, 2> edge_in;
    edge_in[0].assign(tri.n_edges(), 0);
    edge_in[1].assign(tri.n_edges(), 0);
    for (int s = 0; s < 2; ++s)
        for (int c : cls.T_h[s])
            for (int e : tri.cell_edges[c]) edge_in[s][e] = 1;

    int next = 0;
    for (int s = 0; s < 2; ++s) {
        dm.p_offset[s] = next;
        dm.edge_base[s].assign(tri.n_edges(), -1);
        for (int e = 0; e < tri.n_edges(); ++e) {
            if (!edge_in[s][e]) continue;
            dm.edge_base[s][e] = next;
            next += 2;
            ++dm.n_edges_side[s];
        }
    }
    for (int s = 0; s < 2; ++s) {
        dm.u_offset[s] = next;
        dm.cell_dof[s].assign(tri.n_cells(), -1);
        for (int c = 0; c < tri.n_cells(); ++c) {
            if (!cls.in_side[s][c]) continue;
            dm.cell_dof[s][c] = next++;
            ++dm.n_cells_side[s];
        }
    }
    dm.total = next;
    return dm;
}

} // namespace cutmix
