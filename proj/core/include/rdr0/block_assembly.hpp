/*
* Copyright (C) 2026 rdr0 contributors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef RDR0_BLOCK_ASSEMBLY_HPP
#define RDR0_BLOCK_ASSEMBLY_HPP

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "rdr0/grid.hpp"

namespace rdr0 {

/// Unknown ordering for coupled systems on a grid: node-major, component
/// (k, i) at index k*m + i. This keeps the matrix bandwidth at m (diffusion
/// couples k with k+-1, reaction couples components within a node), which
/// direct sparse factorization handles with essentially no fill-in.
inline Eigen::Index block_index(int node, int comp, int n_comp) {
    return static_cast<Eigen::Index>(node) * n_comp + comp;
}

/// Extract component `comp` of a node-major block vector as a nodal Field.
inline Field block_component(const Eigen::VectorXd& v, int comp, int n_comp) {
    const Eigen::Index n_nodes = v.size() / n_comp;
    Field out(n_nodes);
    for (Eigen::Index k = 0; k < n_nodes; ++k)
        out[k] = v[k * n_comp + comp];
    return out;
}

/// Assemble sum_i d_i * Laplacian (per component) plus a nodewise coupling
/// matrix C(x_k): row (k,i) gets the Neumann stencil of d_i and entries
/// C(k)(i,j) against (k,j).
inline SparseMatrix assemble_reaction_diffusion(
    const Grid& grid, const Eigen::VectorXd& diffusion,
    const std::function<Eigen::MatrixXd(int node)>& coupling) {
    const int n_nodes = grid.n();
    const int m = static_cast<int>(diffusion.size());
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_nodes) * (3 + m) * m);
    for (int k = 0; k < n_nodes; ++k) {
        const Eigen::MatrixXd C = coupling(k);
        for (int i = 0; i < m; ++i) {
            const double s = diffusion[i] * inv_h2;
            const Eigen::Index row = block_index(k, i, m);
            if (k == 0) {
                trip.emplace_back(row, row, -2.0 * s);
                trip.emplace_back(row, block_index(1, i, m), 2.0 * s);
            } else if (k == n_nodes - 1) {
                trip.emplace_back(row, block_index(n_nodes - 2, i, m), 2.0 * s);
                trip.emplace_back(row, row, -2.0 * s);
            } else {
                trip.emplace_back(row, block_index(k - 1, i, m), s);
                trip.emplace_back(row, row, -2.0 * s);
                trip.emplace_back(row, block_index(k + 1, i, m), s);
            }
            for (int j = 0; j < m; ++j) {
                const double c = C(i, j);
                if (c != 0.0)
                    trip.emplace_back(row, block_index(k, j, m), c);
            }
        }
    }
    SparseMatrix A(static_cast<Eigen::Index>(n_nodes) * m, static_cast<Eigen::Index>(n_nodes) * m);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    return A;
}

} // namespace rdr0

#endif
