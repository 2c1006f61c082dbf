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
#ifndef RDR0_GRID_HPP
#define RDR0_GRID_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "rdr0/errors.hpp"

namespace rdr0 {

/// Per-node real values aligned to a Grid.
using Field = Eigen::VectorXd;

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uniform node-centered 1-D grid on [a, b].
class Grid {
public:
    Grid(double a, double b, int n_nodes);

    double a() const { return a_; }
    double b() const { return b_; }
    int n() const { return n_; }
    double h() const { return h_; }
    double length() const { return b_ - a_; }
    double node(int k) const { return a_ + h_ * k; }

    /// All node coordinates.
    Field nodes() const;

    /// Trapezoid quadrature weights (h/2, h, ..., h, h/2).
    Field trapezoid_weights() const;

    /// Sample a scalar function of x at every node.
    template <typename F>
    Field sample(F&& f) const {
        Field v(n_);
        for (int k = 0; k < n_; ++k)
            v[k] = f(node(k));
        return v;
    }

private:
    double a_, b_, h_;
    int n_;
};

/// Second-order Neumann Laplacian d * d2/dx2 as a sparse tridiagonal
/// matrix: interior rows d*(1,-2,1)/h^2, boundary rows d*(-2,2)/h^2
/// (ghost-node reflection). Rows sum to zero; off-diagonals nonnegative.
SparseMatrix laplacian(const Grid& grid, double d);

/// Composite trapezoid integral of a nodal field; exact for affine fields.
double integrate(const Grid& grid, const Field& f);

} // namespace rdr0

#endif
