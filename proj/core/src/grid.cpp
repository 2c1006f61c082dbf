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
#include "rdr0/grid.hpp"

#include <vector>

namespace rdr0 {

Grid::Grid(double a, double b, int n_nodes) : a_(a), b_(b), n_(n_nodes) {
    if (!(a < b))
        throw ValidationError("grid interval requires a < b");
    if (n_nodes < 3)
        throw ValidationError("grid needs at least 3 nodes");
    h_ = (b - a) / (n_ - 1);
}

Field Grid::nodes() const {
    Field v(n_);
    for (int k = 0; k < n_; ++k)
        v[k] = node(k);
    return v;
}

Field Grid::trapezoid_weights() const {
    Field w = Field::Constant(n_, h_);
    w[0] *= 0.5;
    w[n_ - 1] *= 0.5;
    return w;
}

SparseMatrix laplacian(const Grid& grid, double d) {
    if (!(d > 0.0))
        throw ValidationError("diffusion rate must be positive");
    const int n = grid.n();
    const double s = d / (grid.h() * grid.h());
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(3 * n));
    trip.emplace_back(0, 0, -2.0 * s);
    trip.emplace_back(0, 1, 2.0 * s);
    for (int k = 1; k + 1 < n; ++k) {
        trip.emplace_back(k, k - 1, s);
        trip.emplace_back(k, k, -2.0 * s);
        trip.emplace_back(k, k + 1, s);
    }
    trip.emplace_back(n - 1, n - 2, 2.0 * s);
    trip.emplace_back(n - 1, n - 1, -2.0 * s);
    SparseMatrix L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    return L;
}

double integrate(const Grid& grid, const Field& f) {
    if (f.size() != grid.n())
        throw ValidationError("field length does not match grid");
    return grid.trapezoid_weights().dot(f);
}

} // namespace rdr0
