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
#include "rdr0/spectral.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <vector>

namespace rdr0 {

namespace {

void sign_fix(Eigen::VectorXd& v) {
    Eigen::Index imax = 0;
    double amax = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > amax) {
            amax = a;
            imax = i;
        }
    }
    if (amax > 0.0)
        v /= v[imax];
}

} // namespace

SpectralResult spectral_radius_nonneg(const LinearMap& apply, Eigen::Index dim, double tol,
                                      int max_iterations) {
    if (dim <= 0)
        throw ValidationError("operator dimension must be positive");
    Eigen::VectorXd v = Eigen::VectorXd::Ones(dim);
    Eigen::VectorXd w = apply(v);
    const double row_sum_max = w.maxCoeff();
    if (row_sum_max < 0.0)
        throw ValidationError("operator is not entrywise nonnegative (negative row sum)");
    SpectralResult res;
    if (row_sum_max == 0.0) {
        // A applied to ones vanishes; for a nonnegative matrix this forces A = 0.
        res.value = 0.0;
        res.vector = v;
        res.decayed = true;
        return res;
    }
    const double shift = 0.5 * row_sum_max;
    double lambda = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        if (it > 1)
            w = apply(v);
        Eigen::VectorXd z = w + shift * v;
        const double rayleigh = v.dot(z) / v.dot(v);
        lambda = rayleigh - shift;
        const double resid = (z - rayleigh * v).lpNorm<Eigen::Infinity>();
        if (resid <= tol) {
            res.value = lambda;
            res.vector = v;
            sign_fix(res.vector);
            res.iterations = it;
            res.residual = resid;
            return res;
        }
        const double znorm = z.lpNorm<Eigen::Infinity>();
        if (znorm < 1e-300) {
            res.value = 0.0;
            res.vector = v;
            res.iterations = it;
            res.decayed = true;
            return res;
        }
        v = z / znorm;
    }
    throw ConvergenceError("power iteration did not converge", lambda);
}

SpectralResult spectral_radius_nonneg(const Eigen::MatrixXd& A, double tol, int max_iterations) {
    if (A.rows() != A.cols())
        throw ValidationError("matrix must be square");
    if (A.minCoeff() < 0.0)
        throw ValidationError("matrix is not entrywise nonnegative");
    return spectral_radius_nonneg([&A](const Eigen::VectorXd& x) { return (A * x).eval(); },
                                  A.rows(), tol, max_iterations);
}

SpectralResult spectral_bound_cooperative(const Eigen::MatrixXd& A, double tol,
                                          double sigma_override, int max_iterations) {
    if (A.rows() != A.cols())
        throw ValidationError("matrix must be square");
    const Eigen::Index n = A.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && A(i, j) < -1e-12)
                throw ValidationError("matrix is not cooperative: entry (" + std::to_string(i) +
                                      "," + std::to_string(j) + ") = " + std::to_string(A(i, j)));
    double sigma = 1.0 + A.diagonal().cwiseAbs().maxCoeff();
    if (sigma_override != 0.0)
        sigma = sigma_override;
    Eigen::MatrixXd shifted = A;
    // Clamp rounding-level negative off-diagonals so the shifted matrix is
    // genuinely nonnegative.
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && shifted(i, j) < 0.0)
                shifted(i, j) = 0.0;
    shifted += sigma * Eigen::MatrixXd::Identity(n, n);
    if (shifted.diagonal().minCoeff() < 0.0)
        throw ValidationError("shift sigma too small to make A + sigma I nonnegative");
    SpectralResult res = spectral_radius_nonneg(shifted, tol, max_iterations);
    res.value -= sigma;
    return res;
}

SpectralResult spectral_bound_sparse(const SparseMatrix& A, double tol, int max_iterations) {
    if (A.rows() != A.cols())
        throw ValidationError("matrix must be square");
    const Eigen::Index n = A.rows();

    // Cooperative upper bound: s(A) <= max row sum.
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < A.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A, k); it; ++it)
            row_sums[it.row()] += it.value();
    const double ub = row_sums.maxCoeff();

    double tau = ub + 1.0;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    v /= v.lpNorm<Eigen::Infinity>();

    SparseMatrix identity(n, n);
    identity.setIdentity();

    Eigen::SparseLU<SparseMatrix> lu;
    auto factor = [&](double shift) {
        SparseMatrix M = -A;
        M += shift * identity;
        M.makeCompressed();
        lu.compute(M);
        return lu.info() == Eigen::Success;
    };
    int factor_tries = 0;
    while (!factor(tau)) {
        if (++factor_tries > 5)
            throw NumericalError("could not factor (tau I - A) for the spectral bound");
        tau += 10.0 * (1.0 + std::abs(tau));
    }

    double s_est = tau - 1.0;
    double s_prev_reshift = s_est;
    double margin = 1.0;
    int reshift_budget = 40;
    int it = 0;
    int since_reshift = 0;
    // Tight spectral clusters (small-diffusion operators have gaps ~ h) make
    // a fixed shift contract like 1 - gap/margin, so the shift walks toward
    // the estimate geometrically as the iteration stalls.
    const int block = 60;
    while (it < max_iterations) {
        ++it;
        ++since_reshift;
        Eigen::VectorXd z = lu.solve(v);
        const double theta = v.dot(z) / v.dot(v);
        if (!(theta > 0.0) || !std::isfinite(theta) || !z.allFinite()) {
            // tau dropped at or below the principal eigenvalue; back off.
            margin = std::min(1.0 + std::abs(s_est), margin * 100.0);
            tau = s_est + margin;
            if (!factor(tau))
                throw NumericalError("refactorization failed in spectral bound");
            since_reshift = 0;
            continue;
        }
        const double resid_k = (z - theta * v).lpNorm<Eigen::Infinity>() / z.lpNorm<Eigen::Infinity>();
        s_est = tau - 1.0 / theta;
        const double resid_s = resid_k / theta; // eigenvalue-scale residual
        if (resid_s <= tol) {
            SpectralResult res;
            res.value = s_est;
            res.vector = z / z.lpNorm<Eigen::Infinity>();
            sign_fix(res.vector);
            res.iterations = it;
            res.residual = resid_s;
            return res;
        }
        v = z / z.lpNorm<Eigen::Infinity>();
        if (since_reshift >= block && reshift_budget > 0) {
            margin = std::max({margin / 10.0, 5.0 * std::abs(s_est - s_prev_reshift), 20.0 * tol,
                               1e-12 * (1.0 + std::abs(s_est))});
            const double tau_new = s_est + margin;
            if (tau_new < tau) {
                double m = margin;
                bool ok = false;
                for (int attempt = 0; attempt < 4 && !ok; ++attempt, m *= 100.0)
                    ok = factor(s_est + m);
                if (!ok)
                    throw NumericalError("refactorization failed in spectral bound");
                margin = m / 100.0;
                tau = s_est + margin;
                --reshift_budget;
                s_prev_reshift = s_est;
            }
            since_reshift = 0;
        }
    }
    throw ConvergenceError("inverse iteration for the spectral bound did not converge", s_est);
}

bool is_irreducible(const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& pattern) {
    if (pattern.rows() != pattern.cols())
        throw ValidationError("pattern must be square");
    const int n = static_cast<int>(pattern.rows());
    if (n == 1)
        return true;

    auto reaches_all = [n, &pattern](bool transpose) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        int count = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j) {
                if (j == i || seen[j])
                    continue;
                const bool edge = transpose ? pattern(j, i) : pattern(i, j);
                if (edge) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == n;
    };

    return reaches_all(false) && reaches_all(true);
}

} // namespace rdr0
