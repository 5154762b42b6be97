/*
arig: rigged-model reconstruction from depth sequences

Copyright 2026 The arig authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

   http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <utility>
#include <vector>

#include "arig/errors.hpp"

namespace arig {

using SparseMatrix = Eigen::SparseMatrix<double>;

/**
 * @brief Reverse Cuthill-McKee ordering of a symmetric sparsity pattern.
 * Returns the permutation p with p[old] = new; keeps mesh-graph normal
 * matrices banded for the natural-order Cholesky below.
 */
inline std::vector<int> reverse_cuthill_mckee(const SparseMatrix& a)
{
    const int n = static_cast<int>(a.rows());
    std::vector<std::vector<int>> adj(n);
    for (int c = 0; c < a.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
            if (it.row() != it.col()) { adj[c].push_back(static_cast<int>(it.row())); }
        }
    }
    std::vector<int> degree(n);
    for (int i = 0; i < n; ++i) { degree[i] = static_cast<int>(adj[i].size()); }
    for (auto& nb : adj) {
        std::sort(nb.begin(), nb.end(),
                  [&](int x, int y) { return degree[x] < degree[y] || (degree[x] == degree[y] && x < y); });
    }

    std::vector<int> order;
    order.reserve(n);
    std::vector<bool> seen(n, false);
    std::vector<int> component;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) { continue; }
        // lowest-degree unvisited vertex of this component as the start
        component.clear();
        component.push_back(s);
        seen[s] = true;
        for (std::size_t h = 0; h < component.size(); ++h) {
            for (int v : adj[component[h]]) {
                if (!seen[v]) {
                    seen[v] = true;
                    component.push_back(v);
                }
            }
        }
        int start = *std::min_element(component.begin(), component.end(), [&](int x, int y) {
            return degree[x] < degree[y] || (degree[x] == degree[y] && x < y);
        });
        for (int v : component) { seen[v] = false; }

        std::size_t head = order.size();
        order.push_back(start);
        seen[start] = true;
        for (; head < order.size(); ++head) {
            for (int v : adj[order[head]]) {
                if (!seen[v]) {
                    seen[v] = true;
                    order.push_back(v);
                }
            }
        }
    }
    std::reverse(order.begin(), order.end());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) { perm[order[i]] = i; }
    return perm;
}

/** @brief One weighted residual block gamma * ||J x - b||^2 of a stacked system. */
struct ResidualBlock {
    SparseMatrix jacobian;   ///< rows x n_cols
    Eigen::VectorXd target;  ///< rows
    double weight = 1.0;     ///< >= 0
};

/**
 * @brief Stacked sparse linear least-squares problem over n_cols unknowns.
 * Blocks share the unknown vector; each carries its own scalar weight.
 */
struct LeastSquaresSystem {
    int n_cols = 0;
    std::vector<ResidualBlock> blocks;

    void add_block(SparseMatrix jacobian, Eigen::VectorXd target, double weight)
    {
        blocks.push_back({std::move(jacobian), std::move(target), weight});
    }

    /// weighted normal-equation matrix sum over blocks
    SparseMatrix normal_matrix() const
    {
        SparseMatrix a(n_cols, n_cols);
        for (const auto& blk : blocks) {
            if (blk.weight == 0.0) { continue; }
            a += (blk.weight * (blk.jacobian.transpose() * blk.jacobian)).pruned();
        }
        a.makeCompressed();
        return a;
    }

    Eigen::VectorXd normal_rhs() const
    {
        Eigen::VectorXd r = Eigen::VectorXd::Zero(n_cols);
        for (const auto& blk : blocks) {
            if (blk.weight == 0.0) { continue; }
            r += blk.weight * (blk.jacobian.transpose() * blk.target);
        }
        return r;
    }

    double objective(const Eigen::VectorXd& x) const
    {
        double e = 0.0;
        for (const auto& blk : blocks) { e += blk.weight * (blk.jacobian * x - blk.target).squaredNorm(); }
        return e;
    }
};

/**
 * @brief Minimize the stacked weighted least-squares objective through the
 * normal equations using sparse Cholesky (LDLT) under a reverse
 * Cuthill-McKee ordering.
 *
 * @throws NotPositiveDefinite zero or negative pivot beyond
 *         1e-12 * max diagonal; the system is under-constrained
 */
inline Eigen::VectorXd solve_normal_equations(const LeastSquaresSystem& sys)
{
    SparseMatrix a = sys.normal_matrix();
    Eigen::VectorXd rhs = sys.normal_rhs();

    std::vector<int> p = reverse_cuthill_mckee(a);
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm(
        Eigen::Map<const Eigen::VectorXi>(p.data(), static_cast<int>(p.size())));
    SparseMatrix pap;
    pap = a.twistedBy(perm);

    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> solver;
    solver.compute(pap);
    if (solver.info() != Eigen::Success) {
        throw NotPositiveDefinite("sparse Cholesky factorization failed");
    }
    double max_diag = 0.0;
    for (int i = 0; i < a.rows(); ++i) { max_diag = std::max(max_diag, std::abs(a.coeff(i, i))); }
    const Eigen::VectorXd& d = solver.vectorD();
    double tol = 1e-12 * max_diag;
    for (int i = 0; i < d.size(); ++i) {
        if (!(d[i] > tol)) {
            throw NotPositiveDefinite("normal-equation pivot " + std::to_string(i) +
                                      " below tolerance; system is under-constrained");
        }
    }
    return perm.inverse() * solver.solve(perm * rhs);
}

/**
 * @brief Eigendecomposition of a dense symmetric matrix; the input is
 * symmetrized as (A + A^T)/2. Eigenvalues ascend; eigenvectors are the
 * matching orthonormal columns.
 *
 * @throws NoConvergence the iterative reduction failed
 */
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> symmetric_eigen(const Eigen::MatrixXd& a)
{
    Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success) {
        throw NoConvergence("symmetric eigendecomposition did not converge",
                            static_cast<int>(es.info()));
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace arig
