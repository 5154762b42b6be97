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
#include <limits>
#include <random>
#include <vector>

#include "arig/errors.hpp"

namespace arig {

/**
 * @brief Seeded k-means over matrix rows: k-means++ initialization, Lloyd
 * iterations capped at 100, centroid-motion tolerance 1e-9.
 *
 * Deterministic for a fixed seed; every cluster is non-empty on return
 * (an empty cluster is re-seeded with the point farthest from its
 * centroid, lowest index on ties).
 */
inline Eigen::VectorXi kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed)
{
    const int n = static_cast<int>(rows.rows());
    if (k < 1) { throw Error("kmeans: k must be >= 1"); }
    if (n < k) { throw Error("kmeans: fewer rows than clusters"); }
    Eigen::VectorXi labels = Eigen::VectorXi::Zero(n);
    if (k == 1) { return labels; }

    std::mt19937_64 rng(seed);
    Eigen::MatrixXd centroids(k, rows.cols());

    // k-means++ seeding
    {
        std::uniform_int_distribution<int> first(0, n - 1);
        centroids.row(0) = rows.row(first(rng));
        Eigen::VectorXd d2(n);
        for (int i = 0; i < n; ++i) {
            d2[i] = (rows.row(i) - centroids.row(0)).squaredNorm();
        }
        for (int c = 1; c < k; ++c) {
            double total = d2.sum();
            int pick = 0;
            if (total > 0.0) {
                std::uniform_real_distribution<double> u(0.0, total);
                double r = u(rng);
                double acc = 0.0;
                for (int i = 0; i < n; ++i) {
                    acc += d2[i];
                    if (acc >= r) {
                        pick = i;
                        break;
                    }
                }
            } else {
                std::uniform_int_distribution<int> any(0, n - 1);
                pick = any(rng);
            }
            centroids.row(c) = rows.row(pick);
            for (int i = 0; i < n; ++i) {
                d2[i] = std::min(d2[i], (rows.row(i) - centroids.row(c)).squaredNorm());
            }
        }
    }

    std::vector<int> counts(k);
    for (int iter = 0; iter < 100; ++iter) {
        // assignment
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < k; ++c) {
                double d = (rows.row(i) - centroids.row(c)).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            labels[i] = arg;
        }

        // update
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, rows.cols());
        std::fill(counts.begin(), counts.end(), 0);
        for (int i = 0; i < n; ++i) {
            next.row(labels[i]) += rows.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                next.row(c) /= counts[c];
                continue;
            }
            // re-seed an empty cluster with the worst-fitting point
            double far = -1.0;
            int pick = 0;
            for (int i = 0; i < n; ++i) {
                if (counts[labels[i]] <= 1) { continue; }  // keep donors non-empty
                double d = (rows.row(i) - centroids.row(labels[i])).squaredNorm();
                if (d > far) {
                    far = d;
                    pick = i;
                }
            }
            next.row(c) = rows.row(pick);
            --counts[labels[pick]];
            labels[pick] = c;
            counts[c] = 1;
        }

        double motion = (next - centroids).rowwise().norm().maxCoeff();
        centroids = next;
        if (motion <= 1e-9) { break; }
    }

    // final assignment against the converged centroids
    for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int c = 0; c < k; ++c) {
            double d = (rows.row(i) - centroids.row(c)).squaredNorm();
            if (d < best) {
                best = d;
                arg = c;
            }
        }
        labels[i] = arg;
    }
    // the final assignment can in principle empty a cluster; restore it
    std::vector<int> final_counts(k, 0);
    for (int i = 0; i < n; ++i) { ++final_counts[labels[i]]; }
    for (int c = 0; c < k; ++c) {
        if (final_counts[c] > 0) { continue; }
        double far = -1.0;
        int pick = -1;
        for (int i = 0; i < n; ++i) {
            if (final_counts[labels[i]] <= 1) { continue; }
            double d = (rows.row(i) - centroids.row(labels[i])).squaredNorm();
            if (d > far) {
                far = d;
                pick = i;
            }
        }
        if (pick >= 0) {
            --final_counts[labels[pick]];
            labels[pick] = c;
            final_counts[c] = 1;
        }
    }
    return labels;
}

/// within-cluster sum of squared distances to cluster means
inline double kmeans_objective(const Eigen::MatrixXd& rows, const Eigen::VectorXi& labels, int k)
{
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(k, rows.cols());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(k);
    for (int i = 0; i < rows.rows(); ++i) {
        mean.row(labels[i]) += rows.row(i);
        count[labels[i]] += 1.0;
    }
    for (int c = 0; c < k; ++c) {
        if (count[c] > 0.0) { mean.row(c) /= count[c]; }
    }
    double obj = 0.0;
    for (int i = 0; i < rows.rows(); ++i) { obj += (rows.row(i) - mean.row(labels[i])).squaredNorm(); }
    return obj;
}

}  // namespace arig
