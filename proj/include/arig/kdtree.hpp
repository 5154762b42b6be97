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
#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace arig {

/**
 * @brief Static kd-tree over 3D points for nearest-neighbor queries.
 *
 * Ties on distance resolve to the lowest point index, so queries are
 * deterministic regardless of build order.
 */
class KdTree {
public:
    KdTree() = default;

    explicit KdTree(const Eigen::MatrixX3d& points) : pts_(points)
    {
        index_.resize(pts_.rows());
        std::iota(index_.begin(), index_.end(), 0);
        nodes_.reserve(index_.size() * 2);
        if (!index_.empty()) { root_ = build(0, static_cast<int>(index_.size())); }
    }

    int size() const { return static_cast<int>(pts_.rows()); }

    /// index of the nearest point, -1 if the tree is empty
    int nearest(const Eigen::Vector3d& q, double* out_sq_dist = nullptr) const
    {
        if (root_ < 0) { return -1; }
        double best = std::numeric_limits<double>::infinity();
        int best_idx = -1;
        search(root_, q, best, best_idx);
        if (out_sq_dist) { *out_sq_dist = best; }
        return best_idx;
    }

private:
    struct Node {
        int left = -1;
        int right = -1;
        int begin = 0;
        int end = 0;       // leaf range into index_
        int axis = 0;
        double split = 0;
    };

    static constexpr int kLeafSize = 12;

    int build(int begin, int end)
    {
        Node node;
        node.begin = begin;
        node.end = end;
        int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        if (end - begin <= kLeafSize) { return id; }

        Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
        Eigen::Vector3d hi = -lo;
        for (int i = begin; i < end; ++i) {
            lo = lo.cwiseMin(pts_.row(index_[i]).transpose());
            hi = hi.cwiseMax(pts_.row(index_[i]).transpose());
        }
        int axis;
        (hi - lo).maxCoeff(&axis);
        int mid = (begin + end) / 2;
        std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                         [&](int a, int b) {
                             double pa = pts_(a, axis), pb = pts_(b, axis);
                             return pa < pb || (pa == pb && a < b);
                         });
        nodes_[id].axis = axis;
        nodes_[id].split = pts_(index_[mid], axis);
        nodes_[id].left = build(begin, mid);
        nodes_[id].right = build(mid, end);
        return id;
    }

    void search(int id, const Eigen::Vector3d& q, double& best, int& best_idx) const
    {
        const Node& node = nodes_[id];
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                int p = index_[i];
                double d = (pts_.row(p).transpose() - q).squaredNorm();
                if (d < best || (d == best && p < best_idx)) {
                    best = d;
                    best_idx = p;
                }
            }
            return;
        }
        double delta = q[node.axis] - node.split;
        int near = delta < 0.0 ? node.left : node.right;
        int far = delta < 0.0 ? node.right : node.left;
        search(near, q, best, best_idx);
        if (delta * delta <= best) { search(far, q, best, best_idx); }
    }

    Eigen::MatrixX3d pts_;
    std::vector<int> index_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

}  // namespace arig
