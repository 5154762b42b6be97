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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arig/errors.hpp"
#include "arig/kmeans.hpp"
#include "arig/linalg.hpp"
#include "arig/mesh.hpp"
#include "arig/trajectory.hpp"

namespace arig {

/** How the trajectory-distance time interval is derived from displacements. */
enum class DtMode {
    Normalized,  ///< frames = round(2 max disp / median per-frame disp)
    Raw,         ///< frames = round(2 max disp), mm read as frames
    Fixed,       ///< caller-supplied frame count
};

/**
 * @brief Time interval (frames) for trajectory distances, from the maximum
 * per-frame displacement, clamped to [1, T-1].
 *
 * The defining formula mixes mm and frames; Normalized divides by the
 * median per-frame displacement to make the units coherent, Raw applies the
 * formula literally.
 */
inline int compute_dt(const TrajectorySet& traj, DtMode mode = DtMode::Normalized,
                      int fixed_frames = 1)
{
    const int t_count = traj.frames();
    if (t_count < 2) { throw Error("compute_dt needs at least two frames"); }
    auto clamp_dt = [&](double dt) {
        return std::clamp(static_cast<int>(std::lround(dt)), 1, t_count - 1);
    };
    if (mode == DtMode::Fixed) { return clamp_dt(fixed_frames); }

    const int n = traj.n_vertices();
    double max_disp = 0.0;
    std::vector<double> disps;
    disps.reserve(static_cast<std::size_t>(n) * (t_count - 1));
    for (int t = 1; t < t_count; ++t) {
        for (int i = 0; i < n; ++i) {
            double d = (traj.positions[t].row(i) - traj.positions[t - 1].row(i)).norm();
            max_disp = std::max(max_disp, d);
            disps.push_back(d);
        }
    }
    if (max_disp == 0.0) { return 1; }
    if (mode == DtMode::Raw) { return clamp_dt(2.0 * max_disp); }

    std::nth_element(disps.begin(), disps.begin() + disps.size() / 2, disps.end());
    double median = disps[disps.size() / 2];
    if (median < 1e-12) { return t_count - 1; }  // mostly static: clamp the ratio
    return clamp_dt(2.0 * max_disp / median);
}

struct TrajectoryDistance {
    double d_v;  ///< max inter-vertex distance change over the interval, mm
    double d_n;  ///< max normal-angle change over the interval, rad
    double d;    ///< combined (1 + d_n) * d_v
};

/** @brief Pairwise trajectory distance over a dt-frame interval. */
inline TrajectoryDistance trajectory_distance(const TrajectorySet& traj, int i, int j, int dt)
{
    const int t_count = traj.frames();
    if (dt < 1 || dt > t_count - 1) { throw Error("trajectory_distance: dt out of range"); }
    double d_v = 0.0, d_n = 0.0;
    for (int t = dt; t < t_count; ++t) {
        double now = (traj.positions[t].row(i) - traj.positions[t].row(j)).norm();
        double then = (traj.positions[t - dt].row(i) - traj.positions[t - dt].row(j)).norm();
        d_v = std::max(d_v, std::abs(now - then));
        double cos_now =
            std::clamp(traj.normals[t].row(i).dot(traj.normals[t].row(j)), -1.0, 1.0);
        double cos_then =
            std::clamp(traj.normals[t - dt].row(i).dot(traj.normals[t - dt].row(j)), -1.0, 1.0);
        d_n = std::max(d_n, std::abs(std::acos(cos_now) - std::acos(cos_then)));
    }
    return {d_v, d_n, (1.0 + d_n) * d_v};
}

/** @brief Dense affinity over sampled trajectories plus the sample-vertex map. */
struct AffinityMatrix {
    Eigen::MatrixXd a;                 ///< s x s, symmetric, unit diagonal
    std::vector<int> sample_to_vertex; ///< sample index -> mesh vertex
    int dt = 1;                        ///< interval the distances used
};

/**
 * @brief Affinity A_ij = exp(-lambda d(T_i, T_j)) over a seeded uniform
 * sample of the trajectories (without replacement). Evaluated once per pair,
 * so the matrix is symmetric bitwise.
 */
inline AffinityMatrix affinity(const TrajectorySet& traj, int sample_count, double lambda,
                               std::uint64_t seed, DtMode dt_mode = DtMode::Normalized,
                               int fixed_dt = 1)
{
    const int n = traj.n_vertices();
    const int t_count = traj.frames();
    const int s = std::min(sample_count, n);

    AffinityMatrix out;
    out.dt = compute_dt(traj, dt_mode, fixed_dt);

    // partial Fisher-Yates draw of s distinct vertex indices
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < s; ++k) {
        std::uniform_int_distribution<int> pick(k, n - 1);
        std::swap(pool[k], pool[pick(rng)]);
    }
    out.sample_to_vertex.assign(pool.begin(), pool.begin() + s);

    // repack sampled positions/normals per frame for locality
    std::vector<Eigen::MatrixX3d> pos(t_count, Eigen::MatrixX3d(s, 3));
    std::vector<Eigen::MatrixX3d> nrm(t_count, Eigen::MatrixX3d(s, 3));
    for (int t = 0; t < t_count; ++t) {
        for (int k = 0; k < s; ++k) {
            pos[t].row(k) = traj.positions[t].row(out.sample_to_vertex[k]);
            nrm[t].row(k) = traj.normals[t].row(out.sample_to_vertex[k]);
        }
    }

    const int dt = out.dt;
    out.a.resize(s, s);
    std::vector<double> dist(t_count), angle(t_count);
    for (int i = 0; i < s; ++i) {
        out.a(i, i) = 1.0;
        for (int j = i + 1; j < s; ++j) {
            for (int t = 0; t < t_count; ++t) {
                dist[t] = (pos[t].row(i) - pos[t].row(j)).norm();
                angle[t] = std::acos(std::clamp(nrm[t].row(i).dot(nrm[t].row(j)), -1.0, 1.0));
            }
            double d_v = 0.0, d_n = 0.0;
            for (int t = dt; t < t_count; ++t) {
                d_v = std::max(d_v, std::abs(dist[t] - dist[t - dt]));
                d_n = std::max(d_n, std::abs(angle[t] - angle[t - dt]));
            }
            double v = std::exp(-lambda * (1.0 + d_n) * d_v);
            out.a(i, j) = v;
            out.a(j, i) = v;
        }
    }
    return out;
}

/** @brief Spectral clustering result over the sampled trajectories. */
struct SpectralResult {
    Eigen::VectorXi labels;      ///< per-sample cluster label in [0,k)
    int k = 1;                   ///< eigenvalues below the threshold
    Eigen::VectorXd eigenvalues; ///< ascending spectrum of the normalized Laplacian
};

/**
 * @brief Normalized-Laplacian spectral clustering; the cluster count is the
 * number of eigenvalues below lambda_thresh, and labels come from seeded
 * k-means on the rows of the first k eigenvectors.
 *
 * @throws DegenerateAffinity a zero-degree row prevents normalization
 */
inline SpectralResult spectral_segment(const AffinityMatrix& affinity_matrix,
                                       double lambda_thresh, std::uint64_t seed)
{
    const Eigen::MatrixXd& a = affinity_matrix.a;
    const int s = static_cast<int>(a.rows());
    Eigen::VectorXd degree = a.rowwise().sum();
    for (int i = 0; i < s; ++i) {
        if (!(degree[i] > 0.0)) {
            throw DegenerateAffinity("affinity row " + std::to_string(i) + " has zero degree");
        }
    }
    Eigen::VectorXd inv_sqrt = degree.array().rsqrt();
    Eigen::MatrixXd lap = -(inv_sqrt * inv_sqrt.transpose()).cwiseProduct(a);
    lap.diagonal().array() += 1.0;  // D^{-1/2} (D - A) D^{-1/2}

    auto [vals, vecs] = symmetric_eigen(lap);
    int k = 0;
    for (int i = 0; i < s; ++i) {
        if (vals[i] < lambda_thresh) { ++k; }
    }
    k = std::max(1, k);

    SpectralResult out;
    out.k = k;
    out.eigenvalues = vals;
    out.labels = kmeans(vecs.leftCols(k), k, seed);
    return out;
}

/** @brief Per-vertex rigid-part labels with the selected cluster count. */
struct Segmentation {
    Eigen::VectorXi labels;
    int k = 1;
    Eigen::VectorXd eigenvalues;  ///< spectrum used for the k selection
};

/**
 * @brief Spread sample labels to every vertex: each unsampled vertex takes
 * the label of the geodesically closest sample over the mesh edge graph
 * (Euclidean edge lengths); exact ties go to the lowest sample index.
 *
 * @throws UnreachableVertex a connected component contains no sample
 */
inline Segmentation propagate_labels(const Mesh& mesh, const SpectralResult& samples,
                                     const std::vector<int>& sample_to_vertex)
{
    const int n = mesh.n_vertices();
    Segmentation out;
    out.k = samples.k;
    out.eigenvalues = samples.eigenvalues;
    out.labels = Eigen::VectorXi::Constant(n, -1);

    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    std::vector<int> source(n, std::numeric_limits<int>::max());

    using Entry = std::tuple<double, int, int>;  // (distance, sample index, vertex)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (std::size_t k = 0; k < sample_to_vertex.size(); ++k) {
        int v = sample_to_vertex[k];
        double d = 0.0;
        int src = static_cast<int>(k);
        if (d < dist[v] || (d == dist[v] && src < source[v])) {
            dist[v] = d;
            source[v] = src;
            queue.emplace(d, src, v);
        }
    }
    while (!queue.empty()) {
        auto [d, src, v] = queue.top();
        queue.pop();
        if (d > dist[v] || (d == dist[v] && src > source[v])) { continue; }
        for (int u : mesh.one_ring(v)) {
            double nd = d + (mesh.vertices.row(v) - mesh.vertices.row(u)).norm();
            if (nd < dist[u] || (nd == dist[u] && src < source[u])) {
                dist[u] = nd;
                source[u] = src;
                queue.emplace(nd, src, u);
            }
        }
    }

    for (int v = 0; v < n; ++v) {
        if (source[v] == std::numeric_limits<int>::max()) {
            throw UnreachableVertex("vertex " + std::to_string(v) + " has no path to any sample");
        }
        out.labels[v] = samples.labels[source[v]];
    }
    return out;
}

/** Text format: "k <k>" then one label per vertex per line. */
inline void save_segmentation(const Segmentation& seg, const std::string& path)
{
    std::ofstream out(path);
    if (!out) { throw Error("cannot open '" + path + "' for writing"); }
    out << "k " << seg.k << "\n";
    for (int i = 0; i < seg.labels.size(); ++i) { out << seg.labels[i] << "\n"; }
}

inline Segmentation load_segmentation(const std::string& path)
{
    std::ifstream in(path);
    if (!in) { throw Error("cannot open '" + path + "'"); }
    std::string line;
    if (!std::getline(in, line)) { throw ParseError("empty segmentation file", 1); }
    std::istringstream head(line);
    std::string tag;
    Segmentation seg;
    if (!(head >> tag >> seg.k) || tag != "k") {
        throw ParseError("segmentation file must start with 'k <count>'", 1);
    }
    std::vector<int> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) { continue; }
        try {
            labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw ParseError("malformed label", line_no);
        }
    }
    seg.labels = Eigen::Map<Eigen::VectorXi>(labels.data(), static_cast<int>(labels.size()));
    return seg;
}

/** Binary dump: magic "AFFN", u32 sample count, then s*s float64 row-major. */
inline void save_affinity(const AffinityMatrix& m, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw Error("cannot open '" + path + "' for writing"); }
    out.write("AFFN", 4);
    std::uint32_t s = static_cast<std::uint32_t>(m.a.rows());
    out.write(reinterpret_cast<const char*>(&s), 4);
    for (int i = 0; i < m.a.rows(); ++i) {
        for (int j = 0; j < m.a.cols(); ++j) {
            double v = m.a(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
    }
}

inline Eigen::MatrixXd load_affinity(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw Error("cannot open '" + path + "'"); }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "AFFN", 4) != 0) {
        throw ParseError("not an affinity dump (bad magic)", 0, 0);
    }
    std::uint32_t s = 0;
    in.read(reinterpret_cast<char*>(&s), 4);
    Eigen::MatrixXd a(s, s);
    for (std::uint32_t i = 0; i < s; ++i) {
        for (std::uint32_t j = 0; j < s; ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), 8);
            if (!in) { throw ParseError("truncated affinity dump", 0, 8); }
            a(i, j) = v;
        }
    }
    return a;
}

}  // namespace arig
