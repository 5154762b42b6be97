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
#include <Eigen/Geometry>
#include <cmath>
#include <vector>

#include "arig/camera.hpp"
#include "arig/geometry.hpp"
#include "arig/kdtree.hpp"
#include "arig/linalg.hpp"
#include "arig/mesh.hpp"
#include "arig/pointcloud.hpp"
#include "arig/raster.hpp"
#include "arig/trajectory.hpp"

namespace arig {

/** @brief Projection ray as a Plucker line: unit direction d, moment m = p x d. */
struct PluckerLine {
    Eigen::Vector3d direction;
    Eigen::Vector3d moment;

    /// Euclidean distance from a point to the line (unit direction assumed)
    double distance(const Eigen::Vector3d& p) const
    {
        return (p.cross(direction) - moment).norm();
    }
};

/** World-space projection ray of an image pixel through the camera center. */
inline PluckerLine pixel_to_plucker(const Eigen::Vector2d& pixel, const Camera& cam)
{
    Eigen::Vector3d dir = (cam.rotation * cam.pixel_direction(pixel.x(), pixel.y())).normalized();
    return {dir, cam.center().cross(dir)};
}

struct TrackerConfig {
    double gamma_def = 0.005;          ///< data-term weight
    double max_normal_angle = 45.0;    ///< correspondence normal gate, degrees
    double max_corr_dist = 10.0;       ///< correspondence distance gate, mm
    int outer_iterations = 15;         ///< correspondence / solve alternations
    bool use_depth_occlusion = true;   ///< z-buffer test against the mesh itself
    double occlusion_tol = 3.0;        ///< depth slack for the z-buffer test, mm
    double max_incidence = 75.0;       ///< visibility cutoff vs the view ray, degrees
};

struct PointCorrespondence {
    int vertex;
    Eigen::Vector3d point;
};

struct RimCorrespondence {
    int vertex;
    PluckerLine line;
};

/**
 * @brief Match visible mesh vertices to their nearest cloud points.
 *
 * A vertex is visible when its normal faces the camera within the incidence
 * cutoff (grazing surfaces return no depth on real sensors) and, if the
 * z-buffer test is enabled, it is not occluded by the mesh's own
 * rasterization. Matches beyond the distance gate or with normals
 * disagreeing by more than the angle gate are discarded. An empty result is
 * legal and signals tracking loss upstream.
 */
inline std::vector<PointCorrespondence> find_point_correspondences(const Mesh& mesh,
                                                                   const PointCloud& cloud,
                                                                   const Camera& cam,
                                                                   const TrackerConfig& cfg)
{
    std::vector<PointCorrespondence> out;
    if (cloud.size() == 0) { return out; }
    KdTree tree(cloud.points);
    double cos_gate = std::cos(cfg.max_normal_angle * M_PI / 180.0);
    double dist_gate_sq = cfg.max_corr_dist * cfg.max_corr_dist;
    double facing_gate = -std::cos(cfg.max_incidence * M_PI / 180.0);

    DepthImage zbuf;
    if (cfg.use_depth_occlusion) { zbuf = rasterize(mesh, cam); }

    for (int i = 0; i < mesh.n_vertices(); ++i) {
        Eigen::Vector3d v = mesh.vertices.row(i);
        Eigen::Vector3d n = mesh.normals.row(i);
        if (n.dot((v - cam.center()).normalized()) >= facing_gate) { continue; }
        if (cfg.use_depth_occlusion) {
            Eigen::Vector3d proj = cam.project(v);
            if (proj.z() <= 0.0) { continue; }
            int u = static_cast<int>(std::lround(proj.x()));
            int vv = static_cast<int>(std::lround(proj.y()));
            if (u < 0 || vv < 0 || u >= zbuf.width || vv >= zbuf.height) { continue; }
            if (zbuf.valid(u, vv) && proj.z() > zbuf.z(u, vv) + cfg.occlusion_tol) { continue; }
        }
        double d2 = 0.0;
        int j = tree.nearest(v, &d2);
        if (j < 0 || d2 > dist_gate_sq) { continue; }
        if (n.dot(cloud.normals.row(j)) < cos_gate) { continue; }
        out.push_back({i, cloud.points.row(j)});
    }
    return out;
}

/**
 * @brief Pair each depth-discontinuity pixel with the mesh vertex whose
 * projection is nearest in image space; ties break to the lowest index.
 */
inline std::vector<RimCorrespondence> find_rim_correspondences(
    const std::vector<Eigen::Vector2i>& pixels, const Mesh& mesh, const Camera& cam)
{
    std::vector<RimCorrespondence> out;
    if (pixels.empty() || mesh.n_vertices() == 0) { return out; }

    std::vector<Eigen::Vector2d> projected(mesh.n_vertices());
    std::vector<bool> in_front(mesh.n_vertices());
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        Eigen::Vector3d p = cam.project(mesh.vertices.row(i));
        in_front[i] = p.z() > 0.0;
        projected[i] = p.head<2>();
    }

    out.reserve(pixels.size());
    for (const auto& px : pixels) {
        Eigen::Vector2d q = px.cast<double>();
        double best = std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int i = 0; i < mesh.n_vertices(); ++i) {
            if (!in_front[i]) { continue; }
            double d = (projected[i] - q).squaredNorm();
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        if (arg >= 0) { out.push_back({arg, pixel_to_plucker(q, cam)}); }
    }
    return out;
}

// tiny anchor toward the previous positions; keeps the normal equations
// positive definite when the data terms vanish (the Laplacian alone has the
// constant vector in its null space) without perturbing real solves beyond
// the solver tolerance
inline constexpr double kTrackerAnchorWeight = 1e-9;

/**
 * @brief Assemble the tracking objective for one solve: Laplacian smoothness
 * toward the previous frame with weight 1, point and rim data blocks with
 * weight gamma_def. Unknowns are interleaved vertex coordinates (3n).
 */
inline LeastSquaresSystem assemble_system(const Mesh& mesh, const Mesh& prev,
                                          const SparseLaplacian& laplacian,
                                          const std::vector<PointCorrespondence>& point_corr,
                                          const std::vector<RimCorrespondence>& rim_corr,
                                          const TrackerConfig& cfg)
{
    (void)mesh;
    const int n = prev.n_vertices();
    LeastSquaresSystem sys;
    sys.n_cols = 3 * n;

    // smoothness: (L kron I3) x = (L kron I3) prev
    {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(laplacian.nonZeros()) * 3);
        for (int c = 0; c < laplacian.outerSize(); ++c) {
            for (SparseLaplacian::InnerIterator it(laplacian, c); it; ++it) {
                for (int k = 0; k < 3; ++k) {
                    trip.emplace_back(3 * static_cast<int>(it.row()) + k,
                                      3 * static_cast<int>(it.col()) + k, it.value());
                }
            }
        }
        SparseMatrix j(3 * n, 3 * n);
        j.setFromTriplets(trip.begin(), trip.end());
        Eigen::VectorXd prev_flat(3 * n);
        for (int i = 0; i < n; ++i) { prev_flat.segment<3>(3 * i) = prev.vertices.row(i); }
        Eigen::VectorXd target = j * prev_flat;
        sys.add_block(std::move(j), std::move(target), 1.0);

        SparseMatrix anchor(3 * n, 3 * n);
        anchor.setIdentity();
        sys.add_block(std::move(anchor), prev_flat, kTrackerAnchorWeight);
    }

    if (!point_corr.empty() && cfg.gamma_def > 0.0) {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(point_corr.size() * 3);
        Eigen::VectorXd b(3 * point_corr.size());
        for (std::size_t k = 0; k < point_corr.size(); ++k) {
            for (int c = 0; c < 3; ++c) {
                trip.emplace_back(static_cast<int>(3 * k) + c, 3 * point_corr[k].vertex + c, 1.0);
                b[3 * k + c] = point_corr[k].point[c];
            }
        }
        SparseMatrix j(3 * point_corr.size(), 3 * n);
        j.setFromTriplets(trip.begin(), trip.end());
        sys.add_block(std::move(j), std::move(b), cfg.gamma_def);
    }

    if (!rim_corr.empty() && cfg.gamma_def > 0.0) {
        // v x d as a linear map of v: rows [0 d2 -d1; -d2 0 d0; d1 -d0 0]
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(rim_corr.size() * 6);
        Eigen::VectorXd b(3 * rim_corr.size());
        for (std::size_t k = 0; k < rim_corr.size(); ++k) {
            const Eigen::Vector3d& d = rim_corr[k].line.direction;
            int row = static_cast<int>(3 * k);
            int col = 3 * rim_corr[k].vertex;
            trip.emplace_back(row + 0, col + 1, d.z());
            trip.emplace_back(row + 0, col + 2, -d.y());
            trip.emplace_back(row + 1, col + 0, -d.z());
            trip.emplace_back(row + 1, col + 2, d.x());
            trip.emplace_back(row + 2, col + 0, d.y());
            trip.emplace_back(row + 2, col + 1, -d.x());
            b.segment<3>(row) = rim_corr[k].line.moment;
        }
        SparseMatrix j(3 * rim_corr.size(), 3 * n);
        j.setFromTriplets(trip.begin(), trip.end());
        sys.add_block(std::move(j), std::move(b), cfg.gamma_def);
    }
    return sys;
}

struct TrackFrameStats {
    std::vector<double> objective;  ///< Eq. objective per outer iteration
    int point_correspondences = 0;  ///< final iteration
    int rim_correspondences = 0;
};

/**
 * @brief Track one frame: alternate correspondence search and the sparse
 * least-squares solve outer_iterations times, starting from the previous
 * frame estimate. Connectivity is untouched.
 *
 * The solve is the normal-equation minimizer of assemble_system()'s
 * objective; the smoothness normal matrix and the symbolic factorization
 * are shared across the outer iterations (only the data blocks change).
 */
inline Mesh track_frame(const Mesh& prev, const PointCloud& cloud,
                        const std::vector<Eigen::Vector2i>& discontinuities, const Camera& cam,
                        const TrackerConfig& cfg, TrackFrameStats* stats = nullptr)
{
    const int n = prev.n_vertices();
    SparseLaplacian laplacian = cotangent_laplacian(prev);
    Mesh mesh = prev;
    if (stats) { *stats = {}; }

    Eigen::VectorXd prev_flat(3 * n);
    for (int i = 0; i < n; ++i) { prev_flat.segment<3>(3 * i) = prev.vertices.row(i); }

    // smoothness + anchor normal matrix, expanded per coordinate under a
    // reverse Cuthill-McKee vertex ordering (keeps the factor banded), with
    // an explicit zero 3x3 diagonal block per vertex so the pattern already
    // covers every data contribution
    SparseMatrix base;
    std::vector<int> vperm;
    {
        SparseMatrix ltl = (SparseMatrix(laplacian.transpose()) * laplacian).pruned();
        vperm = reverse_cuthill_mckee(ltl);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(ltl.nonZeros()) * 3 + 9 * n);
        for (int c = 0; c < ltl.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(ltl, c); it; ++it) {
                for (int k = 0; k < 3; ++k) {
                    trip.emplace_back(3 * vperm[static_cast<int>(it.row())] + k,
                                      3 * vperm[static_cast<int>(it.col())] + k, it.value());
                }
            }
        }
        for (int i = 0; i < n; ++i) {
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    trip.emplace_back(3 * vperm[i] + a, 3 * vperm[i] + b,
                                      a == b ? kTrackerAnchorWeight : 0.0);
                }
            }
        }
        base.resize(3 * n, 3 * n);
        base.setFromTriplets(trip.begin(), trip.end());
        base.makeCompressed();
    }
    Eigen::VectorXd prev_perm(3 * n);
    for (int i = 0; i < n; ++i) { prev_perm.segment<3>(3 * vperm[i]) = prev.vertices.row(i); }
    Eigen::VectorXd base_rhs = base * prev_perm;  // anchor included: base contains it

    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> solver;
    solver.analyzePattern(base);

    for (int iter = 0; iter < cfg.outer_iterations; ++iter) {
        auto point_corr = find_point_correspondences(mesh, cloud, cam, cfg);
        auto rim_corr = find_rim_correspondences(discontinuities, mesh, cam);

        SparseMatrix a = base;
        Eigen::VectorXd rhs = base_rhs;
        if (cfg.gamma_def > 0.0) {
            for (const auto& pc : point_corr) {
                int col = 3 * vperm[pc.vertex];
                for (int c = 0; c < 3; ++c) {
                    a.coeffRef(col + c, col + c) += cfg.gamma_def;
                    rhs[col + c] += cfg.gamma_def * pc.point[c];
                }
            }
            for (const auto& rc : rim_corr) {
                // J^T J and J^T m for the cross-product rows
                const Eigen::Vector3d& d = rc.line.direction;
                Eigen::Matrix3d cross;
                cross << 0, d.z(), -d.y(), -d.z(), 0, d.x(), d.y(), -d.x(), 0;
                Eigen::Matrix3d jtj = cross.transpose() * cross;
                Eigen::Vector3d jtm = cross.transpose() * rc.line.moment;
                int col = 3 * vperm[rc.vertex];
                for (int ra = 0; ra < 3; ++ra) {
                    for (int rb = 0; rb < 3; ++rb) {
                        a.coeffRef(col + ra, col + rb) += cfg.gamma_def * jtj(ra, rb);
                    }
                    rhs[col + ra] += cfg.gamma_def * jtm[ra];
                }
            }
        }

        solver.factorize(a);
        if (solver.info() != Eigen::Success) {
            throw SolveFailed("tracking solve failed: factorization error");
        }
        Eigen::VectorXd x = solver.solve(rhs);

        Eigen::MatrixX3d positions(n, 3);
        for (int i = 0; i < n; ++i) { positions.row(i) = x.segment<3>(3 * vperm[i]); }
        mesh = mesh.with_positions(positions);
        if (stats) {
            double obj = (laplacian * (positions - prev.vertices)).squaredNorm() +
                         kTrackerAnchorWeight * (positions - prev.vertices).squaredNorm();
            for (const auto& pc : point_corr) {
                obj += cfg.gamma_def *
                       (positions.row(pc.vertex).transpose() - pc.point).squaredNorm();
            }
            for (const auto& rc : rim_corr) {
                Eigen::Vector3d v = positions.row(rc.vertex);
                obj += cfg.gamma_def * (v.cross(rc.line.direction) - rc.line.moment).squaredNorm();
            }
            stats->objective.push_back(obj);
            stats->point_correspondences = static_cast<int>(point_corr.size());
            stats->rim_correspondences = static_cast<int>(rim_corr.size());
        }
    }
    return mesh;
}

/** @brief One observed frame: oriented cloud plus depth-discontinuity pixels. */
struct ObservedFrame {
    PointCloud cloud;
    std::vector<Eigen::Vector2i> discontinuities;
};

/**
 * @brief Track a whole sequence. Frame 0 of the result is the template pose
 * verbatim (the first observation is assumed to show the object at rest);
 * every later frame starts from the previous estimate.
 */
inline TrajectorySet track_sequence(const Mesh& mesh_template,
                                    const std::vector<ObservedFrame>& frames, const Camera& cam,
                                    const TrackerConfig& cfg)
{
    if (frames.size() < 2) { throw Error("track_sequence needs at least two frames"); }
    TrajectorySet traj;
    traj.positions.reserve(frames.size());
    traj.normals.reserve(frames.size());
    traj.positions.push_back(mesh_template.vertices);
    traj.normals.push_back(mesh_template.normals);

    Mesh current = mesh_template;
    for (std::size_t t = 1; t < frames.size(); ++t) {
        current = track_frame(current, frames[t].cloud, frames[t].discontinuities, cam, cfg);
        traj.positions.push_back(current.vertices);
        traj.normals.push_back(current.normals);
    }
    return traj;
}

}  // namespace arig
