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
#include <Eigen/SparseCore>
#include <cmath>
#include <vector>

#include "arig/mesh.hpp"

namespace arig {

/// Sparse cotangent Laplacian; row i is supported on vertex i and its one-ring.
using SparseLaplacian = Eigen::SparseMatrix<double>;

/// Cotangents of near-degenerate angles are clamped to +-cot(1 deg).
inline constexpr double kCotClamp = 57.28996163075943;

inline double face_area(const Mesh& mesh, int f)
{
    Eigen::Vector3d p0 = mesh.vertices.row(mesh.faces(f, 0));
    Eigen::Vector3d p1 = mesh.vertices.row(mesh.faces(f, 1));
    Eigen::Vector3d p2 = mesh.vertices.row(mesh.faces(f, 2));
    return 0.5 * (p1 - p0).cross(p2 - p0).norm();
}

inline Eigen::Vector3d face_normal(const Mesh& mesh, int f)
{
    Eigen::Vector3d p0 = mesh.vertices.row(mesh.faces(f, 0));
    Eigen::Vector3d p1 = mesh.vertices.row(mesh.faces(f, 1));
    Eigen::Vector3d p2 = mesh.vertices.row(mesh.faces(f, 2));
    Eigen::Vector3d n = (p1 - p0).cross(p2 - p0);
    double len = n.norm();
    return len > 0.0 ? Eigen::Vector3d(n / len) : Eigen::Vector3d::Zero();
}

/**
 * @brief Voronoi cell area of vertex i, approximated as half of the summed
 * areas of its incident triangles (mm^2). Isolated vertices return 0.
 */
inline double voronoi_area(const Mesh& mesh, int i)
{
    double sum = 0.0;
    for (int f : mesh.vertex_faces(i)) { sum += face_area(mesh, f); }
    return 0.5 * sum;
}

namespace detail {

// cot of the angle at apex, guarded against degenerate triangles
inline double cotangent(const Eigen::Vector3d& apex, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b)
{
    Eigen::Vector3d u = a - apex;
    Eigen::Vector3d v = b - apex;
    double cross = u.cross(v).norm();
    double dot = u.dot(v);
    if (cross < 1e-300) { return dot >= 0.0 ? kCotClamp : -kCotClamp; }
    double c = dot / cross;
    return std::clamp(c, -kCotClamp, kCotClamp);
}

}  // namespace detail

/**
 * @brief Cotangent Laplacian with edge weights
 * w_ij = (cot a_ij + cot b_ij) / (2 |A_i|) and diagonal sum over the
 * one-ring, so every row applied to a constant vector vanishes exactly.
 *
 * Boundary edges use the single available cotangent. Because the Voronoi
 * area normalization is per-row, L is not symmetric in general.
 *
 * @throws DegenerateGeometry a non-isolated vertex has zero Voronoi area
 */
inline SparseLaplacian cotangent_laplacian(const Mesh& mesh)
{
    const int n = mesh.n_vertices();
    // one pass over faces accumulates one-ring areas and the symmetric
    // cotangent sums per directed edge
    Eigen::VectorXd ring_area = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> cot_trip;
    cot_trip.reserve(static_cast<std::size_t>(mesh.n_faces()) * 6);

    for (int f = 0; f < mesh.n_faces(); ++f) {
        int a = mesh.faces(f, 0), b = mesh.faces(f, 1), c = mesh.faces(f, 2);
        Eigen::Vector3d pa = mesh.vertices.row(a);
        Eigen::Vector3d pb = mesh.vertices.row(b);
        Eigen::Vector3d pc = mesh.vertices.row(c);
        double area = 0.5 * (pb - pa).cross(pc - pa).norm();
        ring_area[a] += area;
        ring_area[b] += area;
        ring_area[c] += area;
        double cot_a = detail::cotangent(pa, pb, pc);
        double cot_b = detail::cotangent(pb, pc, pa);
        double cot_c = detail::cotangent(pc, pa, pb);
        cot_trip.emplace_back(b, c, cot_a);
        cot_trip.emplace_back(c, b, cot_a);
        cot_trip.emplace_back(c, a, cot_b);
        cot_trip.emplace_back(a, c, cot_b);
        cot_trip.emplace_back(a, b, cot_c);
        cot_trip.emplace_back(b, a, cot_c);
    }

    SparseLaplacian cots(n, n);
    cots.setFromTriplets(cot_trip.begin(), cot_trip.end());

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(cots.nonZeros()) + n);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (mesh.vertex_halfedge[i] >= 0 && !(ring_area[i] > 0.0)) {
            throw DegenerateGeometry("vertex " + std::to_string(i) + " has zero Voronoi area");
        }
    }
    for (int c = 0; c < cots.outerSize(); ++c) {
        for (SparseLaplacian::InnerIterator it(cots, c); it; ++it) {
            int i = static_cast<int>(it.row());
            int j = static_cast<int>(it.col());
            double w = it.value() / ring_area[i];  // 1/(2 A_i) with A_i = ring/2
            trip.emplace_back(i, j, -w);
            diag[i] += w;
        }
    }
    for (int i = 0; i < n; ++i) {
        if (mesh.vertex_halfedge[i] >= 0) { trip.emplace_back(i, i, diag[i]); }
    }

    SparseLaplacian L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    L.makeCompressed();
    return L;
}

/** Signed enclosed volume by tetrahedron sum; positive for outward CCW faces. */
inline double mesh_volume(const Mesh& mesh)
{
    double v = 0.0;
    for (int f = 0; f < mesh.n_faces(); ++f) {
        Eigen::Vector3d p0 = mesh.vertices.row(mesh.faces(f, 0));
        Eigen::Vector3d p1 = mesh.vertices.row(mesh.faces(f, 1));
        Eigen::Vector3d p2 = mesh.vertices.row(mesh.faces(f, 2));
        v += p0.dot(p1.cross(p2)) / 6.0;
    }
    return v;
}

/** Total surface area per label; labels in [0,k). */
inline std::vector<double> label_areas(const Mesh& mesh, const Eigen::VectorXi& labels, int k)
{
    std::vector<double> area(static_cast<std::size_t>(k), 0.0);
    for (int f = 0; f < mesh.n_faces(); ++f) {
        double a = face_area(mesh, f) / 3.0;
        for (int c = 0; c < 3; ++c) {
            int l = labels[mesh.faces(f, c)];
            if (l >= 0 && l < k) { area[static_cast<std::size_t>(l)] += a; }
        }
    }
    return area;
}

}  // namespace arig
