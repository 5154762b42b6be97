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
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "arig/errors.hpp"

namespace arig {

/**
 * @brief Directed halfedge of a triangle mesh.
 *
 * Halfedge 3*f + k belongs to face f and runs from F(f,k) to F(f,(k+1)%3).
 * next chains the three halfedges of a face (next of next of next is the
 * halfedge itself); twin is -1 on boundary edges.
 */
struct Halfedge {
    int origin = -1;
    int next = -1;
    int twin = -1;
};

/**
 * @brief Halfedge triangle mesh with positions in mm and unit vertex normals.
 *
 * Immutable after construction; share freely across threads. Use
 * build_halfedge() to construct and with_positions() to derive a deformed
 * copy with identical connectivity.
 */
class Mesh {
public:
    Eigen::MatrixX3d vertices;        ///< positions (mm), one row per vertex
    Eigen::MatrixX3i faces;           ///< CCW vertex-index triples
    Eigen::MatrixX3d normals;         ///< area-weighted unit vertex normals
    std::vector<Halfedge> halfedges;  ///< 3 per face
    std::vector<int> vertex_halfedge; ///< one outgoing halfedge per vertex, -1 if isolated

    int n_vertices() const { return static_cast<int>(vertices.rows()); }
    int n_faces() const { return static_cast<int>(faces.rows()); }

    int boundary_halfedge_count() const
    {
        int c = 0;
        for (const auto& h : halfedges) {
            if (h.twin < 0) { ++c; }
        }
        return c;
    }

    int n_edges() const
    {
        // every interior edge carries two halfedges, boundary edges one
        return (static_cast<int>(halfedges.size()) + boundary_halfedge_count()) / 2;
    }

    int euler_characteristic() const
    {
        return n_vertices() - n_edges() + n_faces();
    }

    bool is_watertight() const
    {
        return n_faces() > 0 && boundary_halfedge_count() == 0;
    }

    int halfedge_face(int h) const { return h / 3; }
    int halfedge_dest(int h) const { return halfedges[halfedges[h].next].origin; }
    int prev_halfedge(int h) const { return halfedges[halfedges[h].next].next; }

    /**
     * One-ring neighbor vertices of v in CCW order. For boundary vertices the
     * walk starts at the outgoing boundary halfedge so every neighbor is
     * reached; includes both boundary neighbors.
     */
    std::vector<int> one_ring(int v) const
    {
        std::vector<int> ring;
        int h0 = vertex_halfedge[v];
        if (h0 < 0) { return ring; }
        int h = h0;
        while (true) {
            ring.push_back(halfedge_dest(h));
            int p = prev_halfedge(h);
            if (halfedges[p].twin < 0) {
                ring.push_back(halfedges[p].origin);  // far end of the boundary edge into v
                break;
            }
            h = halfedges[p].twin;
            if (h == h0) { break; }
        }
        return ring;
    }

    /** Faces incident to v, CCW order following the one-ring walk. */
    std::vector<int> vertex_faces(int v) const
    {
        std::vector<int> out;
        int h0 = vertex_halfedge[v];
        if (h0 < 0) { return out; }
        int h = h0;
        while (true) {
            out.push_back(halfedge_face(h));
            int p = prev_halfedge(h);
            if (halfedges[p].twin < 0) { break; }
            h = halfedges[p].twin;
            if (h == h0) { break; }
        }
        return out;
    }

    double mean_edge_length() const
    {
        double sum = 0.0;
        int count = 0;
        for (int h = 0; h < static_cast<int>(halfedges.size()); ++h) {
            int d = halfedge_dest(h);
            int o = halfedges[h].origin;
            if (halfedges[h].twin >= 0 && o > d) { continue; }  // count undirected edges once
            sum += (vertices.row(o) - vertices.row(d)).norm();
            ++count;
        }
        return count > 0 ? sum / count : 0.0;
    }

    /** Same connectivity, new positions; normals recomputed. */
    Mesh with_positions(const Eigen::MatrixX3d& positions) const;
};

namespace detail {

inline Eigen::MatrixX3d vertex_normals(const Eigen::MatrixX3d& V, const Eigen::MatrixX3i& F)
{
    Eigen::MatrixX3d N = Eigen::MatrixX3d::Zero(V.rows(), 3);
    for (int f = 0; f < F.rows(); ++f) {
        Eigen::Vector3d p0 = V.row(F(f, 0));
        Eigen::Vector3d e1 = V.row(F(f, 1)).transpose() - p0;
        Eigen::Vector3d e2 = V.row(F(f, 2)).transpose() - p0;
        Eigen::Vector3d area_normal = 0.5 * e1.cross(e2);  // area-weighted
        for (int k = 0; k < 3; ++k) { N.row(F(f, k)) += area_normal; }
    }
    for (int i = 0; i < N.rows(); ++i) {
        double len = N.row(i).norm();
        if (len > 0.0) { N.row(i) /= len; }
    }
    return N;
}

}  // namespace detail

/**
 * @brief Build the halfedge connectivity for a triangle soup.
 *
 * Faces must be consistently CCW oriented. Vertex normals are computed as
 * normalized area-weighted face-normal averages; isolated vertices get a
 * zero normal.
 *
 * @throws DegenerateFace repeated vertex index inside a face
 * @throws NonManifoldEdge undirected edge with more than two incident faces
 * @throws InconsistentOrientation two faces traverse an edge in the same direction
 */
inline Mesh build_halfedge(const Eigen::MatrixX3d& vertices, const Eigen::MatrixX3i& faces)
{
    const int nv = static_cast<int>(vertices.rows());
    const int nf = static_cast<int>(faces.rows());

    Mesh m;
    m.vertices = vertices;
    m.faces = faces;
    m.halfedges.resize(static_cast<std::size_t>(3) * nf);
    m.vertex_halfedge.assign(nv, -1);

    auto key = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };

    std::unordered_map<std::uint64_t, int> directed;  // (origin,dest) -> halfedge
    directed.reserve(static_cast<std::size_t>(3) * nf);
    std::unordered_map<std::uint64_t, int> undirected_count;
    undirected_count.reserve(static_cast<std::size_t>(3) * nf);

    for (int f = 0; f < nf; ++f) {
        int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
        if (a < 0 || b < 0 || c < 0 || a >= nv || b >= nv || c >= nv) {
            throw MeshError("face " + std::to_string(f) + " references an invalid vertex index");
        }
        if (a == b || b == c || c == a) {
            throw DegenerateFace("face " + std::to_string(f) + " repeats a vertex index");
        }
        for (int k = 0; k < 3; ++k) {
            int o = faces(f, k);
            int d = faces(f, (k + 1) % 3);
            int h = 3 * f + k;
            m.halfedges[h].origin = o;
            m.halfedges[h].next = 3 * f + (k + 1) % 3;

            auto ukey = key(std::min(o, d), std::max(o, d));
            int uc = ++undirected_count[ukey];
            if (uc > 2) {
                throw NonManifoldEdge("edge (" + std::to_string(o) + "," + std::to_string(d) +
                                      ") is shared by more than two faces");
            }
            auto [it, inserted] = directed.emplace(key(o, d), h);
            if (!inserted) {
                throw InconsistentOrientation(
                    "edge (" + std::to_string(o) + "," + std::to_string(d) +
                    ") is traversed in the same direction by two faces");
            }
        }
    }

    for (int h = 0; h < 3 * nf; ++h) {
        int o = m.halfedges[h].origin;
        int d = m.halfedge_dest(h);
        auto it = directed.find(key(d, o));
        m.halfedges[h].twin = (it == directed.end()) ? -1 : it->second;
    }

    // pick an outgoing halfedge per vertex; prefer a boundary one so CCW
    // traversal covers the whole fan
    for (int h = 0; h < 3 * nf; ++h) {
        int o = m.halfedges[h].origin;
        if (m.vertex_halfedge[o] < 0 || m.halfedges[h].twin < 0) {
            if (m.vertex_halfedge[o] < 0 || m.halfedges[m.vertex_halfedge[o]].twin >= 0) {
                m.vertex_halfedge[o] = h;
            }
        }
    }

    m.normals = detail::vertex_normals(vertices, faces);
    return m;
}

inline Mesh Mesh::with_positions(const Eigen::MatrixX3d& positions) const
{
    Mesh m = *this;
    m.vertices = positions;
    m.normals = detail::vertex_normals(positions, faces);
    return m;
}

}  // namespace arig
