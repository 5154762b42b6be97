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
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "arig/mesh.hpp"

namespace test {

/// regular tetrahedron with unit-ish edges, CCW outward
inline arig::Mesh tetrahedron()
{
    Eigen::MatrixX3d v(4, 3);
    v << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;
    Eigen::MatrixX3i f(4, 3);
    f << 0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2;
    return arig::build_halfedge(v, f);
}

/// hexagonal umbrella: center vertex 0 surrounded by 6 unit-edge equilateral
/// triangles in the z=0 plane
inline arig::Mesh hexagon_fan()
{
    Eigen::MatrixX3d v(7, 3);
    v.row(0) << 0, 0, 0;
    for (int k = 0; k < 6; ++k) {
        double a = k * M_PI / 3.0;
        v.row(k + 1) << std::cos(a), std::sin(a), 0;
    }
    Eigen::MatrixX3i f(6, 3);
    for (int k = 0; k < 6; ++k) { f.row(k) << 0, k + 1, (k + 1) % 6 + 1; }
    return arig::build_halfedge(v, f);
}

/// UV sphere, watertight, radius r centered at c
inline arig::Mesh uv_sphere(double r, const Eigen::Vector3d& c, int slices = 24, int stacks = 16)
{
    std::vector<Eigen::Vector3d> verts;
    verts.emplace_back(c + Eigen::Vector3d(0, 0, r));  // north pole
    for (int i = 1; i < stacks; ++i) {
        double phi = M_PI * i / stacks;
        for (int j = 0; j < slices; ++j) {
            double th = 2.0 * M_PI * j / slices;
            verts.emplace_back(c + r * Eigen::Vector3d(std::sin(phi) * std::cos(th),
                                                       std::sin(phi) * std::sin(th),
                                                       std::cos(phi)));
        }
    }
    verts.emplace_back(c + Eigen::Vector3d(0, 0, -r));  // south pole
    int south = static_cast<int>(verts.size()) - 1;
    auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };

    std::vector<Eigen::Vector3i> faces;
    for (int j = 0; j < slices; ++j) { faces.emplace_back(0, ring(1, j), ring(1, j + 1)); }
    for (int i = 1; i + 1 < stacks; ++i) {
        for (int j = 0; j < slices; ++j) {
            faces.emplace_back(ring(i, j), ring(i + 1, j), ring(i + 1, j + 1));
            faces.emplace_back(ring(i, j), ring(i + 1, j + 1), ring(i, j + 1));
        }
    }
    for (int j = 0; j < slices; ++j) {
        faces.emplace_back(south, ring(stacks - 1, j + 1), ring(stacks - 1, j));
    }

    Eigen::MatrixX3d V(verts.size(), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) { V.row(static_cast<int>(i)) = verts[i]; }
    Eigen::MatrixX3i F(faces.size(), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) { F.row(static_cast<int>(i)) = faces[i]; }
    return arig::build_halfedge(V, F);
}

/// unique temp path under the system temp dir; caller cleans up
inline std::string temp_path(const std::string& name)
{
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() /
               ("arig_test_" + std::to_string(rng()));
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace test
