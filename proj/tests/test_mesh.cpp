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
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "arig/geometry.hpp"
#include "arig/mesh.hpp"
#include "helpers.hpp"

using namespace arig;

TEST_CASE("single triangle has three boundary halfedges and face-normal vertices", "[mesh]")
{
    Eigen::MatrixX3d v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    Eigen::MatrixX3i f(1, 3);
    f << 0, 1, 2;
    Mesh m = build_halfedge(v, f);

    CHECK(m.boundary_halfedge_count() == 3);
    Eigen::Vector3d n(0, 0, 1);
    for (int i = 0; i < 3; ++i) {
        CHECK((m.normals.row(i).transpose() - n).norm() < 1e-12);
    }
}

TEST_CASE("tetrahedron is watertight with Euler characteristic 2", "[mesh]")
{
    Mesh m = test::tetrahedron();
    CHECK(m.boundary_halfedge_count() == 0);
    CHECK(m.is_watertight());
    CHECK(m.euler_characteristic() == 2);
    for (int i = 0; i < m.n_vertices(); ++i) {
        CHECK(std::abs(m.normals.row(i).norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("same-direction shared edge is rejected", "[mesh]")
{
    // second face flipped: both traverse 1->2
    Eigen::MatrixX3d v(4, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 1, 1, 0;
    Eigen::MatrixX3i f(2, 3);
    f << 0, 1, 2, 1, 2, 3;
    CHECK_THROWS_AS(build_halfedge(v, f), MeshError);
}

TEST_CASE("build errors: repeated index and non-manifold edge", "[mesh]")
{
    Eigen::MatrixX3d v(5, 3);
    v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1;

    Eigen::MatrixX3i degen(1, 3);
    degen << 0, 0, 1;
    CHECK_THROWS_AS(build_halfedge(v, degen), DegenerateFace);

    // three faces on edge (0,1)
    Eigen::MatrixX3i fan(3, 3);
    fan << 0, 1, 2, 1, 0, 3, 0, 1, 4;
    CHECK_THROWS_AS(build_halfedge(v, fan), MeshError);
}

TEST_CASE("voronoi area closed forms", "[mesh]")
{
    SECTION("hexagonal one-ring")
    {
        Mesh m = test::hexagon_fan();
        CHECK(voronoi_area(m, 0) == Catch::Approx(3.0 * std::sqrt(3.0) / 4.0).epsilon(1e-12));
    }
    SECTION("isolated vertex")
    {
        Eigen::MatrixX3d v(4, 3);
        v << 0, 0, 0, 1, 0, 0, 0, 1, 0, 5, 5, 5;
        Eigen::MatrixX3i f(1, 3);
        f << 0, 1, 2;
        Mesh m = build_halfedge(v, f);
        CHECK(voronoi_area(m, 3) == 0.0);
    }
    SECTION("unit square split in two right triangles")
    {
        Eigen::MatrixX3d v(4, 3);
        v << 0, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0;
        Eigen::MatrixX3i f(2, 3);
        f << 0, 1, 2, 0, 2, 3;
        Mesh m = build_halfedge(v, f);
        CHECK(voronoi_area(m, 0) == Catch::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("cotangent laplacian hexagon weights", "[mesh]")
{
    Mesh m = test::hexagon_fan();
    SparseLaplacian L = cotangent_laplacian(m);

    for (int k = 1; k <= 6; ++k) {
        CHECK(L.coeff(0, k) == Catch::Approx(-4.0 / 9.0).margin(1e-12));
    }
    CHECK(L.coeff(0, 0) == Catch::Approx(8.0 / 3.0).margin(1e-12));
}

TEST_CASE("laplacian annihilates constants and matches adjacency pattern", "[mesh]")
{
    for (const Mesh& m : {test::tetrahedron(), test::uv_sphere(10.0, {1, 2, 3}, 12, 8),
                          test::hexagon_fan()}) {
        SparseLaplacian L = cotangent_laplacian(m);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.n_vertices());
        double max_diag = 0.0;
        for (int i = 0; i < m.n_vertices(); ++i) {
            max_diag = std::max(max_diag, std::abs(L.coeff(i, i)));
        }
        CHECK((L * ones).cwiseAbs().maxCoeff() <= 1e-9 * max_diag);

        // sparsity pattern == adjacency plus diagonal, exactly
        std::set<std::pair<int, int>> expected;
        for (int i = 0; i < m.n_vertices(); ++i) {
            expected.insert({i, i});
            for (int j : m.one_ring(i)) { expected.insert({i, j}); }
        }
        std::set<std::pair<int, int>> actual;
        for (int c = 0; c < L.outerSize(); ++c) {
            for (SparseLaplacian::InnerIterator it(L, c); it; ++it) {
                actual.insert({static_cast<int>(it.row()), static_cast<int>(it.col())});
            }
        }
        CHECK(expected == actual);
    }
}

TEST_CASE("obtuse triangle produces a negative edge weight without failing", "[mesh]")
{
    // very obtuse angle at vertex 2, opposite edge (0,1)
    Eigen::MatrixX3d v(3, 3);
    v << 0, 0, 0, 1, 0, 0, 0.5, 0.05, 0;
    Eigen::MatrixX3i f(1, 3);
    f << 0, 1, 2;
    Mesh m = build_halfedge(v, f);
    SparseLaplacian L = cotangent_laplacian(m);
    // w_01 has cot of the obtuse angle only (boundary edge): negative weight
    CHECK(L.coeff(0, 1) > 0.0);  // -w_ij with w_ij < 0
}

TEST_CASE("vertex normals flip sign when face orientation flips", "[mesh]")
{
    Mesh m = test::uv_sphere(5.0, {0, 0, 0}, 10, 6);
    Eigen::MatrixX3i flipped = m.faces;
    flipped.col(1).swap(flipped.col(2));
    Mesh rev = build_halfedge(m.vertices, flipped);
    CHECK((m.normals + rev.normals).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("halfedge traversal visits each incident face exactly once", "[mesh]")
{
    for (const Mesh& m : {test::tetrahedron(), test::uv_sphere(3.0, {0, 0, 0}, 14, 9),
                          test::hexagon_fan()}) {
        REQUIRE(m.n_faces() <= 1000);
        // brute-force incidence lists
        std::vector<std::set<int>> incident(m.n_vertices());
        for (int f = 0; f < m.n_faces(); ++f) {
            for (int k = 0; k < 3; ++k) { incident[m.faces(f, k)].insert(f); }
        }
        for (int i = 0; i < m.n_vertices(); ++i) {
            auto faces = m.vertex_faces(i);
            std::set<int> seen(faces.begin(), faces.end());
            CHECK(seen.size() == faces.size());  // no repeats
            CHECK(seen == incident[i]);
        }
    }
}

TEST_CASE("with_positions preserves connectivity and recomputes normals", "[mesh]")
{
    Mesh m = test::uv_sphere(2.0, {0, 0, 0}, 8, 6);
    Eigen::MatrixX3d moved = m.vertices * 2.0;
    Mesh scaled = m.with_positions(moved);
    CHECK(scaled.faces == m.faces);
    CHECK((scaled.normals - m.normals).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(mesh_volume(scaled) == Catch::Approx(8.0 * mesh_volume(m)).epsilon(1e-12));
}
