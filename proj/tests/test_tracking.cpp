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

#include <random>

#include "arig/kdtree.hpp"
#include "arig/synth.hpp"
#include "arig/tracking.hpp"
#include "helpers.hpp"

using namespace arig;

namespace {

Camera test_camera()
{
    Camera c;
    c.fx = c.fy = 570.0;
    c.cx = 319.5;
    c.cy = 239.5;
    c.width = 640;
    c.height = 480;
    c.translation = {0, 0, -700};
    return c;
}

GroundTruth coarse_pipe()
{
    PrimitiveSpec spec;
    spec.length = 300;
    spec.radius = 20;
    spec.joint_fractions = {0.5};
    spec.tess = 8.0;
    return make_primitive(spec);
}

PointCloud cloud_at_vertices(const Mesh& m)
{
    return {m.vertices, m.normals};
}

}  // namespace

TEST_CASE("plucker line through the principal point is the optical axis", "[tracking]")
{
    Camera cam;
    cam.cx = 320.0;
    cam.cy = 240.0;
    cam.translation.setZero();
    PluckerLine l = pixel_to_plucker({320.0, 240.0}, cam);
    CHECK((l.direction - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
    CHECK(l.moment.norm() < 1e-12);
}

TEST_CASE("plucker rays satisfy the moment identity along the ray", "[tracking]")
{
    Camera cam = test_camera();
    cam.rotation = Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).matrix();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> upix(10.0, 600.0);
    for (int k = 0; k < 20; ++k) {
        Eigen::Vector2d px(upix(rng), upix(rng) * 0.7);
        PluckerLine l = pixel_to_plucker(px, cam);
        CHECK(std::abs(l.direction.norm() - 1.0) < 1e-12);
        CHECK(std::abs(l.direction.dot(l.moment)) < 1e-9);
        // direct ray parameterization oracle
        Eigen::Vector3d dir = cam.rotation * cam.pixel_direction(px.x(), px.y());
        for (double s : {0.5, 2.0, 11.0}) {
            Eigen::Vector3d p = cam.center() + s * dir;
            CHECK((p.cross(l.direction) - l.moment).norm() < 1e-9);
            CHECK(l.distance(p) < 1e-9);
        }
    }
}

TEST_CASE("point correspondences match an identical cloud at distance zero", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    Camera cam = test_camera();
    TrackerConfig cfg;
    PointCloud cloud = cloud_at_vertices(gt.rest);

    auto corr = find_point_correspondences(gt.rest, cloud, cam, cfg);
    REQUIRE(corr.size() > 100);
    for (const auto& c : corr) {
        CHECK((c.point - gt.rest.vertices.row(c.vertex).transpose()).norm() == 0.0);
    }

    SECTION("distance gate rejects a 20 mm displacement")
    {
        PointCloud moved = cloud;
        moved.points += 20.0 * moved.normals;
        CHECK(find_point_correspondences(gt.rest, moved, cam, cfg).empty());
    }
    SECTION("normal gate rejects flipped normals")
    {
        PointCloud flipped = cloud;
        flipped.normals *= -1.0;
        CHECK(find_point_correspondences(gt.rest, flipped, cam, cfg).empty());
    }
}

TEST_CASE("rim correspondences pick the nearest projected vertex", "[tracking]")
{
    Camera cam = test_camera();

    SECTION("single-vertex mesh always wins")
    {
        Eigen::MatrixX3d v(1, 3);
        v << 5, 5, 0;
        Mesh m = build_halfedge(v, Eigen::MatrixX3i(0, 3));
        auto corr = find_rim_correspondences({{100, 100}}, m, cam);
        REQUIRE(corr.size() == 1);
        CHECK(corr[0].vertex == 0);
    }

    SECTION("pixel on a projected vertex hits it at distance zero")
    {
        Eigen::MatrixX3d v(2, 3);
        v << 0, 0, 0, 100, 0, 0;
        Mesh m = build_halfedge(v, Eigen::MatrixX3i(0, 3));
        Eigen::Vector3d proj = cam.project(v.row(0));
        auto corr = find_rim_correspondences(
            {{static_cast<int>(std::lround(proj.x())), static_cast<int>(std::lround(proj.y()))}},
            m, cam);
        REQUIRE(corr.size() == 1);
        CHECK(corr[0].vertex == 0);
    }

    SECTION("random instance agrees with the quadratic oracle")
    {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> um(-150.0, 150.0);
        Eigen::MatrixX3d v(100, 3);
        for (int i = 0; i < 100; ++i) { v.row(i) << um(rng), um(rng), um(rng) * 0.2; }
        Mesh m = build_halfedge(v, Eigen::MatrixX3i(0, 3));

        std::vector<Eigen::Vector2i> pixels;
        std::uniform_int_distribution<int> upx(0, 639), upy(0, 479);
        for (int k = 0; k < 10; ++k) { pixels.push_back({upx(rng), upy(rng)}); }

        auto corr = find_rim_correspondences(pixels, m, cam);
        REQUIRE(corr.size() == pixels.size());
        for (std::size_t k = 0; k < pixels.size(); ++k) {
            double best = std::numeric_limits<double>::infinity();
            int arg = -1;
            for (int i = 0; i < 100; ++i) {
                Eigen::Vector3d p = cam.project(v.row(i));
                double d = (p.head<2>() - pixels[k].cast<double>()).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = i;
                }
            }
            CHECK(corr[k].vertex == arg);
        }
    }
}

TEST_CASE("smoothness-only solve reproduces the previous positions", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    TrackerConfig cfg;
    SparseLaplacian L = cotangent_laplacian(gt.rest);
    LeastSquaresSystem sys = assemble_system(gt.rest, gt.rest, L, {}, {}, cfg);
    Eigen::VectorXd x = solve_normal_equations(sys);
    for (int i = 0; i < gt.rest.n_vertices(); ++i) {
        CHECK((x.segment<3>(3 * i) - gt.rest.vertices.row(i).transpose()).norm() < 1e-6);
    }
}

TEST_CASE("consistent pins keep the previous positions for any gamma", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    TrackerConfig cfg;
    cfg.gamma_def = 0.7;
    SparseLaplacian L = cotangent_laplacian(gt.rest);
    std::vector<PointCorrespondence> pins;
    for (int i = 0; i < gt.rest.n_vertices(); ++i) {
        pins.push_back({i, gt.rest.vertices.row(i)});
    }
    LeastSquaresSystem sys = assemble_system(gt.rest, gt.rest, L, pins, {}, cfg);
    Eigen::VectorXd x = solve_normal_equations(sys);
    for (int i = 0; i < gt.rest.n_vertices(); ++i) {
        CHECK((x.segment<3>(3 * i) - gt.rest.vertices.row(i).transpose()).norm() < 1e-8);
    }
}

TEST_CASE("rim residual equals the point-to-line distance", "[tracking]")
{
    Camera cam = test_camera();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    TrackerConfig cfg;
    cfg.gamma_def = 1.0;

    for (int k = 0; k < 10; ++k) {
        PluckerLine line = pixel_to_plucker({100.0 + 40.0 * k, 200.0}, cam);
        Eigen::Vector3d v(u(rng), u(rng), u(rng));

        Eigen::MatrixX3d vm(1, 3);
        vm.row(0) = v;
        Mesh m = build_halfedge(vm, Eigen::MatrixX3i(0, 3));
        // isolated vertex has an empty laplacian row; supply a 1x1 zero matrix
        SparseLaplacian L(1, 1);
        std::vector<RimCorrespondence> rim = {{0, line}};
        LeastSquaresSystem sys = assemble_system(m, m, L, {}, rim, cfg);
        // the rim block is the last one added
        const auto& blk = sys.blocks.back();
        Eigen::VectorXd flat(3);
        flat << v.x(), v.y(), v.z();
        double residual = (blk.jacobian * flat - blk.target).norm();
        CHECK(residual == Catch::Approx(line.distance(v)).margin(1e-12));

        // a point on the line has zero residual
        Eigen::Vector3d on_line = cam.center() + 321.0 * line.direction;
        flat << on_line.x(), on_line.y(), on_line.z();
        CHECK((blk.jacobian * flat - blk.target).norm() < 1e-9);
    }
}

TEST_CASE("tracking a cloud sampled at the vertices is a fixed point", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    Camera cam = test_camera();
    TrackerConfig cfg;
    cfg.outer_iterations = 5;
    PointCloud cloud = cloud_at_vertices(gt.rest);

    TrackFrameStats stats;
    Mesh out = track_frame(gt.rest, cloud, {}, cam, cfg, &stats);
    CHECK((out.vertices - gt.rest.vertices).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(stats.objective.back() <= stats.objective.front() + 1e-12);
}

TEST_CASE("zero data weight leaves the mesh unchanged", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    Camera cam = test_camera();
    TrackerConfig cfg;
    cfg.gamma_def = 0.0;
    cfg.outer_iterations = 3;
    RenderResult r = render_depth(gt.rest, cam);
    Mesh out = track_frame(gt.rest, r.cloud, r.discontinuities, cam, cfg);
    CHECK((out.vertices - gt.rest.vertices).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("one tracked frame moves toward a bent target", "[tracking]")
{
    PrimitiveSpec spec;
    spec.tess = 4.6;
    GroundTruth gt = make_primitive(spec);
    Camera cam = test_camera();
    TrackerConfig cfg;  // gamma_def 0.005

    Eigen::MatrixX3d bent = pose_vertices(gt, {5.0 * M_PI / 180.0});
    RenderResult r = render_depth(gt.rest.with_positions(bent), cam);

    Mesh tracked = track_frame(gt.rest, r.cloud, r.discontinuities, cam, cfg);

    // symmetric nearest-neighbor RMS, the rig-evaluation metric
    auto nn_rms = [](const Eigen::MatrixX3d& a, const Eigen::MatrixX3d& b) {
        KdTree ta(a), tb(b);
        double sum = 0.0;
        for (int i = 0; i < a.rows(); ++i) {
            double d2;
            tb.nearest(a.row(i), &d2);
            sum += d2;
        }
        for (int i = 0; i < b.rows(); ++i) {
            double d2;
            ta.nearest(b.row(i), &d2);
            sum += d2;
        }
        return std::sqrt(sum / static_cast<double>(a.rows() + b.rows()));
    };
    double before = nn_rms(gt.rest.vertices, bent);
    double after = nn_rms(tracked.vertices, bent);
    CHECK(after < before);
}

TEST_CASE("rigid motion preserves pairwise distances", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    Camera cam = test_camera();
    TrackerConfig cfg;

    // clouds sampled at the displaced vertices: the rigid motion is fully
    // observable, so tracking must follow it without distortion
    Eigen::Vector3d step(1.5, 1.0, 0.0);
    std::vector<ObservedFrame> frames;
    for (int t = 0; t < 4; ++t) {
        Eigen::MatrixX3d moved = gt.rest.vertices;
        moved.rowwise() += (t * step).transpose();
        frames.push_back({PointCloud{moved, gt.rest.normals}, {}});
    }
    TrajectorySet traj = track_sequence(gt.rest, frames, cam, cfg);
    REQUIRE(traj.frames() == 4);
    CHECK(traj.positions[0] == gt.rest.vertices);

    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, gt.rest.n_vertices() - 1);
    for (int k = 0; k < 200; ++k) {
        int i = pick(rng), j = pick(rng);
        double d0 = (traj.positions[0].row(i) - traj.positions[0].row(j)).norm();
        for (int t = 1; t < traj.frames(); ++t) {
            double dt = (traj.positions[t].row(i) - traj.positions[t].row(j)).norm();
            CHECK(std::abs(dt - d0) < 0.1);
        }
    }
}

TEST_CASE("static clouds give constant trajectories", "[tracking]")
{
    GroundTruth gt = coarse_pipe();
    Camera cam = test_camera();
    TrackerConfig cfg;
    cfg.outer_iterations = 5;
    PointCloud cloud = cloud_at_vertices(gt.rest);
    std::vector<ObservedFrame> frames(3, ObservedFrame{cloud, {}});
    TrajectorySet traj = track_sequence(gt.rest, frames, cam, cfg);
    for (int t = 0; t < traj.frames(); ++t) {
        CHECK((traj.positions[t] - gt.rest.vertices).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("trajectory files round trip exactly", "[tracking]")
{
    TrajectorySet traj;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 10.0);
    for (int t = 0; t < 3; ++t) {
        Eigen::MatrixX3d p(5, 3), n(5, 3);
        for (int i = 0; i < 5; ++i) {
            p.row(i) << g(rng), g(rng), g(rng);
            n.row(i) << 0, 0, 1;
        }
        traj.positions.push_back(p);
        traj.normals.push_back(n);
    }
    auto path = test::temp_path("t.traj");
    save_trajectories(traj, path);
    TrajectorySet back = load_trajectories(path);
    REQUIRE(back.frames() == 3);
    REQUIRE(back.n_vertices() == 5);
    for (int t = 0; t < 3; ++t) {
        CHECK(back.positions[t] == traj.positions[t]);
        CHECK(back.normals[t] == traj.normals[t]);
    }
}
