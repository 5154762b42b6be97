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
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arig/camera.hpp"
#include "arig/errors.hpp"
#include "arig/mesh.hpp"
#include "arig/pointcloud.hpp"
#include "arig/raster.hpp"

namespace arig {

enum class PrimitiveKind { Pipe, Star, Lamp };

/**
 * @brief Parametric articulated primitive, units mm.
 *
 * pipe: cylinder along +x centered at the origin with ball-capped ends and
 *       one hinge per joint fraction. star: planar arms radiating from a
 *       hub, one hinge per arm. lamp: chain of three equal pipe segments
 *       with two hinges.
 */
struct PrimitiveSpec {
    PrimitiveKind kind = PrimitiveKind::Pipe;
    double length = 300.0;                       ///< pipe total length
    double radius = 20.0;                        ///< tube radius (all kinds)
    std::vector<double> joint_fractions = {0.5}; ///< pipe, strictly inside (0,1), sorted
    int arms = 3;                                ///< star
    double arm_length = 100.0;                   ///< star
    double segment_length = 100.0;               ///< lamp
    double tess = 3.5;                           ///< target edge length
};

struct GtJoint {
    Eigen::Vector3d position;
    Eigen::Vector3d axis;  ///< unit hinge axis
};

/**
 * @brief Ground truth for a synthetic object: rest mesh, true joints, hard
 * part labels, and the rigid-part skinning used to animate it (at most two
 * parts blend per vertex inside a narrow band around each part boundary).
 */
struct GroundTruth {
    Mesh rest;
    std::vector<GtJoint> joints;
    Eigen::VectorXi labels;        ///< per-vertex part label in [0, n_parts)
    int n_parts = 1;
    std::vector<int> part_parent;  ///< part tree, -1 at root
    std::vector<int> part_joint;   ///< joint driving each non-root part
    std::vector<std::vector<std::pair<int, double>>> skin;  ///< per-vertex (part, weight)
};

inline constexpr double kBlendBandMm = 5.0;

namespace detail {

inline Mesh orient_outward(Eigen::MatrixX3d V, Eigen::MatrixX3i F)
{
    Mesh m = build_halfedge(V, F);
    if (mesh_volume(m) < 0.0) {
        F.col(1).swap(F.col(2));
        m = build_halfedge(V, F);
    }
    return m;
}

// pipe aligned with +x, x in [-L/2, L/2], closed with triangle-fan caps
inline GroundTruth make_pipe(double length, double radius,
                             const std::vector<double>& fractions, double tess)
{
    const int n_around = std::max(8, static_cast<int>(std::lround(2.0 * M_PI * radius / tess)));
    const int n_seg = std::max(2, static_cast<int>(std::lround(length / tess)));

    std::vector<Eigen::Vector3d> verts;
    for (int i = 0; i <= n_seg; ++i) {
        double x = -0.5 * length + length * i / n_seg;
        for (int j = 0; j < n_around; ++j) {
            double a = 2.0 * M_PI * j / n_around;
            verts.emplace_back(x, radius * std::cos(a), radius * std::sin(a));
        }
    }
    int cap0 = static_cast<int>(verts.size());
    verts.emplace_back(-0.5 * length, 0, 0);
    int cap1 = static_cast<int>(verts.size());
    verts.emplace_back(0.5 * length, 0, 0);

    auto rv = [&](int i, int j) { return i * n_around + (j % n_around); };
    std::vector<Eigen::Vector3i> faces;
    for (int i = 0; i < n_seg; ++i) {
        for (int j = 0; j < n_around; ++j) {
            faces.emplace_back(rv(i, j), rv(i, j + 1), rv(i + 1, j + 1));
            faces.emplace_back(rv(i, j), rv(i + 1, j + 1), rv(i + 1, j));
        }
    }
    for (int j = 0; j < n_around; ++j) {
        faces.emplace_back(cap0, rv(0, j + 1), rv(0, j));
        faces.emplace_back(cap1, rv(n_seg, j), rv(n_seg, j + 1));
    }

    Eigen::MatrixX3d V(verts.size(), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) { V.row(static_cast<int>(i)) = verts[i]; }
    Eigen::MatrixX3i F(faces.size(), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) { F.row(static_cast<int>(i)) = faces[i]; }

    GroundTruth gt;
    gt.rest = orient_outward(V, F);
    gt.n_parts = static_cast<int>(fractions.size()) + 1;
    gt.part_parent.assign(gt.n_parts, -1);
    gt.part_joint.assign(gt.n_parts, -1);
    for (std::size_t j = 0; j < fractions.size(); ++j) {
        double x = (fractions[j] - 0.5) * length;
        gt.joints.push_back({{x, 0, 0}, {0, 0, 1}});  // in-plane hinge
        gt.part_parent[j + 1] = static_cast<int>(j);
        gt.part_joint[j + 1] = static_cast<int>(j);
    }

    const int n = gt.rest.n_vertices();
    gt.labels.resize(n);
    gt.skin.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = gt.rest.vertices(i, 0);
        int part = 0;
        for (double f : fractions) {
            if (x > (f - 0.5) * length) { ++part; }
        }
        gt.labels[i] = part;
        // blend with the neighbor across the nearest joint plane when inside the band
        gt.skin[i] = {{part, 1.0}};
        for (std::size_t j = 0; j < fractions.size(); ++j) {
            double d = x - (fractions[j] - 0.5) * length;  // signed distance to joint plane
            if (std::abs(d) < 0.5 * kBlendBandMm) {
                double w_hi = std::clamp(d / kBlendBandMm + 0.5, 0.0, 1.0);
                gt.skin[i] = {{static_cast<int>(j), 1.0 - w_hi}, {static_cast<int>(j) + 1, w_hi}};
                break;
            }
        }
    }
    return gt;
}

// ---- marching tetrahedra over an implicit union of capsules (star) ----

inline double capsule_sdf(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                          const Eigen::Vector3d& b, double r)
{
    Eigen::Vector3d ab = b - a;
    double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).norm() - r;
}

struct MarchingTets {
    // even permutations (i,a,b,c) of (0,1,2,3) keyed by leading corner
    static constexpr int kSingle[4][4] = {
        {0, 1, 2, 3}, {1, 0, 3, 2}, {2, 0, 1, 3}, {3, 0, 2, 1}};
    // even permutations (i,j,k,l) with {i,j} the inside pair
    static constexpr int kDouble[6][4] = {{0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2},
                                          {1, 2, 0, 3}, {1, 3, 2, 0}, {2, 3, 0, 1}};

    template <class Field>
    static Mesh extract(const Field& sdf, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi,
                        double cell)
    {
        Eigen::Vector3i dims;
        for (int k = 0; k < 3; ++k) {
            dims[k] = std::max(2, static_cast<int>(std::ceil((hi[k] - lo[k]) / cell)) + 1);
        }
        auto gid = [&](int x, int y, int z) {
            return (static_cast<std::int64_t>(z) * dims.y() + y) * dims.x() + x;
        };
        auto gpos = [&](int x, int y, int z) {
            return Eigen::Vector3d(lo.x() + cell * x, lo.y() + cell * y, lo.z() + cell * z);
        };

        std::vector<double> f(static_cast<std::size_t>(dims.prod()));
        for (int z = 0; z < dims.z(); ++z) {
            for (int y = 0; y < dims.y(); ++y) {
                for (int x = 0; x < dims.x(); ++x) {
                    double v = sdf(gpos(x, y, z));
                    if (std::abs(v) < 1e-9) { v = 1e-9; }  // keep crossings off grid points
                    f[static_cast<std::size_t>(gid(x, y, z))] = v;
                }
            }
        }

        std::map<std::pair<std::int64_t, std::int64_t>, int> edge_vertex;
        std::vector<Eigen::Vector3d> verts;
        std::vector<Eigen::Vector3i> faces;

        auto edge_point = [&](std::int64_t ga, std::int64_t gb, const Eigen::Vector3d& pa,
                              const Eigen::Vector3d& pb) {
            auto key = ga < gb ? std::make_pair(ga, gb) : std::make_pair(gb, ga);
            auto it = edge_vertex.find(key);
            if (it != edge_vertex.end()) { return it->second; }
            double fa = f[static_cast<std::size_t>(key.first)];
            double fb = f[static_cast<std::size_t>(key.second)];
            double t = fa / (fa - fb);
            Eigen::Vector3d qa = ga < gb ? pa : pb;
            Eigen::Vector3d qb = ga < gb ? pb : pa;
            int id = static_cast<int>(verts.size());
            verts.emplace_back(qa + t * (qb - qa));
            edge_vertex.emplace(key, id);
            return id;
        };

        // Freudenthal 6-tet cube decomposition: {0, a, a|b, 7} over axis orders
        const int paths[6][2] = {{1, 3}, {1, 5}, {2, 3}, {2, 6}, {4, 5}, {4, 6}};

        for (int z = 0; z + 1 < dims.z(); ++z) {
            for (int y = 0; y + 1 < dims.y(); ++y) {
                for (int x = 0; x + 1 < dims.x(); ++x) {
                    std::int64_t corner_id[8];
                    Eigen::Vector3d corner_p[8];
                    for (int c = 0; c < 8; ++c) {
                        int cx = x + (c & 1), cy = y + ((c >> 1) & 1), cz = z + ((c >> 2) & 1);
                        corner_id[c] = gid(cx, cy, cz);
                        corner_p[c] = gpos(cx, cy, cz);
                    }
                    for (const auto& path : paths) {
                        int tet[4] = {0, path[0], path[1], 7};
                        // normalize to positive orientation
                        Eigen::Vector3d e1 = corner_p[tet[1]] - corner_p[tet[0]];
                        Eigen::Vector3d e2 = corner_p[tet[2]] - corner_p[tet[0]];
                        Eigen::Vector3d e3 = corner_p[tet[3]] - corner_p[tet[0]];
                        if (e1.cross(e2).dot(e3) < 0.0) { std::swap(tet[2], tet[3]); }

                        int mask = 0;
                        for (int c = 0; c < 4; ++c) {
                            if (f[static_cast<std::size_t>(corner_id[tet[c]])] < 0.0) {
                                mask |= 1 << c;
                            }
                        }
                        if (mask == 0 || mask == 15) { continue; }

                        auto ep = [&](int a, int b) {
                            return edge_point(corner_id[tet[a]], corner_id[tet[b]],
                                              corner_p[tet[a]], corner_p[tet[b]]);
                        };

                        int bits = __builtin_popcount(mask);
                        if (bits == 1 || bits == 3) {
                            int lone = -1;
                            for (int c = 0; c < 4; ++c) {
                                bool in = (mask >> c) & 1;
                                if ((bits == 1 && in) || (bits == 3 && !in)) { lone = c; }
                            }
                            const int* p = kSingle[lone];
                            int v0 = ep(p[0], p[1]), v1 = ep(p[0], p[2]), v2 = ep(p[0], p[3]);
                            if (bits == 1) {
                                faces.emplace_back(v0, v1, v2);
                            } else {
                                faces.emplace_back(v0, v2, v1);  // lone corner outside: flip
                            }
                        } else {
                            int row = -1;
                            for (int r = 0; r < 6; ++r) {
                                int m2 = (1 << kDouble[r][0]) | (1 << kDouble[r][1]);
                                if (m2 == mask) { row = r; }
                            }
                            const int* p = kDouble[row];
                            int a = ep(p[0], p[2]), b = ep(p[0], p[3]);
                            int c = ep(p[1], p[3]), d = ep(p[1], p[2]);
                            faces.emplace_back(a, b, c);
                            faces.emplace_back(a, c, d);
                        }
                    }
                }
            }
        }

        Eigen::MatrixX3d V(verts.size(), 3);
        for (std::size_t i = 0; i < verts.size(); ++i) { V.row(static_cast<int>(i)) = verts[i]; }
        Eigen::MatrixX3i F(faces.size(), 3);
        for (std::size_t i = 0; i < faces.size(); ++i) { F.row(static_cast<int>(i)) = faces[i]; }
        return orient_outward(V, F);
    }
};

inline GroundTruth make_star(int arms, double arm_length, double radius, double tess)
{
    std::vector<Eigen::Vector3d> dirs;
    for (int k = 0; k < arms; ++k) {
        double a = 2.0 * M_PI * k / arms;
        dirs.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    auto sdf = [&](const Eigen::Vector3d& p) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& dir : dirs) {
            d = std::min(d, capsule_sdf(p, Eigen::Vector3d::Zero(), dir * arm_length, radius));
        }
        return d;
    };

    double extent = arm_length + 2.0 * radius;
    Eigen::Vector3d lo(-extent, -extent, -2.0 * radius);
    Eigen::Vector3d hi(extent, extent, 2.0 * radius);
    GroundTruth gt;
    gt.rest = MarchingTets::extract(sdf, lo, hi, tess);

    double hub_r = 1.6 * radius;
    gt.n_parts = arms + 1;  // hub + arms
    gt.part_parent.assign(gt.n_parts, -1);
    gt.part_joint.assign(gt.n_parts, -1);
    for (int k = 0; k < arms; ++k) {
        gt.joints.push_back({dirs[k] * hub_r, {0, 0, 1}});
        gt.part_parent[k + 1] = 0;
        gt.part_joint[k + 1] = k;
    }

    const int n = gt.rest.n_vertices();
    gt.labels.resize(n);
    gt.skin.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::Vector3d p = gt.rest.vertices.row(i);
        int arm = 0;
        double best = -2.0;
        for (int k = 0; k < arms; ++k) {
            double along = p.dot(dirs[k]);
            if (along > best) {
                best = along;
                arm = k;
            }
        }
        double along = p.dot(dirs[arm]);
        gt.labels[i] = along > hub_r ? arm + 1 : 0;
        double d = along - hub_r;
        if (std::abs(d) < 0.5 * kBlendBandMm) {
            double w_arm = std::clamp(d / kBlendBandMm + 0.5, 0.0, 1.0);
            gt.skin[i] = {{0, 1.0 - w_arm}, {arm + 1, w_arm}};
        } else {
            gt.skin[i] = {{gt.labels[i], 1.0}};
        }
    }
    return gt;
}

}  // namespace detail

/** @brief Build a watertight genus-0 primitive with its ground truth. */
inline GroundTruth make_primitive(const PrimitiveSpec& spec)
{
    for (std::size_t i = 0; i < spec.joint_fractions.size(); ++i) {
        double f = spec.joint_fractions[i];
        if (!(f > 0.0 && f < 1.0)) { throw Error("joint fraction must lie strictly inside (0,1)"); }
        if (i > 0 && !(f > spec.joint_fractions[i - 1])) {
            throw Error("joint fractions must be sorted ascending");
        }
    }
    switch (spec.kind) {
        case PrimitiveKind::Pipe:
            return detail::make_pipe(spec.length, spec.radius, spec.joint_fractions, spec.tess);
        case PrimitiveKind::Star:
            return detail::make_star(spec.arms, spec.arm_length, spec.radius, spec.tess);
        case PrimitiveKind::Lamp:
            return detail::make_pipe(3.0 * spec.segment_length, spec.radius,
                                     {1.0 / 3.0, 2.0 / 3.0}, spec.tess);
    }
    throw Error("unknown primitive kind");
}

/** @brief Piecewise-linear angle curve over frames, radians. */
struct AngleCurve {
    std::vector<std::pair<int, double>> keyframes;  // (frame, angle), sorted

    double at(int frame) const
    {
        if (keyframes.empty()) { return 0.0; }
        if (frame <= keyframes.front().first) { return keyframes.front().second; }
        if (frame >= keyframes.back().first) { return keyframes.back().second; }
        for (std::size_t i = 1; i < keyframes.size(); ++i) {
            if (frame <= keyframes[i].first) {
                auto [f0, a0] = keyframes[i - 1];
                auto [f1, a1] = keyframes[i];
                double t = f1 == f0 ? 0.0 : double(frame - f0) / double(f1 - f0);
                return a0 + t * (a1 - a0);
            }
        }
        return keyframes.back().second;
    }
};

/** Rigid-part transforms for one set of joint angles (forward kinematics). */
inline std::vector<Eigen::Affine3d> part_transforms(const GroundTruth& gt,
                                                    const std::vector<double>& angles)
{
    std::vector<Eigen::Affine3d> T(gt.n_parts, Eigen::Affine3d::Identity());
    for (int p = 0; p < gt.n_parts; ++p) {
        if (gt.part_parent[p] < 0) { continue; }
        const GtJoint& j = gt.joints[gt.part_joint[p]];
        Eigen::Affine3d rot = Eigen::Translation3d(j.position) *
                              Eigen::AngleAxisd(angles[gt.part_joint[p]], j.axis) *
                              Eigen::Translation3d(-j.position);
        T[p] = T[gt.part_parent[p]] * rot;
    }
    return T;
}

/** Deform the rest mesh by the ground-truth skinning at the given angles. */
inline Eigen::MatrixX3d pose_vertices(const GroundTruth& gt, const std::vector<double>& angles)
{
    auto T = part_transforms(gt, angles);
    Eigen::MatrixX3d out(gt.rest.n_vertices(), 3);
    for (int i = 0; i < gt.rest.n_vertices(); ++i) {
        Eigen::Vector3d rest = gt.rest.vertices.row(i);
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        for (auto [part, w] : gt.skin[i]) { v += w * (T[part] * rest); }
        out.row(i) = v;
    }
    return out;
}

/**
 * @brief Animate the ground truth along per-joint angle curves; frame 0 is
 * the rest pose. Returns one vertex matrix per frame.
 */
inline std::vector<Eigen::MatrixX3d> animate(const GroundTruth& gt,
                                             const std::vector<AngleCurve>& curves, int frames)
{
    if (curves.size() != gt.joints.size()) {
        throw Error("animate: need one angle curve per ground-truth joint");
    }
    std::vector<Eigen::MatrixX3d> out;
    out.reserve(frames);
    for (int t = 0; t < frames; ++t) {
        if (t == 0) {
            out.push_back(gt.rest.vertices);
            continue;
        }
        std::vector<double> angles(curves.size());
        for (std::size_t j = 0; j < curves.size(); ++j) { angles[j] = curves[j].at(t); }
        out.push_back(pose_vertices(gt, angles));
    }
    return out;
}

/** @brief Depth render: z-buffer, back-projected cloud, discontinuity pixels. */
struct RenderResult {
    DepthImage depth;
    PointCloud cloud;
    std::vector<Eigen::Vector2i> discontinuities;
};

inline RenderResult render_depth(const Mesh& mesh, const Camera& cam, double jump_mm = 15.0)
{
    RenderResult r;
    r.depth = rasterize(mesh, cam);
    int count = 0;
    for (double z : r.depth.depth) {
        if (std::isfinite(z)) { ++count; }
    }
    r.cloud.points.resize(count, 3);
    r.cloud.normals.resize(count, 3);
    int at = 0;
    for (int v = 0; v < r.depth.height; ++v) {
        for (int u = 0; u < r.depth.width; ++u) {
            if (!r.depth.valid(u, v)) { continue; }
            Eigen::Vector3d p_cam = r.depth.z(u, v) * cam.pixel_direction(u, v);
            r.cloud.points.row(at) = cam.to_world(p_cam);
            r.cloud.normals.row(at) = face_normal(mesh, r.depth.t(u, v));
            ++at;
        }
    }
    r.discontinuities = depth_discontinuities(r.depth, jump_mm);
    return r;
}

/** Gaussian displacement along each point normal; sigma = 0 is the identity. */
inline PointCloud add_noise(const PointCloud& cloud, double sigma, std::uint64_t seed)
{
    if (sigma < 0.0) { throw Error("noise sigma must be non-negative"); }
    if (sigma == 0.0) { return cloud; }
    PointCloud out = cloud;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    for (int i = 0; i < out.size(); ++i) {
        out.points.row(i) += g(rng) * out.normals.row(i);
    }
    return out;
}

/** @brief Declarative synthetic-scene description (one per dataset). */
struct Scenario {
    PrimitiveSpec spec;
    int frames = 60;
    Camera camera;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    std::vector<AngleCurve> curves;           // radians
    std::vector<double> target_angles = {};   // radians, applied to every joint
    double disc_jump_mm = 15.0;
};

/**
 * @brief Parse a scenario file. Line-oriented "key value..." text; '#' starts
 * a comment. Errors carry the offending line number.
 */
inline Scenario parse_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) { throw Error("cannot open '" + path + "'"); }

    Scenario sc;
    sc.spec.joint_fractions.clear();
    std::map<int, AngleCurve> curves;
    bool have_object = false;

    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) -> ParseError { return {msg, line_no}; };

    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) { line.erase(hash); }
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) { continue; }

        if (key == "object") {
            std::string kind;
            ls >> kind;
            if (kind == "pipe") {
                sc.spec.kind = PrimitiveKind::Pipe;
            } else if (kind == "star") {
                sc.spec.kind = PrimitiveKind::Star;
            } else if (kind == "lamp") {
                sc.spec.kind = PrimitiveKind::Lamp;
            } else {
                throw fail("unknown object kind '" + kind + "'");
            }
            have_object = true;
        } else if (key == "length") {
            if (!(ls >> sc.spec.length)) { throw fail("length needs a number"); }
        } else if (key == "radius") {
            if (!(ls >> sc.spec.radius)) { throw fail("radius needs a number"); }
        } else if (key == "joint") {
            double f;
            if (!(ls >> f)) { throw fail("joint needs a fraction"); }
            sc.spec.joint_fractions.push_back(f);
        } else if (key == "arms") {
            if (!(ls >> sc.spec.arms)) { throw fail("arms needs an integer"); }
        } else if (key == "arm_length") {
            if (!(ls >> sc.spec.arm_length)) { throw fail("arm_length needs a number"); }
        } else if (key == "segment_length") {
            if (!(ls >> sc.spec.segment_length)) { throw fail("segment_length needs a number"); }
        } else if (key == "tess") {
            if (!(ls >> sc.spec.tess)) { throw fail("tess needs a number"); }
        } else if (key == "frames") {
            if (!(ls >> sc.frames) || sc.frames <= 0) {
                throw fail("frames needs a positive integer");
            }
        } else if (key == "camera") {
            if (!(ls >> sc.camera.fx >> sc.camera.fy >> sc.camera.cx >> sc.camera.cy >>
                  sc.camera.width >> sc.camera.height)) {
                throw fail("camera needs fx fy cx cy width height");
            }
        } else if (key == "camera_pose") {
            double p[12];
            for (double& x : p) {
                if (!(ls >> x)) { throw fail("camera_pose needs 12 numbers (row-major 3x4)"); }
            }
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) { sc.camera.rotation(r, c) = p[4 * r + c]; }
                sc.camera.translation[r] = p[4 * r + 3];
            }
        } else if (key == "noise") {
            if (!(ls >> sc.noise_sigma) || sc.noise_sigma < 0.0) {
                throw fail("noise needs a non-negative sigma");
            }
        } else if (key == "seed") {
            if (!(ls >> sc.seed)) { throw fail("seed needs an integer"); }
        } else if (key == "disc_jump") {
            if (!(ls >> sc.disc_jump_mm)) { throw fail("disc_jump needs a number"); }
        } else if (key == "curve") {
            int joint;
            if (!(ls >> joint) || joint < 0) { throw fail("curve needs a joint index"); }
            std::string kf;
            AngleCurve& c = curves[joint];
            while (ls >> kf) {
                auto colon = kf.find(':');
                if (colon == std::string::npos) { throw fail("keyframe must be frame:degrees"); }
                try {
                    int frame = std::stoi(kf.substr(0, colon));
                    double deg = std::stod(kf.substr(colon + 1));
                    c.keyframes.emplace_back(frame, deg * M_PI / 180.0);
                } catch (const std::exception&) {
                    throw fail("malformed keyframe '" + kf + "'");
                }
            }
        } else if (key == "targets") {
            double deg;
            while (ls >> deg) { sc.target_angles.push_back(deg * M_PI / 180.0); }
        } else {
            throw fail("unknown scenario key '" + key + "'");
        }
    }
    if (!have_object) { throw ParseError("scenario never declares an object", line_no); }
    if (sc.spec.kind == PrimitiveKind::Pipe && sc.spec.joint_fractions.empty()) {
        sc.spec.joint_fractions = {0.5};
    }

    int n_joints = 0;
    switch (sc.spec.kind) {
        case PrimitiveKind::Pipe: n_joints = static_cast<int>(sc.spec.joint_fractions.size()); break;
        case PrimitiveKind::Star: n_joints = sc.spec.arms; break;
        case PrimitiveKind::Lamp: n_joints = 2; break;
    }
    sc.curves.assign(n_joints, AngleCurve{});
    for (auto& [j, c] : curves) {
        if (j >= n_joints) {
            throw ParseError("curve references joint " + std::to_string(j) + " but the object has " +
                                 std::to_string(n_joints),
                             0);
        }
        std::sort(c.keyframes.begin(), c.keyframes.end());
        sc.curves[static_cast<std::size_t>(j)] = c;
    }
    return sc;
}

}  // namespace arig
