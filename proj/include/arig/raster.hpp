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
#include <limits>
#include <vector>

#include "arig/camera.hpp"
#include "arig/geometry.hpp"
#include "arig/mesh.hpp"

namespace arig {

/** @brief Z-buffer with per-pixel source triangle ids; depth is camera z in mm. */
struct DepthImage {
    int width = 0;
    int height = 0;
    std::vector<double> depth;  ///< row-major, infinity = background
    std::vector<int> tri;       ///< source triangle, -1 = background

    double& z(int u, int v) { return depth[static_cast<std::size_t>(v) * width + u]; }
    double z(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
    int& t(int u, int v) { return tri[static_cast<std::size_t>(v) * width + u]; }
    int t(int u, int v) const { return tri[static_cast<std::size_t>(v) * width + u]; }
    bool valid(int u, int v) const { return std::isfinite(z(u, v)); }
};

/**
 * @brief Rasterize the camera-facing side of a mesh into a depth buffer.
 *
 * Pixel (u,v) samples the ray through image coordinates (u,v) exactly, and
 * the stored depth is the ray-plane intersection with the source triangle,
 * so back-projected points lie on their triangle to machine precision.
 */
inline DepthImage rasterize(const Mesh& mesh, const Camera& cam)
{
    DepthImage img;
    img.width = cam.width;
    img.height = cam.height;
    img.depth.assign(static_cast<std::size_t>(cam.width) * cam.height,
                     std::numeric_limits<double>::infinity());
    img.tri.assign(img.depth.size(), -1);

    const int nv = mesh.n_vertices();
    Eigen::MatrixX3d pc(nv, 3);  // camera-space positions
    for (int i = 0; i < nv; ++i) { pc.row(i) = cam.to_camera(mesh.vertices.row(i)); }

    for (int f = 0; f < mesh.n_faces(); ++f) {
        Eigen::Vector3d a = pc.row(mesh.faces(f, 0));
        Eigen::Vector3d b = pc.row(mesh.faces(f, 1));
        Eigen::Vector3d c = pc.row(mesh.faces(f, 2));
        if (a.z() <= 1e-9 || b.z() <= 1e-9 || c.z() <= 1e-9) { continue; }

        Eigen::Vector3d n = (b - a).cross(c - a);
        if (n.norm() < 1e-300) { continue; }
        // front-facing only: triangle normal opposes the view ray to its centroid
        Eigen::Vector3d centroid = (a + b + c) / 3.0;
        if (n.dot(centroid) >= 0.0) { continue; }
        double plane_d = n.dot(a);

        auto screen = [&](const Eigen::Vector3d& p) {
            return Eigen::Vector2d(cam.fx * p.x() / p.z() + cam.cx,
                                   cam.fy * p.y() / p.z() + cam.cy);
        };
        Eigen::Vector2d sa = screen(a), sb = screen(b), sc = screen(c);

        int u0 = std::max(0, static_cast<int>(std::ceil(std::min({sa.x(), sb.x(), sc.x()}))));
        int u1 = std::min(cam.width - 1,
                          static_cast<int>(std::floor(std::max({sa.x(), sb.x(), sc.x()}))));
        int v0 = std::max(0, static_cast<int>(std::ceil(std::min({sa.y(), sb.y(), sc.y()}))));
        int v1 = std::min(cam.height - 1,
                          static_cast<int>(std::floor(std::max({sa.y(), sb.y(), sc.y()}))));
        if (u0 > u1 || v0 > v1) { continue; }

        double area = (sb - sa).x() * (sc - sa).y() - (sb - sa).y() * (sc - sa).x();
        if (std::abs(area) < 1e-300) { continue; }

        for (int v = v0; v <= v1; ++v) {
            for (int u = u0; u <= u1; ++u) {
                Eigen::Vector2d p(u, v);
                double w0 = (sb - p).x() * (sc - p).y() - (sb - p).y() * (sc - p).x();
                double w1 = (sc - p).x() * (sa - p).y() - (sc - p).y() * (sa - p).x();
                double w2 = (sa - p).x() * (sb - p).y() - (sa - p).y() * (sb - p).x();
                bool inside = area > 0.0 ? (w0 >= 0 && w1 >= 0 && w2 >= 0)
                                         : (w0 <= 0 && w1 <= 0 && w2 <= 0);
                if (!inside) { continue; }
                Eigen::Vector3d dir = cam.pixel_direction(u, v);
                double denom = n.dot(dir);
                if (std::abs(denom) < 1e-300) { continue; }
                double depth = plane_d / denom;  // ray parameter equals camera z
                if (depth <= 0.0) { continue; }
                if (depth < img.z(u, v)) {
                    img.z(u, v) = depth;
                    img.t(u, v) = f;
                }
            }
        }
    }
    return img;
}

/**
 * Pixels whose 8-neighborhood depth range exceeds jump_mm, or that border a
 * background pixel; only foreground pixels are reported, row-major order.
 */
inline std::vector<Eigen::Vector2i> depth_discontinuities(const DepthImage& img,
                                                          double jump_mm = 15.0)
{
    std::vector<Eigen::Vector2i> out;
    for (int v = 0; v < img.height; ++v) {
        for (int u = 0; u < img.width; ++u) {
            if (!img.valid(u, v)) { continue; }
            double lo = img.z(u, v), hi = lo;
            bool borders_background = false;
            for (int dv = -1; dv <= 1 && !borders_background; ++dv) {
                for (int du = -1; du <= 1; ++du) {
                    if (du == 0 && dv == 0) { continue; }
                    int uu = u + du, vv = v + dv;
                    if (uu < 0 || vv < 0 || uu >= img.width || vv >= img.height) { continue; }
                    if (!img.valid(uu, vv)) {
                        borders_background = true;
                        break;
                    }
                    lo = std::min(lo, img.z(uu, vv));
                    hi = std::max(hi, img.z(uu, vv));
                }
            }
            if (borders_background || hi - lo > jump_mm) { out.emplace_back(u, v); }
        }
    }
    return out;
}

}  // namespace arig
