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
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "arig/errors.hpp"
#include "arig/ply.hpp"

namespace arig {

/** @brief Oriented point cloud in mm with unit normals. */
struct PointCloud {
    Eigen::MatrixX3d points;
    Eigen::MatrixX3d normals;

    int size() const { return static_cast<int>(points.rows()); }
};

/** Load a PLY cloud with x,y,z,nx,ny,nz properties. */
inline PointCloud load_pointcloud(const std::string& path)
{
    ply::File f = ply::read(path);
    const ply::Element* ve = f.find("vertex");
    if (!ve) { throw ParseError("PLY file has no vertex element", 0); }
    const char* names[6] = {"x", "y", "z", "nx", "ny", "nz"};
    int idx[6];
    for (int k = 0; k < 6; ++k) {
        idx[k] = ve->property_index(names[k]);
        if (idx[k] < 0) {
            throw ParseError(std::string("point cloud PLY lacks property '") + names[k] + "'", 0);
        }
    }
    PointCloud c;
    c.points.resize(ve->count, 3);
    c.normals.resize(ve->count, 3);
    for (std::size_t i = 0; i < ve->count; ++i) {
        for (int k = 0; k < 3; ++k) {
            c.points(static_cast<int>(i), k) = ve->scalars[idx[k]][i];
            c.normals(static_cast<int>(i), k) = ve->scalars[idx[3 + k]][i];
        }
    }
    return c;
}

inline void save_pointcloud(const PointCloud& cloud, const std::string& path, bool binary = true)
{
    ply::Writer w(path, binary);
    w.element("vertex", static_cast<std::size_t>(cloud.size()));
    for (const char* n : {"x", "y", "z", "nx", "ny", "nz"}) { w.property("double", n); }
    w.end_header();
    for (int i = 0; i < cloud.size(); ++i) {
        for (int k = 0; k < 3; ++k) { w.write_double(cloud.points(i, k)); }
        for (int k = 0; k < 3; ++k) { w.write_double(cloud.normals(i, k)); }
        w.end_row();
    }
}

/** @brief Depth-discontinuity pixels: one "u v" pair per line. */
inline std::vector<Eigen::Vector2i> load_discontinuities(const std::string& path)
{
    std::ifstream in(path);
    if (!in) { throw Error("cannot open '" + path + "'"); }
    std::vector<Eigen::Vector2i> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') { continue; }
        std::istringstream ls(line);
        int u, v;
        if (!(ls >> u >> v)) { throw ParseError("malformed pixel pair", line_no); }
        out.emplace_back(u, v);
    }
    return out;
}

inline void save_discontinuities(const std::vector<Eigen::Vector2i>& pixels,
                                 const std::string& path)
{
    std::ofstream out(path);
    if (!out) { throw Error("cannot open '" + path + "' for writing"); }
    for (const auto& p : pixels) { out << p.x() << " " << p.y() << "\n"; }
}

}  // namespace arig
