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
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "arig/errors.hpp"

namespace arig {

/**
 * @brief Per-vertex position and unit-normal time series of uniform length;
 * frame 0 is the template pose.
 */
struct TrajectorySet {
    std::vector<Eigen::MatrixX3d> positions;  ///< frame-major, n x 3 each
    std::vector<Eigen::MatrixX3d> normals;

    int frames() const { return static_cast<int>(positions.size()); }
    int n_vertices() const { return frames() > 0 ? static_cast<int>(positions[0].rows()) : 0; }
};

/**
 * Binary layout: magic "TRAJ", u32 frame count, u32 vertex count, then
 * frames x vertices records of 6 float64 (position xyz, normal xyz),
 * little-endian.
 */
inline void save_trajectories(const TrajectorySet& traj, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) { throw Error("cannot open '" + path + "' for writing"); }
    out.write("TRAJ", 4);
    std::uint32_t t = static_cast<std::uint32_t>(traj.frames());
    std::uint32_t n = static_cast<std::uint32_t>(traj.n_vertices());
    out.write(reinterpret_cast<const char*>(&t), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (int f = 0; f < traj.frames(); ++f) {
        for (int i = 0; i < static_cast<int>(n); ++i) {
            double rec[6] = {traj.positions[f](i, 0), traj.positions[f](i, 1),
                             traj.positions[f](i, 2), traj.normals[f](i, 0),
                             traj.normals[f](i, 1),   traj.normals[f](i, 2)};
            out.write(reinterpret_cast<const char*>(rec), sizeof(rec));
        }
    }
}

inline TrajectorySet load_trajectories(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw Error("cannot open '" + path + "'"); }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "TRAJ", 4) != 0) {
        throw ParseError("not a trajectory file (bad magic)", 0, 0);
    }
    std::uint32_t t = 0, n = 0;
    in.read(reinterpret_cast<char*>(&t), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    if (!in) { throw ParseError("truncated trajectory header", 0, 4); }

    TrajectorySet traj;
    traj.positions.assign(t, Eigen::MatrixX3d(n, 3));
    traj.normals.assign(t, Eigen::MatrixX3d(n, 3));
    for (std::uint32_t f = 0; f < t; ++f) {
        for (std::uint32_t i = 0; i < n; ++i) {
            double rec[6];
            in.read(reinterpret_cast<char*>(rec), sizeof(rec));
            if (!in) {
                throw ParseError("truncated trajectory payload", 0,
                                 static_cast<std::size_t>(in.gcount()));
            }
            traj.positions[f].row(i) << rec[0], rec[1], rec[2];
            traj.normals[f].row(i) << rec[3], rec[4], rec[5];
        }
    }
    return traj;
}

}  // namespace arig
