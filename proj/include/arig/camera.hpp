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
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "arig/errors.hpp"

namespace arig {

/**
 * @brief Pinhole depth camera: intrinsics in pixels, pose as the rigid
 * world-from-camera transform (p_world = R p_cam + t).
 */
struct Camera {
    double fx = 570.0;
    double fy = 570.0;
    double cx = 319.5;
    double cy = 239.5;
    int width = 640;
    int height = 480;
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d center() const { return translation; }

    Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const
    {
        return rotation.transpose() * (world - translation);
    }
    Eigen::Vector3d to_world(const Eigen::Vector3d& cam) const
    {
        return rotation * cam + translation;
    }

    /// project a world point; returns (u, v, depth); depth <= 0 means behind the camera
    Eigen::Vector3d project(const Eigen::Vector3d& world) const
    {
        Eigen::Vector3d p = to_camera(world);
        if (p.z() <= 0.0) { return {0.0, 0.0, p.z()}; }
        return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy, p.z()};
    }

    /// camera-space direction through a pixel, z = 1
    Eigen::Vector3d pixel_direction(double u, double v) const
    {
        return {(u - cx) / fx, (v - cy) / fy, 1.0};
    }

    bool inside_image(double u, double v) const
    {
        return u >= 0.0 && v >= 0.0 && u <= width - 1 && v <= height - 1;
    }
};

inline Camera load_camera(const std::string& path)
{
    std::ifstream in(path);
    if (!in) { throw Error("cannot open '" + path + "'"); }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("camera JSON: ") + e.what(), 0);
    }
    Camera c;
    try {
        c.fx = j.at("fx").get<double>();
        c.fy = j.at("fy").get<double>();
        c.cx = j.at("cx").get<double>();
        c.cy = j.at("cy").get<double>();
        c.width = j.at("width").get<int>();
        c.height = j.at("height").get<int>();
        auto pose = j.at("pose").get<std::vector<double>>();
        if (pose.size() != 12) {
            throw ParseError("camera pose must hold 12 numbers (row-major 3x4)", 0);
        }
        for (int r = 0; r < 3; ++r) {
            for (int k = 0; k < 3; ++k) { c.rotation(r, k) = pose[4 * r + k]; }
            c.translation[r] = pose[4 * r + 3];
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("camera JSON: ") + e.what(), 0);
    }
    if (c.fx <= 0.0 || c.fy <= 0.0) { throw ParseError("camera focal lengths must be positive", 0); }
    return c;
}

inline void save_camera(const Camera& c, const std::string& path)
{
    nlohmann::json j;
    j["fx"] = c.fx;
    j["fy"] = c.fy;
    j["cx"] = c.cx;
    j["cy"] = c.cy;
    j["width"] = c.width;
    j["height"] = c.height;
    std::vector<double> pose(12);
    for (int r = 0; r < 3; ++r) {
        for (int k = 0; k < 3; ++k) { pose[4 * r + k] = c.rotation(r, k); }
        pose[4 * r + 3] = c.translation[r];
    }
    j["pose"] = pose;
    std::ofstream out(path);
    if (!out) { throw Error("cannot open '" + path + "' for writing"); }
    out << j.dump(2) << "\n";
}

}  // namespace arig
