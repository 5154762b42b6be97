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
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "arig/errors.hpp"
#include "arig/mesh.hpp"
#include "arig/ply.hpp"

namespace arig {

enum class MeshFormat { Auto, Obj, PlyAscii, PlyBinary };

namespace detail {

inline bool ends_with(const std::string& s, const std::string& suffix)
{
    if (s.size() < suffix.size()) { return false; }
    return s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline Mesh load_obj(const std::string& path)
{
    std::ifstream in(path);
    if (!in) { throw Error("cannot open '" + path + "'"); }

    std::vector<Eigen::Vector3d> verts;
    std::vector<Eigen::Vector3i> faces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok) || tok[0] == '#') { continue; }
        if (tok == "v") {
            Eigen::Vector3d p;
            if (!(ls >> p.x() >> p.y() >> p.z())) {
                throw ParseError("malformed OBJ vertex", line_no);
            }
            verts.push_back(p);
        } else if (tok == "f") {
            std::vector<int> idx;
            std::string ref;
            while (ls >> ref) {
                // accept v, v/t, v//n, v/t/n forms; only the vertex index is used
                std::size_t slash = ref.find('/');
                std::string head = slash == std::string::npos ? ref : ref.substr(0, slash);
                int v;
                try {
                    v = std::stoi(head);
                } catch (const std::exception&) {
                    throw ParseError("malformed OBJ face index '" + ref + "'", line_no);
                }
                if (v <= 0 || static_cast<std::size_t>(v) > verts.size()) {
                    throw ParseError("OBJ face index out of range", line_no);
                }
                idx.push_back(v - 1);
            }
            if (idx.size() != 3) {
                throw UnsupportedPrimitive("OBJ face with " + std::to_string(idx.size()) +
                                           " vertices at line " + std::to_string(line_no) +
                                           "; only triangles are supported");
            }
            faces.emplace_back(idx[0], idx[1], idx[2]);
        }
        // vn/vt/o/g/s/usemtl/mtllib are ignored
    }

    Eigen::MatrixX3d V(verts.size(), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) { V.row(static_cast<int>(i)) = verts[i]; }
    Eigen::MatrixX3i F(faces.size(), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) { F.row(static_cast<int>(i)) = faces[i]; }
    return build_halfedge(V, F);
}

inline Mesh load_ply_mesh(const std::string& path)
{
    ply::File f = ply::read(path);
    const ply::Element* ve = f.find("vertex");
    if (!ve) { throw ParseError("PLY file has no vertex element", 0); }
    int xi = ve->property_index("x");
    int yi = ve->property_index("y");
    int zi = ve->property_index("z");
    if (xi < 0 || yi < 0 || zi < 0) { throw ParseError("PLY vertex element lacks x/y/z", 0); }

    Eigen::MatrixX3d V(ve->count, 3);
    for (std::size_t i = 0; i < ve->count; ++i) {
        V(static_cast<int>(i), 0) = ve->scalars[xi][i];
        V(static_cast<int>(i), 1) = ve->scalars[yi][i];
        V(static_cast<int>(i), 2) = ve->scalars[zi][i];
    }

    const ply::Element* fe = f.find("face");
    std::size_t nf = fe ? fe->count : 0;
    Eigen::MatrixX3i F(nf, 3);
    if (fe) {
        int li = fe->property_index("vertex_indices");
        if (li < 0) { li = fe->property_index("vertex_index"); }
        if (li < 0) { throw ParseError("PLY face element lacks vertex_indices", 0); }
        for (std::size_t i = 0; i < nf; ++i) {
            const auto& idx = fe->lists[li][i];
            if (idx.size() != 3) {
                throw UnsupportedPrimitive("PLY face " + std::to_string(i) + " has " +
                                           std::to_string(idx.size()) +
                                           " vertices; only triangles are supported");
            }
            for (int k = 0; k < 3; ++k) { F(static_cast<int>(i), k) = static_cast<int>(idx[k]); }
        }
    }
    return build_halfedge(V, F);
}

}  // namespace detail

/**
 * @brief Load an OBJ or PLY (ASCII / binary little-endian) triangle mesh.
 * Format chosen by file extension.
 */
inline Mesh load_mesh(const std::string& path)
{
    if (detail::ends_with(path, ".obj") || detail::ends_with(path, ".OBJ")) {
        return detail::load_obj(path);
    }
    if (detail::ends_with(path, ".ply") || detail::ends_with(path, ".PLY")) {
        return detail::load_ply_mesh(path);
    }
    throw Error("unsupported mesh extension on '" + path + "' (expected .obj or .ply)");
}

/**
 * @brief Save a mesh; PLY files default to float64 ASCII, and positions
 * round-trip bit-exactly through save/load.
 */
inline void save_mesh(const Mesh& mesh, const std::string& path,
                      MeshFormat format = MeshFormat::Auto)
{
    if (format == MeshFormat::Auto) {
        format = detail::ends_with(path, ".obj") || detail::ends_with(path, ".OBJ")
                     ? MeshFormat::Obj
                     : MeshFormat::PlyAscii;
    }
    if (format == MeshFormat::Obj) {
        std::ofstream out(path);
        if (!out) { throw Error("cannot open '" + path + "' for writing"); }
        char buf[128];
        for (int i = 0; i < mesh.n_vertices(); ++i) {
            std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", mesh.vertices(i, 0),
                          mesh.vertices(i, 1), mesh.vertices(i, 2));
            out << buf;
        }
        for (int f = 0; f < mesh.n_faces(); ++f) {
            out << "f " << mesh.faces(f, 0) + 1 << " " << mesh.faces(f, 1) + 1 << " "
                << mesh.faces(f, 2) + 1 << "\n";
        }
        return;
    }

    ply::Writer w(path, format == MeshFormat::PlyBinary);
    w.element("vertex", static_cast<std::size_t>(mesh.n_vertices()));
    w.property("double", "x");
    w.property("double", "y");
    w.property("double", "z");
    w.element("face", static_cast<std::size_t>(mesh.n_faces()));
    w.list_property("vertex_indices");
    w.end_header();
    for (int i = 0; i < mesh.n_vertices(); ++i) {
        w.write_double(mesh.vertices(i, 0));
        w.write_double(mesh.vertices(i, 1));
        w.write_double(mesh.vertices(i, 2));
        w.end_row();
    }
    for (int f = 0; f < mesh.n_faces(); ++f) {
        w.write_count(3);
        w.write_int(mesh.faces(f, 0));
        w.write_int(mesh.faces(f, 1));
        w.write_int(mesh.faces(f, 2));
        w.end_row();
    }
}

}  // namespace arig
