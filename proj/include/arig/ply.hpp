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

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arig/errors.hpp"

namespace arig::ply {

enum class Scalar { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

inline std::optional<Scalar> scalar_from_name(const std::string& s)
{
    if (s == "char" || s == "int8") { return Scalar::Int8; }
    if (s == "uchar" || s == "uint8") { return Scalar::UInt8; }
    if (s == "short" || s == "int16") { return Scalar::Int16; }
    if (s == "ushort" || s == "uint16") { return Scalar::UInt16; }
    if (s == "int" || s == "int32") { return Scalar::Int32; }
    if (s == "uint" || s == "uint32") { return Scalar::UInt32; }
    if (s == "float" || s == "float32") { return Scalar::Float32; }
    if (s == "double" || s == "float64") { return Scalar::Float64; }
    return std::nullopt;
}

inline std::size_t scalar_size(Scalar t)
{
    switch (t) {
        case Scalar::Int8:
        case Scalar::UInt8: return 1;
        case Scalar::Int16:
        case Scalar::UInt16: return 2;
        case Scalar::Int32:
        case Scalar::UInt32:
        case Scalar::Float32: return 4;
        case Scalar::Float64: return 8;
    }
    return 0;
}

struct Property {
    std::string name;
    bool is_list = false;
    Scalar count_type = Scalar::UInt8;  // list only
    Scalar value_type = Scalar::Float64;
};

struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<Property> properties;
    // scalar property values, converted to double, column per property
    std::vector<std::vector<double>> scalars;
    // list property values; empty vector for scalar columns
    std::vector<std::vector<std::vector<double>>> lists;

    int property_index(const std::string& n) const
    {
        for (std::size_t i = 0; i < properties.size(); ++i) {
            if (properties[i].name == n) { return static_cast<int>(i); }
        }
        return -1;
    }
};

struct File {
    bool binary = false;
    std::vector<Element> elements;

    const Element* find(const std::string& name) const
    {
        for (const auto& e : elements) {
            if (e.name == name) { return &e; }
        }
        return nullptr;
    }
};

namespace detail {

inline double read_binary_scalar(std::istream& in, Scalar t, std::size_t byte_offset)
{
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(scalar_size(t)));
    if (!in) { throw ParseError("unexpected end of binary PLY payload", 0, byte_offset); }
    switch (t) {
        case Scalar::Int8: return static_cast<double>(static_cast<std::int8_t>(buf[0]));
        case Scalar::UInt8: return static_cast<double>(buf[0]);
        case Scalar::Int16: {
            std::int16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        case Scalar::UInt16: {
            std::uint16_t v;
            std::memcpy(&v, buf, 2);
            return v;
        }
        case Scalar::Int32: {
            std::int32_t v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case Scalar::UInt32: {
            std::uint32_t v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case Scalar::Float32: {
            float v;
            std::memcpy(&v, buf, 4);
            return v;
        }
        case Scalar::Float64: {
            double v;
            std::memcpy(&v, buf, 8);
            return v;
        }
    }
    return 0.0;
}

inline double parse_ascii_token(std::istringstream& line, std::size_t line_no)
{
    double v;
    if (!(line >> v)) { throw ParseError("missing or malformed PLY value", line_no); }
    return v;
}

}  // namespace detail

/** @brief Parse an ASCII or binary-little-endian PLY file into memory. */
inline File read(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw Error("cannot open '" + path + "'"); }

    File out;
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) { throw ParseError("unexpected end of PLY header", line_no); }
        ++line_no;
        if (!line.empty() && line.back() == '\r') { line.pop_back(); }
        return line;
    };

    if (next_line() != "ply") { throw ParseError("not a PLY file (missing 'ply' magic)", line_no); }

    bool header_done = false;
    while (!header_done) {
        std::istringstream ls(next_line());
        std::string tok;
        ls >> tok;
        if (tok == "comment" || tok == "obj_info" || tok.empty()) { continue; }
        if (tok == "format") {
            std::string fmt, ver;
            ls >> fmt >> ver;
            if (fmt == "ascii") {
                out.binary = false;
            } else if (fmt == "binary_little_endian") {
                out.binary = true;
            } else {
                throw ParseError("unsupported PLY format '" + fmt + "'", line_no);
            }
        } else if (tok == "element") {
            Element e;
            if (!(ls >> e.name >> e.count)) { throw ParseError("malformed element line", line_no); }
            out.elements.push_back(std::move(e));
        } else if (tok == "property") {
            if (out.elements.empty()) { throw ParseError("property before any element", line_no); }
            std::string t1;
            ls >> t1;
            Property p;
            if (t1 == "list") {
                std::string ct, vt;
                ls >> ct >> vt >> p.name;
                auto c = scalar_from_name(ct);
                auto v = scalar_from_name(vt);
                if (!c || !v) { throw ParseError("unknown PLY list type", line_no); }
                p.is_list = true;
                p.count_type = *c;
                p.value_type = *v;
            } else {
                auto v = scalar_from_name(t1);
                if (!v) { throw ParseError("unknown PLY property type '" + t1 + "'", line_no); }
                p.value_type = *v;
                ls >> p.name;
            }
            if (p.name.empty()) { throw ParseError("PLY property without a name", line_no); }
            out.elements.back().properties.push_back(std::move(p));
        } else if (tok == "end_header") {
            header_done = true;
        } else {
            throw ParseError("unknown PLY header token '" + tok + "'", line_no);
        }
    }

    for (auto& e : out.elements) {
        e.scalars.assign(e.properties.size(), {});
        e.lists.assign(e.properties.size(), {});
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
            if (e.properties[p].is_list) {
                e.lists[p].reserve(e.count);
            } else {
                e.scalars[p].reserve(e.count);
            }
        }
        for (std::size_t i = 0; i < e.count; ++i) {
            std::istringstream ls;
            if (!out.binary) {
                if (!std::getline(in, line)) {
                    throw ParseError("unexpected end of ASCII PLY payload", line_no);
                }
                ++line_no;
                ls.str(line);
            }
            for (std::size_t p = 0; p < e.properties.size(); ++p) {
                const Property& prop = e.properties[p];
                if (prop.is_list) {
                    std::size_t n;
                    if (out.binary) {
                        n = static_cast<std::size_t>(detail::read_binary_scalar(
                            in, prop.count_type, static_cast<std::size_t>(in.tellg())));
                    } else {
                        n = static_cast<std::size_t>(detail::parse_ascii_token(ls, line_no));
                    }
                    std::vector<double> vals(n);
                    for (std::size_t k = 0; k < n; ++k) {
                        vals[k] = out.binary
                                      ? detail::read_binary_scalar(
                                            in, prop.value_type,
                                            static_cast<std::size_t>(in.tellg()))
                                      : detail::parse_ascii_token(ls, line_no);
                    }
                    e.lists[p].push_back(std::move(vals));
                } else {
                    double v = out.binary
                                   ? detail::read_binary_scalar(
                                         in, prop.value_type,
                                         static_cast<std::size_t>(in.tellg()))
                                   : detail::parse_ascii_token(ls, line_no);
                    e.scalars[p].push_back(v);
                }
            }
        }
    }
    return out;
}

/** @brief Incremental PLY writer; fixed property layout, ASCII or binary LE. */
class Writer {
public:
    Writer(const std::string& path, bool binary) : out_(path, std::ios::binary), binary_(binary)
    {
        if (!out_) { throw Error("cannot open '" + path + "' for writing"); }
        out_ << "ply\n";
        out_ << (binary_ ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n");
    }

    void element(const std::string& name, std::size_t count) { header_ << "element " << name << " " << count << "\n"; }
    void property(const std::string& type, const std::string& name)
    {
        header_ << "property " << type << " " << name << "\n";
    }
    void list_property(const std::string& name)
    {
        header_ << "property list uchar int " << name << "\n";
    }
    void end_header()
    {
        out_ << header_.str() << "end_header\n";
    }

    void write_double(double v)
    {
        if (binary_) {
            out_.write(reinterpret_cast<const char*>(&v), 8);
        } else {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out_ << sep() << buf;
        }
    }
    void write_int(int v)
    {
        if (binary_) {
            std::int32_t x = v;
            out_.write(reinterpret_cast<const char*>(&x), 4);
        } else {
            out_ << sep() << v;
        }
    }
    void write_count(int v)
    {
        if (binary_) {
            std::uint8_t x = static_cast<std::uint8_t>(v);
            out_.write(reinterpret_cast<const char*>(&x), 1);
        } else {
            out_ << sep() << v;
        }
    }
    void end_row()
    {
        if (!binary_) {
            out_ << "\n";
            row_start_ = true;
        }
    }

private:
    const char* sep()
    {
        if (row_start_) {
            row_start_ = false;
            return "";
        }
        return " ";
    }

    std::ofstream out_;
    std::ostringstream header_;
    bool binary_;
    bool row_start_ = true;
};

}  // namespace arig::ply
