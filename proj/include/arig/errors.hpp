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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace arig {

/** @brief Base class for all arig exceptions. */
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/** @brief Mesh construction or topology error. */
class MeshError : public Error {
public:
    using Error::Error;
};

/** Undirected edge shared by more than two faces. */
class NonManifoldEdge : public MeshError {
public:
    using MeshError::MeshError;
};

/** Face with a repeated vertex index. */
class DegenerateFace : public MeshError {
public:
    using MeshError::MeshError;
};

/** Two faces traverse a shared edge in the same direction. */
class InconsistentOrientation : public MeshError {
public:
    using MeshError::MeshError;
};

/** Zero Voronoi area or otherwise unusable local geometry. */
class DegenerateGeometry : public MeshError {
public:
    using MeshError::MeshError;
};

/** Operation requires a closed mesh but the input has boundary. */
class NotWatertight : public MeshError {
public:
    using MeshError::MeshError;
};

/** @brief File parsing error, carries a line (text) or byte (binary) offset. */
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t byte = 0)
        : Error(msg + " (line " + std::to_string(line) + ", byte " +
                std::to_string(byte) + ")")
        , line_(line)
        , byte_(byte)
    {
    }
    std::size_t line() const { return line_; }
    std::size_t byte() const { return byte_; }

private:
    std::size_t line_;
    std::size_t byte_;
};

/** Non-triangle face or otherwise unsupported geometric primitive. */
class UnsupportedPrimitive : public Error {
public:
    using Error::Error;
};

/** @brief Numerical failure in a solver or decomposition. */
class NumericalError : public Error {
public:
    using Error::Error;
};

/** Normal-equation matrix is not positive definite. */
class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/** Iterative decomposition failed to converge. */
class NoConvergence : public NumericalError {
public:
    NoConvergence(const std::string& msg, int index)
        : NumericalError(msg + " (index " + std::to_string(index) + ")")
        , index_(index)
    {
    }
    int index() const { return index_; }

private:
    int index_;
};

/** Linear solve failed downstream of construction. */
class SolveFailed : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/** Affinity matrix has a zero-degree row; normalization impossible. */
class DegenerateAffinity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/** A mesh component contains no sampled vertex to propagate from. */
class UnreachableVertex : public Error {
public:
    using Error::Error;
};

/** Curve skeleton contains a cycle and cannot be rigged. */
class CyclicSkeleton : public Error {
public:
    using Error::Error;
};

/** Collision-driven bone subdivision did not converge. */
class RefinementDiverged : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace arig
