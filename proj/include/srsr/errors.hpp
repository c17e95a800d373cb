// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace srsr {

/// Base class for all pipeline errors. Subclasses map onto distinct CLI
/// exit codes, so keep the taxonomy coarse.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible tensor/grid shapes.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& what) : Error("dimension error: " + what) {}
};

/// Non-finite values where finite ones are required (inputs or mid-run divergence).
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error("numeric error: " + what) {}
};

/// A mask that zeroes out everything a normalization step needs.
class DegenerateMaskError : public Error {
public:
    explicit DegenerateMaskError(const std::string& what)
        : Error("degenerate mask: " + what) {}
};

/// Bad configuration: manifest fields, layout/pair inconsistencies,
/// missing per-layer masks, invalid guidance scale.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

/// Block-pooling resample asked for with incompatible dimensions.
class ResampleError : public Error {
public:
    explicit ResampleError(const std::string& what) : Error("resample error: " + what) {}
};

/// Unknown tag / step in a diagnostics selector.
class SelectorError : public Error {
public:
    explicit SelectorError(const std::string& what) : Error("selector error: " + what) {}
};

/// Region metric over an empty region.
class RegionError : public Error {
public:
    explicit RegionError(const std::string& what) : Error("empty region: " + what) {}
};

/// File system / parse failures.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

/// compare_runs over runs with incompatible configurations.
class ComparisonError : public Error {
public:
    explicit ComparisonError(const std::string& what) : Error("comparison error: " + what) {}
};

} // namespace srsr
