#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace syrenn {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed network text or JSON. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A layer or network whose parameters violate the layer invariants.
class NetworkError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

enum class GeometryErrc {
    NonFinite,
    TooFewVertices,
    RepeatedVertex,
    NonCoplanar,
    NonConvex,
    Clockwise,
    Degenerate,
    Parallel,
    AmbiguousPattern,
    DegenerateRegion,
};

const char* to_string(GeometryErrc kind) noexcept;

class GeometryError : public Error {
public:
    GeometryError(GeometryErrc kind, const std::string& detail)
        : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}
    GeometryErrc kind() const noexcept { return kind_; }

private:
    GeometryErrc kind_;
};

/// The Extend worklist grew past the configured region budget.
class ResourceError : public Error {
public:
    ResourceError(std::size_t partial_regions, std::size_t budget)
        : Error("region budget of " + std::to_string(budget) + " exceeded after " +
                std::to_string(partial_regions) + " regions"),
          partial_(partial_regions), budget_(budget) {}
    std::size_t partial_regions() const noexcept { return partial_; }
    std::size_t budget() const noexcept { return budget_; }

private:
    std::size_t partial_;
    std::size_t budget_;
};

} // namespace syrenn
