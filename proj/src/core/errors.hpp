#pragma once

#include <stdexcept>
#include <string>

namespace chanprot {

// Dimension or precondition violations on public entry points.
class DimensionError : public std::invalid_argument {
public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// QR detected a (numerically) rank-deficient matrix. Callers decide policy.
class RankDeficiencyError : public std::runtime_error {
public:
  explicit RankDeficiencyError(const std::string& what) : std::runtime_error(what) {}
};

// The homotopy path hit a singular active-set Gram system.
class DegeneratePathError : public std::runtime_error {
public:
  explicit DegeneratePathError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chanprot
