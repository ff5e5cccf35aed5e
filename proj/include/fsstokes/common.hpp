#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace fsstokes {

using Vec2 = Eigen::Vector2d;

/// Source term a(x, t) of the free-surface equation, x horizontal.
using SourceFn = std::function<double(double x, double t)>;

/// Bad or degenerate geometry (non-positive thickness, unordered nodes, ...).
class GeometryError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Direct factorization failed or produced an unacceptable residual.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An iteration (Picard, implicit coupling) ran out of iterations.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double last_change)
      : std::runtime_error(what), last_change_(last_change) {}
  double last_change() const noexcept { return last_change_; }

private:
  double last_change_;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

inline double zero_source(double, double) { return 0.0; }

}  // namespace fsstokes
