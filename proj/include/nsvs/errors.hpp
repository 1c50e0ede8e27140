#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsvs {

/// Dimension mismatch or an invalid model/config value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Jacobian with no usable rank (all zeros).
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Feature point at or behind the camera's depth floor.
class BehindCameraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite value found in controller or simulator state.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Joint rate exceeded the configured bound.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ValidationIssue {
  std::string path;
  std::string message;
};

/// Scenario validation failure; carries every issue found, each tagged with
/// its config path (e.g. "gains.cd").
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);

  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

}  // namespace nsvs
