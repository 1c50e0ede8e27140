#include "nsvs/errors.hpp"

namespace nsvs {
namespace {

std::string describe(const std::vector<ValidationIssue>& issues) {
  std::string out = "invalid scenario";
  for (const auto& issue : issues) {
    out += "\n  ";
    out += issue.path.empty() ? "<root>" : issue.path;
    out += ": ";
    out += issue.message;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(describe(issues)), issues_(std::move(issues)) {}

}  // namespace nsvs
