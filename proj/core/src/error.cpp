#include "hmflow/error.hpp"

namespace hmflow {

namespace {

std::string join_violations(const std::vector<std::string>& violations) {
  std::string msg = "invalid configuration:";
  for (const auto& v : violations) {
    msg += "\n  - ";
    msg += v;
  }
  return msg;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

FlowAbort::FlowAbort(const std::string& what,
                     std::shared_ptr<const FlowState> last)
    : Error(what), last_(std::move(last)) {}

}  // namespace hmflow
