#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (e.g. tangent projection at an
/// off-manifold point).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a closed-form formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Closest-point projection requested outside the tubular neighbourhood.
class ProjectionError : public Error {
 public:
  struct GridIndex {
    std::size_t row;
    std::size_t col;
  };

  explicit ProjectionError(const std::string& what,
                           std::optional<GridIndex> where = std::nullopt)
      : Error(what), where_(where) {}

  const std::optional<GridIndex>& where() const noexcept { return where_; }

 private:
  std::optional<GridIndex> where_;
};

/// Malformed or truncated map / checkpoint file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Every violation found while validating a run configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

struct FlowState;

/// Runtime abort of the flow. Carries the last accepted state so the caller
/// can dump it.
class FlowAbort : public Error {
 public:
  FlowAbort(const std::string& what, std::shared_ptr<const FlowState> last);

  const std::shared_ptr<const FlowState>& last_state() const noexcept {
    return last_;
  }

 private:
  std::shared_ptr<const FlowState> last_;
};

class EnergyIncreaseError : public FlowAbort {
 public:
  using FlowAbort::FlowAbort;
};

class LatticeFloorError : public FlowAbort {
 public:
  using FlowAbort::FlowAbort;
};

}  // namespace hmflow
