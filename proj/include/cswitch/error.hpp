#pragma once

#include <stdexcept>
#include <string>

namespace cswitch {

/// Invalid input: malformed graphs, configurations, out-of-range parameters.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator cannot produce a number for this panel (empty arm, zero
/// exposure probability).
class EstimatorUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The chain did not mix within the inspected horizon.
class NotMixing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw ValidationError(what);
}

}  // namespace cswitch
