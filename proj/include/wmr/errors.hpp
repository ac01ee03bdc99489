#pragma once

#include <stdexcept>
#include <string>

namespace wmr {

/// An iterative numeric routine (SVD, quadrature, inner solver) failed to
/// reach its tolerance within the iteration budget.
struct numeric_failure : std::runtime_error {
  explicit numeric_failure(const std::string& msg) : std::runtime_error(msg) {}
};

/// Inputs do not describe a valid problem instance (dimension mismatch,
/// non-orthonormal factors, inconsistent angles, ...).
struct invalid_instance : std::invalid_argument {
  explicit invalid_instance(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A principal angle is too close to 0 or 90 degrees for the adapted-basis
/// construction, which divides by sin of the angle.
struct degenerate_angle : invalid_instance {
  explicit degenerate_angle(const std::string& msg) : invalid_instance(msg) {}
};

/// Weight vector violates the positivity / consistency requirements.
struct invalid_weights : std::invalid_argument {
  explicit invalid_weights(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Bad user-supplied configuration (CLI / JSON).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A requested quantity is mathematically undefined for the given input
/// (e.g. relative error against the zero matrix).
struct undefined_value : std::domain_error {
  explicit undefined_value(const std::string& msg) : std::domain_error(msg) {}
};

}  // namespace wmr
