// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace cpd {

/// A component column has zero norm and cannot be normalized.
struct degenerate_component_error : std::runtime_error {
  explicit degenerate_component_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Metric is undefined for the given input (e.g. the zero matrix).
struct undefined_metric_error : std::runtime_error {
  explicit undefined_metric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Closed-form expressions are not defined for this input (coincident
/// eigenvalues or vanishing denominators); callers fall back to the general
/// eigen route.
struct closed_form_undefined : std::runtime_error {
  explicit closed_form_undefined(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operation was called on a value that violates its contract
/// (e.g. congruence on an unnormalized decomposition).
struct contract_violation : std::logic_error {
  explicit contract_violation(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace cpd
