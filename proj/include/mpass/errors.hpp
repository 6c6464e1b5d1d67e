#pragma once

#include <stdexcept>
#include <string>

namespace mpass {

/// Malformed or inconsistent input: bad labels, unparsable numbers,
/// parameters outside their admissible range.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A rule was applied to a problem outside its domain of definition
/// (e.g. the Shapley rule on a problem with a null holder).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An exhaustive sweep would exceed the configured case budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mpass
