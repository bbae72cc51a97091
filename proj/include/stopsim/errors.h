#pragma once

#include <stdexcept>
#include <string>

namespace stopsim {

// Input outside the mathematical domain of an operation (tan singularity,
// degenerate bounding box, negative speed).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A value object failed its invariants. `field()` names the offending field.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace stopsim
