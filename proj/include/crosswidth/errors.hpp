#pragma once

#include <stdexcept>
#include <string>

namespace crosswidth {

// A problem instance violates a structural hypothesis.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace crosswidth
