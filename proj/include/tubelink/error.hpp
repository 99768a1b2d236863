#pragma once

#include <stdexcept>
#include <string>

namespace tubelink {

/// Raised for malformed or inconsistent input data (files, proposal sets).
/// Messages name the offending frame/id where possible so CLI users can
/// locate the problem.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tubelink
