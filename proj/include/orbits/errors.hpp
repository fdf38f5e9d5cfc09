#pragma once

#include <stdexcept>

namespace orbits {

// Error classes map onto the CLI exit codes: config 2, physics domain 3,
// numerics 4.

class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class domain_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace orbits
