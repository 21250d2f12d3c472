#pragma once

#include <stdexcept>
#include <string>

namespace atompart {

// Error taxonomy shared by library and CLI. The CLI maps invalid input or
// model files to exit code 2 and enumeration/size caps to exit code 3.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidState : std::logic_error {
  using std::logic_error::logic_error;
};

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace atompart
