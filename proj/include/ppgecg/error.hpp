#pragma once

#include <stdexcept>
#include <string>

namespace ppgecg {

// Invalid input (bad file, bad shape, bad flag value). The CLI maps this
// to exit code 1; anything else escaping a command maps to exit code 2.
class UserError : public std::runtime_error {
 public:
  explicit UserError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ppgecg
