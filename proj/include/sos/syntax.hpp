// Error type shared by the bundled concrete-syntax parsers.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sos {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : std::runtime_error("syntax error at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace sos
