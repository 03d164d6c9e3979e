#pragma once

#include <stdexcept>
#include <string>

namespace hrwave {

/// A run produced non-finite or exploding coefficients.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace hrwave
