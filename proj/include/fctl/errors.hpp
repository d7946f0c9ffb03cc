#pragma once

#include <stdexcept>
#include <string>

namespace fctl {

/// The queue has mean arrivals per cycle >= green slots.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, double rho)
      : std::runtime_error(what), rho_(rho) {}
  double rho() const { return rho_; }

 private:
  double rho_;
};

/// Root finding, linear solve or inversion could not meet its tolerance.
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fctl
