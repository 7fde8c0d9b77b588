#pragma once

#include <stdexcept>
#include <string>

namespace qdc {

// Invalid user input: bad config key/value, out-of-range parameter,
// inconsistent job description.  CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A numerical routine could not reach the requested accuracy
// (quadrature failed to converge, iteration limit hit).  Exit code 3.
class tolerance_error : public std::runtime_error {
public:
  tolerance_error(const std::string& what, double achieved, double requested)
      : std::runtime_error(what), achieved_(achieved), requested_(requested) {}
  double achieved() const noexcept { return achieved_; }
  double requested() const noexcept { return requested_; }

private:
  double achieved_;
  double requested_;
};

// Filesystem failure while writing results.  Exit code 4.
class io_error : public std::runtime_error {
public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdc
