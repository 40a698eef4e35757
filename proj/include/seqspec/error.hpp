#pragma once

#include <stdexcept>
#include <string>

namespace seqspec {

/// Invalid input: bad parameters, dimension mismatch, out-of-range times.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to reach its tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

}  // namespace detail
}  // namespace seqspec
