#pragma once

#include <stdexcept>
#include <string>

namespace deeprf {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPulse : Error {
  ZeroPulse() : Error("pulse has zero peak nutation") {}
};

struct NotUnimodular : Error {
  explicit NotUnimodular(double dev)
      : Error("|A|^2+|B|^2 deviates from 1 by " + std::to_string(dev)) {}
};

struct FactorizationFailure : Error {
  using Error::Error;
};

struct LayoutOverflow : Error {
  using Error::Error;
};

struct RippleViolation : Error {
  using Error::Error;
};

struct DesignFailure : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  using Error::Error;
};

struct ZeroRoot : Error {
  ZeroRoot() : Error("cannot flip a root at the origin") {}
};

struct AllMasked : Error {
  AllMasked() : Error("every action is masked") {}
};

struct NonFinite : Error {
  using Error::Error;
};

struct UnscaledPulse : Error {
  UnscaledPulse() : Error("pulse has no dwell time set; scale it first") {}
};

struct TooLarge : Error {
  using Error::Error;
};

}  // namespace deeprf
