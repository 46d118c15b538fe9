#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pbtlab {

/// Input violates a documented invariant (shape, trace, positivity, range).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Requested ambient dimension is above the configured dense-storage cap.
class DimensionCapError : public std::length_error {
 public:
  DimensionCapError(std::int64_t requested, std::int64_t cap, const std::string& what)
      : std::length_error(what + ": ambient dimension " + std::to_string(requested) +
                          " exceeds cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::int64_t requested() const noexcept { return requested_; }
  std::int64_t cap() const noexcept { return cap_; }

 private:
  std::int64_t requested_;
  std::int64_t cap_;
};

/// An internal consistency check failed (e.g. an optimizer returned an impossible value).
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace pbtlab
