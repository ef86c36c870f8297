#pragma once

#include <stdexcept>
#include <string>

namespace noisegan {

// Base of every error the toolkit throws. Each subclass names one failure
// category so callers (and the CLI exit path) can branch on it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define NOISEGAN_DEFINE_ERROR(Name)                               \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(what) {}       \
    const char* kind() const noexcept override { return #Name; }  \
  };

NOISEGAN_DEFINE_ERROR(DegenerateInput)
NOISEGAN_DEFINE_ERROR(TooShort)
NOISEGAN_DEFINE_ERROR(ShapeError)
NOISEGAN_DEFINE_ERROR(ConfigError)
NOISEGAN_DEFINE_ERROR(NumericalError)
NOISEGAN_DEFINE_ERROR(DataError)
NOISEGAN_DEFINE_ERROR(EnvironmentError)
NOISEGAN_DEFINE_ERROR(IoError)

#undef NOISEGAN_DEFINE_ERROR

}  // namespace noisegan
