#ifndef PYROFRONT_ERROR_HPP_
#define PYROFRONT_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pyrofront {

enum class ErrorCode {
  kInvalidArgument = 1,
  kConfig = 2,
  kIo = 3,
  kNumeric = 4,
  kState = 5,
};

// All library failures are reported through this exception type; the C API
// maps `code()` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace pyrofront

#endif  // PYROFRONT_ERROR_HPP_
