#pragma once

#include <stdexcept>
#include <string>

namespace gaepoison {

/// Base of every error thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (bad magic, truncation, count mismatch).
class format_error : public error {
 public:
  using error::error;
};

/// Invalid user configuration or parameter combination.
class config_error : public error {
 public:
  using error::error;
};

/// Caller violated an operation precondition (shape or dimension mismatch).
class contract_error : public error {
 public:
  using error::error;
};

/// Non-finite values or failed numerical routine.
class numeric_error : public error {
 public:
  using error::error;
};

/// Input is well-formed but degenerate for the operation (zero-norm model, zero degree).
class degenerate_input_error : public error {
 public:
  using error::error;
};

class io_error : public error {
 public:
  using error::error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw contract_error(what);
}

}  // namespace detail
}  // namespace gaepoison
