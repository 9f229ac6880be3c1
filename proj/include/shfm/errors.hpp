#pragma once

#include <stdexcept>
#include <string>

namespace shfm {

/// Root of every exception thrown by the library.
class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Bad arguments or configuration (CLI exit code 1).
class argument_error : public error {
  public:
    using error::error;
};

class config_error : public argument_error {
  public:
    using argument_error::argument_error;
};

// Malformed or inconsistent data / model input (CLI exit code 2).
class data_error : public error {
  public:
    using error::error;
};

class parse_error : public data_error {
  public:
    parse_error(const std::string &what, std::size_t line)
        : data_error("line " + std::to_string(line) + ": " + what), line_{ line } {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class format_error : public parse_error {
  public:
    using parse_error::parse_error;
};

class label_error : public data_error {
  public:
    using data_error::data_error;
};

class schema_error : public data_error {
  public:
    using data_error::data_error;
};

class shape_error : public data_error {
  public:
    using data_error::data_error;
};

// Non-finite values during prediction or training (CLI exit code 3).
class numeric_error : public error {
  public:
    using error::error;
};

}  // namespace shfm
