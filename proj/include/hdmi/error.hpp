#ifndef HDMI_ERROR_HPP
#define HDMI_ERROR_HPP

#include <stdexcept>
#include <string>

namespace hdmi {

/// Failure categories; the CLI maps these onto its exit codes.
enum class ErrorKind {
  usage,    // bad arguments or configuration
  data,     // malformed or unusable input data
  numeric,  // a computation could not produce a finite result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& what) {
  throw Error(ErrorKind::usage, what);
}
[[noreturn]] inline void fail_data(const std::string& what) {
  throw Error(ErrorKind::data, what);
}
[[noreturn]] inline void fail_numeric(const std::string& what) {
  throw Error(ErrorKind::numeric, what);
}

}  // namespace hdmi

#endif  // HDMI_ERROR_HPP
