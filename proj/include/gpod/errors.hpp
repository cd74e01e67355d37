#pragma once

#include <stdexcept>
#include <string>

namespace gpod {

enum class ErrorKind {
  input,            // malformed or non-finite data
  size,             // dimension / count preconditions
  parameter,        // out-of-range numeric parameter
  config,           // inconsistent configuration or provenance
  degenerate_graph, // zero or vanishing degrees
  numerical,        // solver failure
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "input error";
    case ErrorKind::size: return "size error";
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::config: return "configuration error";
    case ErrorKind::degenerate_graph: return "degenerate graph";
    case ErrorKind::numerical: return "numerical error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace gpod
