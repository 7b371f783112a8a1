#pragma once

#include <stdexcept>
#include <string>

namespace isoradial {

enum class ErrorCode {
  invalid_argument,   // bad parameter value (negative h, beta = 1, ...)
  geometry,           // isoradiality or embedding violated
  window_too_small,   // certified computation hit an inactive/boundary row
  disconnected,       // graph (or requested subgraph) is not connected
  boundary,           // operation requires interior vertices only
  io,                 // file read/write failure
  config,             // malformed or unknown config content
  internal            // broken internal invariant; always a bug
};

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

} // namespace isoradial
