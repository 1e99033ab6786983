#pragma once

#include <stdexcept>
#include <string>

namespace gb {

enum class Errc {
  leaf_cell,
  level_out_of_range,
  depth_insufficient,
  grid_mismatch,
  smoothness_mismatch,
  wrong_convention,
  identical_address,
  undefined_ratio,
  infeasible_constraints,
  parse_error,
  invalid_argument,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace gb
