#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occupancy {

enum class ErrorCode {
  invalid_config,
  dimension_mismatch,
  out_of_fragment,
  degenerate_box,
  empty_set,
  provider_timeout,
  protocol_parse_error,
  no_confident_keypoints,
  no_samples,
  io_error,
  schema_version_mismatch,
  invalid_resolution,
  insufficient_history,
  out_of_order_frame,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every recoverable failure in the library is reported through this type;
/// callers branch on code() rather than on the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace occupancy
