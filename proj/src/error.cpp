#include "occupancy/error.hpp"

namespace occupancy {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::out_of_fragment: return "out-of-fragment";
    case ErrorCode::degenerate_box: return "degenerate-box";
    case ErrorCode::empty_set: return "empty-set";
    case ErrorCode::provider_timeout: return "provider-timeout";
    case ErrorCode::protocol_parse_error: return "protocol-parse-error";
    case ErrorCode::no_confident_keypoints: return "no-confident-keypoints";
    case ErrorCode::no_samples: return "no-samples";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::schema_version_mismatch: return "schema-version-mismatch";
    case ErrorCode::invalid_resolution: return "invalid-resolution";
    case ErrorCode::insufficient_history: return "insufficient-history";
    case ErrorCode::out_of_order_frame: return "out-of-order-frame";
  }
  return "unknown";
}

}  // namespace occupancy
