#pragma once

// Internal JSON helpers shared by the translation units that emit
// byte-stable documents.

#include <string>

#include <json.hpp>

namespace nerpipe::detail {

using ojson = nlohmann::ordered_json;

inline std::string dump_compact(const ojson& value) {
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline std::string dump_pretty(const ojson& value) {
  return value.dump(2, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace nerpipe::detail
