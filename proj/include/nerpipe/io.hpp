#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace nerpipe {

// Whole-file helpers. Both throw nerpipe::Error naming the path on failure.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace nerpipe
