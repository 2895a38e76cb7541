#pragma once

#include <string>
#include <string_view>

namespace cesarolab {

// Writes to a temp file in the same directory, then renames over the target,
// so readers never observe a partial file.
void write_file_atomic(const std::string& path, std::string_view content);

std::string read_file(const std::string& path);  // throws std::runtime_error if unreadable

std::string iso8601_utc_now();

}  // namespace cesarolab
