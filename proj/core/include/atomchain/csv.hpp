#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace atomchain {

/// Shortest round-trip decimal form of x ("nan", "inf", "-inf" for non-finite).
std::string format_double(double x);

/// Writes through `writer` into a sibling temp file and renames it over `path`
/// only on success, so a failed run never leaves a partial file behind.
/// Throws Error(IoError).
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

}  // namespace atomchain
