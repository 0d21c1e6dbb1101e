#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavmec {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Shortest text that parses back to exactly the same double.
std::string format_double(double value);

std::string to_hex(std::uint64_t value);

std::vector<std::string> split(std::string_view text, char delimiter);

}  // namespace uavmec
