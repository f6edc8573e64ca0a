#pragma once

#include <string>
#include <string_view>

namespace refcalib {

// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);
// SHA-256 of a file's contents; throws InvalidArgument if unreadable.
std::string sha256_file(const std::string& path);

}  // namespace refcalib
