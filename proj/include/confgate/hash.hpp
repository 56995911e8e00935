#pragma once

#include <cstddef>
#include <string>

namespace confgate {

std::string sha256_hex(const void* data, std::size_t size);
std::string sha256_file(const std::string& path);

}  // namespace confgate
