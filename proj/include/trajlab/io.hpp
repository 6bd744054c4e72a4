#pragma once

#include <filesystem>
#include <string>

namespace trajlab {

std::string read_text(const std::filesystem::path& path);  // ValidationError when missing
void write_text(const std::filesystem::path& path, const std::string& text);
std::string content_hash(const std::string& text);          // hex FNV-1a
std::string file_hash(const std::filesystem::path& path);

}  // namespace trajlab
