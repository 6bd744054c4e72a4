#include "trajlab/io.hpp"

#include <fstream>
#include <sstream>

#include "trajlab/common.hpp"

namespace trajlab {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

std::string content_hash(const std::string& text) { return hex64(fnv1a(text)); }

std::string file_hash(const std::filesystem::path& path) { return content_hash(read_text(path)); }

}  // namespace trajlab
