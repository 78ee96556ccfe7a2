#include "skillforge/util/fs.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace skillforge::util {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void atomic_write_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += fmt::format(".tmp.{}", ::getpid());
  write_file(tmp, content);
  fs::rename(tmp, path);
}

void copy_tree(const fs::path& from, const fs::path& to) {
  fs::create_directories(to);
  for (const auto& entry : fs::recursive_directory_iterator(
           from, fs::directory_options::skip_permission_denied)) {
    fs::path rel = fs::relative(entry.path(), from);
    fs::path dst = to / rel;
    if (entry.is_directory()) {
      fs::create_directories(dst);
      fs::permissions(dst, entry.status().permissions());
    } else if (entry.is_symlink()) {
      fs::copy_symlink(entry.path(), dst);
    } else if (entry.is_regular_file()) {
      fs::create_directories(dst.parent_path());
      fs::copy_file(entry.path(), dst, fs::copy_options::overwrite_existing);
      fs::permissions(dst, entry.status().permissions());
    }
  }
}

fs::path make_temp_dir(const std::string& prefix) {
  static std::mt19937_64 rng(std::random_device{}());
  fs::path base = fs::temp_directory_path();
  for (int attempt = 0; attempt < 64; ++attempt) {
    fs::path candidate =
        base / fmt::format("{}-{}-{:016x}", prefix, ::getpid(), rng());
    std::error_code ec;
    if (fs::create_directories(candidate, ec) && !ec) return candidate;
  }
  throw std::runtime_error("make_temp_dir: exhausted attempts");
}

}  // namespace skillforge::util
