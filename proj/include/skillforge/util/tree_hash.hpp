#pragma once

#include <filesystem>
#include <string>

namespace skillforge::util {

std::string sha256_hex(std::string_view data);

// Canonical tree digest: relative paths in sorted order, each contributing
// its path, a type/mode tag (file mode bits, "dir", or symlink target) and,
// for regular files, the content. Two trees hash equal iff they are
// bit-identical under this walk.
std::string hash_tree(const std::filesystem::path& root);

}  // namespace skillforge::util
