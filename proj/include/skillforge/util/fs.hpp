#pragma once

#include <filesystem>
#include <string>

namespace skillforge::util {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

// Write-to-temp-then-rename; readers never observe a partial file.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view content);

// Recursive copy preserving file permissions and symlinks.
void copy_tree(const std::filesystem::path& from,
               const std::filesystem::path& to);

// Fresh unique directory under the system temp dir.
std::filesystem::path make_temp_dir(const std::string& prefix);

}  // namespace skillforge::util
