#include "skillforge/util/tree_hash.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <sys/stat.h>

#include "skillforge/util/fs.hpp"

namespace fs = std::filesystem;

namespace skillforge::util {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr);
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  void update(std::string_view data) {
    EVP_DigestUpdate(ctx_, data.data(), data.size());
  }
  std::string hex() {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, digest, &len);
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data);
  return h.hex();
}

std::string hash_tree(const fs::path& root) {
  std::vector<fs::path> entries;
  if (fs::exists(root)) {
    for (const auto& e : fs::recursive_directory_iterator(root))
      entries.push_back(fs::relative(e.path(), root));
  }
  std::sort(entries.begin(), entries.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.generic_string() < b.generic_string();
            });

  Sha256 h;
  for (const auto& rel : entries) {
    fs::path full = root / rel;
    h.update(rel.generic_string());
    h.update(std::string_view("\0", 1));
    auto status = fs::symlink_status(full);
    if (fs::is_symlink(status)) {
      h.update("link:");
      h.update(fs::read_symlink(full).generic_string());
    } else if (fs::is_directory(status)) {
      h.update("dir");
    } else if (fs::is_regular_file(status)) {
      struct stat st {};
      ::lstat(full.c_str(), &st);
      h.update(fmt::format("file:{:o}:", st.st_mode & 07777));
      h.update(read_file(full));
    }
    h.update(std::string_view("\0", 1));
  }
  return h.hex();
}

}  // namespace skillforge::util
