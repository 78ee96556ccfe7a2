#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

namespace skillforge::prompts {

struct PromptAsset {
  const char* name;
  const char* text;
};

// Generated from assets/prompts/*.txt at build time.
extern const PromptAsset kAssets[];
extern const std::size_t kAssetCount;

// Raw template text; throws std::out_of_range for unknown names.
std::string_view asset(std::string_view name);

// asset(name) with {placeholder} substitution applied.
std::string render(std::string_view name,
                   const std::map<std::string, std::string>& values);

}  // namespace skillforge::prompts
