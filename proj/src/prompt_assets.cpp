#include "skillforge/synth/prompt_assets.hpp"

#include <stdexcept>

#include "skillforge/util/text.hpp"

namespace skillforge::prompts {

std::string_view asset(std::string_view name) {
  for (std::size_t i = 0; i < kAssetCount; ++i)
    if (name == kAssets[i].name) return kAssets[i].text;
  throw std::out_of_range("unknown prompt asset: " + std::string(name));
}

std::string render(std::string_view name,
                   const std::map<std::string, std::string>& values) {
  return util::render_template(asset(name), values);
}

}  // namespace skillforge::prompts
