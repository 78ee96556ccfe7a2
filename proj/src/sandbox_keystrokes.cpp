#include "skillforge/sandbox/keystrokes.hpp"

namespace skillforge::sandbox {

std::string decode_keystrokes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    // "C--" is checked before "C-c"/"C-d" so escaped literals win.
    if (text.compare(i, 3, "C--") == 0) {
      out += "C-";
      i += 3;
    } else if (text.compare(i, 3, "C-c") == 0) {
      out += '\x03';
      i += 3;
    } else if (text.compare(i, 3, "C-d") == 0) {
      out += '\x04';
      i += 3;
    } else {
      out += text[i];
      ++i;
    }
  }
  return out;
}

std::string encode_keystrokes(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  for (size_t i = 0; i < bytes.size(); ++i) {
    char c = bytes[i];
    if (c == '\x03') {
      out += "C-c";
    } else if (c == '\x04') {
      out += "C-d";
    } else if (c == 'C' && i + 1 < bytes.size() && bytes[i + 1] == '-') {
      out += "C--";
      ++i;
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace skillforge::sandbox
