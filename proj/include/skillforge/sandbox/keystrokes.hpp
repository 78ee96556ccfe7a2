#pragma once

#include <string>
#include <string_view>

namespace skillforge::sandbox {

// tmux-style keystroke escapes. The decode table:
//   "C-c" -> 0x03 (Ctrl+C)    "C-d" -> 0x04 (Ctrl+D)
//   "C--" -> literal "C-"     anything else -> itself
// decode is total; encode escapes control bytes and literal "C-" runs so
// decode(encode(x)) == x for every byte string.
std::string decode_keystrokes(std::string_view text);
std::string encode_keystrokes(std::string_view bytes);

}  // namespace skillforge::sandbox
