#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace semfield::detail {

inline constexpr char32_t kInvalidCodePoint = 0xFFFFFFFF;

/// Decodes one code point starting at `pos` and advances `pos`. Malformed
/// sequences yield kInvalidCodePoint and advance by one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

/// Simple one-to-one lowercase mapping for Latin and Cyrillic.
char32_t fold_case(char32_t cp);

}  // namespace semfield::detail
