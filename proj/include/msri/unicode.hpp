// UTF-8 handling and NFC normalization. Word forms are treated as sequences
// of Unicode scalar values after NFC, one scalar per symbol.
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace msri::uni {

// Decodes UTF-8 to scalar values. Throws msri::ParseError-free
// std::invalid_argument on malformed input (callers wrap with file context).
std::vector<char32_t> decode_utf8(std::string_view s);

std::string encode_utf8(const std::vector<char32_t>& cps);
std::string encode_utf8(char32_t cp);

// Canonical composition normal form over scalar values.
std::vector<char32_t> nfc(const std::vector<char32_t>& cps);

// Convenience: UTF-8 in, NFC-normalized UTF-8 out.
std::string nfc_utf8(std::string_view s);

int combining_class(char32_t cp);

}  // namespace msri::uni
