#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace credreason {

// Number of Unicode scalar values in a UTF-8 string. Character limits in the
// debate protocol are counted this way; byte counts would misreport Korean text.
std::size_t utf8_length(std::string_view text);

// FNV-1a 64-bit digest, hex encoded. Used for evidence fingerprints and
// journal prompt digests; stability across runs matters, cryptography does not.
std::string fnv1a_hex(std::string_view data);

std::string to_lower(std::string_view text);

std::string trim(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

bool contains_ci(std::string_view haystack, std::string_view needle);

// Replaces every occurrence of `{key}` in the template text.
std::string substitute_placeholder(std::string text, std::string_view key, std::string_view value);

}  // namespace credreason
