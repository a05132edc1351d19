#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace clarion {

/// Lowercases and splits on runs of non-alphanumeric ASCII characters.
/// Bytes >= 0x80 are kept as token characters so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace clarion
