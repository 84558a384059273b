#pragma once

#include <string>
#include <string_view>

namespace tabcheck {

std::string sha256_hex(std::string_view bytes);

/// CRLF and lone CR become LF; trailing newlines are trimmed.
std::string canonicalize_csv(std::string_view text);

/// sha256_hex(canonicalize_csv(text)).
std::string csv_digest(std::string_view text);

}  // namespace tabcheck
