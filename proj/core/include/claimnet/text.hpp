#pragma once

#include <string>
#include <string_view>

namespace claimnet {

// Canonical comparison form of a claim text: NFC-normalized, Unicode
// case-folded, every run of Unicode white space collapsed to one ASCII space,
// leading and trailing white space removed. Idempotent. Invalid UTF-8
// sequences are replaced by U+FFFD.
std::string normalize_text(std::string_view s);

}  // namespace claimnet
