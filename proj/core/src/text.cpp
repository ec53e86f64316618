#include "claimnet/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "claimnet/error.hpp"

namespace claimnet {

namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* instance = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || instance == nullptr) {
    throw Error(ErrorKind::Io, std::string("ICU NFC data unavailable: ") +
                                   u_errorName(status));
  }
  return *instance;
}

icu::UnicodeString normalized(const icu::UnicodeString& s) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(s, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string("normalization failed: ") + u_errorName(status));
  }
  return out;
}

}  // namespace

std::string normalize_text(std::string_view s) {
  if (s.empty()) return {};
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u = normalized(u);
  u.foldCase(U_FOLD_CASE_DEFAULT);
  u = normalized(u);

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < u.length();) {
    const UChar32 cp = u.char32At(i);
    i += U16_LENGTH(cp);
    if (u_isUWhiteSpace(cp)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) {
      collapsed.append(static_cast<UChar>(0x20));
      pending_space = false;
    }
    collapsed.append(cp);
  }

  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

}  // namespace claimnet
