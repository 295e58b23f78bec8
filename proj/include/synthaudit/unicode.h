// Copyright 2026 The synthaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SYNTHAUDIT_UNICODE_H_
#define SYNTHAUDIT_UNICODE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 and character-class support for social-media text. The
// classification tables cover the scripts seen in multilingual posts rather
// than the full Unicode database.
namespace synthaudit::unicode {

// Decodes UTF-8. Invalid bytes decode to U+FFFD one byte at a time.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view codepoints);
void AppendUtf8(char32_t cp, std::string& out);

// Number of codepoints in a UTF-8 string.
size_t Length(std::string_view utf8);

bool IsWhitespace(char32_t cp);
bool IsLetter(char32_t cp);
bool IsDigit(char32_t cp);
bool IsApostrophe(char32_t cp);
bool IsPunctuation(char32_t cp);

// Codepoints that start an emoji presentation sequence.
bool IsEmojiBase(char32_t cp);
// Codepoints that extend a preceding emoji (variation selectors, skin tones,
// keycap, tags).
bool IsEmojiModifier(char32_t cp);
bool IsRegionalIndicator(char32_t cp);
inline constexpr char32_t kZeroWidthJoiner = 0x200D;

char32_t ToLower(char32_t cp);
std::string ToLower(std::string_view utf8);

}  // namespace synthaudit::unicode

#endif  // SYNTHAUDIT_UNICODE_H_
