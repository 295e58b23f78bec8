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

#include <string>
#include <unordered_map>

#include "synthaudit/fidelity.h"

namespace synthaudit::fidelity {
namespace {

constexpr const char* kPositive[] = {
    // English
    "amazing",
    "awesome",
    "beautiful",
    "best",
    "better",
    "blessed",
    "brilliant",
    "calm",
    "celebrate",
    "charming",
    "cheerful",
    "congrats",
    "congratulations",
    "cool",
    "cute",
    "delicious",
    "delight",
    "delighted",
    "easy",
    "enjoy",
    "enjoyed",
    "excellent",
    "excited",
    "exciting",
    "fabulous",
    "fantastic",
    "favorite",
    "favourite",
    "fine",
    "free",
    "fresh",
    "friendly",
    "fun",
    "funny",
    "glad",
    "glorious",
    "good",
    "gorgeous",
    "grateful",
    "great",
    "happy",
    "healthy",
    "helpful",
    "hope",
    "hopeful",
    "incredible",
    "inspired",
    "inspiring",
    "joy",
    "kind",
    "laugh",
    "like",
    "liked",
    "lovely",
    "love",
    "loved",
    "loving",
    "lucky",
    "magic",
    "magical",
    "nice",
    "peaceful",
    "perfect",
    "pleased",
    "positive",
    "pretty",
    "proud",
    "relaxed",
    "relaxing",
    "safe",
    "smile",
    "smiling",
    "special",
    "strong",
    "stunning",
    "success",
    "successful",
    "super",
    "sweet",
    "terrific",
    "thank",
    "thankful",
    "thanks",
    "thrilled",
    "top",
    "victory",
    "warm",
    "welcome",
    "win",
    "winner",
    "winning",
    "wonderful",
    "wow",
    "yay",
    "yummy",
    // Dutch
    "blij",
    "dankbaar",
    "dank",
    "fantastisch",
    "fijn",
    "geweldig",
    "genieten",
    "genoten",
    "gefeliciteerd",
    "geluk",
    "gelukkig",
    "gezellig",
    "goed",
    "heerlijk",
    "hoera",
    "knap",
    "leuk",
    "leuke",
    "lief",
    "liefde",
    "lekker",
    "mooi",
    "mooie",
    "prachtig",
    "supertof",
    "tof",
    "topper",
    "trots",
    "vrolijk",
    "succes",
    "schitterend",
    "sterk",
    "bedankt",
    "fantastische",
    "geweldige",
    "gaaf",
    "vet",
    "blije",
    "zalig",
};

constexpr const char* kNegative[] = {
    // English
    "afraid",
    "angry",
    "annoyed",
    "annoying",
    "anxious",
    "awful",
    "bad",
    "boring",
    "broke",
    "broken",
    "cry",
    "crying",
    "damn",
    "dead",
    "depressed",
    "desperate",
    "difficult",
    "disappointed",
    "disappointing",
    "disaster",
    "disgusting",
    "dreadful",
    "fail",
    "failed",
    "failure",
    "fake",
    "fear",
    "frustrated",
    "frustrating",
    "furious",
    "hard",
    "hate",
    "hated",
    "hating",
    "horrible",
    "hurt",
    "ill",
    "lonely",
    "lose",
    "losing",
    "lost",
    "mad",
    "mess",
    "miserable",
    "miss",
    "missing",
    "nasty",
    "negative",
    "nervous",
    "pain",
    "painful",
    "poor",
    "problem",
    "problems",
    "regret",
    "sad",
    "scared",
    "sick",
    "sorry",
    "stress",
    "stressed",
    "stupid",
    "suck",
    "sucks",
    "terrible",
    "tired",
    "ugly",
    "unfair",
    "unhappy",
    "upset",
    "useless",
    "waste",
    "weak",
    "worried",
    "worry",
    "worse",
    "worst",
    "wrong",
    // Dutch
    "balen",
    "boos",
    "bang",
    "jammer",
    "helaas",
    "kapot",
    "moe",
    "slecht",
    "slechte",
    "verdrietig",
    "verdriet",
    "vervelend",
    "vreselijk",
    "verschrikkelijk",
    "ziek",
    "pijn",
    "saai",
    "stom",
    "stomme",
    "teleurgesteld",
    "triest",
    "zielig",
    "zwaar",
    "haat",
    "mislukt",
    "ellende",
    "irritant",
    "eenzaam",
    "zorgen",
    "bezorgd",
    "fout",
    "lelijk",
    "rot",
    "shit",
};

}  // namespace

const std::unordered_map<std::string, int>& SentimentLexicon() {
  static const std::unordered_map<std::string, int> lexicon = [] {
    std::unordered_map<std::string, int> m;
    for (const char* w : kPositive) m[w] = 1;
    for (const char* w : kNegative) m[w] = -1;
    return m;
  }();
  return lexicon;
}

}  // namespace synthaudit::fidelity
