#include <algorithm>
#include <array>

#include "wssubst/lexicon.hpp"

namespace wssubst {

namespace {

// Sorted for binary search. No single letters.
constexpr std::array<std::string_view, 75> kStopWords = {
    "about", "after", "all", "also", "an", "and", "any", "are", "as",
    "at", "be", "been", "being", "but", "by", "can", "could", "do",
    "does", "each", "for", "from", "had", "has", "have", "he", "her",
    "his", "how", "if", "in", "into", "is", "it", "its", "may",
    "more", "most", "no", "not", "of", "on", "or", "other", "our",
    "out", "over", "so", "some", "such", "than", "that", "the", "their",
    "them", "then", "there", "these", "they", "this", "those", "to", "under",
    "up", "was", "we", "were", "what", "when", "which", "who", "will",
    "with", "would", "you",
};

static_assert(std::is_sorted(kStopWords.begin(), kStopWords.end()));

}  // namespace

bool is_stop_word(std::string_view word) {
  return std::binary_search(kStopWords.begin(), kStopWords.end(), word);
}

std::span<const std::string_view> stop_words() { return kStopWords; }

}  // namespace wssubst
