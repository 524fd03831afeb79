#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wssubst/lexicon.hpp"

namespace wssubst {

struct Sentence {
  std::vector<std::string> words;  // lowercase
  std::string source;

  bool empty() const { return words.empty(); }
  /// Words joined by single spaces.
  std::string text() const;

  friend bool operator==(const Sentence& a, const Sentence& b) { return a.words == b.words; }
};

/// Splits identifiers and free text into lowercase words at whitespace,
/// punctuation, underscores, hyphens, letter/digit changes and camelCase
/// humps ("GetWeatherByZip" -> get weather by zip, "XMLParser" -> xml parser).
Sentence tokenize(std::string_view raw);

/// Dense row-major n x m matrix of scores in [0,1].
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  SimilarityMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

  SimilarityMatrix transposed() const;
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// How set-level aggregation reads the Hausdorff construction.
enum class HausdorffMode {
  /// 1 - modified Hausdorff distance with d = 1 - sim, i.e. the minimum of the
  /// averaged row maxima and averaged column maxima. Identical sets score 1.
  similarity,
  /// Max of averaged row/column minima applied to the similarity values as
  /// written. Kept for comparison experiments only.
  literal,
};

/// Jaro-Winkler with prefix scale 0.1 and prefix cap 4; case-insensitive.
double jaro(std::string_view s1, std::string_view s2);
double jaro_winkler(std::string_view s1, std::string_view s2);

/// Throws Error{empty_input} for a matrix with no rows or no columns.
double hausdorff_similarity(const SimilarityMatrix& m,
                            HausdorffMode mode = HausdorffMode::similarity);

/// Set aggregation with the empty-set conventions: both empty -> 1, one
/// empty -> 0.
double aggregate_sets(const SimilarityMatrix& m, std::size_t rows, std::size_t cols,
                      HausdorffMode mode);

/// Per-word senses of a sentence, disambiguated once against the sentence
/// itself as context.
struct SentenceProfile {
  struct Word {
    std::string text;
    const Synset* noun = nullptr;
    const Synset* verb = nullptr;
  };
  std::vector<Word> words;
};

/// Word- and sentence-level similarity bound to a lexicon. The lexicon must
/// outlive this object. All members are const and thread-safe.
class TextSimilarity {
 public:
  explicit TextSimilarity(const Lexicon& lexicon, HausdorffMode mode = HausdorffMode::similarity)
      : lexicon_(&lexicon), mode_(mode) {}

  const Lexicon& lexicon() const { return *lexicon_; }
  HausdorffMode mode() const { return mode_; }

  /// Wu-Palmer over disambiguated senses when both words are nouns (or both
  /// verbs) in the lexicon; Jaro-Winkler otherwise.
  double word_similarity(std::string_view w1, std::string_view w2, const ContextWindow& ctx1,
                         const ContextWindow& ctx2) const;

  SentenceProfile profile(const Sentence& s) const;
  double word_similarity(const SentenceProfile::Word& a, const SentenceProfile::Word& b) const;

  double sentence_similarity(const Sentence& s1, const Sentence& s2) const;
  double sentence_similarity(const SentenceProfile& p1, const SentenceProfile& p2) const;

 private:
  const Lexicon* lexicon_;
  HausdorffMode mode_;
};

}  // namespace wssubst
