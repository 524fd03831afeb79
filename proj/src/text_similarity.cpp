#include "wssubst/text_similarity.hpp"

#include <algorithm>
#include <cctype>

#include "wssubst/error.hpp"

namespace wssubst {

namespace {

enum class CharClass { lower, upper, digit, separator };

CharClass classify(unsigned char c) {
  if (c >= 0x80) return CharClass::lower;  // UTF-8 continuation stays in-word
  if (std::islower(c)) return CharClass::lower;
  if (std::isupper(c)) return CharClass::upper;
  if (std::isdigit(c)) return CharClass::digit;
  return CharClass::separator;
}

bool is_letter(CharClass c) { return c == CharClass::lower || c == CharClass::upper; }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string Sentence::text() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

Sentence tokenize(std::string_view raw) {
  Sentence s;
  s.source = std::string(raw);
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) s.words.push_back(lower(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto c = classify(static_cast<unsigned char>(raw[i]));
    if (c == CharClass::separator) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      auto p = classify(static_cast<unsigned char>(raw[i - 1]));
      bool boundary = false;
      if ((p == CharClass::digit) != (c == CharClass::digit)) boundary = true;
      if (p == CharClass::lower && c == CharClass::upper) boundary = true;
      // "XMLParser": split before the last capital of an acronym run.
      if (p == CharClass::upper && c == CharClass::upper && i + 1 < raw.size() &&
          classify(static_cast<unsigned char>(raw[i + 1])) == CharClass::lower) {
        boundary = true;
      }
      if (boundary && (is_letter(p) || p == CharClass::digit)) flush();
    }
    cur += raw[i];
  }
  flush();
  return s;
}

SimilarityMatrix::SimilarityMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorCode::invalid_argument, "ragged similarity matrix");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

SimilarityMatrix SimilarityMatrix::transposed() const {
  SimilarityMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double jaro(std::string_view s1, std::string_view s2) {
  if (s1.empty() && s2.empty()) return 1.0;
  if (s1.empty() || s2.empty()) return 0.0;
  auto a = lower(s1), b = lower(s2);
  const std::size_t la = a.size(), lb = b.size();
  const std::size_t longest = std::max(la, lb);
  const std::size_t window = longest / 2 == 0 ? 0 : longest / 2 - 1;

  std::vector<bool> matched_a(la, false), matched_b(lb, false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < la; ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(lb, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (!matched_b[j] && a[i] == b[j]) {
        matched_a[i] = matched_b[j] = true;
        ++matches;
        break;
      }
    }
  }
  if (matches == 0) return 0.0;

  std::size_t half_transpositions = 0;
  for (std::size_t i = 0, j = 0; i < la; ++i) {
    if (!matched_a[i]) continue;
    while (!matched_b[j]) ++j;
    if (a[i] != b[j]) ++half_transpositions;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transpositions / 2);
  return (m / static_cast<double>(la) + m / static_cast<double>(lb) + (m - t) / m) / 3.0;
}

double jaro_winkler(std::string_view s1, std::string_view s2) {
  constexpr double kPrefixScale = 0.1;
  constexpr std::size_t kPrefixCap = 4;
  const double j = jaro(s1, s2);
  std::size_t prefix = 0;
  const std::size_t limit = std::min({s1.size(), s2.size(), kPrefixCap});
  while (prefix < limit &&
         std::tolower(static_cast<unsigned char>(s1[prefix])) ==
             std::tolower(static_cast<unsigned char>(s2[prefix]))) {
    ++prefix;
  }
  return j + static_cast<double>(prefix) * kPrefixScale * (1.0 - j);
}

double hausdorff_similarity(const SimilarityMatrix& m, HausdorffMode mode) {
  if (m.empty()) throw Error(ErrorCode::empty_input, "empty set comparison");
  const std::size_t n = m.rows(), k = m.cols();
  const bool best_is_max = mode == HausdorffMode::similarity;

  double row_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = m(i, 0);
    for (std::size_t j = 1; j < k; ++j) best = best_is_max ? std::max(best, m(i, j)) : std::min(best, m(i, j));
    row_sum += best;
  }
  double col_sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    double best = m(0, j);
    for (std::size_t i = 1; i < n; ++i) best = best_is_max ? std::max(best, m(i, j)) : std::min(best, m(i, j));
    col_sum += best;
  }
  const double row_avg = row_sum / static_cast<double>(n);
  const double col_avg = col_sum / static_cast<double>(k);
  return best_is_max ? std::min(row_avg, col_avg) : std::max(row_avg, col_avg);
}

double aggregate_sets(const SimilarityMatrix& m, std::size_t rows, std::size_t cols,
                      HausdorffMode mode) {
  if (rows == 0 && cols == 0) return 1.0;
  if (rows == 0 || cols == 0) return 0.0;
  return hausdorff_similarity(m, mode);
}

double TextSimilarity::word_similarity(std::string_view w1, std::string_view w2,
                                       const ContextWindow& ctx1, const ContextWindow& ctx2) const {
  SentenceProfile::Word a{std::string(w1), lexicon_->disambiguate(w1, ctx1, PartOfSpeech::noun),
                          lexicon_->disambiguate(w1, ctx1, PartOfSpeech::verb)};
  SentenceProfile::Word b{std::string(w2), lexicon_->disambiguate(w2, ctx2, PartOfSpeech::noun),
                          lexicon_->disambiguate(w2, ctx2, PartOfSpeech::verb)};
  return word_similarity(a, b);
}

double TextSimilarity::word_similarity(const SentenceProfile::Word& a,
                                       const SentenceProfile::Word& b) const {
  if (a.noun && b.noun) return lexicon_->wu_palmer(*a.noun, *b.noun);
  if (a.verb && b.verb) return lexicon_->wu_palmer(*a.verb, *b.verb);
  return jaro_winkler(a.text, b.text);
}

SentenceProfile TextSimilarity::profile(const Sentence& s) const {
  SentenceProfile p;
  p.words.reserve(s.words.size());
  for (std::size_t i = 0; i < s.words.size(); ++i) {
    ContextWindow ctx{s.words, i};
    p.words.push_back({s.words[i], lexicon_->disambiguate(s.words[i], ctx, PartOfSpeech::noun),
                       lexicon_->disambiguate(s.words[i], ctx, PartOfSpeech::verb)});
  }
  return p;
}

double TextSimilarity::sentence_similarity(const SentenceProfile& p1,
                                           const SentenceProfile& p2) const {
  const std::size_t n = p1.words.size(), m = p2.words.size();
  SimilarityMatrix mw(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) mw(i, j) = word_similarity(p1.words[i], p2.words[j]);
  }
  return aggregate_sets(mw, n, m, mode_);
}

double TextSimilarity::sentence_similarity(const Sentence& s1, const Sentence& s2) const {
  return sentence_similarity(profile(s1), profile(s2));
}

}  // namespace wssubst
