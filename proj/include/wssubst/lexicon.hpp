#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wssubst {

enum class PartOfSpeech { noun, verb, adjective, adverb };

std::string_view to_string(PartOfSpeech pos);
PartOfSpeech parse_part_of_speech(std::string_view text);

struct Synset {
  std::string id;
  PartOfSpeech pos = PartOfSpeech::noun;
  std::vector<std::string> lemmas;  // lowercase
  std::vector<std::string> hypernyms;
  std::string gloss;
};

/// Surrounding words of a target. The whole containing sentence is used as
/// the window by the similarity layer.
struct ContextWindow {
  std::vector<std::string> words;
  std::size_t target_index = 0;
};

/// Immutable WordNet-style taxonomy. Depth follows the node-count convention:
/// a root (synset without hypernyms) has depth 1 and a synset's depth is the
/// node count of its shortest root path.
class Lexicon {
 public:
  Lexicon() = default;

  /// Validates lemma/hypernym structure and precomputes depths. Throws on
  /// duplicate ids or hypernym cycles.
  /// `sense_order` optionally pins per-word sense ranking (WordNet index
  /// files); otherwise senses rank in load order.
  explicit Lexicon(std::vector<Synset> synsets,
                   const std::unordered_map<std::string, std::vector<std::string>>& sense_order = {});

  std::size_t size() const { return synsets_.size(); }
  bool empty() const { return synsets_.empty(); }

  const Synset* find(std::string_view id) const;
  const Synset& at(std::string_view id) const;

  /// Senses of `word` in lexicon sense order, optionally restricted to one
  /// part of speech.
  std::vector<const Synset*> senses(std::string_view word,
                                    std::optional<PartOfSpeech> pos = std::nullopt) const;
  bool contains(std::string_view word) const;

  std::span<const Synset> synsets() const { return synsets_; }
  std::vector<const Synset*> roots(PartOfSpeech pos) const;

  /// Throws Error{detached_synset} when no root is reachable.
  std::size_t depth(const Synset& s) const;

  /// Deepest common ancestor (self included); ties go to the smallest id.
  /// Candidates deeper than either argument are skipped, which only matters
  /// in multiple-inheritance graphs. Throws Error{no_common_ancestor}.
  const Synset& least_common_subsumer(const Synset& a, const Synset& b) const;

  /// 2 * depth(lcs) / (depth(a) + depth(b)); 0 when no common ancestor
  /// exists or the parts of speech differ.
  double wu_palmer(const Synset& a, const Synset& b) const;

  /// Own gloss followed by the glosses of direct hypernyms.
  std::string extended_gloss(const Synset& s) const;

  /// Adapted-Lesk sense selection. Restricting `pos` limits the target's
  /// candidate senses; context senses are never restricted.
  const Synset* disambiguate(std::string_view target, const ContextWindow& ctx,
                             std::optional<PartOfSpeech> pos = std::nullopt) const;

 private:
  std::size_t index_of(const Synset& s) const;
  std::vector<std::size_t> ancestors_of(std::size_t idx) const;

  std::vector<Synset> synsets_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::vector<std::size_t>> lemma_index_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::size_t> depth_;  // 0 = detached
};

/// Loads either a WordNet 3.x database directory (data.noun, index.noun, ...)
/// or a single fixture file with lines `id | pos | lemma,lemma | hyper,... | gloss`.
Lexicon load_lexicon(const std::string& source);
Lexicon parse_fixture_lexicon(std::string_view text);
Lexicon load_wordnet_directory(const std::string& dir);

/// Lowercased alphanumeric word runs of `text` with stop words removed.
std::vector<std::string> gloss_words(std::string_view text);

/// Adapted-Lesk overlap: sum of squared lengths of maximal shared word runs,
/// extracted longest-first. Symmetric in its arguments.
std::size_t gloss_overlap(std::string_view g1, std::string_view g2);
std::size_t word_overlap(std::vector<std::string> a, std::vector<std::string> b);

bool is_stop_word(std::string_view word);
std::span<const std::string_view> stop_words();

}  // namespace wssubst
