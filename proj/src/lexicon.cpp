#include "wssubst/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "wssubst/error.hpp"

namespace wssubst {

namespace fs = std::filesystem;

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    auto item = trim(s.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

// Longest common run of a and b; ties resolve to the earliest start in a,
// then in b. Returns {length, start_a, start_b}.
std::tuple<std::size_t, std::size_t, std::size_t> longest_common_run(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t best = 0, best_i = 0, best_j = 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1] && a[i - 1][0] != '\x01') {
        cur[j] = prev[j - 1] + 1;
        std::size_t si = i - cur[j], sj = j - cur[j];
        if (cur[j] > best || (cur[j] == best && (si < best_i || (si == best_i && sj < best_j)))) {
          best = cur[j];
          best_i = si;
          best_j = sj;
        }
      } else {
        cur[j] = 0;
      }
    }
    std::swap(prev, cur);
  }
  return {best, best_i, best_j};
}

std::size_t greedy_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  std::size_t total = 0;
  for (;;) {
    auto [len, i, j] = longest_common_run(a, b);
    if (len == 0) break;
    total += len * len;
    // Consumed words become distinct markers so they cannot match again.
    for (std::size_t k = 0; k < len; ++k) {
      a[i + k] = "\x01" "a";
      b[j + k] = "\x01" "b";
    }
  }
  return total;
}

}  // namespace

std::string_view to_string(PartOfSpeech pos) {
  switch (pos) {
    case PartOfSpeech::noun: return "n";
    case PartOfSpeech::verb: return "v";
    case PartOfSpeech::adjective: return "a";
    case PartOfSpeech::adverb: return "r";
  }
  return "n";
}

PartOfSpeech parse_part_of_speech(std::string_view text) {
  auto t = lowercase(text);
  if (t == "n" || t == "noun") return PartOfSpeech::noun;
  if (t == "v" || t == "verb") return PartOfSpeech::verb;
  if (t == "a" || t == "s" || t == "adj" || t == "adjective") return PartOfSpeech::adjective;
  if (t == "r" || t == "adv" || t == "adverb") return PartOfSpeech::adverb;
  throw Error(ErrorCode::parse, "unknown part of speech '" + std::string(text) + "'");
}

Lexicon::Lexicon(std::vector<Synset> synsets,
                 const std::unordered_map<std::string, std::vector<std::string>>& sense_order)
    : synsets_(std::move(synsets)) {
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    auto& s = synsets_[i];
    for (auto& l : s.lemmas) l = lowercase(l);
    if (!by_id_.emplace(s.id, i).second) {
      throw Error(ErrorCode::parse, "duplicate synset id '" + s.id + "'", s.id);
    }
  }

  for (const auto& [word, ids] : sense_order) {
    auto& slot = lemma_index_[lowercase(word)];
    for (const auto& id : ids) {
      auto it = by_id_.find(id);
      if (it != by_id_.end() && std::find(slot.begin(), slot.end(), it->second) == slot.end()) {
        slot.push_back(it->second);
      }
    }
  }
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    for (const auto& l : synsets_[i].lemmas) {
      auto& slot = lemma_index_[l];
      if (std::find(slot.begin(), slot.end(), i) == slot.end()) slot.push_back(i);
    }
  }

  parents_.resize(synsets_.size());
  std::vector<std::vector<std::size_t>> children(synsets_.size());
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    for (const auto& h : synsets_[i].hypernyms) {
      auto it = by_id_.find(h);
      if (it == by_id_.end()) continue;
      parents_[i].push_back(it->second);
      children[it->second].push_back(i);
    }
  }

  // Iterative three-colour DFS over hypernym edges.
  std::vector<int> colour(synsets_.size(), 0);
  for (std::size_t start = 0; start < synsets_.size(); ++start) {
    if (colour[start] != 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    colour[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parents_[node].size()) {
        std::size_t p = parents_[node][next++];
        if (colour[p] == 1) {
          throw Error(ErrorCode::cycle,
                      "cyclic hypernym chain through '" + synsets_[p].id + "'", synsets_[p].id);
        }
        if (colour[p] == 0) {
          colour[p] = 1;
          stack.emplace_back(p, 0);
        }
      } else {
        colour[node] = 2;
        stack.pop_back();
      }
    }
  }

  depth_.assign(synsets_.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < synsets_.size(); ++i) {
    if (synsets_[i].hypernyms.empty()) {
      depth_[i] = 1;
      queue.push_back(i);
    }
  }
  while (!queue.empty()) {
    auto n = queue.front();
    queue.pop_front();
    for (auto c : children[n]) {
      if (depth_[c] == 0) {
        depth_[c] = depth_[n] + 1;
        queue.push_back(c);
      }
    }
  }
}

const Synset* Lexicon::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &synsets_[it->second];
}

const Synset& Lexicon::at(std::string_view id) const {
  const auto* s = find(id);
  if (!s) throw Error(ErrorCode::not_found, "unknown synset '" + std::string(id) + "'");
  return *s;
}

std::vector<const Synset*> Lexicon::senses(std::string_view word,
                                           std::optional<PartOfSpeech> pos) const {
  std::vector<const Synset*> out;
  auto it = lemma_index_.find(lowercase(word));
  if (it == lemma_index_.end()) return out;
  for (auto idx : it->second) {
    if (!pos || synsets_[idx].pos == *pos) out.push_back(&synsets_[idx]);
  }
  return out;
}

bool Lexicon::contains(std::string_view word) const {
  auto it = lemma_index_.find(lowercase(word));
  return it != lemma_index_.end() && !it->second.empty();
}

std::vector<const Synset*> Lexicon::roots(PartOfSpeech pos) const {
  std::vector<const Synset*> out;
  for (const auto& s : synsets_) {
    if (s.pos == pos && s.hypernyms.empty()) out.push_back(&s);
  }
  return out;
}

std::size_t Lexicon::index_of(const Synset& s) const {
  auto it = by_id_.find(s.id);
  if (it == by_id_.end() || &synsets_[it->second] != &s) {
    throw Error(ErrorCode::invalid_argument, "synset '" + s.id + "' does not belong to lexicon");
  }
  return it->second;
}

std::size_t Lexicon::depth(const Synset& s) const {
  auto d = depth_[index_of(s)];
  if (d == 0) throw Error(ErrorCode::detached_synset, "detached synset '" + s.id + "'", s.id);
  return d;
}

std::vector<std::size_t> Lexicon::ancestors_of(std::size_t idx) const {
  std::vector<std::size_t> out{idx};
  std::unordered_set<std::size_t> seen{idx};
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (auto p : parents_[out[k]]) {
      if (seen.insert(p).second) out.push_back(p);
    }
  }
  return out;
}

const Synset& Lexicon::least_common_subsumer(const Synset& a, const Synset& b) const {
  auto ia = index_of(a), ib = index_of(b);
  auto da = depth(a), db = depth(b);
  auto limit = std::min(da, db);
  auto anc_a = ancestors_of(ia);
  std::unordered_set<std::size_t> anc_b;
  for (auto x : ancestors_of(ib)) anc_b.insert(x);

  const Synset* best = nullptr;
  std::size_t best_depth = 0;
  for (auto c : anc_a) {
    if (!anc_b.count(c)) continue;
    auto d = depth_[c];
    if (d == 0 || d > limit) continue;
    if (d > best_depth || (d == best_depth && synsets_[c].id < best->id)) {
      best = &synsets_[c];
      best_depth = d;
    }
  }
  if (!best) {
    throw Error(ErrorCode::no_common_ancestor,
                "no common ancestor for '" + a.id + "' and '" + b.id + "'");
  }
  return *best;
}

double Lexicon::wu_palmer(const Synset& a, const Synset& b) const {
  if (a.pos != b.pos) return 0.0;
  try {
    const auto& lcs = least_common_subsumer(a, b);
    return 2.0 * static_cast<double>(depth(lcs)) / static_cast<double>(depth(a) + depth(b));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::no_common_ancestor || e.code() == ErrorCode::detached_synset) {
      return 0.0;
    }
    throw;
  }
}

std::string Lexicon::extended_gloss(const Synset& s) const {
  std::string out = s.gloss;
  for (auto p : parents_[index_of(s)]) {
    out += ' ';
    out += synsets_[p].gloss;
  }
  return out;
}

const Synset* Lexicon::disambiguate(std::string_view target, const ContextWindow& ctx,
                                    std::optional<PartOfSpeech> pos) const {
  auto candidates = senses(target, pos);
  if (candidates.empty()) return nullptr;
  if (candidates.size() == 1) return candidates.front();

  std::vector<std::vector<std::string>> context_glosses;
  for (std::size_t i = 0; i < ctx.words.size(); ++i) {
    if (i == ctx.target_index) continue;
    for (const auto* s : senses(ctx.words[i])) context_glosses.push_back(gloss_words(extended_gloss(*s)));
  }

  const Synset* best = candidates.front();
  std::size_t best_score = 0;
  bool first = true;
  for (const auto* cand : candidates) {
    auto own = gloss_words(extended_gloss(*cand));
    std::size_t score = 0;
    for (const auto& cg : context_glosses) score += word_overlap(own, cg);
    if (first || score > best_score) {
      best = cand;
      best_score = score;
      first = false;
    }
  }
  return best;
}

std::vector<std::string> gloss_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty() && !is_stop_word(cur)) out.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

std::size_t word_overlap(std::vector<std::string> a, std::vector<std::string> b) {
  // Better of both orientations.
  auto forward = greedy_overlap(a, b);
  auto backward = greedy_overlap(std::move(b), std::move(a));
  return std::max(forward, backward);
}

std::size_t gloss_overlap(std::string_view g1, std::string_view g2) {
  return word_overlap(gloss_words(g1), gloss_words(g2));
}

Lexicon parse_fixture_lexicon(std::string_view text) {
  std::vector<Synset> synsets;
  std::vector<std::size_t> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      auto bar = t.find('|', start);
      if (bar == std::string::npos) break;
      fields.push_back(trim(std::string_view(t).substr(start, bar - start)));
      start = bar + 1;
    }
    if (fields.size() != 4) {
      throw Error(ErrorCode::parse,
                  "malformed lexicon entry at line " + std::to_string(lineno) +
                      ": expected 5 '|'-separated fields",
                  "line " + std::to_string(lineno));
    }
    fields.push_back(trim(std::string_view(t).substr(start)));
    Synset s;
    s.id = fields[0];
    if (s.id.empty()) {
      throw Error(ErrorCode::parse, "malformed lexicon entry at line " + std::to_string(lineno) +
                                        ": empty id",
                  "line " + std::to_string(lineno));
    }
    try {
      s.pos = parse_part_of_speech(fields[1]);
    } catch (const Error&) {
      throw Error(ErrorCode::parse,
                  "malformed lexicon entry at line " + std::to_string(lineno) +
                      ": bad part of speech '" + fields[1] + "'",
                  "line " + std::to_string(lineno));
    }
    s.lemmas = split_list(fields[2], ',');
    if (s.lemmas.empty()) {
      throw Error(ErrorCode::parse, "malformed lexicon entry at line " + std::to_string(lineno) +
                                        ": no lemmas",
                  "line " + std::to_string(lineno));
    }
    s.hypernyms = split_list(fields[3], ',');
    s.gloss = fields[4];
    synsets.push_back(std::move(s));
    lines.push_back(lineno);
  }
  if (synsets.empty()) throw Error(ErrorCode::empty_input, "no synsets");

  std::unordered_set<std::string> ids;
  for (const auto& s : synsets) ids.insert(s.id);
  for (std::size_t i = 0; i < synsets.size(); ++i) {
    for (const auto& h : synsets[i].hypernyms) {
      if (!ids.count(h)) {
        throw Error(ErrorCode::parse,
                    "malformed lexicon entry at line " + std::to_string(lines[i]) +
                        ": unknown hypernym '" + h + "'",
                    "line " + std::to_string(lines[i]));
      }
    }
  }
  return Lexicon(std::move(synsets));
}

namespace {

void read_wordnet_data(const fs::path& file, std::vector<Synset>& out) {
  std::ifstream in(file);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == ' ') continue;  // licence header
    auto bar = line.find(" | ");
    std::string head = line.substr(0, bar);
    std::string gloss = bar == std::string::npos ? "" : trim(line.substr(bar + 3));
    std::istringstream ts(head);
    std::string offset, lexfile, type, wcnt_hex;
    if (!(ts >> offset >> lexfile >> type >> wcnt_hex)) {
      throw Error(ErrorCode::parse,
                  "malformed WordNet entry in " + file.filename().string() + " at line " +
                      std::to_string(lineno),
                  "line " + std::to_string(lineno));
    }
    Synset s;
    s.pos = parse_part_of_speech(type);
    s.id = offset + "-" + std::string(to_string(s.pos));
    s.gloss = gloss;
    auto wcnt = std::stoul(wcnt_hex, nullptr, 16);
    for (unsigned long k = 0; k < wcnt; ++k) {
      std::string word, lexid;
      ts >> word >> lexid;
      if (auto paren = word.find('('); paren != std::string::npos) word.resize(paren);
      s.lemmas.push_back(lowercase(word));
    }
    std::size_t pcnt = 0;
    ts >> pcnt;
    for (std::size_t k = 0; k < pcnt; ++k) {
      std::string sym, target, pos, st;
      ts >> sym >> target >> pos >> st;
      if (sym == "@" || sym == "@i") {
        s.hypernyms.push_back(target + "-" + std::string(to_string(parse_part_of_speech(pos))));
      }
    }
    if (!ts) {
      throw Error(ErrorCode::parse,
                  "malformed WordNet entry in " + file.filename().string() + " at line " +
                      std::to_string(lineno),
                  "line " + std::to_string(lineno));
    }
    out.push_back(std::move(s));
  }
}

void read_wordnet_index(const fs::path& file,
                        std::unordered_map<std::string, std::vector<std::string>>& order) {
  std::ifstream in(file);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == ' ') continue;
    std::istringstream ts(line);
    std::string lemma, pos;
    std::size_t synset_cnt = 0, p_cnt = 0;
    ts >> lemma >> pos >> synset_cnt >> p_cnt;
    std::string skip;
    for (std::size_t k = 0; k < p_cnt; ++k) ts >> skip;
    ts >> skip >> skip;  // sense_cnt, tagsense_cnt
    auto suffix = "-" + std::string(to_string(parse_part_of_speech(pos)));
    auto& slot = order[lowercase(lemma)];
    for (std::size_t k = 0; k < synset_cnt; ++k) {
      std::string off;
      if (!(ts >> off)) break;
      slot.push_back(off + suffix);
    }
  }
}

}  // namespace

Lexicon load_wordnet_directory(const std::string& dir) {
  std::vector<Synset> synsets;
  std::unordered_map<std::string, std::vector<std::string>> order;
  for (const char* suffix : {"noun", "verb", "adj", "adv"}) {
    read_wordnet_data(fs::path(dir) / (std::string("data.") + suffix), synsets);
    read_wordnet_index(fs::path(dir) / (std::string("index.") + suffix), order);
  }
  if (synsets.empty()) throw Error(ErrorCode::empty_input, "no synsets", dir);
  return Lexicon(std::move(synsets), order);
}

Lexicon load_lexicon(const std::string& source) {
  std::error_code ec;
  if (fs::is_directory(source, ec)) return load_wordnet_directory(source);
  std::ifstream in(source, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read lexicon source " + source, source);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fixture_lexicon(buf.str());
}

}  // namespace wssubst
