#include "wssubst/similarity_engine.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "wssubst/error.hpp"

namespace wssubst {

void Weights::validate() const {
  if (input < 0 || output < 0 || name < 0 || input + output + name <= 0) {
    throw Error(ErrorCode::invalid_argument,
                "weights must be nonnegative with a positive sum");
  }
}

double combine_operation_scores(double input_similarity, double output_similarity,
                                double name_similarity, const Weights& w) {
  w.validate();
  return (w.input * input_similarity + w.output * output_similarity + w.name * name_similarity) /
         (w.input + w.output + w.name);
}

SimilarityEngine::SimilarityEngine(const Lexicon& lexicon, Weights weights, HausdorffMode mode)
    : text_(lexicon, mode), weights_(weights) {
  weights_.validate();
}

SimilarityMatrix SimilarityEngine::data_set_matrix(const DataSet& a, const DataSet& b) const {
  std::vector<SentenceProfile> pa, pb;
  pa.reserve(a.size());
  pb.reserve(b.size());
  for (const auto& l : a.leaves) pa.push_back(text_.profile(l.sentence));
  for (const auto& l : b.leaves) pb.push_back(text_.profile(l.sentence));
  SimilarityMatrix m(a.size(), b.size());
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) m(i, j) = text_.sentence_similarity(pa[i], pb[j]);
  }
  return m;
}

double SimilarityEngine::data_set_similarity(const DataSet& a, const DataSet& b) const {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  return aggregate_sets(data_set_matrix(a, b), a.size(), b.size(), text_.mode());
}

double SimilarityEngine::operation_similarity(const Operation& f, const Operation& g) const {
  return combine_operation_scores(data_set_similarity(f.input, g.input),
                                  data_set_similarity(f.output, g.output),
                                  text_.sentence_similarity(f.name_sentence, g.name_sentence),
                                  weights_);
}

SimilarityMatrix SimilarityEngine::operation_matrix(const ServiceDescription& a,
                                                    const ServiceDescription& b) const {
  SimilarityMatrix m(a.operations.size(), b.operations.size());
  for (std::size_t i = 0; i < a.operations.size(); ++i) {
    for (std::size_t j = 0; j < b.operations.size(); ++j) {
      m(i, j) = operation_similarity(a.operations[i], b.operations[j]);
    }
  }
  return m;
}

double SimilarityEngine::service_similarity(const ServiceDescription& a,
                                            const ServiceDescription& b,
                                            SimilarityMatrix* matrix) const {
  for (const auto* s : {&a, &b}) {
    if (s->operations.empty()) {
      throw Error(ErrorCode::empty_input, "service " + s->name + " has no operations", s->source_uri);
    }
  }
  auto m = operation_matrix(a, b);
  double score = aggregate_sets(m, m.rows(), m.cols(), text_.mode());
  if (matrix) *matrix = std::move(m);
  return score;
}

void sort_ranking(std::vector<RankedCandidate>& candidates) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const RankedCandidate& x, const RankedCandidate& y) {
                     if (x.score != y.score) return x.score > y.score;
                     if (x.service->name != y.service->name) {
                       return x.service->name < y.service->name;
                     }
                     return x.service->source_uri < y.service->source_uri;
                   });
}

Ranking SimilarityEngine::rank_candidates(const ServiceDescription& target,
                                          const std::vector<ServiceDescription>& pool,
                                          unsigned max_threads) const {
  struct Slot {
    std::optional<RankedCandidate> result;
    std::optional<CandidateFailure> failure;
  };
  std::vector<Slot> slots(pool.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < pool.size(); i = next++) {
      const auto& cand = pool[i];
      try {
        RankedCandidate rc;
        rc.service = &cand;
        rc.score = service_similarity(target, cand, &rc.operation_matrix);
        slots[i].result = std::move(rc);
      } catch (const std::exception& e) {
        slots[i].failure = CandidateFailure{cand.name, cand.source_uri, e.what()};
      }
    }
  };

  unsigned threads = max_threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : max_threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, pool.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) workers.emplace_back(worker);
  }

  Ranking ranking;
  for (auto& s : slots) {
    if (s.result) ranking.candidates.push_back(std::move(*s.result));
    if (s.failure) ranking.failures.push_back(std::move(*s.failure));
  }
  sort_ranking(ranking.candidates);
  return ranking;
}

}  // namespace wssubst
