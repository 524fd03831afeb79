#pragma once

#include <string>
#include <vector>

#include "wssubst/text_similarity.hpp"
#include "wssubst/wsdl_model.hpp"

namespace wssubst {

/// Relative importance of input, output and name similarity.
struct Weights {
  double input = 1.0;
  double output = 1.0;
  double name = 2.0;

  /// Throws Error{invalid_argument} unless all weights are nonnegative and
  /// their sum is positive.
  void validate() const;
};

/// Weighted mean of the three component scores.
double combine_operation_scores(double input_similarity, double output_similarity,
                                double name_similarity, const Weights& w);

struct RankedCandidate {
  const ServiceDescription* service = nullptr;
  double score = 0.0;
  SimilarityMatrix operation_matrix;  // target operations x candidate operations
};

struct CandidateFailure {
  std::string name;
  std::string source_uri;
  std::string message;
};

struct Ranking {
  std::vector<RankedCandidate> candidates;  // score desc, then name, then URI
  std::vector<CandidateFailure> failures;
};

/// Service-similarity pyramid: sentences -> data sets -> operations ->
/// services. Stateless apart from its configuration.
class SimilarityEngine {
 public:
  explicit SimilarityEngine(const Lexicon& lexicon, Weights weights = {},
                            HausdorffMode mode = HausdorffMode::similarity);

  const TextSimilarity& text() const { return text_; }
  const Weights& weights() const { return weights_; }

  SimilarityMatrix data_set_matrix(const DataSet& a, const DataSet& b) const;
  double data_set_similarity(const DataSet& a, const DataSet& b) const;
  double operation_similarity(const Operation& f, const Operation& g) const;

  /// Returns the aggregate score; fills `matrix` with per-operation scores
  /// when non-null.
  double service_similarity(const ServiceDescription& a, const ServiceDescription& b,
                            SimilarityMatrix* matrix = nullptr) const;
  SimilarityMatrix operation_matrix(const ServiceDescription& a,
                                    const ServiceDescription& b) const;

  /// Scores every pool member against `target`, in parallel when
  /// `max_threads` > 1. Members must outlive the returned ranking.
  Ranking rank_candidates(const ServiceDescription& target,
                          const std::vector<ServiceDescription>& pool,
                          unsigned max_threads = 0) const;

 private:
  TextSimilarity text_;
  Weights weights_;
};

/// Sorts by score descending, then service name, then source URI.
void sort_ranking(std::vector<RankedCandidate>& candidates);

}  // namespace wssubst
