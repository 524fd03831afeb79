#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wssubst/similarity_engine.hpp"

namespace wssubst {

inline constexpr double kDefaultThreshold = 0.5;

enum class SetRelation { equal, left_subset_of_right, right_subset_of_left, intersect, disjoint };

enum class RelationKind { equality, corestriction, restriction, prolongation, intersection, difference };

enum class Direction { left_to_right, right_to_left, symmetric };

struct OperationRelation {
  RelationKind kind = RelationKind::difference;
  Direction direction = Direction::symmetric;
  friend bool operator==(const OperationRelation&, const OperationRelation&) = default;
};

std::string_view to_string(SetRelation r);
std::string_view to_string(RelationKind k);
std::string_view to_string(Direction d);
RelationKind parse_relation_kind(std::string_view text);
Direction parse_direction(std::string_view text);

/// 1 = equality ... 6 = difference.
int priority(RelationKind kind);

/// Coverage rules over a precomputed sentence matrix: a row is covered when
/// some cell strictly exceeds `threshold`. Empty sets are vacuously covered.
SetRelation relation_from_matrix(const SimilarityMatrix& m, std::size_t rows, std::size_t cols,
                                 double threshold);

SetRelation data_set_relation(const SimilarityEngine& engine, const DataSet& e1, const DataSet& e2,
                              double threshold = kDefaultThreshold);

/// Total over all 25 input/output relation pairs.
OperationRelation classify_operation_pair(SetRelation in, SetRelation out);

struct CorrespondenceCell {
  OperationRelation relation;
  double score = 0.0;
  SetRelation input_relation = SetRelation::disjoint;
  SetRelation output_relation = SetRelation::disjoint;
};

struct CorrespondenceTable {
  std::vector<std::string> rows;  // substituted operation ids
  std::vector<std::string> cols;  // substituent operation ids
  std::vector<CorrespondenceCell> cells;  // row-major
  double threshold = kDefaultThreshold;

  const CorrespondenceCell& at(std::size_t r, std::size_t c) const {
    return cells[r * cols.size() + c];
  }
  std::optional<std::size_t> row_index(std::string_view id) const;
  std::optional<std::size_t> col_index(std::string_view id) const;
};

/// "Equality(0.95)"
std::string render_cell(const CorrespondenceCell& cell);

CorrespondenceTable build_correspondence_table(const SimilarityEngine& engine,
                                               const ServiceDescription& substituted,
                                               const ServiceDescription& substituent,
                                               const SimilarityMatrix& operation_scores,
                                               double threshold = kDefaultThreshold);

struct Suggestion {
  std::string column;
  OperationRelation relation;
  double score = 0.0;
};

struct RowSuggestions {
  std::string row;
  std::vector<Suggestion> ranked;  // empty = no suggestion
  bool no_suggestion() const { return ranked.empty(); }
};

/// Per row: non-Difference columns by relation priority, score desc, name.
std::vector<RowSuggestions> suggest_matching(const CorrespondenceTable& table);

nlohmann::json to_json(const CorrespondenceTable& table);
CorrespondenceTable table_from_json(const nlohmann::json& j);
nlohmann::json to_json(const std::vector<RowSuggestions>& suggestions);

/// Plain-text grid for terminals.
std::string format_table(const CorrespondenceTable& table);

}  // namespace wssubst
