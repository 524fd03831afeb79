#include "wssubst/matcher.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "wssubst/error.hpp"

namespace wssubst {

namespace {

bool is_subset(SetRelation r) {
  return r == SetRelation::left_subset_of_right || r == SetRelation::right_subset_of_left;
}

Direction direction_of(SetRelation r) {
  return r == SetRelation::left_subset_of_right ? Direction::left_to_right
                                                : Direction::right_to_left;
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", score);
  return buf;
}

}  // namespace

std::string_view to_string(SetRelation r) {
  switch (r) {
    case SetRelation::equal: return "Equal";
    case SetRelation::left_subset_of_right: return "LeftSubsetOfRight";
    case SetRelation::right_subset_of_left: return "RightSubsetOfLeft";
    case SetRelation::intersect: return "Intersect";
    case SetRelation::disjoint: return "Disjoint";
  }
  return "Disjoint";
}

std::string_view to_string(RelationKind k) {
  switch (k) {
    case RelationKind::equality: return "Equality";
    case RelationKind::corestriction: return "Corestriction";
    case RelationKind::restriction: return "Restriction";
    case RelationKind::prolongation: return "Prolongation";
    case RelationKind::intersection: return "Intersection";
    case RelationKind::difference: return "Difference";
  }
  return "Difference";
}

std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::left_to_right: return "leftToRight";
    case Direction::right_to_left: return "rightToLeft";
    case Direction::symmetric: return "symmetric";
  }
  return "symmetric";
}

RelationKind parse_relation_kind(std::string_view text) {
  for (auto k : {RelationKind::equality, RelationKind::corestriction, RelationKind::restriction,
                 RelationKind::prolongation, RelationKind::intersection, RelationKind::difference}) {
    if (to_string(k) == text) return k;
  }
  throw Error(ErrorCode::parse, "unknown relation '" + std::string(text) + "'");
}

Direction parse_direction(std::string_view text) {
  for (auto d : {Direction::left_to_right, Direction::right_to_left, Direction::symmetric}) {
    if (to_string(d) == text) return d;
  }
  throw Error(ErrorCode::parse, "unknown direction '" + std::string(text) + "'");
}

int priority(RelationKind kind) {
  switch (kind) {
    case RelationKind::equality: return 1;
    case RelationKind::corestriction: return 2;
    case RelationKind::restriction: return 3;
    case RelationKind::prolongation: return 4;
    case RelationKind::intersection: return 5;
    case RelationKind::difference: return 6;
  }
  return 6;
}

SetRelation relation_from_matrix(const SimilarityMatrix& m, std::size_t rows, std::size_t cols,
                                 double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "threshold must lie in (0,1)");
  }
  bool rows_covered = true;
  bool any = false;
  std::vector<bool> col_hit(cols, false);
  for (std::size_t i = 0; i < rows; ++i) {
    bool hit = false;
    for (std::size_t j = 0; j < cols; ++j) {
      if (m(i, j) > threshold) {
        hit = true;
        col_hit[j] = true;
      }
    }
    rows_covered = rows_covered && hit;
    any = any || hit;
  }
  bool cols_covered = std::all_of(col_hit.begin(), col_hit.end(), [](bool b) { return b; });

  if (rows_covered && cols_covered) return SetRelation::equal;
  if (rows_covered) return SetRelation::left_subset_of_right;
  if (cols_covered) return SetRelation::right_subset_of_left;
  if (!any) return SetRelation::disjoint;
  return SetRelation::intersect;
}

SetRelation data_set_relation(const SimilarityEngine& engine, const DataSet& e1, const DataSet& e2,
                              double threshold) {
  auto m = engine.data_set_matrix(e1, e2);
  return relation_from_matrix(m, e1.size(), e2.size(), threshold);
}

OperationRelation classify_operation_pair(SetRelation in, SetRelation out) {
  using K = RelationKind;
  if (in == SetRelation::equal && out == SetRelation::equal) return {K::equality, Direction::symmetric};
  if (in == SetRelation::disjoint || out == SetRelation::disjoint) {
    return {K::difference, Direction::symmetric};
  }
  if (in == SetRelation::equal && is_subset(out)) return {K::corestriction, direction_of(out)};
  if (out == SetRelation::equal && is_subset(in)) return {K::restriction, direction_of(in)};
  if (is_subset(in) && in == out) return {K::prolongation, direction_of(in)};
  return {K::intersection, Direction::symmetric};
}

std::optional<std::size_t> CorrespondenceTable::row_index(std::string_view id) const {
  auto it = std::find(rows.begin(), rows.end(), id);
  if (it == rows.end()) return std::nullopt;
  return static_cast<std::size_t>(it - rows.begin());
}

std::optional<std::size_t> CorrespondenceTable::col_index(std::string_view id) const {
  auto it = std::find(cols.begin(), cols.end(), id);
  if (it == cols.end()) return std::nullopt;
  return static_cast<std::size_t>(it - cols.begin());
}

std::string render_cell(const CorrespondenceCell& cell) {
  return std::string(to_string(cell.relation.kind)) + "(" + format_score(cell.score) + ")";
}

CorrespondenceTable build_correspondence_table(const SimilarityEngine& engine,
                                               const ServiceDescription& substituted,
                                               const ServiceDescription& substituent,
                                               const SimilarityMatrix& operation_scores,
                                               double threshold) {
  const auto n = substituted.operations.size();
  const auto m = substituent.operations.size();
  if (operation_scores.rows() != n || operation_scores.cols() != m) {
    throw Error(ErrorCode::invalid_argument,
                "score matrix is " + std::to_string(operation_scores.rows()) + "x" +
                    std::to_string(operation_scores.cols()) + ", expected " + std::to_string(n) +
                    "x" + std::to_string(m));
  }
  CorrespondenceTable table;
  table.threshold = threshold;
  for (const auto& op : substituted.operations) table.rows.push_back(op.wsdl_id);
  for (const auto& op : substituent.operations) table.cols.push_back(op.wsdl_id);
  table.cells.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = substituted.operations[i];
    for (std::size_t j = 0; j < m; ++j) {
      const auto& b = substituent.operations[j];
      CorrespondenceCell cell;
      cell.input_relation = data_set_relation(engine, a.input, b.input, threshold);
      cell.output_relation = data_set_relation(engine, a.output, b.output, threshold);
      cell.relation = classify_operation_pair(cell.input_relation, cell.output_relation);
      cell.score = operation_scores(i, j);
      table.cells.push_back(cell);
    }
  }
  return table;
}

std::vector<RowSuggestions> suggest_matching(const CorrespondenceTable& table) {
  std::vector<RowSuggestions> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    RowSuggestions row{table.rows[r], {}};
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      const auto& cell = table.at(r, c);
      if (cell.relation.kind == RelationKind::difference) continue;
      row.ranked.push_back({table.cols[c], cell.relation, cell.score});
    }
    std::stable_sort(row.ranked.begin(), row.ranked.end(),
                     [](const Suggestion& a, const Suggestion& b) {
                       auto pa = priority(a.relation.kind), pb = priority(b.relation.kind);
                       if (pa != pb) return pa < pb;
                       if (a.score != b.score) return a.score > b.score;
                       return a.column < b.column;
                     });
    out.push_back(std::move(row));
  }
  return out;
}

nlohmann::json to_json(const CorrespondenceTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < table.cols.size(); ++c) {
      const auto& cell = table.at(r, c);
      row.push_back({{"relation", to_string(cell.relation.kind)},
                     {"direction", to_string(cell.relation.direction)},
                     {"score", cell.score},
                     {"inputRelation", to_string(cell.input_relation)},
                     {"outputRelation", to_string(cell.output_relation)},
                     {"label", render_cell(cell)}});
    }
    cells.push_back(std::move(row));
  }
  return {{"rows", table.rows}, {"cols", table.cols}, {"threshold", table.threshold},
          {"cells", std::move(cells)}};
}

namespace {

SetRelation parse_set_relation(std::string_view text) {
  for (auto r : {SetRelation::equal, SetRelation::left_subset_of_right,
                 SetRelation::right_subset_of_left, SetRelation::intersect, SetRelation::disjoint}) {
    if (to_string(r) == text) return r;
  }
  throw Error(ErrorCode::parse, "unknown set relation '" + std::string(text) + "'");
}

}  // namespace

CorrespondenceTable table_from_json(const nlohmann::json& j) {
  CorrespondenceTable t;
  t.rows = j.at("rows").get<std::vector<std::string>>();
  t.cols = j.at("cols").get<std::vector<std::string>>();
  t.threshold = j.value("threshold", kDefaultThreshold);
  const auto& cells = j.at("cells");
  if (cells.size() != t.rows.size()) throw Error(ErrorCode::parse, "table row count mismatch");
  for (const auto& row : cells) {
    if (row.size() != t.cols.size()) throw Error(ErrorCode::parse, "table column count mismatch");
    for (const auto& c : row) {
      CorrespondenceCell cell;
      cell.relation.kind = parse_relation_kind(c.at("relation").get<std::string>());
      cell.relation.direction = parse_direction(c.at("direction").get<std::string>());
      cell.score = c.at("score").get<double>();
      cell.input_relation = parse_set_relation(c.value("inputRelation", "Disjoint"));
      cell.output_relation = parse_set_relation(c.value("outputRelation", "Disjoint"));
      t.cells.push_back(cell);
    }
  }
  return t;
}

nlohmann::json to_json(const std::vector<RowSuggestions>& suggestions) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : suggestions) {
    nlohmann::json ranked = nlohmann::json::array();
    for (const auto& s : row.ranked) {
      ranked.push_back({{"column", s.column},
                        {"relation", to_string(s.relation.kind)},
                        {"direction", to_string(s.relation.direction)},
                        {"score", s.score}});
    }
    out.push_back({{"row", row.row}, {"noSuggestion", row.no_suggestion()}, {"ranked", ranked}});
  }
  return out;
}

std::string format_table(const CorrespondenceTable& table) {
  std::vector<std::vector<std::string>> grid;
  grid.push_back({""});
  for (const auto& c : table.cols) grid[0].push_back(c);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> line{table.rows[r]};
    for (std::size_t c = 0; c < table.cols.size(); ++c) line.push_back(render_cell(table.at(r, c)));
    grid.push_back(std::move(line));
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& line : grid) {
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
  }
  std::ostringstream out;
  for (const auto& line : grid) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      out << line[k];
      if (k + 1 < line.size()) out << std::string(width[k] - line[k].size() + 2, ' ');
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace wssubst
