#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bregpower/matrix.hpp"

namespace bregpower {

// A column named by zero-based position or by header name.
using ColumnRef = std::variant<std::size_t, std::string>;

struct ColumnSpec {
  // Feature columns; empty selects every column except the label column.
  std::vector<ColumnRef> columns;
  // Ground-truth labels; values are mapped to indices in order of first appearance.
  std::optional<ColumnRef> label_column;
  // Drop rows with any feature value <= 0 (e.g. dry days in rainfall records).
  bool positive_only = false;
};

struct CsvData {
  Dataset data;
  std::optional<Labels> labels;
  std::vector<std::string> header;
  std::size_t dropped = 0;
};

// Reads comma-separated numeric data. The first line is a header when it
// holds a non-numeric field and more lines follow.
CsvData load_csv(const std::filesystem::path& path, const ColumnSpec& spec = {});
CsvData parse_csv(const std::string& text, const ColumnSpec& spec = {});

}  // namespace bregpower
