#include "bregpower/csv_loader.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "bregpower/errors.hpp"

namespace bregpower {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> to_number(const std::string& field) {
  if (field.empty()) return std::nullopt;
  const char* begin = field.data();
  if (*begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& header,
                    std::size_t width) {
  if (const auto* index = std::get_if<std::size_t>(&ref)) {
    if (*index >= width) {
      throw ParseError("column " + std::to_string(*index) + " out of range", 1);
    }
    return *index;
  }
  const auto& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError("no column named '" + name + "'", 1);
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

CsvData parse_csv(const std::string& text, const ColumnSpec& spec) {
  struct Line {
    std::size_t number;
    std::vector<std::string> fields;
  };
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  for (std::size_t number = 1; std::getline(in, raw); ++number) {
    if (trim(raw).empty()) continue;
    lines.push_back({number, split(raw)});
  }
  if (lines.empty()) throw ParseError("no data rows", 1);

  CsvData out;
  const bool first_numeric = std::all_of(lines.front().fields.begin(), lines.front().fields.end(),
                                         [](const std::string& f) { return to_number(f).has_value(); });
  std::size_t first_data = 0;
  if (!first_numeric && lines.size() > 1) {
    out.header = lines.front().fields;
    first_data = 1;
  }
  const std::size_t width = lines[first_data].fields.size();

  std::optional<std::size_t> label_col;
  if (spec.label_column) label_col = resolve(*spec.label_column, out.header, width);
  std::vector<std::size_t> cols;
  for (const auto& ref : spec.columns) cols.push_back(resolve(ref, out.header, width));
  if (cols.empty()) {
    for (std::size_t c = 0; c < width; ++c) {
      if (c != label_col) cols.push_back(c);
    }
  }
  if (cols.empty()) throw ParseError("no feature columns selected", lines.front().number);

  std::vector<double> values;
  Labels labels;
  std::map<std::string, std::size_t> label_ids;
  std::size_t kept = 0;
  for (std::size_t l = first_data; l < lines.size(); ++l) {
    const Line& line = lines[l];
    if (line.fields.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " +
                           std::to_string(line.fields.size()),
                       line.number);
    }
    std::vector<double> row;
    row.reserve(cols.size());
    for (std::size_t c : cols) {
      const auto v = to_number(line.fields[c]);
      if (!v) throw ParseError("non-numeric value '" + line.fields[c] + "'", line.number);
      row.push_back(*v);
    }
    if (spec.positive_only && std::any_of(row.begin(), row.end(), [](double v) { return !(v > 0.0); })) {
      ++out.dropped;
      continue;
    }
    if (label_col) {
      const auto [it, inserted] = label_ids.emplace(line.fields[*label_col], label_ids.size());
      labels.push_back(it->second);
    }
    values.insert(values.end(), row.begin(), row.end());
    ++kept;
  }
  if (kept == 0) throw EmptyAfterFilter("no rows left after filtering");

  out.data = Dataset(kept, cols.size());
  std::copy(values.begin(), values.end(), out.data.values().begin());
  if (label_col) out.labels = std::move(labels);
  return out;
}

CsvData load_csv(const std::filesystem::path& path, const ColumnSpec& spec) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open CSV file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_csv(buffer.str(), spec);
}

}  // namespace bregpower
