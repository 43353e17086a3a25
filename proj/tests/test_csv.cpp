#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "bregpower/csv_loader.hpp"
#include "bregpower/errors.hpp"

using namespace bregpower;

TEST(ParseCsv, HeaderAndAllColumns) {
  const CsvData d = parse_csv("a,b\n1,2\n3,4.5\n");
  EXPECT_EQ(d.header, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(d.data, (Matrix{{1, 2}, {3, 4.5}}));
  EXPECT_FALSE(d.labels.has_value());
  EXPECT_EQ(d.dropped, 0u);
}

TEST(ParseCsv, NoHeader) {
  const CsvData d = parse_csv("1, 2\r\n\n-3,+4e1\n");
  EXPECT_TRUE(d.header.empty());
  EXPECT_EQ(d.data, (Matrix{{1, 2}, {-3, 40}}));
}

TEST(ParseCsv, SelectsColumnsByNameAndIndex) {
  const std::string text = "station,rain,temp\nx,5,20\ny,0,21\nx,7,19\n";
  ColumnSpec spec;
  spec.columns = {std::string("temp"), std::size_t{1}};
  spec.label_column = std::string("station");
  const CsvData d = parse_csv(text, spec);
  EXPECT_EQ(d.data, (Matrix{{20, 5}, {21, 0}, {19, 7}}));
  EXPECT_EQ(*d.labels, (Labels{0, 1, 0}));
}

TEST(ParseCsv, PositiveOnlyDropsRows) {
  ColumnSpec spec;
  spec.columns = {std::string("rain")};
  spec.label_column = std::string("station");
  spec.positive_only = true;
  const CsvData d = parse_csv("station,rain\nb,0\na,3\nb,2\na,-1\n", spec);
  EXPECT_EQ(d.data, (Matrix{{3}, {2}}));
  EXPECT_EQ(*d.labels, (Labels{0, 1}));
  EXPECT_EQ(d.dropped, 2u);
}

TEST(ParseCsv, DefaultColumnsSkipLabel) {
  ColumnSpec spec;
  spec.label_column = std::size_t{0};
  const CsvData d = parse_csv("7,1,2\n8,3,4\n7,5,6\n", spec);
  EXPECT_EQ(d.data, (Matrix{{1, 2}, {3, 4}, {5, 6}}));
  EXPECT_EQ(*d.labels, (Labels{0, 1, 0}));
}

TEST(ParseCsv, ErrorsCarryLineNumbers) {
  try {
    parse_csv("a,b\n1,2\n3,oops\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_csv("a,b\n1,2\n\n3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  ColumnSpec spec;
  spec.columns = {std::string("missing")};
  EXPECT_THROW(parse_csv("a,b\n1,2\n", spec), ParseError);
  spec.columns = {std::size_t{5}};
  EXPECT_THROW(parse_csv("a,b\n1,2\n", spec), ParseError);
  EXPECT_THROW(parse_csv("\n\n"), ParseError);
}

TEST(ParseCsv, EverythingFiltered) {
  ColumnSpec spec;
  spec.positive_only = true;
  EXPECT_THROW(parse_csv("0,1\n-2,3\n", spec), EmptyAfterFilter);
}

TEST(LoadCsv, ReadsFileAndReportsMissing) {
  const auto path = std::filesystem::temp_directory_path() / "bregpower_test_load.csv";
  {
    std::ofstream f(path);
    f << "x\n1\n2\n";
  }
  EXPECT_EQ(load_csv(path).data, (Matrix{{1}, {2}}));
  std::filesystem::remove(path);
  try {
    load_csv(path);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
}
