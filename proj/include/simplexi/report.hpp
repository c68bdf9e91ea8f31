#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace simplexi {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Quotes a field when it holds a comma, quote, CR or LF; quotes are doubled.
std::string csv_escape(const std::string& field);

/// Header row then data rows, CRLF-free ('\n' line ends).
void write_csv(std::ostream& out, const CsvTable& table);
void save_csv(const std::filesystem::path& path, const CsvTable& table);

/// Parses what write_csv produces (quoted fields, doubled quotes, embedded
/// newlines). The first record becomes the header.
CsvTable read_csv(std::istream& in);

struct Series {
  std::string name;
  std::vector<double> values;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<Series> series;  // each the same length as x
  bool log_y = false;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> categories;
  std::vector<Series> series;  // one bar per series per category
  bool log_y = false;
};

// Standalone SVG documents. Every plotted point carries data-x / data-y (or
// data-category / data-value) attributes holding the exact number so the
// chart can be checked against the CSV it came from.
std::string render_line_chart(const LineChart& chart);
std::string render_bar_chart(const BarChart& chart);

std::string xml_escape(const std::string& text);

/// Lowercase alphanumerics, everything else collapsed to '_'.
std::string slugify(const std::string& text);

void save_text(const std::filesystem::path& path, const std::string& text);

}  // namespace simplexi
