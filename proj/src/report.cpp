#include "simplexi/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "simplexi/snapshot.hpp"
#include "simplexi/types.hpp"

namespace simplexi {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

namespace {

void write_record(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(fields[i]);
  }
  out << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  write_record(out, table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size())
      throw DimensionError("write_csv: row has " + std::to_string(row.size()) + " fields, header has " +
                           std::to_string(table.header.size()));
    write_record(out, row);
  }
}

void save_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ostringstream buf;
  write_csv(buf, table);
  save_text(path, buf.str());
}

CsvTable read_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  char ch;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted) throw ParseError("read_csv: unterminated quoted field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  CsvTable table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  return table;
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string slugify(const std::string& text) {
  std::string out;
  bool pending = false;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      if (pending && !out.empty()) out += '_';
      pending = false;
      out += static_cast<char>(std::tolower(ch));
    } else {
      pending = true;
    }
  }
  return out.empty() ? std::string("chart") : out;
}

void save_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 160, kTop = 40, kBottom = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;

  double map(double v, double px_lo, double px_hi) const {
    const double a = log ? std::log10(lo) : lo;
    const double b = log ? std::log10(hi) : hi;
    const double t = ((log ? std::log10(v) : v) - a) / (b - a);
    return px_lo + t * (px_hi - px_lo);
  }
};

Axis fit_axis(const std::vector<double>& vals, bool log, bool include_zero) {
  Axis ax;
  ax.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : vals) {
    if (!std::isfinite(v) || (log && v <= 0)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) {
    lo = log ? 1 : 0;
    hi = log ? 10 : 1;
  }
  if (include_zero && !log) lo = std::min(lo, 0.0);
  if (log) {
    lo = std::pow(10.0, std::floor(std::log10(lo)));
    hi = std::pow(10.0, std::ceil(std::log10(hi)));
    if (hi <= lo) hi = lo * 10;
  } else if (hi <= lo) {
    hi = lo + (lo == 0 ? 1 : std::abs(lo));
  }
  ax.lo = lo;
  ax.hi = hi;
  return ax;
}

std::vector<double> ticks(const Axis& ax) {
  std::vector<double> out;
  if (ax.log) {
    for (double v = ax.lo; v <= ax.hi * 1.0000001; v *= 10) out.push_back(v);
  } else {
    for (int i = 0; i <= 5; ++i) out.push_back(ax.lo + (ax.hi - ax.lo) * i / 5.0);
  }
  return out;
}

void open_svg(std::ostream& s, const std::string& title) {
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">"
    << xml_escape(title) << "</text>\n";
}

void y_axis(std::ostream& s, const Axis& ay, const std::string& label) {
  const double x0 = kLeft, y0 = kHeight - kBottom, y1 = kTop;
  s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
    << "\" stroke=\"black\"/>\n";
  for (double t : ticks(ay)) {
    const double y = ay.map(t, y0, y1);
    s << "<line x1=\"" << x0 - 4 << "\" y1=\"" << y << "\" x2=\"" << x0 << "\" y2=\"" << y
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << x0 - 6 << "\" y=\"" << y + 4
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
      << "</text>\n";
  }
  s << "<text x=\"18\" y=\"" << (y0 + y1) / 2 << "\" transform=\"rotate(-90 18 " << (y0 + y1) / 2
    << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << xml_escape(label) << "</text>\n";
}

void legend(std::ostream& s, const std::vector<Series>& series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    const double x = kWidth - kRight + 12;
    s << "<rect x=\"" << x << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
      << kPalette[i % 8] << "\"/>\n"
      << "<text x=\"" << x + 18 << "\" y=\"" << y + 1
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(series[i].name)
      << "</text>\n";
  }
}

}  // namespace

std::string render_line_chart(const LineChart& chart) {
  for (const auto& s : chart.series)
    if (s.values.size() != chart.x.size())
      throw DimensionError("render_line_chart: series '" + s.name + "' length differs from x");
  std::vector<double> ys;
  for (const auto& s : chart.series) ys.insert(ys.end(), s.values.begin(), s.values.end());
  const Axis ax = fit_axis(chart.x, false, false);
  const Axis ay = fit_axis(ys, chart.log_y, true);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::ostringstream s;
  open_svg(s, chart.title);
  y_axis(s, ay, chart.y_label);
  s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
    << "\" stroke=\"black\"/>\n";
  for (double t : ticks(ax)) {
    const double x = ax.map(t, x0, x1);
    s << "<text x=\"" << x << "\" y=\"" << y0 + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(t)
      << "</text>\n";
  }
  s << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 16
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
    << xml_escape(chart.x_label) << "</text>\n";

  for (std::size_t i = 0; i < chart.series.size(); ++i) {
    const auto& ser = chart.series[i];
    const char* color = kPalette[i % 8];
    s << "<g class=\"series\" data-name=\"" << xml_escape(ser.name) << "\">\n<polyline fill=\"none\" stroke=\""
      << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t p = 0; p < chart.x.size(); ++p) {
      const double v = ser.values[p];
      if (!std::isfinite(v) || (chart.log_y && v <= 0)) continue;
      if (!first) s << ' ';
      first = false;
      s << ax.map(chart.x[p], x0, x1) << ',' << ay.map(v, y0, y1);
    }
    s << "\"/>\n";
    for (std::size_t p = 0; p < chart.x.size(); ++p) {
      const double v = ser.values[p];
      if (!std::isfinite(v) || (chart.log_y && v <= 0)) continue;
      s << "<circle cx=\"" << ax.map(chart.x[p], x0, x1) << "\" cy=\"" << ay.map(v, y0, y1)
        << "\" r=\"3\" fill=\"" << color << "\" data-x=\"" << format_double(chart.x[p])
        << "\" data-y=\"" << format_double(v) << "\"/>\n";
    }
    s << "</g>\n";
  }
  legend(s, chart.series);
  s << "</svg>\n";
  return s.str();
}

std::string render_bar_chart(const BarChart& chart) {
  for (const auto& s : chart.series)
    if (s.values.size() != chart.categories.size())
      throw DimensionError("render_bar_chart: series '" + s.name + "' length differs from categories");
  std::vector<double> ys;
  for (const auto& s : chart.series) ys.insert(ys.end(), s.values.begin(), s.values.end());
  const Axis ay = fit_axis(ys, chart.log_y, true);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  const double base = ay.log ? ay.lo : 0.0;

  std::ostringstream s;
  open_svg(s, chart.title);
  y_axis(s, ay, chart.y_label);
  s << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
    << "\" stroke=\"black\"/>\n";

  const std::size_t ncat = std::max<std::size_t>(chart.categories.size(), 1);
  const std::size_t nser = std::max<std::size_t>(chart.series.size(), 1);
  const double slot = (x1 - x0) / static_cast<double>(ncat);
  const double bar = slot * 0.8 / static_cast<double>(nser);
  for (std::size_t c = 0; c < chart.categories.size(); ++c) {
    const double cx = x0 + slot * (static_cast<double>(c) + 0.5);
    s << "<text x=\"" << cx << "\" y=\"" << y0 + 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">"
      << xml_escape(chart.categories[c]) << "</text>\n";
    for (std::size_t i = 0; i < chart.series.size(); ++i) {
      const double v = chart.series[i].values[c];
      const bool drawable = std::isfinite(v) && !(ay.log && v <= 0);
      const double top = drawable ? ay.map(v, y0, y1) : y0;
      const double bottom = ay.map(base, y0, y1);
      const double x = x0 + slot * static_cast<double>(c) + slot * 0.1 + bar * static_cast<double>(i);
      s << "<rect x=\"" << x << "\" y=\"" << std::min(top, bottom) << "\" width=\"" << bar
        << "\" height=\"" << std::abs(bottom - top) << "\" fill=\"" << kPalette[i % 8]
        << "\" data-series=\"" << xml_escape(chart.series[i].name) << "\" data-category=\""
        << xml_escape(chart.categories[c]) << "\" data-value=\"" << format_double(v) << "\"/>\n";
    }
  }
  legend(s, chart.series);
  s << "</svg>\n";
  return s.str();
}

}  // namespace simplexi
