#include "pan/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "pan/errors.hpp"

namespace pan {

namespace {

std::vector<std::string> split_record(const std::string& line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (quoted)
    throw ParseError("unterminated quote at line " + std::to_string(lineno));
  out.push_back(field);
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& col) {
  const std::string s = trimmed(raw);
  if (s.empty())
    throw ParseError("missing value at row " + std::to_string(row) + ", column " + col);
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size())
    throw ParseError("malformed numeric cell '" + s + "' at row " + std::to_string(row) +
                     ", column " + col);
  return v;
}

}  // namespace

CsvTable read_csv_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() && in.peek() == EOF && !t.header.empty()) break;
    auto rec = split_record(line, lineno);
    if (t.header.empty()) {
      t.header = rec;
    } else {
      if (rec.size() == 1 && trimmed(rec[0]).empty()) continue;  // blank line
      t.rows.push_back(std::move(rec));
    }
  }
  if (t.header.empty()) throw SchemaError("'" + path + "' has no header row");
  std::set<std::string> seen;
  for (auto& h : t.header) {
    h = trimmed(h);
    if (!seen.insert(h).second)
      throw SchemaError("duplicate header name '" + h + "' in '" + path + "'");
  }
  return t;
}

Dataset ingest_csv(const std::string& path, const std::string& outcome,
                   const std::vector<std::string>& covariates) {
  CsvTable t = read_csv_table(path);

  auto col_index = [&](const std::string& name) -> std::size_t {
    for (std::size_t j = 0; j < t.header.size(); ++j)
      if (t.header[j] == name) return j;
    throw SchemaError("column '" + name + "' not found in '" + path + "'");
  };

  const std::size_t ycol = col_index(outcome);
  std::vector<std::size_t> xcols;
  std::vector<std::string> xnames;
  if (covariates.empty()) {
    for (std::size_t j = 0; j < t.header.size(); ++j)
      if (j != ycol) {
        xcols.push_back(j);
        xnames.push_back(t.header[j]);
      }
  } else {
    for (const auto& name : covariates) {
      const std::size_t j = col_index(name);
      if (j == ycol) throw SchemaError("outcome column listed as covariate");
      xcols.push_back(j);
      xnames.push_back(name);
    }
  }
  if (xcols.empty()) throw SchemaError("no covariate columns");
  if (t.rows.empty()) throw SchemaError("'" + path + "' has no data rows");

  Dataset d;
  d.x = Matrix(t.rows.size(), xcols.size());
  d.y.resize(t.rows.size());
  d.column_names = xnames;
  std::string problems;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& rec = t.rows[i];
    if (rec.size() != t.header.size()) {
      problems += "row " + std::to_string(i + 1) + ": expected " +
                  std::to_string(t.header.size()) + " fields, got " +
                  std::to_string(rec.size()) + "\n";
      continue;
    }
    try {
      for (std::size_t k = 0; k < xcols.size(); ++k)
        d.x(i, k) = parse_cell(rec[xcols[k]], i + 1, t.header[xcols[k]]);
      d.y[i] = parse_cell(rec[ycol], i + 1, outcome);
    } catch (const ParseError& e) {
      problems += std::string(e.what()) + "\n";
    }
  }
  if (!problems.empty()) throw ParseError("rejected rows in '" + path + "':\n" + problems);
  return d;
}

}  // namespace pan
