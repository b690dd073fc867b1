#include "flattop/io.hpp"

#include "flattop/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace flattop {

namespace {

std::vector<std::string>
tokens(const std::string& line)
{
  std::string s = line;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) {
    out.push_back(t);
  }
  return out;
}

bool
to_double(const std::string& text, double& value)
{
  std::size_t used = 0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size();
}

std::string
trim(const std::string& s)
{
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) {
    return "";
  }
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

} // namespace

TimeSeries
parse_series(const std::string& text, const std::string& source)
{
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> columns;
  std::vector<std::string> labels;
  long lineno = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tokens(line);
    if (row.empty() || row.front().front() == '#') {
      continue;
    }
    std::vector<double> values(row.size());
    bool numeric = true;
    for (std::size_t k = 0; k < row.size(); ++k) {
      numeric = numeric && to_double(row[k], values[k]);
    }
    if (!numeric && first_row) {
      labels = row;
      first_row = false;
      continue;
    }
    if (!numeric) {
      throw InvalidInput(source + ":" + std::to_string(lineno) + ": not a number");
    }
    if (columns.empty()) {
      columns.resize(row.size());
    }
    if (row.size() != columns.size()) {
      throw InvalidInput(source + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(columns.size()) + " columns, found " +
                         std::to_string(row.size()));
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!std::isfinite(values[k])) {
        throw InvalidInput(source + ":" + std::to_string(lineno) + ": non-finite value");
      }
      columns[k].push_back(values[k]);
    }
    first_row = false;
  }
  if (columns.empty()) {
    throw InvalidInput(source + ": no observations");
  }
  if (!labels.empty() && labels.size() != columns.size()) {
    throw InvalidInput(source + ": header has " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(columns.size()) + " columns");
  }
  return TimeSeries(std::move(columns), std::move(labels));
}

TimeSeries
read_series(const std::string& path)
{
  std::ifstream in(path);
  if (!in) {
    throw InvalidInput("cannot read '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series(buf.str(), path);
}

double
parse_frequency(const std::string& text)
{
  const std::string s = trim(text);
  double value = 0.0;
  if (to_double(s, value)) {
    if (!std::isfinite(value)) {
      throw InvalidInput("frequency must be finite: '" + text + "'");
    }
    return value;
  }
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    throw InvalidInput("cannot parse frequency '" + text + "'");
  }
  std::string coef = s.substr(0, pos);
  std::string rest = s.substr(pos + 2);
  if (!coef.empty() && coef.back() == '*') {
    coef.pop_back();
  }
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (!coef.empty() && coef != "+" && !to_double(coef, c)) {
    throw InvalidInput("cannot parse frequency '" + text + "'");
  }
  double d = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/' || !to_double(rest.substr(1), d) || d == 0.0) {
      throw InvalidInput("cannot parse frequency '" + text + "'");
    }
  }
  return c * std::numbers::pi / d;
}

} // namespace flattop
