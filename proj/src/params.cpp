#include "flattop/params.hpp"

#include "flattop/error.hpp"

#include <sstream>

namespace flattop {

double
NamedParams::take(const std::string& key, double fallback)
{
  auto it = params.find(key);
  if (it == params.end()) {
    return fallback;
  }
  const double v = it->second;
  params.erase(it);
  return v;
}

void
NamedParams::expect_consumed(const std::string& what) const
{
  if (!params.empty()) {
    throw InvalidInput("unknown " + what + " parameter '" + params.begin()->first +
                       "' for " + name);
  }
}

NamedParams
parse_named_params(const std::string& text, const std::string& what)
{
  NamedParams out;
  const auto colon = text.find(':');
  out.name = text.substr(0, colon);
  if (out.name.empty()) {
    throw InvalidInput("empty " + what + " name in '" + text + "'");
  }
  if (colon == std::string::npos) {
    return out;
  }
  std::stringstream rest(text.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw InvalidInput("malformed " + what + " parameter '" + item + "' in '" + text + "'");
    }
    const std::string key = item.substr(0, eq);
    const std::string value_text = item.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(value_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value_text.size()) {
      throw InvalidInput(what + " parameter " + key + " is not a number: '" + value_text + "'");
    }
    out.params[key] = value;
  }
  return out;
}

} // namespace flattop
