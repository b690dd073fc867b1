#pragma once

#include <map>
#include <string>

namespace flattop {

//! "name:key=value,key=value" split into a name and numeric parameters.
struct NamedParams
{
  std::string name;
  std::map<std::string, double> params;

  //! Removes and returns `key`, or `fallback` when absent.
  double take(const std::string& key, double fallback);
  //! Throws InvalidInput naming the first parameter nobody consumed.
  void expect_consumed(const std::string& what) const;
};

//! `what` names the thing being parsed in error messages ("window", "model").
NamedParams parse_named_params(const std::string& text, const std::string& what);

} // namespace flattop
