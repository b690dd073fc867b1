#pragma once

#include <stdexcept>
#include <string>

namespace flattop {

//! Invalid arguments or malformed input (bad parameters, non-finite data).
class InvalidInput : public std::invalid_argument
{
public:
  explicit InvalidInput(const std::string& what)
    : std::invalid_argument(what)
  {}
};

//! Data for which the requested quantity is undefined, e.g. a constant
//! channel whose variance estimate is zero.
class DegenerateInput : public std::runtime_error
{
public:
  explicit DegenerateInput(const std::string& what)
    : std::runtime_error(what)
  {}
};

//! A simulated reference table (garch/bilinear truth) has not been
//! materialized yet.
class MissingOracle : public std::runtime_error
{
public:
  explicit MissingOracle(const std::string& what)
    : std::runtime_error(what)
  {}
};

} // namespace flattop
