#pragma once

#include "flattop/time_series.hpp"

#include <string>

namespace flattop {

//! Numeric text, one row per time step and one column per channel,
//! separated by whitespace or commas. Blank lines and lines starting with
//! '#' are skipped; a non-numeric first row is taken as channel labels.
TimeSeries read_series(const std::string& path);

//! Same format from an in-memory string.
TimeSeries parse_series(const std::string& text, const std::string& source = "<input>");

//! Frequency literal in radians: "0.5", "pi", "-pi/2", "2pi/3", "2*pi/3".
double parse_frequency(const std::string& text);

} // namespace flattop
