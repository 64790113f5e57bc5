#pragma once

#include <string>

namespace femscript
{

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

} // namespace femscript
