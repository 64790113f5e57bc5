#include "femscript/numfmt.hpp"

#include <charconv>
#include <cmath>

namespace femscript
{

std::string format_real(double value)
{
    if(std::isnan(value))
        return "nan";
    if(std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if(value == 0.0)
        return std::signbit(value) ? "-0" : "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

} // namespace femscript
