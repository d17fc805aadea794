#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace oamcoinc {

// Degrees are divided by 180 before the pi multiply so that the anchor
// angles 0/90/180/360 convert to exact multiples of pi/2.
inline double deg_to_rad(double deg) {
    return (deg / 180.0) * std::numbers::pi;
}

/// CLI angle syntax: bare numbers are degrees; `deg`/`rad` suffixes are
/// explicit ("90", "90deg", "1.5707963267948966rad").
inline double parse_angle(const std::string& text) {
    std::string t = text;
    bool degrees = true;
    if (t.size() > 3 && t.substr(t.size() - 3) == "deg") {
        t = t.substr(0, t.size() - 3);
    } else if (t.size() > 3 && t.substr(t.size() - 3) == "rad") {
        t = t.substr(0, t.size() - 3);
        degrees = false;
    }
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse angle '" + text + "'");
    }
    if (pos != t.size())
        throw std::invalid_argument("cannot parse angle '" + text + "'");
    return degrees ? deg_to_rad(v) : v;
}

}  // namespace oamcoinc
