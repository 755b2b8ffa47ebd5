#ifndef SQUEEZELIM_TABLE_HPP
#define SQUEEZELIM_TABLE_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace squeezelim
{

inline constexpr const char* version = "0.1.0";

inline constexpr const char* sbp_definition =
    "sbp = omega_hwhm / S_hh(0): half-width half-maximum bandwidth [rad/s] over the zero-frequency strain PSD";

// 12 significant digits; nan/inf spelled out so CSV stays parseable.
inline std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

// The double nearest to the 12-digit rendering, so JSON dumps carry the same digits.
inline double round_12(double x)
{
    if (!std::isfinite(x)) return x;
    return std::strtod(format_number(x).c_str(), nullptr);
}

inline std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// A CSV dataset: '#' comment lines, one column line, then rows of
// pre-formatted cells.
struct Table
{
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

inline void write_csv(std::ostream& os, const Table& t)
{
    for (const auto& c : t.comments) os << "# " << c << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

}  // namespace squeezelim

#endif
