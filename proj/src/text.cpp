#include "mdcrbm/text.hpp"

#include <charconv>
#include <system_error>

#include "mdcrbm/errors.hpp"

namespace mdcrbm {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw Error("to_chars failed");
    return std::string(buf, p);
}

double parse_double(std::string_view s) {
    if (s.empty()) throw DataFormatError("empty numeric field");
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw DataFormatError("bad numeric field: '" + std::string(s) + "'");
    return v;
}

}  // namespace mdcrbm
