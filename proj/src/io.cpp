#include "mfid/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mfid::io {

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Vector parse_csv_doubles(std::string_view line)
{
    Vector out;
    std::size_t pos = 0;
    while (pos <= line.size()) {
        std::size_t end = line.find(',', pos);
        if (end == std::string_view::npos)
            end = line.size();
        std::string_view field = line.substr(pos, end - pos);
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.remove_suffix(1);
        while (!field.empty() && field.front() == ' ')
            field.remove_prefix(1);
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (res.ec != std::errc() || res.ptr != field.data() + field.size())
            throw std::runtime_error("malformed number '" + std::string(field) + "'");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

std::string read_text(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& content)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os << content;
    if (!os)
        throw std::runtime_error("write failed: " + path);
}

}  // namespace mfid::io
