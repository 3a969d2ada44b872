#include "medbin/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <istream>
#include <ostream>
#include <string_view>

namespace medbin::io {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\f\v");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void limit_exceeded(std::size_t max_values) {
    throw ParseError("input holds more than " + std::to_string(max_values) +
                     " values; the median algorithms need all data in memory");
}

std::uint64_t to_little_endian(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
    return v;
}

} // namespace

Format format_from_name(const std::string& s) {
    if (s == "text") return Format::Text;
    if (s == "binary") return Format::Binary;
    throw ParseError("unknown input format '" + s + "' (expected text or binary)");
}

std::vector<double> read_text(std::istream& in, std::size_t max_values) {
    std::vector<double> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = trim(line);
        if (s.empty()) continue;
        if (s.front() == '+') s.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc::result_out_of_range) {
            throw ParseError("line " + std::to_string(line_no) + ": value out of range");
        }
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": not a number: '" +
                             std::string(trim(line)) + "'");
        }
        if (!std::isfinite(v)) {
            throw ParseError("line " + std::to_string(line_no) + ": non-finite value");
        }
        if (out.size() == max_values) limit_exceeded(max_values);
        out.push_back(v);
    }
    return out;
}

std::vector<double> read_binary(std::istream& in, std::size_t max_values) {
    std::vector<double> out;
    std::vector<char> chunk(std::size_t{1} << 16);
    std::uint64_t offset = 0;
    for (;;) {
        in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
        const auto got = static_cast<std::size_t>(in.gcount());
        if (got == 0) break;
        const std::size_t whole = got / 8;
        for (std::size_t i = 0; i < whole; ++i, offset += 8) {
            std::uint64_t bits = 0;
            std::memcpy(&bits, chunk.data() + 8 * i, sizeof bits);
            const double v = std::bit_cast<double>(to_little_endian(bits));
            if (!std::isfinite(v)) {
                throw ParseError("byte offset " + std::to_string(offset) + ": non-finite value");
            }
            if (out.size() == max_values) limit_exceeded(max_values);
            out.push_back(v);
        }
        if (got % 8 != 0) {
            // The chunk size is a multiple of 8, so a partial value means end of input.
            throw ParseError("byte offset " + std::to_string(offset) + ": truncated value (" +
                             std::to_string(got % 8) + " trailing bytes)");
        }
        if (got < chunk.size()) break;
    }
    return out;
}

std::vector<double> read_input(const InputSpec& spec) {
    if (spec.path == "-") {
        return spec.format == Format::Text ? read_text(std::cin, spec.max_values)
                                           : read_binary(std::cin, spec.max_values);
    }
    std::ifstream f(spec.path, spec.format == Format::Binary ? std::ios::binary : std::ios::in);
    if (!f) throw ParseError("cannot open input '" + spec.path + "'");
    return spec.format == Format::Text ? read_text(f, spec.max_values)
                                       : read_binary(f, spec.max_values);
}

void write_binary(std::ostream& out, std::span<const double> values) {
    for (const double v : values) {
        const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
}

void write_text(std::ostream& out, std::span<const double> values) {
    for (const double v : values) out << format_double(v) << '\n';
}

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return {buf.data(), ptr};
}

} // namespace medbin::io
