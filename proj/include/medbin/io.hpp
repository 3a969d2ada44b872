#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace medbin::io {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { Text, Binary };

Format format_from_name(const std::string& s);

struct InputSpec {
    std::string path = "-"; // "-" reads standard input
    Format format = Format::Text;
    std::size_t max_values = std::numeric_limits<std::size_t>::max();
};

/// One decimal number per line; blank lines ignored. Errors name the line.
std::vector<double> read_text(std::istream& in, std::size_t max_values = std::numeric_limits<std::size_t>::max());

/// Contiguous little-endian IEEE-754 doubles, no header. Errors name the byte offset.
std::vector<double> read_binary(std::istream& in, std::size_t max_values = std::numeric_limits<std::size_t>::max());

std::vector<double> read_input(const InputSpec& spec);

void write_binary(std::ostream& out, std::span<const double> values);
void write_text(std::ostream& out, std::span<const double> values);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

} // namespace medbin::io
