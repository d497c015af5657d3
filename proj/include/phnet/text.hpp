#pragma once

#include <optional>
#include <string>
#include <vector>

namespace phnet {

std::string to_lower(const std::string& s);
std::string trim(const std::string& s);
bool iequals(const std::string& a, const std::string& b);

// Splits on commas; no quoting, the file formats here never embed commas.
std::vector<std::string> split_commas(const std::string& line);

// Shortest decimal form that round-trips a double (17 significant digits).
std::string format_g17(double v);

std::optional<double> parse_double(const std::string& s);
std::optional<long long> parse_int(const std::string& s);
std::optional<unsigned long long> parse_uint(const std::string& s);

std::string read_file(const std::string& path);           // throws IoError
void write_file(const std::string& path, const std::string& content);

}  // namespace phnet
