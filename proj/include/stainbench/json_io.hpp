#pragma once

#include <string>

#include <json.hpp>

namespace stainbench {
namespace json_io {

using json = nlohmann::json;

/// Deterministic serialization: keys sorted, two-space indent, reals printed
/// with 6 significant digits, non-finite reals as the strings
/// "inf" / "-inf" / "nan".
std::string dump(const json& j);

/// Wraps a real for storage; non-finite values become their string form.
json number(double v);

/// Reads a real that may have been stored as "inf"/"-inf"/"nan".
double to_double(const json& j);

json parse(const std::string& text);
json load_file(const std::string& path);
void save_file(const json& j, const std::string& path);

}  // namespace json_io
}  // namespace stainbench
