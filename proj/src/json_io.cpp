#include "stainbench/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "stainbench/io.hpp"

namespace stainbench {
namespace json_io {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

void append_double(std::string& out, double v) {
    if (std::isnan(v)) {
        out += "\"nan\"";
        return;
    }
    if (std::isinf(v)) {
        out += v > 0 ? "\"inf\"" : "\"-inf\"";
        return;
    }
    if (v == 0.0) v = 0.0;  // avoid "-0"
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    out += buf;
}

void write_value(std::string& out, const json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                append_escaped(out, it.key());
                out += ": ";
                write_value(out, it.value(), depth + 1);
            }
            out += '\n';
            out += pad;
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += pad_in;
                write_value(out, v, depth + 1);
            }
            out += '\n';
            out += pad;
            out += ']';
            return;
        }
        case json::value_t::string:
            append_escaped(out, j.get_ref<const std::string&>());
            return;
        case json::value_t::boolean:
            out += j.get<bool>() ? "true" : "false";
            return;
        case json::value_t::number_integer: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%lld",
                          static_cast<long long>(j.get<std::int64_t>()));
            out += buf;
            return;
        }
        case json::value_t::number_unsigned: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%llu",
                          static_cast<unsigned long long>(j.get<std::uint64_t>()));
            out += buf;
            return;
        }
        case json::value_t::number_float:
            append_double(out, j.get<double>());
            return;
        default:
            out += "null";
            return;
    }
}

}  // namespace

std::string dump(const json& j) {
    std::string out;
    write_value(out, j, 0);
    out += '\n';
    return out;
}

json number(double v) {
    if (std::isnan(v)) return json("nan");
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

double to_double(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw std::invalid_argument("expected a number, got: " + j.dump());
}

json parse(const std::string& text) {
    return json::parse(text);
}

json load_file(const std::string& path) {
    return json::parse(read_text_file(path));
}

void save_file(const json& j, const std::string& path) {
    write_text_file(path, dump(j));
}

}  // namespace json_io
}  // namespace stainbench
