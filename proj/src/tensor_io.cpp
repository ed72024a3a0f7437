#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "stainbench/io.hpp"

namespace stainbench {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'R', '1'};

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("truncated tensor file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

std::size_t Tensor::count() const {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return dims.empty() ? 0 : n;
}

std::vector<double> Tensor::as_doubles() const {
    return std::vector<double>(data.begin(), data.end());
}

Tensor Tensor::from_doubles(std::vector<std::uint32_t> dims,
                            const std::vector<double>& values) {
    Tensor t;
    t.dims = std::move(dims);
    t.data.assign(values.begin(), values.end());
    if (t.count() != t.data.size()) {
        throw std::invalid_argument("tensor payload length does not match dims");
    }
    return t;
}

void write_tensor(const Tensor& t, const std::string& path) {
    if (t.dims.empty() || t.dims.size() > 4) {
        throw std::invalid_argument("tensor ndim must be in [1,4]");
    }
    if (t.count() != t.data.size()) {
        throw std::invalid_argument("tensor payload length does not match dims");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) put_u32(os, d);
    static_assert(sizeof(float) == 4);
    for (float v : t.data) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(os, bits);
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

Tensor read_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("bad tensor magic in " + path);
    }
    const std::uint32_t ndim = get_u32(is);
    if (ndim < 1 || ndim > 4) {
        std::ostringstream msg;
        msg << "tensor ndim " << ndim << " outside [1,4] in " << path;
        throw std::runtime_error(msg.str());
    }
    Tensor t;
    t.dims.resize(ndim);
    std::size_t n = 1;
    for (auto& d : t.dims) {
        d = get_u32(is);
        if (d == 0 || n > (1u << 30) / std::max<std::size_t>(d, 1)) {
            throw std::runtime_error("tensor dims invalid or too large in " + path);
        }
        n *= d;
    }
    t.data.resize(n);
    for (auto& v : t.data) {
        const std::uint32_t bits = get_u32(is);
        std::memcpy(&v, &bits, 4);
    }
    return t;
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace stainbench
