#include "etsc/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace etsc {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'E', 'T', 'S', 'C'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kKindKernel = 0;
constexpr std::uint8_t kKindModes = 1;

// --- little-endian primitives ----------------------------------------------

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

void put_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    os.write(b, 8);
}

struct BinReader {
    std::istream& is;
    std::size_t offset = 0;

    void read(char* dst, std::size_t len, const char* what) {
        is.read(dst, static_cast<std::streamsize>(len));
        if (static_cast<std::size_t>(is.gcount()) != len)
            throw parse_error(std::string("truncated binary file reading ") + what,
                              "byte " + std::to_string(offset));
        offset += len;
    }
    std::uint8_t u8(const char* what) {
        char b;
        read(&b, 1, what);
        return static_cast<std::uint8_t>(b);
    }
    std::uint32_t u32(const char* what) {
        char b[4];
        read(b, 4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    }
    double f64(const char* what) {
        char b[8];
        read(b, 8, what);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

std::uint8_t read_binary_header(BinReader& r) {
    char magic[4];
    r.read(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw parse_error("bad magic bytes", "byte 0");
    std::uint32_t ver = r.u32("version");
    if (ver != kVersion)
        throw parse_error("unsupported version " + std::to_string(ver), "byte 4");
    return r.u8("kind");
}

// --- JSON helpers -----------------------------------------------------------

json require(const json& j, const char* key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) throw parse_error("missing field", path + "/" + key);
    return *it;
}

double finite_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw parse_error("expected a number", path);
    double v = j.get<double>();
    if (!std::isfinite(v)) throw parse_error("non-finite value", path);
    return v;
}

void check_header(const json& j, const char* format) {
    if (require(j, "format", "").get<std::string>() != format)
        throw parse_error(std::string("expected format \"") + format + "\"", "/format");
    if (require(j, "version", "").get<int>() != static_cast<int>(kVersion))
        throw parse_error("unsupported version", "/version");
}

json peek_json(std::istream& is) {
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw parse_error(e.what(), "byte " + std::to_string(e.byte));
    }
}

bool sniff_binary(std::istream& is) {
    char magic[4] = {0, 0, 0, 0};
    is.read(magic, 4);
    std::streamsize got = is.gcount();
    is.clear();
    is.seekg(0);
    return got == 4 && std::memcmp(magic, kMagic, 4) == 0;
}

}  // namespace

// --- kernels ----------------------------------------------------------------

void write_kernel_json(std::ostream& os, const ToeplitzKernel& k) {
    json ext;
    if (k.extension.kind == Extension::Kind::zeros) {
        ext = {{"kind", "zeros"}};
    } else {
        ext = {{"kind", "decay"}, {"gamma", k.extension.gamma}};
    }
    json j = {{"format", "etsc-kernel"},
              {"version", kVersion},
              {"n", k.coeffs.size()},
              {"extension", ext},
              {"coeffs", k.coeffs}};
    os << j.dump() << '\n';
}

void write_kernel_binary(std::ostream& os, const ToeplitzKernel& k) {
    if (k.extension.kind != Extension::Kind::zeros)
        throw io_error("binary kernel form stores coefficients only; "
                       "use JSON for decay-extension kernels",
                       "<binary>");
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    os.put(static_cast<char>(kKindKernel));
    put_u32(os, static_cast<std::uint32_t>(k.coeffs.size()));
    for (double v : k.coeffs) put_f64(os, v);
}

ToeplitzKernel read_kernel(std::istream& is) {
    if (sniff_binary(is)) {
        BinReader r{is};
        if (read_binary_header(r) != kKindKernel)
            throw parse_error("not a kernel file (kind != 0)", "byte 8");
        std::uint32_t n = r.u32("n");
        if (n == 0) throw parse_error("kernel with n = 0", "byte 9");
        std::vector<double> coeffs(n);
        for (auto& v : coeffs) v = r.f64("coeffs");
        return ToeplitzKernel(std::move(coeffs));
    }

    json j = peek_json(is);
    check_header(j, "etsc-kernel");
    std::size_t n = require(j, "n", "").get<std::size_t>();
    json ext = require(j, "extension", "");
    std::string kind = require(ext, "kind", "/extension").get<std::string>();
    Extension e;
    if (kind == "zeros") {
        e = Extension::zeros();
    } else if (kind == "decay") {
        e = Extension::decay(finite_number(require(ext, "gamma", "/extension"),
                                           "/extension/gamma"));
    } else {
        throw parse_error("unknown extension kind \"" + kind + "\"", "/extension/kind");
    }
    json coeffs = require(j, "coeffs", "");
    if (!coeffs.is_array() || coeffs.size() != n)
        throw parse_error("coeffs length does not match n", "/coeffs");
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = finite_number(coeffs[i], "/coeffs/" + std::to_string(i));
    return ToeplitzKernel(std::move(c), e);
}

// --- modes ------------------------------------------------------------------

void write_modes_json(std::ostream& os, const SsmModes& m) {
    json lam = json::array();
    json b = json::array();
    for (std::size_t k = 0; k < m.size(); ++k) {
        lam.push_back({m.lambda[k].real(), m.lambda[k].imag()});
        b.push_back({m.weights[k].real(), m.weights[k].imag()});
    }
    json j = {{"format", "etsc-modes"}, {"version", kVersion},
              {"h", m.size()},          {"gamma", m.gamma},
              {"origin_length", m.origin_length}, {"lambda", lam},
              {"b", b}};
    os << j.dump() << '\n';
}

void write_modes_binary(std::ostream& os, const SsmModes& m) {
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    os.put(static_cast<char>(kKindModes));
    put_u32(os, static_cast<std::uint32_t>(m.size()));
    put_f64(os, m.gamma);
    put_u32(os, static_cast<std::uint32_t>(m.origin_length));
    for (const auto& z : m.lambda) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
    for (const auto& z : m.weights) {
        put_f64(os, z.real());
        put_f64(os, z.imag());
    }
}

namespace {

ComplexSeq read_complex_array(const json& arr, std::size_t h, const std::string& path) {
    if (!arr.is_array() || arr.size() != h)
        throw parse_error("length does not match h", path);
    ComplexSeq out(h);
    for (std::size_t i = 0; i < h; ++i) {
        const json& z = arr[i];
        std::string p = path + "/" + std::to_string(i);
        if (!z.is_array() || z.size() != 2)
            throw parse_error("expected [re, im] pair", p);
        out[i] = Complex{finite_number(z[0], p + "/0"), finite_number(z[1], p + "/1")};
    }
    return out;
}

}  // namespace

SsmModes read_modes(std::istream& is) {
    if (sniff_binary(is)) {
        BinReader r{is};
        if (read_binary_header(r) != kKindModes)
            throw parse_error("not a modes file (kind != 1)", "byte 8");
        std::uint32_t h = r.u32("h");
        if (h == 0) throw parse_error("modes with h = 0", "byte 9");
        SsmModes m;
        m.gamma = r.f64("gamma");
        m.origin_length = r.u32("origin_length");
        m.lambda.resize(h);
        m.weights.resize(h);
        for (auto& z : m.lambda) {
            double re = r.f64("lambda");
            double im = r.f64("lambda");
            z = Complex{re, im};
        }
        for (auto& z : m.weights) {
            double re = r.f64("b");
            double im = r.f64("b");
            z = Complex{re, im};
        }
        return m;
    }

    json j = peek_json(is);
    check_header(j, "etsc-modes");
    std::size_t h = require(j, "h", "").get<std::size_t>();
    if (h == 0) throw parse_error("modes with h = 0", "/h");
    SsmModes m;
    m.gamma = finite_number(require(j, "gamma", ""), "/gamma");
    m.origin_length = require(j, "origin_length", "").get<std::size_t>();
    m.lambda = read_complex_array(require(j, "lambda", ""), h, "/lambda");
    m.weights = read_complex_array(require(j, "b", ""), h, "/b");
    return m;
}

// --- files ------------------------------------------------------------------

namespace {

bool json_path(const std::filesystem::path& p) { return p.extension() == ".json"; }

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw io_error("cannot open for writing", p.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw io_error("cannot open for reading", p.string());
    return is;
}

}  // namespace

void save_kernel(const std::filesystem::path& path, const ToeplitzKernel& k) {
    auto os = open_out(path);
    if (json_path(path))
        write_kernel_json(os, k);
    else
        write_kernel_binary(os, k);
    if (!os) throw io_error("write failed", path.string());
}

void save_modes(const std::filesystem::path& path, const SsmModes& m) {
    auto os = open_out(path);
    if (json_path(path))
        write_modes_json(os, m);
    else
        write_modes_binary(os, m);
    if (!os) throw io_error("write failed", path.string());
}

ToeplitzKernel load_kernel(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_kernel(is);
}

SsmModes load_modes(const std::filesystem::path& path) {
    auto is = open_in(path);
    return read_modes(is);
}

}  // namespace etsc
