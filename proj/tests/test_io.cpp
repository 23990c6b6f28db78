#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "etsc/generate.hpp"
#include "etsc/io.hpp"
#include "etsc/rng.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("etsc_io_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

bool same_kernel(const etsc::ToeplitzKernel& a, const etsc::ToeplitzKernel& b) {
    if (a.coeffs != b.coeffs) return false;  // bit-exact
    if (a.extension.kind != b.extension.kind) return false;
    if (a.extension.kind == etsc::Extension::Kind::decay &&
        a.extension.gamma != b.extension.gamma)
        return false;
    return true;
}

bool same_modes(const etsc::SsmModes& a, const etsc::SsmModes& b) {
    return a.lambda == b.lambda && a.weights == b.weights && a.gamma == b.gamma &&
           a.origin_length == b.origin_length;
}

}  // namespace

TEST_CASE("kernel round trips are bit-exact") {
    TempDir tmp;
    etsc::Rng rng(1);
    etsc::ToeplitzKernel k = etsc::random_kernel(37, rng);

    SUBCASE("json") {
        etsc::save_kernel(tmp.path / "k.json", k);
        CHECK(same_kernel(etsc::load_kernel(tmp.path / "k.json"), k));
    }
    SUBCASE("binary") {
        etsc::save_kernel(tmp.path / "k.bin", k);
        CHECK(same_kernel(etsc::load_kernel(tmp.path / "k.bin"), k));
    }
    SUBCASE("json -> binary -> json") {
        etsc::save_kernel(tmp.path / "a.json", k);
        etsc::ToeplitzKernel k1 = etsc::load_kernel(tmp.path / "a.json");
        etsc::save_kernel(tmp.path / "b.bin", k1);
        etsc::ToeplitzKernel k2 = etsc::load_kernel(tmp.path / "b.bin");
        CHECK(k2.coeffs == k.coeffs);  // payload bit-exact across both forms
    }
    SUBCASE("decay extension survives json") {
        etsc::ToeplitzKernel dk({1.0, -0.25, 1e-300}, etsc::Extension::decay(0.875));
        etsc::save_kernel(tmp.path / "d.json", dk);
        CHECK(same_kernel(etsc::load_kernel(tmp.path / "d.json"), dk));
    }
    SUBCASE("decay extension cannot go to binary") {
        etsc::ToeplitzKernel dk({1.0}, etsc::Extension::decay(0.5));
        CHECK_THROWS_AS(etsc::save_kernel(tmp.path / "d.bin", dk), etsc::io_error);
    }
}

TEST_CASE("modes round trips are bit-exact") {
    TempDir tmp;
    etsc::Rng rng(2);
    etsc::SsmModes m = etsc::etsc_convert(etsc::random_kernel(19, rng).coeffs);
    m.gamma = 0.9375;

    etsc::save_modes(tmp.path / "m.json", m);
    CHECK(same_modes(etsc::load_modes(tmp.path / "m.json"), m));

    etsc::save_modes(tmp.path / "m.bin", m);
    CHECK(same_modes(etsc::load_modes(tmp.path / "m.bin"), m));
}

TEST_CASE("awkward doubles survive both forms") {
    TempDir tmp;
    etsc::Rng rng(3);
    // denormals, negative zero, huge and tiny magnitudes
    std::vector<double> vals{-0.0, 5e-324, -5e-324, 1.7976931348623157e308,
                             -2.2250738585072014e-308, 1.0 / 3.0};
    for (int i = 0; i < 50; ++i) vals.push_back(std::ldexp(rng.normal(), (i % 60) - 30));
    etsc::ToeplitzKernel k(vals);
    etsc::save_kernel(tmp.path / "k.json", k);
    CHECK(etsc::load_kernel(tmp.path / "k.json").coeffs == vals);
    etsc::save_kernel(tmp.path / "k.bin", k);
    CHECK(etsc::load_kernel(tmp.path / "k.bin").coeffs == vals);
}

TEST_CASE("json errors carry a path") {
    std::istringstream bad_syntax("{\"format\": ");
    CHECK_THROWS_AS(etsc::read_kernel(bad_syntax), etsc::parse_error);

    std::istringstream wrong_format(
        R"({"format":"etsc-modes","version":1,"n":1,"extension":{"kind":"zeros"},"coeffs":[1.0]})");
    try {
        etsc::read_kernel(wrong_format);
        FAIL("expected parse_error");
    } catch (const etsc::parse_error& e) {
        CHECK(e.where == "/format");
    }

    std::istringstream short_coeffs(
        R"({"format":"etsc-kernel","version":1,"n":3,"extension":{"kind":"zeros"},"coeffs":[1.0]})");
    try {
        etsc::read_kernel(short_coeffs);
        FAIL("expected parse_error");
    } catch (const etsc::parse_error& e) {
        CHECK(e.where == "/coeffs");
    }

    std::istringstream bad_gamma(
        R"({"format":"etsc-kernel","version":1,"n":1,"extension":{"kind":"decay"},"coeffs":[1.0]})");
    try {
        etsc::read_kernel(bad_gamma);
        FAIL("expected parse_error");
    } catch (const etsc::parse_error& e) {
        CHECK(e.where == "/extension/gamma");
    }
}

TEST_CASE("binary errors carry a byte offset") {
    // Non-magic content falls through to the JSON reader.
    std::istringstream not_binary("NOPE....");
    CHECK_THROWS_AS(etsc::read_kernel(not_binary), etsc::parse_error);

    // Valid header claiming 4 coefficients but truncated after one.
    std::ostringstream os;
    etsc::ToeplitzKernel k({1.0, 2.0, 3.0, 4.0});
    etsc::write_kernel_binary(os, k);
    std::string full = os.str();
    std::istringstream truncated(full.substr(0, 13 + 8));
    try {
        etsc::read_kernel(truncated);
        FAIL("expected parse_error");
    } catch (const etsc::parse_error& e) {
        CHECK(e.where == "byte 21");
    }

    // Kernel reader pointed at a modes payload.
    std::ostringstream mos;
    etsc::SsmModes m = etsc::etsc_convert(std::vector<double>{1.0, 2.0});
    etsc::write_modes_binary(mos, m);
    std::istringstream modes_stream(mos.str());
    try {
        etsc::read_kernel(modes_stream);
        FAIL("expected parse_error");
    } catch (const etsc::parse_error& e) {
        CHECK(e.where == "byte 8");
    }
}

TEST_CASE("missing files raise io_error with the path") {
    try {
        etsc::load_kernel("/nonexistent/etsc/kernel.json");
        FAIL("expected io_error");
    } catch (const etsc::io_error& e) {
        CHECK(e.path == "/nonexistent/etsc/kernel.json");
    }
}

TEST_CASE("loads sniff the format regardless of the file name") {
    TempDir tmp;
    etsc::Rng rng(4);
    etsc::ToeplitzKernel k = etsc::random_kernel(5, rng);
    // Binary payload under a .json-free name, JSON payload under .dat
    {
        std::ofstream os(tmp.path / "kernel_no_ext", std::ios::binary);
        etsc::write_kernel_binary(os, k);
    }
    CHECK(etsc::load_kernel(tmp.path / "kernel_no_ext").coeffs == k.coeffs);
    {
        std::ofstream os(tmp.path / "kernel.dat", std::ios::binary);
        etsc::write_kernel_json(os, k);
    }
    CHECK(etsc::load_kernel(tmp.path / "kernel.dat").coeffs == k.coeffs);
}
