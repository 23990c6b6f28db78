#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "etsc/generate.hpp"
#include "etsc/rng.hpp"
#include "etsc/ssm.hpp"

using etsc::Complex;
using etsc::Signal;
using etsc::SsmModes;
using etsc::SsmState;

namespace {

SsmModes single_mode(Complex lambda, Complex weight) {
    SsmModes m;
    m.lambda = {lambda};
    m.weights = {weight};
    m.origin_length = 1;
    return m;
}

Signal random_signal(std::size_t m, etsc::Rng& rng) {
    Signal x(m);
    for (auto& v : x) v = rng.normal();
    return x;
}

double max_rel_diff(const Signal& a, const Signal& b) {
    REQUIRE(a.size() == b.size());
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    for (double v : b) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return 0.0;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]) / scale);
    return m;
}

}  // namespace

TEST_CASE("init_state") {
    etsc::Rng rng(1);
    SsmModes m = etsc::etsc_convert(etsc::random_kernel(4, rng).coeffs);
    SsmState s = etsc::init_state(m);
    REQUIRE(s.u.size() == 4);
    for (const auto& z : s.u) CHECK(z == Complex{0.0, 0.0});
    CHECK(s.position == 0);

    CHECK(etsc::step(m, s, 0.0) == 0.0);

    SsmState s2 = etsc::init_state(m);
    SsmState s3 = etsc::init_state(m);
    CHECK(s2.u == s3.u);
    CHECK(s2.position == s3.position);
}

TEST_CASE("integrator and memoryless modes") {
    SsmModes integ = single_mode({1.0, 0.0}, {1.0, 0.0});
    SsmState s = etsc::init_state(integ);
    double acc = 0.0;
    etsc::Rng rng(2);
    for (int i = 0; i < 20; ++i) {
        double x = rng.normal();
        acc += x;
        CHECK(etsc::step(integ, s, x) == doctest::Approx(acc).epsilon(1e-14));
    }

    SsmModes gate = single_mode({0.0, 0.0}, {2.5, 0.0});
    SsmState g = etsc::init_state(gate);
    for (int i = 0; i < 10; ++i) {
        double x = rng.normal();
        CHECK(etsc::step(gate, g, x) == 2.5 * x);
    }
}

TEST_CASE("scan of a single geometric mode") {
    SsmModes m = single_mode({0.5, 0.0}, {1.0, 0.0});
    Signal y = etsc::scan(m, {1.0, 0.0, 0.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(0.5));
    CHECK(y[2] == doctest::Approx(0.25));

    Signal zero = etsc::scan(m, Signal(16, 0.0));
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("scan equals the fold of step bitwise") {
    etsc::Rng rng(3);
    SsmModes m = etsc::etsc_convert(etsc::random_kernel(33, rng).coeffs);
    Signal x = random_signal(100, rng);
    Signal batch = etsc::scan(m, x);
    SsmState s = etsc::init_state(m);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(batch[i] == etsc::step(m, s, x[i]));  // bitwise
}

TEST_CASE("stepping converted modes reproduces the Toeplitz apply") {
    etsc::Rng rng(4);
    SUBCASE("n = 1024 against apply_naive") {
        etsc::ToeplitzKernel k = etsc::random_kernel(1024, rng);
        Signal x = random_signal(1024, rng);
        SsmModes m = etsc::etsc_convert(k);
        CHECK(max_rel_diff(etsc::scan(m, x), etsc::apply_naive(k, x)) < 1e-6);
    }
    SUBCASE("assorted lengths against apply_fft") {
        for (std::size_t n : {1u, 2u, 17u, 128u, 500u, 2048u}) {
            etsc::ToeplitzKernel k = etsc::random_kernel(n, rng);
            Signal x = random_signal(n, rng);
            SsmModes m = etsc::etsc_convert(k);
            CHECK(max_rel_diff(etsc::scan(m, x), etsc::apply_fft(k, x)) < 1e-6);
        }
    }
}

TEST_CASE("state size never depends on position") {
    etsc::Rng rng(5);
    SsmModes m = etsc::etsc_convert(etsc::random_kernel(16, rng).coeffs);
    SsmState s = etsc::init_state(m);
    const std::size_t h = s.u.size();
    for (int i = 0; i < 200; ++i) {
        etsc::step(m, s, rng.normal());
        CHECK(s.u.size() == h);
    }
    CHECK(s.position == 200);
}

TEST_CASE("imaginary residual stays tiny for conversion modes") {
    etsc::Rng rng(6);
    etsc::ToeplitzKernel k = etsc::random_kernel(128, rng);
    SsmModes m = etsc::etsc_convert(k);
    SsmState s = etsc::init_state(m);
    for (int i = 0; i < 500; ++i) etsc::step(m, s, rng.normal());
    CHECK(s.imag_residual_ok());
}

TEST_CASE("decayed modes keep the state bounded") {
    etsc::Rng rng(7);
    const double gamma = 0.9;
    etsc::ToeplitzKernel k = etsc::random_kernel(32, rng);
    SsmModes m = etsc::convert_with_decay(k, gamma);
    double bnorm = 0.0;
    for (const auto& b : m.weights) bnorm += std::norm(b);
    bnorm = std::sqrt(bnorm);

    SsmState s = etsc::init_state(m);
    const double xmax = 1.0;
    double bound = bnorm * xmax / (1.0 - gamma);
    for (int i = 0; i < 2000; ++i) {
        etsc::step(m, s, rng.uniform(-xmax, xmax));
        double unorm = 0.0;
        for (const auto& z : s.u) unorm += std::norm(z);
        CHECK(std::sqrt(unorm) <= bound);
    }
}

TEST_CASE("step rejects bad input") {
    SsmModes m = single_mode({0.5, 0.0}, {1.0, 0.0});
    SsmState s = etsc::init_state(m);
    CHECK_THROWS_AS(etsc::step(m, s, std::nan("")), etsc::input_error);
    SsmState wrong;
    wrong.u.assign(3, Complex{0.0, 0.0});
    CHECK_THROWS_AS(etsc::step(m, wrong, 1.0), etsc::shape_error);
}

TEST_CASE("conjugate-pair compression halves the state and matches") {
    etsc::Rng rng(8);
    SUBCASE("even kernel length (no real pole)") {
        etsc::ToeplitzKernel k = etsc::random_kernel(64, rng);
        SsmModes m = etsc::etsc_convert(k);
        etsc::CompressedModes cm = etsc::compress_conjugate_pairs(m);
        CHECK(cm.size() == 32);
        Signal x = random_signal(200, rng);
        CHECK(max_rel_diff(etsc::scan(m, x), etsc::scan(cm, x)) < 1e-12);
    }
    SUBCASE("odd kernel length (real pole at -1)") {
        etsc::ToeplitzKernel k = etsc::random_kernel(33, rng);
        SsmModes m = etsc::etsc_convert(k);
        etsc::CompressedModes cm = etsc::compress_conjugate_pairs(m);
        CHECK(cm.size() == 17);  // 16 pairs + the lambda = -1 pole
        bool has_real = false;
        for (std::size_t i = 0; i < cm.size(); ++i)
            if (cm.factor[i] == 1.0) {
                has_real = true;
                CHECK(std::abs(cm.lambda[i] - Complex{-1.0, 0.0}) < 1e-12);
            }
        CHECK(has_real);
        Signal x = random_signal(150, rng);
        CHECK(max_rel_diff(etsc::scan(m, x), etsc::scan(cm, x)) < 1e-12);
    }
    SUBCASE("asymmetric modes are rejected") {
        SsmModes bad;
        bad.lambda = {Complex{0.3, 0.4}};
        bad.weights = {Complex{1.0, 1.0}};
        bad.origin_length = 1;
        CHECK_THROWS_AS(etsc::compress_conjugate_pairs(bad), etsc::shape_error);
    }
}

TEST_CASE("channel bank steps channels independently") {
    etsc::Rng rng(9);
    std::vector<SsmModes> chans;
    for (int c = 0; c < 3; ++c)
        chans.push_back(etsc::etsc_convert(etsc::random_kernel(8, rng).coeffs));
    etsc::ChannelBank bank(chans);
    CHECK(bank.channels() == 3);
    CHECK(bank.hidden() == 8);

    std::vector<double> x{1.0, -2.0, 0.5};
    std::vector<double> y = bank.step_all(x);
    for (std::size_t c = 0; c < 3; ++c) {
        SsmState s = etsc::init_state(chans[c]);
        CHECK(y[c] == etsc::step(chans[c], s, x[c]));
    }

    CHECK_THROWS_AS(bank.step_all({1.0}), etsc::shape_error);

    std::vector<SsmModes> mixed = chans;
    mixed.push_back(etsc::etsc_convert(etsc::random_kernel(4, rng).coeffs));
    CHECK_THROWS_AS(etsc::ChannelBank{mixed}, etsc::shape_error);
}
