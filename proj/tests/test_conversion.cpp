#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "etsc/conversion.hpp"
#include "etsc/generate.hpp"
#include "etsc/rng.hpp"
#include "support/oracles.hpp"

using etsc::Complex;
using etsc::ComplexSeq;
using etsc::SsmModes;

namespace {

std::vector<double> random_coeffs(std::size_t n, etsc::Rng& rng) {
    std::vector<double> t(n);
    for (auto& v : t) v = rng.normal();
    return t;
}

double recon_rel_error(const std::vector<double>& t, const SsmModes& m) {
    return etsc::relative_error(t, etsc::reconstruct(m, t.size()));
}

}  // namespace

TEST_CASE("augment appends the negated sum") {
    CHECK(etsc::augment({1.0, 0.0}) == std::vector<double>{1.0, 0.0, -1.0});
    CHECK(etsc::augment({0.0, 0.0, 0.0}) == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK(etsc::augment({2.0, -2.0}) == std::vector<double>{2.0, -2.0, 0.0});
}

TEST_CASE("n=1 conversion solves the 2x2 augmented system") {
    SsmModes m = etsc::etsc_convert(std::vector<double>{5.0});
    REQUIRE(m.size() == 1);
    CHECK(std::abs(m.lambda[0] - Complex{-1.0, 0.0}) < 1e-12);
    CHECK(std::abs(m.weights[0] - Complex{5.0, 0.0}) < 1e-12);
    CHECK(m.origin_length == 1);
    CHECK(m.gamma == 1.0);
}

TEST_CASE("zero kernel converts to zero weights") {
    SsmModes m = etsc::etsc_convert(std::vector<double>{0.0, 0.0, 0.0, 0.0});
    for (const auto& b : m.weights) CHECK(std::abs(b) < 1e-15);
}

TEST_CASE("weights match a brute-force Vandermonde solve for n <= 16") {
    etsc::Rng rng(2);
    for (std::size_t n = 1; n <= 16; ++n) {
        std::vector<double> t = random_coeffs(n, rng);
        SsmModes m = etsc::etsc_convert(t);
        ComplexSeq want = oracle::vandermonde_weights(t);
        REQUIRE(m.size() == want.size());
        for (std::size_t k = 0; k < n; ++k)
            CHECK(std::abs(m.weights[k] - want[k]) < 1e-9);
    }
}

TEST_CASE("exact reconstruction across sizes") {
    etsc::Rng rng(3);
    for (std::size_t n = 1; n <= 64; ++n) {
        std::vector<double> t = random_coeffs(n, rng);
        CHECK(recon_rel_error(t, etsc::etsc_convert(t)) < 1e-8);
    }
    for (std::size_t n : {100u, 257u, 512u, 1000u, 2048u}) {
        std::vector<double> t = random_coeffs(n, rng);
        CHECK(recon_rel_error(t, etsc::etsc_convert(t)) < 1e-8);
    }
    CHECK_THROWS_AS(etsc::etsc_convert(std::vector<double>{}), etsc::invalid_size_error);
}

TEST_CASE("unit-modulus distinct poles") {
    etsc::Rng rng(4);
    std::vector<double> t = random_coeffs(33, rng);
    SsmModes m = etsc::etsc_convert(t);
    for (const auto& l : m.lambda) CHECK(std::abs(std::abs(l) - 1.0) < 1e-12);
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = a + 1; b < m.size(); ++b)
            CHECK(std::abs(m.lambda[a] - m.lambda[b]) > 1e-6);
}

TEST_CASE("reconstruct basics") {
    SsmModes geo;
    geo.lambda = {Complex{0.5, 0.0}};
    geo.weights = {Complex{2.0, 0.0}};
    geo.origin_length = 1;
    ComplexSeq r = etsc::reconstruct(geo, 3);
    CHECK(std::abs(r[0] - Complex{2.0, 0.0}) < 1e-15);
    CHECK(std::abs(r[1] - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(r[2] - Complex{0.5, 0.0}) < 1e-15);

    CHECK_THROWS_AS(etsc::reconstruct(geo, 0), etsc::invalid_size_error);
}

TEST_CASE("reconstruction is real and satisfies the augmented row") {
    etsc::Rng rng(5);
    for (std::size_t n : {7u, 32u, 129u}) {
        std::vector<double> t = random_coeffs(n, rng);
        SsmModes m = etsc::etsc_convert(t);
        ComplexSeq r = etsc::reconstruct(m, n + 1);
        double tnorm = 0.0, tsum = 0.0;
        for (double v : t) {
            tnorm += v * v;
            tsum += v;
        }
        tnorm = std::sqrt(tnorm);
        for (const auto& z : r) CHECK(std::abs(z.imag()) < 1e-9 * std::max(1.0, tnorm));
        CHECK(std::abs(r[n] - Complex{-tsum, 0.0}) < 1e-8 * tnorm);
    }
}

TEST_CASE("dc bin of the augmented kernel vanishes") {
    etsc::Rng rng(6);
    for (std::size_t n : {5u, 64u, 511u}) {
        std::vector<double> t = random_coeffs(n, rng);
        std::vector<double> tbar = etsc::augment(t);
        ComplexSeq tc(tbar.begin(), tbar.end());
        ComplexSeq spec = etsc::DftPlan(n + 1).forward(tc);
        double tnorm = 0.0;
        for (double v : t) tnorm += v * v;
        CHECK(std::abs(spec[0]) < 1e-9 * std::sqrt(tnorm));
    }
}

TEST_CASE("parseval over the augmented kernel") {
    etsc::Rng rng(7);
    for (std::size_t n : {3u, 40u, 300u}) {
        std::vector<double> t = random_coeffs(n, rng);
        SsmModes m = etsc::etsc_convert(t);
        std::vector<double> tbar = etsc::augment(t);
        double lhs = 0.0;
        for (double v : tbar) lhs += v * v;
        double rhs = 0.0;
        for (const auto& b : m.weights) rhs += std::norm(b);
        rhs *= static_cast<double>(n + 1);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * lhs);
    }
}

TEST_CASE("conjugate symmetry of poles and weights") {
    etsc::Rng rng(8);
    for (std::size_t n : {2u, 9u, 64u}) {
        std::vector<double> t = random_coeffs(n, rng);
        SsmModes m = etsc::etsc_convert(t);
        for (std::size_t s = 0; s < n; ++s) {
            CHECK(std::abs(m.lambda[n - 1 - s] - std::conj(m.lambda[s])) < 1e-12);
            CHECK(std::abs(m.weights[n - 1 - s] - std::conj(m.weights[s])) < 1e-12);
        }
    }
}

TEST_CASE("truncate keeps the largest weights and whole pairs") {
    etsc::Rng rng(9);
    std::vector<double> t = random_coeffs(64, rng);
    SsmModes m = etsc::etsc_convert(t);

    SUBCASE("h_new = h is a no-op") {
        SsmModes same = etsc::truncate(m, 64);
        CHECK(same.size() == 64);
        for (std::size_t k = 0; k < 64; ++k) {
            CHECK(same.lambda[k] == m.lambda[k]);
            CHECK(same.weights[k] == m.weights[k]);
        }
    }

    SUBCASE("result is conjugate-closed and within one of the budget") {
        for (std::size_t h_new : {1u, 7u, 20u, 63u}) {
            SsmModes tr = etsc::truncate(m, h_new);
            CHECK(tr.size() >= h_new);
            CHECK(tr.size() <= h_new + 1);
            // every kept mode's conjugate is kept
            for (std::size_t a = 0; a < tr.size(); ++a) {
                bool found = false;
                for (std::size_t b = 0; b < tr.size(); ++b)
                    if (std::abs(tr.lambda[b] - std::conj(tr.lambda[a])) < 1e-9) found = true;
                CHECK(found);
            }
            // kept weights dominate dropped ones
            double min_kept = 1e300;
            for (const auto& b : tr.weights) min_kept = std::min(min_kept, std::abs(b));
            double max_dropped = 0.0;
            for (std::size_t k = 0; k < m.size(); ++k) {
                bool kept = false;
                for (std::size_t a = 0; a < tr.size(); ++a)
                    if (std::abs(tr.lambda[a] - m.lambda[k]) < 1e-12) kept = true;
                if (!kept) max_dropped = std::max(max_dropped, std::abs(m.weights[k]));
            }
            CHECK(min_kept >= max_dropped - 1e-12);
        }
    }

    SUBCASE("invalid budget") {
        CHECK_THROWS_AS(etsc::truncate(m, 0), etsc::invalid_size_error);
        CHECK_THROWS_AS(etsc::truncate(m, 65), etsc::invalid_size_error);
    }
}

TEST_CASE("truncation dropped-energy identity") {
    etsc::Rng rng(10);
    const std::size_t n = 256;
    std::vector<double> t = random_coeffs(n, rng);
    SsmModes m = etsc::etsc_convert(t);
    std::vector<double> tbar = etsc::augment(t);

    for (std::size_t h_new : {4u, 32u, 100u, 200u}) {
        SsmModes tr = etsc::truncate(m, h_new);
        double dropped = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            bool kept = false;
            for (std::size_t a = 0; a < tr.size(); ++a)
                if (std::abs(tr.lambda[a] - m.lambda[k]) < 1e-12) kept = true;
            if (!kept) dropped += std::norm(m.weights[k]);
        }
        ComplexSeq r = etsc::reconstruct(tr, n + 1);
        double err2 = 0.0;
        for (std::size_t i = 0; i <= n; ++i) err2 += std::norm(Complex{tbar[i], 0.0} - r[i]);
        double want = static_cast<double>(n + 1) * dropped;
        CHECK(std::abs(err2 - want) <= 1e-8 * std::max(want, 1e-30));
    }
}

TEST_CASE("zero-kernel truncation reconstructs zero") {
    SsmModes m = etsc::etsc_convert(std::vector<double>(16, 0.0));
    SsmModes tr = etsc::truncate(m, 4);
    ComplexSeq r = etsc::reconstruct(tr, 16);
    for (const auto& z : r) CHECK(std::abs(z) < 1e-15);
}

TEST_CASE("decay conversion") {
    SUBCASE("gamma = 1 equals the plain conversion") {
        etsc::Rng rng(11);
        etsc::ToeplitzKernel k = etsc::random_kernel(24, rng);
        SsmModes a = etsc::convert_with_decay(k, 1.0);
        SsmModes b = etsc::etsc_convert(k);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.lambda[i] == b.lambda[i]);
            CHECK(a.weights[i] == b.weights[i]);
        }
    }

    SUBCASE("exact on 0..n-1 and geometric beyond") {
        etsc::ToeplitzKernel k({1.0, 0.5});
        const double g = 0.5;
        SsmModes m = etsc::convert_with_decay(k, g);
        CHECK(m.gamma == g);
        for (const auto& l : m.lambda) CHECK(std::abs(std::abs(l) - g) < 1e-12);
        ComplexSeq r = etsc::reconstruct(m, 8);
        CHECK(std::abs(r[0] - Complex{1.0, 0.0}) < 1e-12);
        CHECK(std::abs(r[1] - Complex{0.5, 0.0}) < 1e-12);
        // |t_hat_i| <= gamma^i * max|rescaled augmented value| * h
        std::vector<double> scaled{1.0, 1.0};  // t_i / g^i
        double peak = 0.0;
        for (double v : etsc::augment(scaled)) peak = std::max(peak, std::abs(v));
        double env = g * g * peak * static_cast<double>(m.size());
        for (std::size_t i = 2; i < 8; ++i) {
            CHECK(std::abs(r[i]) <= env + 1e-12);
            env *= g;
        }
    }

    SUBCASE("random kernel stays exact in range") {
        etsc::Rng rng(12);
        etsc::ToeplitzKernel k = etsc::random_kernel(50, rng);
        SsmModes m = etsc::convert_with_decay(k, 0.9);
        CHECK(recon_rel_error(k.coeffs, m) < 1e-8);
    }

    SUBCASE("zero kernel gives zero weights") {
        etsc::ToeplitzKernel k(std::vector<double>(10, 0.0));
        SsmModes m = etsc::convert_with_decay(k, 0.3);
        for (const auto& b : m.weights) CHECK(std::abs(b) < 1e-15);
    }

    SUBCASE("rescale overflow is rejected") {
        std::vector<double> c(600, 1.0);
        etsc::ToeplitzKernel k(std::move(c));
        CHECK_THROWS_AS(etsc::convert_with_decay(k, 0.5), etsc::decay_too_strong_error);
        CHECK_THROWS_AS(etsc::convert_with_decay(k, -0.1), etsc::invalid_size_error);
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    const std::size_t n = 32, h = 8;
    const double fd_step = 1e-6;
    etsc::Rng rng(13);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> t = random_coeffs(n, rng);
        etsc::GradientParams p = etsc::gradient_init(h, 100 + trial);
        etsc::GradientParams g;
        etsc::gradient_loss_and_grad(t, p, g);

        auto fd_check = [&](std::vector<double> etsc::GradientParams::* block,
                            const std::vector<double>& analytic) {
            etsc::GradientParams q = p;
            for (std::size_t k = 0; k < h; ++k) {
                (q.*block)[k] = (p.*block)[k] + fd_step;
                double up = etsc::gradient_loss(t, q);
                (q.*block)[k] = (p.*block)[k] - fd_step;
                double dn = etsc::gradient_loss(t, q);
                (q.*block)[k] = (p.*block)[k];
                double fd = (up - dn) / (2.0 * fd_step);
                double denom = std::max({std::abs(fd), std::abs(analytic[k]), 1e-8});
                CHECK(std::abs(fd - analytic[k]) / denom < 1e-4);
            }
        };
        fd_check(&etsc::GradientParams::r, g.r);
        fd_check(&etsc::GradientParams::theta, g.theta);
        fd_check(&etsc::GradientParams::b_real, g.b_real);
        fd_check(&etsc::GradientParams::b_imag, g.b_imag);
    }
}

TEST_CASE("gradient descent on the zero kernel converges") {
    std::vector<double> t(8, 0.0);
    etsc::GradientConfig cfg;
    cfg.iterations = 500;
    cfg.step_size = 0.05;
    cfg.seed = 17;
    cfg.loss_cadence = 50;
    etsc::GradientResult res = etsc::gradient_convert(t, 2, cfg);
    CHECK(res.loss_trace.front().second > res.loss_trace.back().second);
    ComplexSeq r = etsc::reconstruct(res.modes, 8);
    double abs_err = etsc::absolute_error(t, r);
    CHECK(abs_err < 1e-3);
}

TEST_CASE("gradient descent is deterministic given the seed") {
    etsc::Rng rng(14);
    std::vector<double> t = random_coeffs(24, rng);
    etsc::GradientConfig cfg;
    cfg.iterations = 60;
    cfg.step_size = 1e-3;
    cfg.seed = 99;
    cfg.loss_cadence = 10;
    etsc::GradientResult a = etsc::gradient_convert(t, 12, cfg);
    etsc::GradientResult b = etsc::gradient_convert(t, 12, cfg);
    REQUIRE(a.loss_trace.size() == b.loss_trace.size());
    for (std::size_t i = 0; i < a.loss_trace.size(); ++i) {
        CHECK(a.loss_trace[i].first == b.loss_trace[i].first);
        CHECK(a.loss_trace[i].second == b.loss_trace[i].second);  // bitwise
    }
}

TEST_CASE("gradient conversion is worse than the closed form") {
    etsc::Rng rng(15);
    std::vector<double> t = random_coeffs(64, rng);
    etsc::GradientConfig cfg;
    cfg.iterations = 200;
    cfg.step_size = 1e-4;
    cfg.seed = 1;
    etsc::SsmModes gm = etsc::gradient_convert(t, 63, cfg).modes;
    double grad_err = recon_rel_error(t, gm);
    double etsc_err = recon_rel_error(t, etsc::etsc_convert(t));
    CHECK(grad_err > etsc_err);
    CHECK(etsc_err < 1e-8);
    // sigmoid-polar parametrization keeps every pole inside the unit circle
    for (const auto& l : gm.lambda) CHECK(std::abs(l) < 1.0);
    CHECK(gm.gamma == 1.0);
    CHECK(gm.origin_length == 64);
}

TEST_CASE("divergence raises with the iteration index") {
    etsc::Rng rng(16);
    std::vector<double> t = random_coeffs(32, rng);
    etsc::GradientConfig cfg;
    cfg.iterations = 5000;
    cfg.step_size = 1e6;  // far beyond any stable step
    cfg.seed = 3;
    CHECK_THROWS_AS(etsc::gradient_convert(t, 16, cfg), etsc::divergence_error);
    try {
        etsc::gradient_convert(t, 16, cfg);
    } catch (const etsc::divergence_error& e) {
        CHECK(e.iteration > 0);
        CHECK(e.iteration < 5000);
    }
}

TEST_CASE("gradient config validation") {
    std::vector<double> t{1.0};
    etsc::GradientConfig cfg;
    cfg.iterations = 0;
    CHECK_THROWS_AS(etsc::gradient_convert(t, 1, cfg), etsc::invalid_size_error);
    cfg.iterations = 1;
    cfg.step_size = 0.0;
    CHECK_THROWS_AS(etsc::gradient_convert(t, 1, cfg), etsc::invalid_size_error);
}
