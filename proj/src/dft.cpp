#include "etsc/dft.hpp"

#include <cmath>
#include <numbers>

namespace etsc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// exp(-i*pi*j^2/n) with the quadratic reduced mod 2n first; j^2/n as a plain
// double loses the low phase bits once j^2 overflows the 53-bit mantissa.
Complex chirp_factor(std::size_t j, std::size_t n) {
    std::size_t m = 2 * n;
    std::size_t jm = j % m;
    std::size_t q = (jm * jm) % m;
    return std::polar(1.0, -std::numbers::pi * static_cast<double>(q) / static_cast<double>(n));
}

}  // namespace

DftPlan::DftPlan(std::size_t n) : n_(n) {
    if (n == 0) throw invalid_size_error("DftPlan: size must be >= 1");

    bluestein_ = !is_pow2(n);
    inner_n_ = bluestein_ ? next_pow2(2 * n - 1) : n;

    twiddle_.resize(inner_n_ / 2);
    for (std::size_t j = 0; j < twiddle_.size(); ++j)
        twiddle_[j] = std::polar(1.0, -kTwoPi * static_cast<double>(j) / static_cast<double>(inner_n_));

    if (bluestein_) {
        chirp_.resize(n);
        for (std::size_t j = 0; j < n; ++j) chirp_[j] = chirp_factor(j, n);

        // Wrapped filter b[j] = conj(chirp[|j|]) so that the circular
        // convolution of length inner_n_ realizes the chirp-z sum.
        chirp_filter_.assign(inner_n_, Complex{0.0, 0.0});
        chirp_filter_[0] = std::conj(chirp_[0]);
        for (std::size_t j = 1; j < n; ++j) {
            Complex b = std::conj(chirp_[j]);
            chirp_filter_[j] = b;
            chirp_filter_[inner_n_ - j] = b;
        }
        radix2(chirp_filter_);
    }
}

void DftPlan::radix2(ComplexSeq& a) const {
    const std::size_t n = inner_n_;
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t stride = n / len;
        for (std::size_t blk = 0; blk < n; blk += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                Complex w = twiddle_[j * stride];
                Complex u = a[blk + j];
                Complex v = a[blk + j + len / 2] * w;
                a[blk + j] = u + v;
                a[blk + j + len / 2] = u - v;
            }
        }
    }
}

ComplexSeq DftPlan::raw_forward(const ComplexSeq& v) const {
    if (!bluestein_) {
        ComplexSeq a = v;
        radix2(a);
        return a;
    }
    ComplexSeq a(inner_n_, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < n_; ++j) a[j] = v[j] * chirp_[j];
    radix2(a);
    for (std::size_t j = 0; j < inner_n_; ++j) a[j] *= chirp_filter_[j];
    // Inverse of the inner transform via conjugation.
    for (auto& z : a) z = std::conj(z);
    radix2(a);
    double inv_m = 1.0 / static_cast<double>(inner_n_);
    ComplexSeq out(n_);
    for (std::size_t k = 0; k < n_; ++k)
        out[k] = std::conj(a[k]) * inv_m * chirp_[k];
    return out;
}

ComplexSeq DftPlan::forward(const ComplexSeq& v) const {
    if (v.size() != n_) throw shape_error("DftPlan::forward: length mismatch");
    ComplexSeq out = raw_forward(v);
    double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& z : out) z *= s;
    return out;
}

ComplexSeq DftPlan::inverse(const ComplexSeq& v) const {
    if (v.size() != n_) throw shape_error("DftPlan::inverse: length mismatch");
    ComplexSeq tmp(n_);
    for (std::size_t j = 0; j < n_; ++j) tmp[j] = std::conj(v[j]);
    ComplexSeq out = raw_forward(tmp);
    double s = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& z : out) z = std::conj(z) * s;
    return out;
}

}  // namespace etsc
