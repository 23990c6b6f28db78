#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "etsc/error.hpp"

namespace etsc {

using Complex = std::complex<double>;
using ComplexSeq = std::vector<Complex>;

// Arbitrary-length DFT plan. Powers of two run on an iterative radix-2
// kernel; everything else goes through Bluestein's chirp-z algorithm over an
// internal power-of-two transform of size >= 2n-1.
//
// Normalization is unitary in both directions:
//   forward: X[k] = (1/sqrt(n)) * sum_j x[j] * exp(-2*pi*i*j*k/n)
//   inverse: x[j] = (1/sqrt(n)) * sum_k X[k] * exp(+2*pi*i*j*k/n)
//
// Plans are immutable after construction and safe to share across threads;
// forward/inverse are pure and may run concurrently on distinct inputs.
class DftPlan {
public:
    explicit DftPlan(std::size_t n);

    std::size_t size() const { return n_; }
    bool uses_bluestein() const { return bluestein_; }
    // Power-of-two length of the transforms actually executed (n itself on
    // the radix-2 path, the chirp convolution length otherwise).
    std::size_t inner_size() const { return inner_n_; }

    ComplexSeq forward(const ComplexSeq& v) const;
    ComplexSeq inverse(const ComplexSeq& v) const;

private:
    void radix2(ComplexSeq& a) const;  // unnormalized, sign -1, length inner_n_
    ComplexSeq raw_forward(const ComplexSeq& v) const;  // unnormalized DFT

    std::size_t n_;
    std::size_t inner_n_;
    bool bluestein_;
    std::vector<Complex> twiddle_;       // exp(-2*pi*i*j/inner_n), j < inner_n/2
    std::vector<Complex> chirp_;         // exp(-pi*i*j^2/n), j < n
    std::vector<Complex> chirp_filter_;  // FFT of the wrapped conjugate chirp
};

inline std::size_t next_pow2(std::size_t x) {
    std::size_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

}  // namespace etsc
