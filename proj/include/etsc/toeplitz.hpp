#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "etsc/dft.hpp"
#include "etsc/error.hpp"

namespace etsc {

using Signal = std::vector<double>;

// Extension policy for kernel coefficients at indices >= n.
struct Extension {
    enum class Kind { zeros, decay };
    Kind kind = Kind::zeros;
    double gamma = 1.0;  // decay factor, only meaningful for Kind::decay

    static Extension zeros() { return {Kind::zeros, 1.0}; }
    static Extension decay(double gamma) { return {Kind::decay, gamma}; }
};

// Causal Toeplitz operator, stored as its first column t_0..t_{n-1}.
// y_i = sum_{j<=i} t_{i-j} x_j, with t extrapolated by `extension` when the
// signal outlives the stored coefficients.
struct ToeplitzKernel {
    std::vector<double> coeffs;
    Extension extension = Extension::zeros();

    ToeplitzKernel() = default;
    ToeplitzKernel(std::vector<double> c, Extension ext = Extension::zeros());

    std::size_t length() const { return coeffs.size(); }
};

// t_i for i < n; zero or t_{n-1}*gamma^{i-n+1} beyond, by policy.
double extended_coeff(const ToeplitzKernel& k, std::size_t i);

// Direct evaluation of the causal sum, O(m^2). Oracle for apply_fft.
Signal apply_naive(const ToeplitzKernel& k, const Signal& x);

// Same contract via zero-padded circular convolution over a power-of-two
// FFT of length >= 2m-1, truncated to the m causal outputs.
Signal apply_fft(const ToeplitzKernel& k, const Signal& x);

// ||t - t_pred|| / ||t||, the conversion-fidelity metric. The complex
// overload measures the full complex deviation with t embedded as real.
// Throws undefined_metric_error when ||t|| = 0.
double relative_error(const std::vector<double>& t, const std::vector<double>& t_pred);
double relative_error(const std::vector<double>& t, const ComplexSeq& t_pred);

// ||t - t_pred|| without the normalization; the zero-kernel fallback.
double absolute_error(const std::vector<double>& t, const ComplexSeq& t_pred);

}  // namespace etsc
