#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "etsc/dft.hpp"
#include "etsc/toeplitz.hpp"

namespace etsc {

// Diagonal state-space representation of a kernel: impulse response
// t_i = sum_k weights[k] * lambda[k]^i (the readout vector is fixed to
// all-ones and not stored). Pure conversions place the poles on the unit
// circle; convert_with_decay scales them to modulus gamma.
struct SsmModes {
    ComplexSeq lambda;
    ComplexSeq weights;
    double gamma = 1.0;
    std::size_t origin_length = 0;

    std::size_t size() const { return lambda.size(); }
};

// t extended by one trailing element equal to minus the sum of the others,
// so the augmented sequence has zero mean and the root-of-unity Vandermonde
// system becomes consistent.
std::vector<double> augment(const std::vector<double>& t);

// Closed-form Toeplitz-to-SSM conversion. Returns h = n modes with
// lambda_s = exp(-2*pi*i*(s+1)/(n+1)) and weights read off the size-(n+1)
// unitary DFT of the augmented kernel; the lambda = 1 bin is dropped (its
// weight is zero by construction of augment). Reconstruction over 0..n-1
// reproduces t to rounding error.
SsmModes etsc_convert(const std::vector<double>& t);
SsmModes etsc_convert(const ToeplitzKernel& k);

// Impulse response sum_k b_k * lambda_k^i for i = 0..length-1, computed with
// running powers (one multiply per mode per index). Lengths beyond
// origin_length evaluate the modes' extrapolation.
ComplexSeq reconstruct(const SsmModes& m, std::size_t length);

// Keeps the h_new modes of largest |b_k| (ties to the smaller pole index).
// Conjugate pairs are kept or dropped together; when the cutoff would split
// a pair the budget rounds up by one, visible in the returned size.
SsmModes truncate(const SsmModes& m, std::size_t h_new);

// Converts t_i/gamma^i and scales every pole by gamma, so reconstruction on
// 0..n-1 stays exact while extrapolated responses decay as gamma^i.
// Throws decay_too_strong_error if the rescale overflows (|t_i|/gamma^i
// above 1e150).
SsmModes convert_with_decay(const ToeplitzKernel& k, double gamma);

// --- gradient-descent baseline -------------------------------------------

// Parameter blocks of the sigmoid-polar parametrization
// lambda_k = sigmoid(r_k) * exp(i*theta_k), b_k = b_real_k + i*b_imag_k.
struct GradientParams {
    std::vector<double> r;
    std::vector<double> theta;
    std::vector<double> b_real;
    std::vector<double> b_imag;

    std::size_t size() const { return r.size(); }
};

struct GradientConfig {
    std::size_t iterations = 10000;
    double step_size = 1e-2;
    std::uint64_t seed = 0;
    std::size_t loss_cadence = 100;  // record every this-many iterations
};

struct GradientResult {
    SsmModes modes;
    // (iteration, loss) pairs; index `iterations` holds the final loss.
    std::vector<std::pair<std::size_t, double>> loss_trace;
};

// All four blocks drawn i.i.d. standard normal, in block order
// r, theta, b_real, b_imag.
GradientParams gradient_init(std::size_t h, std::uint64_t seed);

SsmModes modes_from_params(const GradientParams& p, std::size_t origin_length);

// sum_i |t_i - sum_k lambda_k^i b_k|^2 over i = 0..n-1.
double gradient_loss(const std::vector<double>& t, const GradientParams& p);

// Loss plus analytic gradients with respect to (r, theta, b_real, b_imag).
double gradient_loss_and_grad(const std::vector<double>& t, const GradientParams& p,
                              GradientParams& grad);

// Full-batch gradient descent on the loss above. Deterministic given the
// seed; throws divergence_error (carrying the iteration) on non-finite loss.
GradientResult gradient_convert(const std::vector<double>& t, std::size_t h,
                                const GradientConfig& cfg);

}  // namespace etsc
