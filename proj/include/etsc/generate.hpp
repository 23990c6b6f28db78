#pragma once

#include <cstddef>
#include <cstdint>

#include "etsc/toeplitz.hpp"

namespace etsc {
class Rng;

// Synthetic kernel families standing in for trained mixing kernels.

// i.i.d. standard normal coefficients.
ToeplitzKernel random_kernel(std::size_t n, Rng& rng,
                             Extension ext = Extension::zeros());

// t_i = gamma^i * sum_j a_j cos(w_j i + phi_j) with `terms` components drawn
// from the rng: a_j uniform in [-1,1], w_j in [0,pi), phi_j in [0,2pi).
// |t_i| <= (sum_j |a_j|) * gamma^i by construction.
ToeplitzKernel decay_sinusoid_kernel(std::size_t n, double gamma, Rng& rng,
                                     std::size_t terms = 3,
                                     Extension ext = Extension::zeros());

}  // namespace etsc
