#include "etsc/generate.hpp"

#include <cmath>
#include <numbers>

#include "etsc/rng.hpp"

namespace etsc {

ToeplitzKernel random_kernel(std::size_t n, Rng& rng, Extension ext) {
    if (n == 0) throw invalid_size_error("random_kernel: need n >= 1");
    std::vector<double> c(n);
    for (auto& v : c) v = rng.normal();
    return ToeplitzKernel(std::move(c), ext);
}

ToeplitzKernel decay_sinusoid_kernel(std::size_t n, double gamma, Rng& rng,
                                     std::size_t terms, Extension ext) {
    if (n == 0) throw invalid_size_error("decay_sinusoid_kernel: need n >= 1");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw invalid_size_error("decay_sinusoid_kernel: gamma must be in (0, 1]");
    if (terms == 0) throw invalid_size_error("decay_sinusoid_kernel: need terms >= 1");

    std::vector<double> amp(terms), freq(terms), phase(terms);
    for (std::size_t j = 0; j < terms; ++j) {
        amp[j] = rng.uniform(-1.0, 1.0);
        freq[j] = rng.uniform(0.0, std::numbers::pi);
        phase[j] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    std::vector<double> c(n);
    double env = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < terms; ++j)
            s += amp[j] * std::cos(freq[j] * static_cast<double>(i) + phase[j]);
        c[i] = env * s;
        env *= gamma;
    }
    return ToeplitzKernel(std::move(c), ext);
}

}  // namespace etsc
