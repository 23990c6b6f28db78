#include "etsc/toeplitz.hpp"

#include <cmath>

namespace etsc {

ToeplitzKernel::ToeplitzKernel(std::vector<double> c, Extension ext)
    : coeffs(std::move(c)), extension(ext) {
    if (coeffs.empty()) throw invalid_size_error("ToeplitzKernel: need n >= 1 coefficients");
    if (extension.kind == Extension::Kind::decay &&
        !(extension.gamma > 0.0 && extension.gamma <= 1.0))
        throw invalid_size_error("ToeplitzKernel: decay gamma must be in (0, 1]");
}

double extended_coeff(const ToeplitzKernel& k, std::size_t i) {
    const std::size_t n = k.coeffs.size();
    if (i < n) return k.coeffs[i];
    if (k.extension.kind == Extension::Kind::zeros) return 0.0;
    return k.coeffs[n - 1] *
           std::pow(k.extension.gamma, static_cast<double>(i - n + 1));
}

Signal apply_naive(const ToeplitzKernel& k, const Signal& x) {
    const std::size_t m = x.size();
    if (m == 0) throw invalid_size_error("apply_naive: empty signal");
    Signal y(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j)
            acc += extended_coeff(k, i - j) * x[j];
        y[i] = acc;
    }
    return y;
}

Signal apply_fft(const ToeplitzKernel& k, const Signal& x) {
    const std::size_t m = x.size();
    if (m == 0) throw invalid_size_error("apply_fft: empty signal");
    if (m == 1) return {extended_coeff(k, 0) * x[0]};

    const std::size_t fft_n = next_pow2(2 * m - 1);
    DftPlan plan(fft_n);

    ComplexSeq kc(fft_n, Complex{0.0, 0.0});
    ComplexSeq xc(fft_n, Complex{0.0, 0.0});
    for (std::size_t i = 0; i < m; ++i) kc[i] = extended_coeff(k, i);
    for (std::size_t i = 0; i < m; ++i) xc[i] = x[i];

    ComplexSeq kf = plan.forward(kc);
    ComplexSeq xf = plan.forward(xc);
    for (std::size_t i = 0; i < fft_n; ++i) kf[i] *= xf[i];
    ComplexSeq conv = plan.inverse(kf);

    // Unitary transforms leave a sqrt(fft_n) on the convolution theorem.
    const double s = std::sqrt(static_cast<double>(fft_n));
    Signal y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = conv[i].real() * s;
    return y;
}

namespace {

double norm2_real(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

}  // namespace

double relative_error(const std::vector<double>& t, const std::vector<double>& t_pred) {
    if (t.size() != t_pred.size()) throw shape_error("relative_error: length mismatch");
    double denom = norm2_real(t);
    if (denom == 0.0) throw undefined_metric_error("relative_error: zero reference norm");
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double d = t[i] - t_pred[i];
        acc += d * d;
    }
    return std::sqrt(acc) / denom;
}

double relative_error(const std::vector<double>& t, const ComplexSeq& t_pred) {
    if (t.size() != t_pred.size()) throw shape_error("relative_error: length mismatch");
    double denom = norm2_real(t);
    if (denom == 0.0) throw undefined_metric_error("relative_error: zero reference norm");
    return absolute_error(t, t_pred) / denom;
}

double absolute_error(const std::vector<double>& t, const ComplexSeq& t_pred) {
    if (t.size() != t_pred.size()) throw shape_error("absolute_error: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        Complex d = Complex{t[i], 0.0} - t_pred[i];
        acc += std::norm(d);
    }
    return std::sqrt(acc);
}

}  // namespace etsc
