#include "etsc/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "etsc/rng.hpp"

namespace etsc {

std::vector<double> augment(const std::vector<double>& t) {
    if (t.empty()) throw invalid_size_error("augment: need n >= 1");
    std::vector<double> out(t.size() + 1);
    std::copy(t.begin(), t.end(), out.begin());
    out.back() = -std::accumulate(t.begin(), t.end(), 0.0);
    return out;
}

SsmModes etsc_convert(const std::vector<double>& t) {
    if (t.empty()) throw invalid_size_error("etsc_convert: need n >= 1");
    const std::size_t n = t.size();
    const std::size_t big_n = n + 1;

    std::vector<double> tbar = augment(t);
    ComplexSeq tc(big_n);
    for (std::size_t i = 0; i < big_n; ++i) tc[i] = tbar[i];

    DftPlan plan(big_n);
    ComplexSeq spectrum = plan.inverse(tc);  // (W^H tbar) in the unitary convention

    SsmModes m;
    m.lambda.resize(n);
    m.weights.resize(n);
    m.gamma = 1.0;
    m.origin_length = n;
    const double scale = 1.0 / std::sqrt(static_cast<double>(big_n));
    for (std::size_t s = 0; s < n; ++s) {
        m.lambda[s] = std::polar(1.0, -2.0 * std::numbers::pi *
                                          static_cast<double>(s + 1) /
                                          static_cast<double>(big_n));
        m.weights[s] = spectrum[s + 1] * scale;
    }
    return m;
}

SsmModes etsc_convert(const ToeplitzKernel& k) { return etsc_convert(k.coeffs); }

ComplexSeq reconstruct(const SsmModes& m, std::size_t length) {
    if (length == 0) throw invalid_size_error("reconstruct: need length >= 1");
    const std::size_t h = m.size();
    ComplexSeq out(length, Complex{0.0, 0.0});

    // pw_k = b_k * lambda_k^i, advanced by one multiply per index.
    std::vector<double> pw_re(h), pw_im(h), la_re(h), la_im(h);
    for (std::size_t k = 0; k < h; ++k) {
        pw_re[k] = m.weights[k].real();
        pw_im[k] = m.weights[k].imag();
        la_re[k] = m.lambda[k].real();
        la_im[k] = m.lambda[k].imag();
    }
    for (std::size_t i = 0; i < length; ++i) {
        double acc_re = 0.0, acc_im = 0.0;
        for (std::size_t k = 0; k < h; ++k) {
            acc_re += pw_re[k];
            acc_im += pw_im[k];
            double nre = pw_re[k] * la_re[k] - pw_im[k] * la_im[k];
            double nim = pw_re[k] * la_im[k] + pw_im[k] * la_re[k];
            pw_re[k] = nre;
            pw_im[k] = nim;
        }
        out[i] = Complex{acc_re, acc_im};
    }
    return out;
}

namespace {

// Index of the conjugate partner of mode k, or k itself for a real pole;
// npos when no clean partner exists (non-symmetric mode sets).
std::size_t conj_partner(const SsmModes& m, std::size_t k) {
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    const double tol = 1e-9;
    auto matches = [&](std::size_t j) {
        return std::abs(m.lambda[j] - std::conj(m.lambda[k])) <= tol * (1.0 + std::abs(m.lambda[k])) &&
               std::abs(m.weights[j] - std::conj(m.weights[k])) <= tol * (1.0 + std::abs(m.weights[k]));
    };
    if (matches(k)) return k;
    // ETSC mode order pairs s with h-1-s; try that before scanning.
    std::size_t mirror = m.size() - 1 - k;
    if (matches(mirror)) return mirror;
    for (std::size_t j = 0; j < m.size(); ++j)
        if (j != k && matches(j)) return j;
    return npos;
}

}  // namespace

SsmModes truncate(const SsmModes& m, std::size_t h_new) {
    const std::size_t h = m.size();
    if (h_new == 0 || h_new > h)
        throw invalid_size_error("truncate: need 1 <= h_new <= h");
    if (h_new == h) return m;

    std::vector<std::size_t> order(h);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double na = std::abs(m.weights[a]);
        double nb = std::abs(m.weights[b]);
        if (na != nb) return na > nb;
        return a < b;
    });

    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<char> keep(h, 0);
    std::size_t kept = 0;
    for (std::size_t idx : order) {
        if (kept >= h_new) break;
        if (keep[idx]) continue;
        keep[idx] = 1;
        ++kept;
        std::size_t p = conj_partner(m, idx);
        if (p != npos && p != idx && !keep[p]) {
            keep[p] = 1;
            ++kept;  // pair kept whole; budget rounds up past h_new if needed
        }
    }

    SsmModes out;
    out.gamma = m.gamma;
    out.origin_length = m.origin_length;
    out.lambda.reserve(kept);
    out.weights.reserve(kept);
    for (std::size_t k = 0; k < h; ++k) {
        if (!keep[k]) continue;
        out.lambda.push_back(m.lambda[k]);
        out.weights.push_back(m.weights[k]);
    }
    return out;
}

SsmModes convert_with_decay(const ToeplitzKernel& k, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw invalid_size_error("convert_with_decay: gamma must be in (0, 1]");
    if (gamma == 1.0) return etsc_convert(k);

    const std::size_t n = k.coeffs.size();
    std::vector<double> scaled(n);
    double f = 1.0;  // gamma^{-i}
    for (std::size_t i = 0; i < n; ++i) {
        if (k.coeffs[i] == 0.0) {
            scaled[i] = 0.0;
        } else {
            double s = k.coeffs[i] * f;
            if (!std::isfinite(s) || std::abs(s) > 1e150)
                throw decay_too_strong_error("convert_with_decay: rescale overflow");
            scaled[i] = s;
        }
        f /= gamma;
    }

    SsmModes m = etsc_convert(scaled);
    for (auto& l : m.lambda) l *= gamma;
    m.gamma = gamma;
    m.origin_length = n;
    return m;
}

// --- gradient-descent baseline -------------------------------------------

GradientParams gradient_init(std::size_t h, std::uint64_t seed) {
    if (h == 0) throw invalid_size_error("gradient_init: need h >= 1");
    Rng rng(seed);
    GradientParams p;
    p.r.resize(h);
    p.theta.resize(h);
    p.b_real.resize(h);
    p.b_imag.resize(h);
    for (auto& v : p.r) v = rng.normal();
    for (auto& v : p.theta) v = rng.normal();
    for (auto& v : p.b_real) v = rng.normal();
    for (auto& v : p.b_imag) v = rng.normal();
    return p;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

SsmModes modes_from_params(const GradientParams& p, std::size_t origin_length) {
    const std::size_t h = p.size();
    SsmModes m;
    m.lambda.resize(h);
    m.weights.resize(h);
    m.gamma = 1.0;
    m.origin_length = origin_length;
    for (std::size_t k = 0; k < h; ++k) {
        m.lambda[k] = std::polar(sigmoid(p.r[k]), p.theta[k]);
        m.weights[k] = Complex{p.b_real[k], p.b_imag[k]};
    }
    return m;
}

namespace {

// Running powers of sub-unit poles underflow into denormals long before the
// sequence ends, stalling the whole pass; anything this small is noise
// relative to the loss terms, so flush it to an exact zero.
constexpr double kPowerFloor = 1e-290;

inline double flush_tiny(double v) {
    return (v < kPowerFloor && v > -kPowerFloor) ? 0.0 : v;
}

// Poles as separate real/imag arrays; the mode loop runs innermost so the
// running-power recurrences stay independent and vectorizable.
struct PoleArrays {
    std::vector<double> la_re, la_im, mod;

    explicit PoleArrays(const GradientParams& p) {
        const std::size_t h = p.size();
        la_re.resize(h);
        la_im.resize(h);
        mod.resize(h);
        for (std::size_t k = 0; k < h; ++k) {
            mod[k] = sigmoid(p.r[k]);
            la_re[k] = mod[k] * std::cos(p.theta[k]);
            la_im[k] = mod[k] * std::sin(p.theta[k]);
        }
    }
};

// Fills pred[m] = sum_k b_k lambda_k^m and returns the loss
// sum_m |t_m - pred_m|^2.
double predict_and_loss(const std::vector<double>& t, const GradientParams& p,
                        const PoleArrays& poles,
                        std::vector<double>& pr_re, std::vector<double>& pr_im) {
    const std::size_t n = t.size();
    const std::size_t h = p.size();
    pr_re.assign(n, 0.0);
    pr_im.assign(n, 0.0);
    std::vector<double> pw_re = p.b_real;  // running b_k * lambda_k^m
    std::vector<double> pw_im = p.b_imag;
    const double* __restrict lre = poles.la_re.data();
    const double* __restrict lim = poles.la_im.data();
    double* __restrict wr = pw_re.data();
    double* __restrict wi = pw_im.data();
    for (std::size_t m = 0; m < n; ++m) {
        // Four partial sums in a fixed order keep the reduction exact and
        // off the critical path.
        double ar0 = 0.0, ar1 = 0.0, ar2 = 0.0, ar3 = 0.0;
        double ai0 = 0.0, ai1 = 0.0, ai2 = 0.0, ai3 = 0.0;
        std::size_t k = 0;
        for (; k + 4 <= h; k += 4) {
            ar0 += wr[k];
            ar1 += wr[k + 1];
            ar2 += wr[k + 2];
            ar3 += wr[k + 3];
            ai0 += wi[k];
            ai1 += wi[k + 1];
            ai2 += wi[k + 2];
            ai3 += wi[k + 3];
            for (std::size_t j = k; j < k + 4; ++j) {
                double nre = wr[j] * lre[j] - wi[j] * lim[j];
                double nim = wr[j] * lim[j] + wi[j] * lre[j];
                wr[j] = flush_tiny(nre);
                wi[j] = flush_tiny(nim);
            }
        }
        for (; k < h; ++k) {
            ar0 += wr[k];
            ai0 += wi[k];
            double nre = wr[k] * lre[k] - wi[k] * lim[k];
            double nim = wr[k] * lim[k] + wi[k] * lre[k];
            wr[k] = flush_tiny(nre);
            wi[k] = flush_tiny(nim);
        }
        pr_re[m] = ((ar0 + ar1) + (ar2 + ar3));
        pr_im[m] = ((ai0 + ai1) + (ai2 + ai3));
    }
    double loss = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        double ere = pr_re[m] - t[m];
        double eim = pr_im[m];
        loss += ere * ere + eim * eim;
    }
    return loss;
}

}  // namespace

double gradient_loss(const std::vector<double>& t, const GradientParams& p) {
    std::vector<double> pr_re, pr_im;
    return predict_and_loss(t, p, PoleArrays(p), pr_re, pr_im);
}

double gradient_loss_and_grad(const std::vector<double>& t, const GradientParams& p,
                              GradientParams& grad) {
    const std::size_t n = t.size();
    const std::size_t h = p.size();
    if (n == 0) throw invalid_size_error("gradient_loss_and_grad: empty target");

    PoleArrays poles(p);
    std::vector<double> pr_re, pr_im;
    double loss = predict_and_loss(t, p, poles, pr_re, pr_im);

    // Residual e_m = pred_m - t_m.
    std::vector<double> e_re(n), e_im(n);
    for (std::size_t m = 0; m < n; ++m) {
        e_re[m] = pr_re[m] - t[m];
        e_im[m] = pr_im[m];
    }

    // s1_k = sum_m conj(e_m) lambda_k^m, s2_k = sum_m m conj(e_m) lambda_k^m.
    std::vector<double> s1_re_v(h, 0.0), s1_im_v(h, 0.0), s2_re_v(h, 0.0), s2_im_v(h, 0.0);
    std::vector<double> pw_re(h, 1.0), pw_im(h, 0.0);
    {
        const double* __restrict lre = poles.la_re.data();
        const double* __restrict lim = poles.la_im.data();
        double* __restrict wr = pw_re.data();
        double* __restrict wi = pw_im.data();
        double* __restrict s1r = s1_re_v.data();
        double* __restrict s1i = s1_im_v.data();
        double* __restrict s2r = s2_re_v.data();
        double* __restrict s2i = s2_im_v.data();
        for (std::size_t m = 0; m < n; ++m) {
            const double ere = e_re[m];
            const double eim = e_im[m];
            const double fm = static_cast<double>(m);
            for (std::size_t k = 0; k < h; ++k) {
                double w_re = ere * wr[k] + eim * wi[k];
                double w_im = ere * wi[k] - eim * wr[k];
                s1r[k] += w_re;
                s1i[k] += w_im;
                s2r[k] += fm * w_re;
                s2i[k] += fm * w_im;
                double nre = wr[k] * lre[k] - wi[k] * lim[k];
                double nim = wr[k] * lim[k] + wi[k] * lre[k];
                wr[k] = flush_tiny(nre);
                wi[k] = flush_tiny(nim);
            }
        }
    }

    grad.r.resize(h);
    grad.theta.resize(h);
    grad.b_real.resize(h);
    grad.b_imag.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
        grad.b_real[k] = 2.0 * s1_re_v[k];
        grad.b_imag[k] = -2.0 * s1_im_v[k];
        // w2 = s2 * b_k; chain through lambda = sigmoid(r) exp(i theta).
        double w2_re = s2_re_v[k] * p.b_real[k] - s2_im_v[k] * p.b_imag[k];
        double w2_im = s2_re_v[k] * p.b_imag[k] + s2_im_v[k] * p.b_real[k];
        grad.r[k] = 2.0 * (1.0 - poles.mod[k]) * w2_re;
        grad.theta[k] = -2.0 * w2_im;
    }
    return loss;
}

GradientResult gradient_convert(const std::vector<double>& t, std::size_t h,
                                const GradientConfig& cfg) {
    if (t.empty()) throw invalid_size_error("gradient_convert: need n >= 1");
    if (h == 0) throw invalid_size_error("gradient_convert: need h >= 1");
    if (cfg.iterations == 0) throw invalid_size_error("gradient_convert: need iterations >= 1");
    if (!(cfg.step_size > 0.0)) throw invalid_size_error("gradient_convert: step_size must be > 0");
    const std::size_t cadence = cfg.loss_cadence == 0 ? 1 : cfg.loss_cadence;

    GradientParams p = gradient_init(h, cfg.seed);
    GradientParams grad;
    GradientResult res;

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        double loss = gradient_loss_and_grad(t, p, grad);
        if (!std::isfinite(loss))
            throw divergence_error("gradient_convert: non-finite loss", it);
        if (it % cadence == 0) res.loss_trace.emplace_back(it, loss);
        const double s = cfg.step_size;
        for (std::size_t k = 0; k < h; ++k) {
            p.r[k] -= s * grad.r[k];
            p.theta[k] -= s * grad.theta[k];
            p.b_real[k] -= s * grad.b_real[k];
            p.b_imag[k] -= s * grad.b_imag[k];
        }
    }
    double final_loss = gradient_loss(t, p);
    if (!std::isfinite(final_loss))
        throw divergence_error("gradient_convert: non-finite loss", cfg.iterations);
    res.loss_trace.emplace_back(cfg.iterations, final_loss);
    res.modes = modes_from_params(p, t.size());
    return res;
}

}  // namespace etsc
