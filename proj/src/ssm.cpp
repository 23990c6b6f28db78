#include "etsc/ssm.hpp"

#include <cmath>

namespace etsc {

SsmState init_state(const SsmModes& m) {
    SsmState s;
    s.u.assign(m.size(), Complex{0.0, 0.0});
    return s;
}

double step(const SsmModes& m, SsmState& s, double x) {
    if (!std::isfinite(x)) throw input_error("step: non-finite input");
    if (s.u.size() != m.size()) throw shape_error("step: state does not match modes");

    const std::size_t h = m.size();
    const Complex* lam = m.lambda.data();
    const Complex* b = m.weights.data();
    Complex* u = s.u.data();
    double sum_re = 0.0, sum_im = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        const double ure = u[k].real(), uim = u[k].imag();
        const double lre = lam[k].real(), lim = lam[k].imag();
        const double nre = lre * ure - lim * uim + b[k].real() * x;
        const double nim = lre * uim + lim * ure + b[k].imag() * x;
        u[k] = Complex{nre, nim};
        sum_re += nre;
        sum_im += nim;
    }
    ++s.position;
    s.max_imag_residual = std::max(s.max_imag_residual, std::abs(sum_im));
    s.output_scale = std::max(s.output_scale, std::abs(sum_re));
    return sum_re;
}

Signal scan(const SsmModes& m, const Signal& x) {
    if (x.empty()) throw invalid_size_error("scan: empty signal");
    SsmState s = init_state(m);
    Signal y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = step(m, s, x[i]);
    return y;
}

CompressedModes compress_conjugate_pairs(const SsmModes& m) {
    const std::size_t h = m.size();
    const double tol = 1e-9;
    auto is_partner = [&](std::size_t k, std::size_t j) {
        return std::abs(m.lambda[j] - std::conj(m.lambda[k])) <= tol * (1.0 + std::abs(m.lambda[k])) &&
               std::abs(m.weights[j] - std::conj(m.weights[k])) <= tol * (1.0 + std::abs(m.weights[k]));
    };

    CompressedModes out;
    out.full_size = h;
    out.gamma = m.gamma;
    out.origin_length = m.origin_length;

    std::vector<char> used(h, 0);
    for (std::size_t k = 0; k < h; ++k) {
        if (used[k]) continue;
        if (is_partner(k, k)) {  // real pole, real weight
            out.lambda.push_back(m.lambda[k]);
            out.weights.push_back(m.weights[k]);
            out.factor.push_back(1.0);
            used[k] = 1;
            continue;
        }
        std::size_t partner = h;  // ETSC order pairs s with h-1-s; try it first
        if (h >= 1 && h - 1 - k != k && !used[h - 1 - k] && is_partner(k, h - 1 - k)) {
            partner = h - 1 - k;
        } else {
            for (std::size_t j = k + 1; j < h; ++j) {
                if (!used[j] && is_partner(k, j)) {
                    partner = j;
                    break;
                }
            }
        }
        if (partner == h)
            throw shape_error("compress_conjugate_pairs: modes are not conjugate-symmetric");
        out.lambda.push_back(m.lambda[k]);
        out.weights.push_back(m.weights[k]);
        out.factor.push_back(2.0);
        used[k] = 1;
        used[partner] = 1;
    }
    return out;
}

SsmState init_state(const CompressedModes& m) {
    SsmState s;
    s.u.assign(m.size(), Complex{0.0, 0.0});
    return s;
}

double step(const CompressedModes& m, SsmState& s, double x) {
    if (!std::isfinite(x)) throw input_error("step: non-finite input");
    if (s.u.size() != m.size()) throw shape_error("step: state does not match modes");

    const std::size_t hc = m.size();
    Complex* u = s.u.data();
    double sum = 0.0;
    for (std::size_t k = 0; k < hc; ++k) {
        const double ure = u[k].real(), uim = u[k].imag();
        const double lre = m.lambda[k].real(), lim = m.lambda[k].imag();
        const double nre = lre * ure - lim * uim + m.weights[k].real() * x;
        const double nim = lre * uim + lim * ure + m.weights[k].imag() * x;
        u[k] = Complex{nre, nim};
        sum += m.factor[k] * nre;
    }
    ++s.position;
    s.output_scale = std::max(s.output_scale, std::abs(sum));
    return sum;
}

Signal scan(const CompressedModes& m, const Signal& x) {
    if (x.empty()) throw invalid_size_error("scan: empty signal");
    SsmState s = init_state(m);
    Signal y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = step(m, s, x[i]);
    return y;
}

ChannelBank::ChannelBank(std::vector<SsmModes> channels) : modes_(std::move(channels)) {
    if (modes_.empty()) throw invalid_size_error("ChannelBank: need d >= 1 channels");
    for (const auto& m : modes_)
        if (m.size() != modes_[0].size())
            throw shape_error("ChannelBank: all channels must share the hidden size");
    states_.reserve(modes_.size());
    for (const auto& m : modes_) states_.push_back(init_state(m));
}

std::vector<double> ChannelBank::step_all(const std::vector<double>& x) {
    if (x.size() != modes_.size()) throw shape_error("ChannelBank: channel count mismatch");
    std::vector<double> y(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) y[c] = step(modes_[c], states_[c], x[c]);
    return y;
}

}  // namespace etsc
