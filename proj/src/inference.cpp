#include "etsc/inference.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "etsc/generate.hpp"
#include "etsc/parallel.hpp"
#include "etsc/rng.hpp"

namespace etsc {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::origin: return "origin";
        case Strategy::cache: return "cache";
        case Strategy::ssm: return "ssm";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "origin") return Strategy::origin;
    if (name == "cache") return Strategy::cache;
    if (name == "ssm") return Strategy::ssm;
    throw invalid_size_error("unknown strategy: " + name);
}

void StackedMixer::validate() const {
    if (kernels.empty()) throw invalid_size_error("StackedMixer: need L >= 1 layers");
    const std::size_t d = kernels[0].size();
    if (d == 0) throw invalid_size_error("StackedMixer: need d >= 1 channels");
    const std::size_t n = kernels[0][0].length();
    for (const auto& layer : kernels) {
        if (layer.size() != d) throw shape_error("StackedMixer: layers disagree on d");
        for (const auto& k : layer)
            if (k.length() != n) throw shape_error("StackedMixer: kernels disagree on n");
    }
    if (!boundaries.empty() && boundaries.size() != kernels.size() - 1)
        throw shape_error("StackedMixer: need one nonlinearity per layer boundary");
}

StackedMixer random_mixer(std::size_t layers, std::size_t d, std::size_t n,
                          std::uint64_t seed, Extension ext, Nonlinearity boundary) {
    if (layers == 0 || d == 0 || n == 0)
        throw invalid_size_error("random_mixer: need layers, d, n >= 1");
    Rng rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    StackedMixer m;
    m.kernels.resize(layers);
    for (auto& layer : m.kernels) {
        layer.reserve(d);
        for (std::size_t c = 0; c < d; ++c) {
            ToeplitzKernel k = random_kernel(n, rng, ext);
            for (auto& v : k.coeffs) v *= scale;
            layer.push_back(std::move(k));
        }
    }
    if (layers > 1) m.boundaries.assign(layers - 1, boundary);
    return m;
}

namespace {

double gelu(double x) {
    constexpr double c = 0.7978845608028654;  // sqrt(2/pi)
    return 0.5 * x * (1.0 + std::tanh(c * (x + 0.044715 * x * x * x)));
}

double apply_nl(Nonlinearity nl, double x) {
    return nl == Nonlinearity::gelu ? gelu(x) : x;
}

// Structural cost of one length-m FFT apply (three inner transforms plus the
// pointwise passes); feeds the scalars-touched counter.
std::uint64_t fft_apply_work(std::size_t m) {
    if (m <= 1) return 1;
    std::size_t big = next_pow2(2 * m - 1);
    std::uint64_t lg = 0;
    for (std::size_t v = big; v > 1; v >>= 1) ++lg;
    return 3 * static_cast<std::uint64_t>(big) * lg + 2 * static_cast<std::uint64_t>(m);
}

}  // namespace

StreamSession open_session(const StackedMixer& model, Strategy strategy) {
    model.validate();
    StreamSession s;
    s.model_ = &model;
    s.strategy_ = strategy;

    const std::size_t d = model.channels();
    switch (strategy) {
        case Strategy::origin:
            s.input_hist_.assign(d, {});
            break;
        case Strategy::cache:
            s.layer_hist_.assign(model.depth(),
                                 std::vector<std::vector<double>>(d));
            break;
        case Strategy::ssm: {
            auto t0 = std::chrono::steady_clock::now();
            const std::size_t total = model.depth() * d;
            std::vector<SsmModes> converted(total);
            parallel_for(total, thread_budget(), [&](std::size_t i) {
                const auto& k = model.kernels[i / d][i % d];
                converted[i] = k.extension.kind == Extension::Kind::decay
                                   ? convert_with_decay(k, k.extension.gamma)
                                   : etsc_convert(k);
            });
            s.banks_.reserve(model.depth());
            for (std::size_t l = 0; l < model.depth(); ++l) {
                std::vector<SsmModes> layer(converted.begin() + l * d,
                                            converted.begin() + (l + 1) * d);
                s.banks_.emplace_back(std::move(layer));
            }
            s.conversion_seconds_ =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            break;
        }
    }
    return s;
}

std::size_t StreamSession::channels() const { return model_ ? model_->channels() : 0; }

std::size_t StreamSession::resident_scalars() const {
    const std::size_t d = channels();
    switch (strategy_) {
        case Strategy::origin:
            return position_ * d;
        case Strategy::cache:
            return model_->depth() * position_ * d;
        case Strategy::ssm: {
            const std::size_t h = banks_.empty() ? 0 : banks_[0].hidden();
            return model_->depth() * d * 6 * h;
        }
    }
    return 0;
}

std::vector<double> StreamSession::push(const std::vector<double>& x) {
    if (x.size() != channels()) throw shape_error("push: channel count mismatch");
    for (double v : x)
        if (!std::isfinite(v)) throw input_error("push: non-finite input");
    std::vector<double> y;
    switch (strategy_) {
        case Strategy::origin: y = push_origin(x); break;
        case Strategy::cache: y = push_cache(x); break;
        case Strategy::ssm: y = push_ssm(x); break;
    }
    ++position_;
    return y;
}

std::vector<double> StreamSession::push_origin(const std::vector<double>& x) {
    const std::size_t d = channels();
    const std::size_t L = model_->depth();
    for (std::size_t c = 0; c < d; ++c) input_hist_[c].push_back(x[c]);

    std::vector<std::vector<double>> cur = input_hist_;
    const std::size_t m = cur[0].size();
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t c = 0; c < d; ++c) {
            cur[c] = apply_fft(model_->kernels[l][c], cur[c]);
            work_ += fft_apply_work(m);
        }
        if (l + 1 < L && !model_->boundaries.empty() &&
            model_->boundaries[l] != Nonlinearity::identity) {
            for (auto& col : cur)
                for (auto& v : col) v = apply_nl(model_->boundaries[l], v);
        }
    }
    std::vector<double> y(d);
    for (std::size_t c = 0; c < d; ++c) y[c] = cur[c].back();
    return y;
}

std::vector<double> StreamSession::push_cache(const std::vector<double>& x) {
    const std::size_t d = channels();
    const std::size_t L = model_->depth();
    const std::size_t pos = position_;

    std::vector<double> v = x;
    for (std::size_t l = 0; l < L; ++l) {
        auto& hist = layer_hist_[l];
        for (std::size_t c = 0; c < d; ++c) hist[c].push_back(v[c]);
        std::vector<double> out(d);
        for (std::size_t c = 0; c < d; ++c) {
            const auto& k = model_->kernels[l][c];
            const auto& col = hist[c];
            double acc = 0.0;
            for (std::size_t j = 0; j <= pos; ++j)
                acc += extended_coeff(k, pos - j) * col[j];
            out[c] = acc;
        }
        work_ += static_cast<std::uint64_t>(d) * (pos + 1);
        if (l + 1 < L && !model_->boundaries.empty())
            for (auto& w : out) w = apply_nl(model_->boundaries[l], w);
        v = std::move(out);
    }
    return v;
}

std::vector<double> StreamSession::push_ssm(const std::vector<double>& x) {
    const std::size_t L = model_->depth();
    std::vector<double> v = x;
    for (std::size_t l = 0; l < L; ++l) {
        v = banks_[l].step_all(v);
        work_ += static_cast<std::uint64_t>(channels()) * banks_[l].hidden();
        if (l + 1 < L && !model_->boundaries.empty())
            for (auto& w : v) w = apply_nl(model_->boundaries[l], w);
    }
    return v;
}

std::vector<std::vector<double>> StreamSession::push_many(
    const std::vector<std::vector<double>>& xs) {
    if (xs.empty()) return {};
    for (const auto& x : xs) {
        if (x.size() != channels()) throw shape_error("push_many: channel count mismatch");
        for (double v : x)
            if (!std::isfinite(v)) throw input_error("push_many: non-finite input");
    }
    switch (strategy_) {
        case Strategy::origin: {
            auto out = batch_origin(xs);
            position_ += xs.size();
            return out;
        }
        case Strategy::cache: {
            auto out = batch_cache(xs);
            position_ += xs.size();
            return out;
        }
        case Strategy::ssm: {
            std::vector<std::vector<double>> out;
            out.reserve(xs.size());
            for (const auto& x : xs) {
                out.push_back(push_ssm(x));
                ++position_;
            }
            return out;
        }
    }
    return {};
}

std::vector<std::vector<double>> StreamSession::batch_origin(
    const std::vector<std::vector<double>>& xs) {
    const std::size_t d = channels();
    const std::size_t L = model_->depth();
    const std::size_t first = position_;
    for (const auto& x : xs)
        for (std::size_t c = 0; c < d; ++c) input_hist_[c].push_back(x[c]);

    std::vector<std::vector<double>> cur = input_hist_;
    const std::size_t m = cur[0].size();
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t c = 0; c < d; ++c) {
            cur[c] = apply_fft(model_->kernels[l][c], cur[c]);
            work_ += fft_apply_work(m);
        }
        if (l + 1 < L && !model_->boundaries.empty() &&
            model_->boundaries[l] != Nonlinearity::identity) {
            for (auto& col : cur)
                for (auto& v : col) v = apply_nl(model_->boundaries[l], v);
        }
    }
    std::vector<std::vector<double>> out(xs.size(), std::vector<double>(d));
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t c = 0; c < d; ++c) out[i][c] = cur[c][first + i];
    return out;
}

std::vector<std::vector<double>> StreamSession::batch_cache(
    const std::vector<std::vector<double>>& xs) {
    const std::size_t d = channels();
    const std::size_t L = model_->depth();
    const std::size_t first = position_;

    // New inputs land in layer 0's history; each layer's batch output is
    // appended to the next layer's history, then recomputed from it.
    for (const auto& x : xs)
        for (std::size_t c = 0; c < d; ++c) layer_hist_[0][c].push_back(x[c]);

    const std::size_t m = layer_hist_[0][0].size();
    std::vector<std::vector<double>> out;
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<std::vector<double>> col(d);
        for (std::size_t c = 0; c < d; ++c) {
            col[c] = apply_fft(model_->kernels[l][c], layer_hist_[l][c]);
            work_ += fft_apply_work(m);
        }
        if (l + 1 < L && !model_->boundaries.empty() &&
            model_->boundaries[l] != Nonlinearity::identity) {
            for (auto& cc : col)
                for (auto& v : cc) v = apply_nl(model_->boundaries[l], v);
        }
        if (l + 1 < L) {
            for (std::size_t c = 0; c < d; ++c)
                for (std::size_t i = first; i < m; ++i)
                    layer_hist_[l + 1][c].push_back(col[c][i]);
        } else {
            out.assign(xs.size(), std::vector<double>(d));
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t c = 0; c < d; ++c) out[i][c] = col[c][first + i];
        }
    }
    return out;
}

double ParityReport::max_in_range() const {
    double m = 0.0;
    for (const auto& p : pairs) m = std::max(m, p.max_in_range);
    return m;
}

double ParityReport::max_beyond() const {
    double m = 0.0;
    for (const auto& p : pairs) m = std::max(m, p.max_beyond);
    return m;
}

ParityReport parity_report(const StackedMixer& model,
                           const std::vector<std::vector<double>>& inputs) {
    model.validate();
    const std::size_t n = model.kernel_length();
    const std::size_t d = model.channels();

    constexpr std::array<Strategy, 3> kStrategies{Strategy::origin, Strategy::cache,
                                                  Strategy::ssm};
    std::array<std::vector<std::vector<double>>, 3> outputs;
    for (std::size_t si = 0; si < 3; ++si) {
        StreamSession session = open_session(model, kStrategies[si]);
        outputs[si].reserve(inputs.size());
        for (const auto& x : inputs) outputs[si].push_back(session.push(x));
    }

    ParityReport rep;
    for (const auto& per_strategy : outputs)
        for (const auto& row : per_strategy)
            for (double v : row) rep.scale = std::max(rep.scale, std::abs(v));
    const double denom = rep.scale > 0.0 ? rep.scale : 1.0;

    for (std::size_t pos = 0; pos < inputs.size(); ++pos)
        (pos < n ? rep.in_range_positions : rep.beyond_positions) += 1;

    const std::array<std::pair<std::size_t, std::size_t>, 3> idx{
        {{0, 1}, {0, 2}, {1, 2}}};
    for (std::size_t pi = 0; pi < 3; ++pi) {
        auto [a, b] = idx[pi];
        auto& stat = rep.pairs[pi];
        stat.a = kStrategies[a];
        stat.b = kStrategies[b];
        for (std::size_t pos = 0; pos < inputs.size(); ++pos) {
            double dev = 0.0;
            for (std::size_t c = 0; c < d; ++c)
                dev = std::max(dev, std::abs(outputs[a][pos][c] - outputs[b][pos][c]));
            dev /= denom;
            if (pos < n)
                stat.max_in_range = std::max(stat.max_in_range, dev);
            else
                stat.max_beyond = std::max(stat.max_beyond, dev);
        }
    }
    return rep;
}

}  // namespace etsc
