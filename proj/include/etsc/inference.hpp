#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "etsc/ssm.hpp"
#include "etsc/toeplitz.hpp"

namespace etsc {

enum class Strategy { origin, cache, ssm };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

enum class Nonlinearity { identity, gelu };

// Stack of L token-mixing layers, each holding one causal kernel per feature
// channel. Channels never mix; an optional pointwise squashing sits on each
// boundary between consecutive layers.
struct StackedMixer {
    std::vector<std::vector<ToeplitzKernel>> kernels;  // [layer][channel]
    std::vector<Nonlinearity> boundaries;              // size depth()-1

    std::size_t depth() const { return kernels.size(); }
    std::size_t channels() const { return kernels.empty() ? 0 : kernels[0].size(); }
    std::size_t kernel_length() const {
        return kernels.empty() || kernels[0].empty() ? 0 : kernels[0][0].length();
    }
    void validate() const;  // same d everywhere, same n everywhere
};

// Deterministic random model; coefficients scaled by 1/sqrt(n) so stacked
// outputs stay O(1).
StackedMixer random_mixer(std::size_t layers, std::size_t d, std::size_t n,
                          std::uint64_t seed,
                          Extension ext = Extension::zeros(),
                          Nonlinearity boundary = Nonlinearity::identity);

// One autoregressive decoding stream over a StackedMixer.
//
//   origin: keeps only the raw input history; every push reruns all layers
//           over the whole history with the FFT apply and returns the last
//           row.
//   cache:  keeps per-layer input histories; every push computes just the
//           newest element of each layer by the causal dot product.
//   ssm:    keeps per-layer-per-channel recurrence states (kernels are
//           converted when the session opens); every push costs O(h d L)
//           regardless of position.
//
// Sessions reference the model they were opened on; the model must outlive
// them. A session is single-owner and stepped sequentially.
class StreamSession {
public:
    Strategy strategy() const { return strategy_; }
    std::size_t position() const { return position_; }
    std::size_t channels() const;

    // Feeds one input vector (length d), returns the top-layer output.
    std::vector<double> push(const std::vector<double>& x);

    // Feeds a block of inputs and returns all their outputs. Equivalent to
    // repeated push up to floating-point rounding (origin and cache run one
    // batched recompute instead of per-position work); used to fast-forward
    // benchmark sessions.
    std::vector<std::vector<double>> push_many(const std::vector<std::vector<double>>& xs);

    // Model-based count of scalars held by the session (complex counts 2).
    //   origin: position*d        cache: L*position*d
    //   ssm:    L*d*6h (2h state + 4h converted modes), position-free
    std::size_t resident_scalars() const;

    // Instrumented per-push work: scalar touches accumulated over all pushes
    // (structural count, not wall-clock).
    std::uint64_t scalars_touched() const { return work_; }

    // Wall-clock seconds spent converting kernels when the session opened
    // (zero for origin/cache).
    double conversion_seconds() const { return conversion_seconds_; }

private:
    friend StreamSession open_session(const StackedMixer&, Strategy);

    const StackedMixer* model_ = nullptr;
    Strategy strategy_ = Strategy::origin;
    std::size_t position_ = 0;
    std::uint64_t work_ = 0;
    double conversion_seconds_ = 0.0;

    // origin: input_hist_ only; cache: layer_hist_[l] is the input history of
    // layer l (layer_hist_[0] aliases the raw inputs).
    std::vector<std::vector<double>> input_hist_;               // [channel][pos]
    std::vector<std::vector<std::vector<double>>> layer_hist_;  // [layer][channel][pos]
    std::vector<ChannelBank> banks_;                            // [layer], ssm only

    std::vector<double> push_origin(const std::vector<double>& x);
    std::vector<double> push_cache(const std::vector<double>& x);
    std::vector<double> push_ssm(const std::vector<double>& x);
    std::vector<std::vector<double>> batch_origin(const std::vector<std::vector<double>>& xs);
    std::vector<std::vector<double>> batch_cache(const std::vector<std::vector<double>>& xs);
};

// Opens an empty session at position 0. For the ssm strategy the model's
// kernels are converted here, channel-parallel under the ETSC_THREADS budget:
// zeros-extension kernels exactly, decay-extension kernels via
// convert_with_decay so extrapolated coefficients keep decaying.
StreamSession open_session(const StackedMixer& model, Strategy strategy);

// Max pairwise deviation between strategies, relative to the largest output
// magnitude seen across all strategies and positions, bucketed into
// positions below the kernel length and at-or-beyond it.
struct ParityReport {
    struct PairStat {
        Strategy a;
        Strategy b;
        double max_in_range = 0.0;
        double max_beyond = 0.0;
    };
    std::array<PairStat, 3> pairs{};
    double scale = 0.0;
    std::size_t in_range_positions = 0;
    std::size_t beyond_positions = 0;

    double max_in_range() const;
    double max_beyond() const;
};

// Runs all three strategies over the same inputs (inputs[pos] has d entries).
ParityReport parity_report(const StackedMixer& model,
                           const std::vector<std::vector<double>>& inputs);

}  // namespace etsc
