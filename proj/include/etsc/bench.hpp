#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace etsc {

// One measurement row. Memory is model-based scalar accounting (complex
// counts two), never process RSS; timings are medians over repeats.
struct BenchRecord {
    std::string strategy;  // origin | cache | ssm | etsc | gradient
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t layers = 0;
    std::size_t position = 0;
    std::optional<double> seconds_per_token;
    std::optional<std::size_t> resident_scalars;
    std::optional<double> conversion_seconds;
    std::optional<double> relative_error;
};

struct SweepSpec {
    std::vector<std::size_t> n_grid;
    std::vector<std::size_t> d_grid{64};
    std::vector<std::size_t> layer_grid{2};
    std::vector<std::string> strategies{"origin", "cache", "ssm"};
    std::vector<std::size_t> positions{512, 1024, 2048};  // inference checkpoints
    std::uint64_t seed = 0;
    std::size_t repeats = 5;  // >= 3
    std::size_t warmups = 2;
    bool include_gradient = true;      // conversion sweeps run both methods
    std::size_t gradient_iterations = 200;
    double gradient_step = 1e-4;
    bool parallel_grid = false;  // opt-in: parallelize across grid points only

    void validate() const;
};

// For each (n, d): converts d seeded random kernels with the closed-form
// method and (optionally) the gradient baseline under its fixed budget,
// recording wall-clock and the worst per-channel reconstruction error.
std::vector<BenchRecord> bench_conversion(const SweepSpec& spec);

// For each (n, d, L, strategy): opens a session on a seeded random model and
// records seconds_per_token (median of `repeats` single pushes after
// `warmups`) and resident_scalars at every position checkpoint. Sessions are
// fast-forwarded between checkpoints with the batch push.
std::vector<BenchRecord> bench_inference(const SweepSpec& spec);

// CSV with the exact column set
// strategy,n,d,layers,position,seconds_per_token,resident_scalars,conversion_seconds,relative_error
// Doubles are printed with round-trip precision; absent fields stay empty.
void write_csv(std::ostream& os, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_csv(std::istream& is);

}  // namespace etsc
