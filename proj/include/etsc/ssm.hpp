#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "etsc/conversion.hpp"
#include "etsc/toeplitz.hpp"

namespace etsc {

// Hidden state of the diagonal recurrence u' = Lambda u + B x, y = Re(1' u)
// for a single scalar stream. Single-owner: never step one state from two
// threads.
struct SsmState {
    ComplexSeq u;
    std::uint64_t position = 0;
    // Numerical-health probes: the output's imaginary part is analytically
    // zero for conjugate-symmetric modes, so its residual is tracked.
    double max_imag_residual = 0.0;
    double output_scale = 0.0;  // max |y| seen so far

    bool imag_residual_ok(double tol = 1e-6) const {
        return max_imag_residual <= tol * (output_scale > 0.0 ? output_scale : 1.0);
    }
};

SsmState init_state(const SsmModes& m);

// One token: u_k <- lambda_k u_k + b_k x, returns Re(sum_k u_k).
// Throws input_error on non-finite x.
double step(const SsmModes& m, SsmState& s, double x);

// Batch convenience; defined as the fold of step (bitwise identical).
Signal scan(const SsmModes& m, const Signal& x);

// --- conjugate-pair compression -------------------------------------------
// For conjugate-symmetric mode sets (real kernels) only one member of each
// pair needs stepping: the pair contributes 2*Re(u), a self-conjugate real
// pole (lambda = -1 when n+1 is even) contributes Re(u) once. Halves the
// state. Off by default everywhere; provided as an explicit opt-in.
struct CompressedModes {
    ComplexSeq lambda;
    ComplexSeq weights;
    std::vector<double> factor;  // 2.0 for pair representatives, 1.0 for real poles
    std::size_t full_size = 0;
    double gamma = 1.0;
    std::size_t origin_length = 0;

    std::size_t size() const { return lambda.size(); }
};

// Throws shape_error if the modes are not conjugate-symmetric.
CompressedModes compress_conjugate_pairs(const SsmModes& m);

SsmState init_state(const CompressedModes& m);
double step(const CompressedModes& m, SsmState& s, double x);
Signal scan(const CompressedModes& m, const Signal& x);

// --- channel bank -----------------------------------------------------------
// d independent scalar recurrences sharing the same hidden size, one per
// feature channel of a mixer layer.
class ChannelBank {
public:
    explicit ChannelBank(std::vector<SsmModes> channels);

    std::size_t channels() const { return modes_.size(); }
    std::size_t hidden() const { return modes_.empty() ? 0 : modes_[0].size(); }

    // Steps every channel once; x and the result have one entry per channel.
    std::vector<double> step_all(const std::vector<double>& x);

    const SsmModes& modes(std::size_t c) const { return modes_[c]; }
    const SsmState& state(std::size_t c) const { return states_[c]; }

private:
    std::vector<SsmModes> modes_;
    std::vector<SsmState> states_;
};

}  // namespace etsc
