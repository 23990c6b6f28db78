#include "etsc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "etsc/conversion.hpp"
#include "etsc/error.hpp"
#include "etsc/generate.hpp"
#include "etsc/inference.hpp"
#include "etsc/parallel.hpp"
#include "etsc/rng.hpp"

namespace etsc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void SweepSpec::validate() const {
    if (n_grid.empty() || d_grid.empty() || layer_grid.empty())
        throw invalid_size_error("SweepSpec: grids must be nonempty");
    if (repeats < 3) throw invalid_size_error("SweepSpec: need repeats >= 3");
    for (std::size_t n : n_grid)
        if (n == 0) throw invalid_size_error("SweepSpec: n must be >= 1");
    for (std::size_t d : d_grid)
        if (d == 0) throw invalid_size_error("SweepSpec: d must be >= 1");
    for (std::size_t l : layer_grid)
        if (l == 0) throw invalid_size_error("SweepSpec: layers must be >= 1");
}

std::vector<BenchRecord> bench_conversion(const SweepSpec& spec) {
    spec.validate();
    std::vector<BenchRecord> records;

    struct Point {
        std::size_t n, d;
    };
    std::vector<Point> grid;
    for (std::size_t n : spec.n_grid)
        for (std::size_t d : spec.d_grid) grid.push_back({n, d});

    std::vector<std::vector<BenchRecord>> per_point(grid.size());
    auto run_point = [&](std::size_t gi) {
        const auto [n, d] = grid[gi];
        // Kernel set is a pure function of (seed, n, d): deterministic rows.
        Rng rng(spec.seed ^ (0x9e3779b97f4a7c15ULL * (n * 131 + d)));
        std::vector<ToeplitzKernel> kernels;
        kernels.reserve(d);
        for (std::size_t c = 0; c < d; ++c) kernels.push_back(random_kernel(n, rng));

        {
            std::vector<double> times;
            double worst = 0.0;
            for (std::size_t rep = 0; rep < spec.warmups + spec.repeats; ++rep) {
                auto t0 = Clock::now();
                std::vector<SsmModes> modes;
                modes.reserve(d);
                for (const auto& k : kernels) modes.push_back(etsc_convert(k));
                double dt = seconds_since(t0);
                if (rep >= spec.warmups) times.push_back(dt);
                if (rep == 0)
                    for (std::size_t c = 0; c < d; ++c)
                        worst = std::max(worst, relative_error(kernels[c].coeffs,
                                                               reconstruct(modes[c], n)));
            }
            BenchRecord r;
            r.strategy = "etsc";
            r.n = n;
            r.d = d;
            r.layers = 0;
            r.conversion_seconds = median(times);
            r.relative_error = worst;
            per_point[gi].push_back(std::move(r));
        }

        if (spec.include_gradient) {
            GradientConfig cfg;
            cfg.iterations = spec.gradient_iterations;
            cfg.step_size = spec.gradient_step;
            cfg.seed = spec.seed;
            cfg.loss_cadence = std::max<std::size_t>(1, spec.gradient_iterations / 10);
            double worst = 0.0;
            auto t0 = Clock::now();
            for (std::size_t c = 0; c < d; ++c) {
                GradientResult res = gradient_convert(kernels[c].coeffs, n, cfg);
                worst = std::max(worst, relative_error(kernels[c].coeffs,
                                                       reconstruct(res.modes, n)));
            }
            BenchRecord r;
            r.strategy = "gradient";
            r.n = n;
            r.d = d;
            r.layers = 0;
            r.conversion_seconds = seconds_since(t0);  // one budgeted run, not repeated
            r.relative_error = worst;
            per_point[gi].push_back(std::move(r));
        }
    };

    parallel_for(grid.size(), spec.parallel_grid ? thread_budget(1) : 1, run_point);
    for (auto& rows : per_point)
        for (auto& r : rows) records.push_back(std::move(r));
    return records;
}

std::vector<BenchRecord> bench_inference(const SweepSpec& spec) {
    spec.validate();
    if (spec.positions.empty())
        throw invalid_size_error("bench_inference: need at least one position checkpoint");

    std::vector<std::size_t> checkpoints = spec.positions;
    std::sort(checkpoints.begin(), checkpoints.end());

    struct Point {
        std::size_t n, d, layers;
        Strategy strategy;
    };
    std::vector<Point> grid;
    for (std::size_t n : spec.n_grid)
        for (std::size_t d : spec.d_grid)
            for (std::size_t l : spec.layer_grid)
                for (const auto& s : spec.strategies)
                    grid.push_back({n, d, l, strategy_from_name(s)});

    const std::size_t max_pos =
        checkpoints.back() + (spec.warmups + spec.repeats) * checkpoints.size() + 1;

    std::vector<std::vector<BenchRecord>> per_point(grid.size());
    auto run_point = [&](std::size_t gi) {
        const Point pt = grid[gi];
        StackedMixer model =
            random_mixer(pt.layers, pt.d, pt.n, spec.seed ^ (pt.n * 7919 + pt.d));
        // Input stream is shared across strategies at a grid point.
        Rng rng(spec.seed ^ 0xabcdef12345ULL ^ pt.n);
        std::vector<std::vector<double>> inputs(max_pos, std::vector<double>(pt.d));
        for (auto& row : inputs)
            for (auto& v : row) v = rng.normal();

        StreamSession session = open_session(model, pt.strategy);
        for (std::size_t cp : checkpoints) {
            if (session.position() < cp) {
                std::vector<std::vector<double>> block(
                    inputs.begin() + static_cast<std::ptrdiff_t>(session.position()),
                    inputs.begin() + static_cast<std::ptrdiff_t>(cp));
                session.push_many(block);
            }
            BenchRecord r;
            r.strategy = strategy_name(pt.strategy);
            r.n = pt.n;
            r.d = pt.d;
            r.layers = pt.layers;
            r.position = cp;
            r.resident_scalars = session.resident_scalars();
            if (pt.strategy == Strategy::ssm)
                r.conversion_seconds = session.conversion_seconds();

            for (std::size_t w = 0; w < spec.warmups; ++w)
                session.push(inputs[session.position()]);
            std::vector<double> times;
            times.reserve(spec.repeats);
            for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
                auto t0 = Clock::now();
                session.push(inputs[session.position()]);
                times.push_back(seconds_since(t0));
            }
            r.seconds_per_token = median(times);
            per_point[gi].push_back(std::move(r));
        }
    };

    parallel_for(grid.size(), spec.parallel_grid ? thread_budget(1) : 1, run_point);

    std::vector<BenchRecord> records;
    for (auto& rows : per_point)
        for (auto& r : rows) records.push_back(std::move(r));
    return records;
}

// --- CSV --------------------------------------------------------------------

namespace {

const char* kHeader =
    "strategy,n,d,layers,position,seconds_per_token,resident_scalars,"
    "conversion_seconds,relative_error";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<BenchRecord>& records) {
    os << kHeader << '\n';
    for (const auto& r : records) {
        os << r.strategy << ',' << r.n << ',' << r.d << ',' << r.layers << ','
           << r.position << ',';
        if (r.seconds_per_token) os << fmt_double(*r.seconds_per_token);
        os << ',';
        if (r.resident_scalars) os << *r.resident_scalars;
        os << ',';
        if (r.conversion_seconds) os << fmt_double(*r.conversion_seconds);
        os << ',';
        if (r.relative_error) os << fmt_double(*r.relative_error);
        os << '\n';
    }
}

std::vector<BenchRecord> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw parse_error("empty CSV", "line 1");
    if (line != kHeader) throw parse_error("unexpected CSV header", "line 1");

    std::vector<BenchRecord> out;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 9)
            throw parse_error("expected 9 fields", "line " + std::to_string(lineno));
        BenchRecord r;
        r.strategy = f[0];
        r.n = std::stoull(f[1]);
        r.d = std::stoull(f[2]);
        r.layers = std::stoull(f[3]);
        r.position = std::stoull(f[4]);
        if (!f[5].empty()) r.seconds_per_token = std::stod(f[5]);
        if (!f[6].empty()) r.resident_scalars = std::stoull(f[6]);
        if (!f[7].empty()) r.conversion_seconds = std::stod(f[7]);
        if (!f[8].empty()) r.relative_error = std::stod(f[8]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace etsc
