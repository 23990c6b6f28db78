// Command-line front end: generate kernels, convert them to diagonal
// state-space modes, verify conversions, check the three inference
// strategies against each other, and run timing/memory sweeps.
//
// Exit codes: 0 success, 1 verification/parity failure, 2 usage error,
// 3 I/O or parse error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "etsc/bench.hpp"
#include "etsc/conversion.hpp"
#include "etsc/generate.hpp"
#include "etsc/inference.hpp"
#include "etsc/io.hpp"
#include "etsc/rng.hpp"

namespace {

using nlohmann::json;

struct GenArgs {
    std::size_t n = 0;
    std::size_t d = 1;
    std::uint64_t seed = 0;
    std::string family = "random";
    std::string extension = "zeros";
    double gamma = 0.9;
    std::string out;
};

std::filesystem::path channel_path(const std::filesystem::path& base, std::size_t c,
                                   std::size_t d) {
    if (d == 1) return base;
    std::filesystem::path p = base;
    std::string stem = p.stem().string();
    std::string ext = p.extension().string();
    p.replace_filename(stem + ".c" + std::to_string(c) + ext);
    return p;
}

int run_gen(const GenArgs& a) {
    etsc::Extension ext = a.extension == "decay" ? etsc::Extension::decay(a.gamma)
                                                 : etsc::Extension::zeros();
    etsc::Rng rng(a.seed);
    for (std::size_t c = 0; c < a.d; ++c) {
        etsc::ToeplitzKernel k =
            a.family == "decay-sinusoid"
                ? etsc::decay_sinusoid_kernel(a.n, a.gamma, rng, 3, ext)
                : etsc::random_kernel(a.n, rng, ext);
        etsc::save_kernel(channel_path(a.out, c, a.d), k);
    }
    return 0;
}

struct ConvertArgs {
    std::string in;
    std::string out;
    std::string method = "etsc";
    std::size_t h = 0;       // 0 = kernel length
    std::size_t pad_to = 0;  // zero-pad the kernel before converting
    double gamma = 0.99;
    bool gamma_given = false;
    std::size_t iters = 10000;
    double step = 1e-2;
    std::uint64_t seed = 0;
    std::size_t cadence = 100;
};

int run_convert(const ConvertArgs& a) {
    etsc::ToeplitzKernel k = etsc::load_kernel(a.in);
    if (a.pad_to > 0) {
        if (a.pad_to < k.length())
            throw etsc::invalid_size_error("--pad-to must be >= the kernel length");
        k.coeffs.resize(a.pad_to, 0.0);
    }
    const std::size_t n = k.length();

    etsc::SsmModes modes;
    if (a.method == "etsc") {
        modes = etsc::etsc_convert(k);
        if (a.h > 0 && a.h < modes.size()) modes = etsc::truncate(modes, a.h);
    } else if (a.method == "etsc-decay") {
        double g = a.gamma;
        if (!a.gamma_given && k.extension.kind == etsc::Extension::Kind::decay)
            g = k.extension.gamma;
        modes = etsc::convert_with_decay(k, g);
    } else if (a.method == "gradient") {
        etsc::GradientConfig cfg;
        cfg.iterations = a.iters;
        cfg.step_size = a.step;
        cfg.seed = a.seed;
        cfg.loss_cadence = a.cadence;
        modes = etsc::gradient_convert(k.coeffs, a.h == 0 ? n : a.h, cfg).modes;
    } else {
        throw etsc::invalid_size_error("unknown method: " + a.method);
    }

    etsc::save_modes(a.out, modes);

    etsc::ComplexSeq recon = etsc::reconstruct(modes, n);
    double tnorm = 0.0;
    for (double v : k.coeffs) tnorm += v * v;
    if (tnorm == 0.0) {
        // Zero kernel: the relative metric has no denominator.
        std::cout << "abs_error=" << etsc::absolute_error(k.coeffs, recon) << "\n";
    } else {
        std::cout << "rel_error=" << etsc::relative_error(k.coeffs, recon) << "\n";
    }
    return 0;
}

struct VerifyArgs {
    std::string kernel;
    std::string modes;
    double tol = 1e-6;
};

int run_verify(const VerifyArgs& a) {
    etsc::ToeplitzKernel k = etsc::load_kernel(a.kernel);
    etsc::SsmModes m = etsc::load_modes(a.modes);
    const std::size_t n = k.length();

    json report;
    if (m.origin_length != n) {
        report["compatible"] = false;
        report["error"] = "origin_length " + std::to_string(m.origin_length) +
                          " does not match kernel n " + std::to_string(n);
        std::cout << report.dump(2) << "\n";
        return 1;
    }
    report["compatible"] = true;

    // Identity checks run on the gamma-rescaled kernel so decay conversions
    // verify too; gamma = 1 reduces them to the plain identities.
    const double g = m.gamma;
    std::vector<double> scaled(n);
    double f = 1.0;
    bool rescale_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = k.coeffs[i] == 0.0 ? 0.0 : k.coeffs[i] * f;
        if (!std::isfinite(scaled[i])) rescale_ok = false;
        f /= g;
    }

    etsc::ComplexSeq recon = etsc::reconstruct(m, n + 1);
    etsc::ComplexSeq head(recon.begin(), recon.begin() + static_cast<std::ptrdiff_t>(n));

    double tnorm = 0.0;
    for (double v : k.coeffs) tnorm += v * v;
    tnorm = std::sqrt(tnorm);

    bool all_pass = true;
    auto add_check = [&](const char* name, double value, double tol, bool pass) {
        report["checks"][name] = {{"value", value}, {"tol", tol}, {"pass", pass}};
        all_pass = all_pass && pass;
    };

    double err;
    if (tnorm == 0.0) {
        err = etsc::absolute_error(k.coeffs, head);
        report["zero_kernel"] = true;
    } else {
        err = etsc::relative_error(k.coeffs, head);
    }
    add_check("reconstruction_error", err, a.tol, err <= a.tol);

    if (rescale_ok) {
        std::vector<double> sbar = etsc::augment(scaled);
        double snorm = 0.0, ssum = 0.0, ssq = 0.0;
        for (std::size_t i = 0; i < n; ++i) snorm += scaled[i] * scaled[i];
        snorm = std::sqrt(snorm);
        for (double v : sbar) {
            ssum += v;
            ssq += v * v;
        }

        double gn = std::pow(g, static_cast<double>(n));
        double aug_expected = gn * sbar[n];
        double aug_scale = gn * snorm;
        double aug_dev = std::abs(recon[n] - etsc::Complex{aug_expected, 0.0});
        add_check("augmented_row", aug_dev, 1e-8 * std::max(aug_scale, 1e-300),
                  aug_dev <= 1e-8 * std::max(aug_scale, 1e-300) + 1e-300);

        double dc = std::abs(ssum) / std::sqrt(static_cast<double>(n + 1));
        add_check("dc_bin", dc, 1e-9 * std::max(snorm, 1e-300),
                  dc <= 1e-9 * std::max(snorm, 1e-300) + 1e-300);

        double wsum = 0.0;
        for (const auto& b : m.weights) wsum += std::norm(b);
        double parseval_dev = std::abs(ssq - static_cast<double>(n + 1) * wsum);
        add_check("parseval", parseval_dev, 1e-9 * std::max(ssq, 1e-300),
                  parseval_dev <= 1e-9 * std::max(ssq, 1e-300) + 1e-300);
    } else {
        report["checks"]["rescale"] = {{"pass", false},
                                       {"error", "gamma rescale overflows"}};
        all_pass = false;
    }

    report["pass"] = all_pass;
    std::cout << report.dump(2) << "\n";
    return all_pass ? 0 : 1;
}

struct ParityArgs {
    std::size_t layers = 2;
    std::size_t d = 4;
    std::size_t n = 256;
    std::size_t positions = 0;  // 0 = n
    std::uint64_t seed = 0;
    std::string extension = "zeros";
    double gamma = 0.9;
    std::string nonlinearity = "identity";
    std::string kernels = "random";
};

int run_parity(const ParityArgs& a) {
    etsc::Extension ext = a.extension == "decay" ? etsc::Extension::decay(a.gamma)
                                                 : etsc::Extension::zeros();
    etsc::Nonlinearity nl = a.nonlinearity == "gelu" ? etsc::Nonlinearity::gelu
                                                     : etsc::Nonlinearity::identity;
    etsc::StackedMixer model;
    if (a.kernels == "identity") {
        std::vector<double> delta(a.n, 0.0);
        delta[0] = 1.0;
        model.kernels.assign(a.layers, std::vector<etsc::ToeplitzKernel>(
                                           a.d, etsc::ToeplitzKernel(delta, ext)));
        if (a.layers > 1) model.boundaries.assign(a.layers - 1, nl);
    } else {
        model = etsc::random_mixer(a.layers, a.d, a.n, a.seed, ext, nl);
    }

    const std::size_t total = a.positions == 0 ? a.n : a.positions;
    etsc::Rng rng(a.seed ^ 0x5eedULL);
    std::vector<std::vector<double>> inputs(total, std::vector<double>(a.d));
    for (auto& row : inputs)
        for (auto& v : row) v = rng.normal();

    etsc::ParityReport rep = etsc::parity_report(model, inputs);

    std::cout << "positions=" << total << " kernel_n=" << a.n
              << " output_scale=" << rep.scale << "\n";
    for (const auto& p : rep.pairs) {
        std::cout << etsc::strategy_name(p.a) << "/" << etsc::strategy_name(p.b)
                  << " max_dev_in_range=" << p.max_in_range;
        if (rep.beyond_positions > 0) {
            std::cout << " max_dev_beyond=" << p.max_beyond;
            bool ssm_pair = p.a == etsc::Strategy::ssm || p.b == etsc::Strategy::ssm;
            if (ssm_pair && ext.kind == etsc::Extension::Kind::zeros)
                std::cout << " (expected: unit-modulus modes extrapolate periodically)";
        }
        std::cout << "\n";
    }
    double worst = rep.max_in_range();
    std::cout << "max_dev_in_range=" << worst << "\n";
    return worst < 1e-5 ? 0 : 1;
}

struct BenchArgs {
    std::string mode = "inference";
    std::vector<std::size_t> grid_n{64, 256, 1024};
    std::vector<std::size_t> grid_d{64};
    std::vector<std::size_t> grid_l{2};
    std::vector<std::string> strategies{"origin", "cache", "ssm"};
    std::vector<std::size_t> positions{512, 1024, 2048};
    std::uint64_t seed = 0;
    std::size_t repeats = 5;
    std::size_t warmups = 2;
    bool no_gradient = false;
    std::size_t gradient_iters = 200;
    double gradient_step = 1e-4;
    bool parallel_grid = false;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    // Benchmarks default to one thread for stable timings; an explicit
    // ETSC_THREADS still wins.
    setenv("ETSC_THREADS", "1", /*overwrite=*/0);

    etsc::SweepSpec spec;
    spec.n_grid = a.grid_n;
    spec.d_grid = a.grid_d;
    spec.layer_grid = a.grid_l;
    spec.strategies = a.strategies;
    spec.positions = a.positions;
    spec.seed = a.seed;
    spec.repeats = a.repeats;
    spec.warmups = a.warmups;
    spec.include_gradient = !a.no_gradient;
    spec.gradient_iterations = a.gradient_iters;
    spec.gradient_step = a.gradient_step;
    spec.parallel_grid = a.parallel_grid;

    std::vector<etsc::BenchRecord> records = a.mode == "conversion"
                                                 ? etsc::bench_conversion(spec)
                                                 : etsc::bench_inference(spec);

    std::ofstream os(a.out);
    if (!os) throw etsc::io_error("cannot open for writing", a.out);
    etsc::write_csv(os, records);
    if (!os) throw etsc::io_error("write failed", a.out);
    std::cout << "wrote " << records.size() << " records to " << a.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toeplitz kernel <-> diagonal state-space conversion toolkit"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print help");

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate synthetic kernels");
    cmd_gen->add_option("--n", gen.n, "kernel length")->required();
    cmd_gen->add_option("--d", gen.d, "number of kernels (channel files)");
    cmd_gen->add_option("--seed", gen.seed, "rng seed");
    cmd_gen->add_option("--family", gen.family, "random | decay-sinusoid")
        ->check(CLI::IsMember({"random", "decay-sinusoid"}));
    cmd_gen->add_option("--extension", gen.extension, "zeros | decay")
        ->check(CLI::IsMember({"zeros", "decay"}));
    cmd_gen->add_option("--gamma", gen.gamma, "decay factor (family envelope / extension)");
    cmd_gen->add_option("--out", gen.out, "output path (.json or binary)")->required();

    ConvertArgs conv;
    auto* cmd_convert = app.add_subcommand("convert", "kernel -> state-space modes");
    cmd_convert->set_help_flag("--help", "print help");
    cmd_convert->add_option("--in", conv.in, "kernel file")->required();
    cmd_convert->add_option("--out", conv.out, "modes file")->required();
    cmd_convert->add_option("--method", conv.method, "etsc | gradient | etsc-decay")
        ->check(CLI::IsMember({"etsc", "gradient", "etsc-decay"}));
    cmd_convert->add_option("--h", conv.h,
                            "hidden size: gradient parameter count, or truncation "
                            "budget for etsc (default: kernel n)");
    cmd_convert->add_option("--pad-to", conv.pad_to,
                            "zero-pad the kernel to this length before converting");
    auto* gopt = cmd_convert->add_option("--gamma", conv.gamma, "decay factor for etsc-decay");
    cmd_convert->add_option("--iters", conv.iters, "gradient iterations");
    cmd_convert->add_option("--step", conv.step, "gradient step size");
    cmd_convert->add_option("--seed", conv.seed, "gradient init seed");
    cmd_convert->add_option("--cadence", conv.cadence, "gradient loss record cadence");

    VerifyArgs ver;
    auto* cmd_verify = app.add_subcommand("verify", "check a kernel/modes pair");
    cmd_verify->add_option("--kernel", ver.kernel, "kernel file")->required();
    cmd_verify->add_option("--modes", ver.modes, "modes file")->required();
    cmd_verify->add_option("--tol", ver.tol, "reconstruction tolerance");

    ParityArgs par;
    auto* cmd_parity = app.add_subcommand("parity", "compare the three inference strategies");
    cmd_parity->add_option("--L", par.layers, "layers");
    cmd_parity->add_option("--d", par.d, "channels");
    cmd_parity->add_option("--n", par.n, "kernel length");
    cmd_parity->add_option("--positions", par.positions, "positions to stream (default n)");
    cmd_parity->add_option("--seed", par.seed, "rng seed");
    cmd_parity->add_option("--extension", par.extension, "zeros | decay")
        ->check(CLI::IsMember({"zeros", "decay"}));
    cmd_parity->add_option("--gamma", par.gamma, "decay factor");
    cmd_parity->add_option("--nonlinearity", par.nonlinearity, "identity | gelu")
        ->check(CLI::IsMember({"identity", "gelu"}));
    cmd_parity->add_option("--kernels", par.kernels, "random | identity")
        ->check(CLI::IsMember({"random", "identity"}));

    BenchArgs ben;
    auto* cmd_bench = app.add_subcommand("bench", "timing/memory sweeps, CSV output");
    cmd_bench->add_option("--mode", ben.mode, "conversion | inference")
        ->check(CLI::IsMember({"conversion", "inference"}));
    cmd_bench->add_option("--grid-n", ben.grid_n, "sequence lengths")->delimiter(',');
    cmd_bench->add_option("--grid-d", ben.grid_d, "feature dimensions")->delimiter(',');
    cmd_bench->add_option("--grid-l", ben.grid_l, "layer counts")->delimiter(',');
    cmd_bench->add_option("--strategies", ben.strategies, "inference strategies")
        ->delimiter(',');
    cmd_bench->add_option("--positions", ben.positions, "inference checkpoints")
        ->delimiter(',');
    cmd_bench->add_option("--seed", ben.seed, "rng seed");
    cmd_bench->add_option("--repeats", ben.repeats, "timing repeats (median)");
    cmd_bench->add_option("--warmups", ben.warmups, "warmup pushes per checkpoint");
    cmd_bench->add_flag("--no-gradient", ben.no_gradient, "skip the gradient baseline");
    cmd_bench->add_option("--gradient-iters", ben.gradient_iters, "gradient budget");
    cmd_bench->add_option("--gradient-step", ben.gradient_step, "gradient step size");
    cmd_bench->add_flag("--parallel-grid", ben.parallel_grid,
                        "parallelize across grid points (timings less stable)");
    cmd_bench->add_option("--out", ben.out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_convert->parsed()) {
            conv.gamma_given = gopt->count() > 0;
            return run_convert(conv);
        }
        if (cmd_verify->parsed()) return run_verify(ver);
        if (cmd_parity->parsed()) return run_parity(par);
        if (cmd_bench->parsed()) return run_bench(ben);
    } catch (const etsc::io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const etsc::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const etsc::divergence_error& e) {
        std::cerr << "error: " << e.what() << " (iteration " << e.iteration << ")\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
