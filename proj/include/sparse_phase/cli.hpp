///
/// \file cli.hpp
///
/// Command-line front end: `synth`, `recover`, `eval` and `compare`.
///
/// Exit codes: 0 success, 1 comparison failed, 2 invalid input or
/// arguments, 3 I/O failure, 4 pipeline failure. Every failure writes
/// exactly one line to the error stream.
///
#ifndef SPARSE_PHASE_CLI_HPP
#define SPARSE_PHASE_CLI_HPP

#include <algorithm>
#include <cstddef>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include <sparse_phase/error.hpp>
#include <sparse_phase/io.hpp>
#include <sparse_phase/model.hpp>
#include <sparse_phase/retrieval.hpp>
#include <sparse_phase/splines.hpp>
#include <sparse_phase/synthesis.hpp>

namespace sparse_phase
{
namespace cli
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_mismatch = 1,
    exit_invalid = 2,
    exit_io = 3,
    exit_pipeline = 4,
};

namespace detail
{

/// Raised for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// A pipeline error that maps to exit code 4.
struct PipelineError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

inline void emit(std::ostream& out, const std::string& path,
                 const std::string& text)
{
    if (path == "-")
    {
        out << text;
    }
    else
    {
        io::write_text(path, text);
    }
}

inline std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

struct SynthArgs
{
    std::string signal;
    double step = 0.0;
    std::size_t count = 0;
    std::string out;
};

struct RecoverArgs
{
    std::string measurements;
    RecoveryConfig config;
    std::string out;
};

struct EvalArgs
{
    std::string signal;
    std::string report;
    double from = 0.0;
    double to = 0.0;
    std::size_t points = 0;
    std::string out;
};

struct CompareArgs
{
    std::string ref;
    std::string rec;
    double tol = 0.0;
};

inline int run_synth(const SynthArgs& a, std::ostream& out)
{
    const auto signal = io::read_signal(a.signal);
    const auto samples =
        synthesis::sample_intensities(signal, a.step, a.count);
    emit(out, a.out, io::measurements_to_csv(samples));
    return exit_ok;
}

inline int run_recover(const RecoverArgs& a, std::ostream& out)
{
    const auto samples = io::read_measurements(a.measurements);
    validate(a.config);
    const auto half = (samples.size() - 1) / 2;
    const auto bound = static_cast<std::size_t>(a.config.upper_bound);
    if (!(bound * (bound - 1) < half))
    {
        throw UsageError("precondition L(L-1) < (count-1)/2 violated: L = " +
                         std::to_string(bound) + ", " +
                         std::to_string(samples.size()) + " samples");
    }
    RecoveryReport report;
    try
    {
        report = retrieval::recover_signal(samples, a.config);
    }
    catch (const Error& e)
    {
        throw PipelineError(e.what());
    }
    emit(out, a.out, io::report_to_json(report, a.config).dump(2) + "\n");
    return exit_ok;
}

inline int run_eval(const EvalArgs& a, std::ostream& out)
{
    if (a.signal.empty() == a.report.empty())
    {
        throw UsageError("exactly one of --signal and --report is required");
    }
    if (!(a.from < a.to))
    {
        throw UsageError("--from must be less than --to");
    }
    if (a.points < 2)
    {
        throw UsageError("--points must be at least 2");
    }
    const auto signal = io::read_signal(a.signal.empty() ? a.report : a.signal);
    const auto grid = [&](std::size_t i) {
        if (i + 1 == a.points)
        {
            return a.to;
        }
        return a.from + (a.to - a.from) * static_cast<double>(i) /
                            static_cast<double>(a.points - 1);
    };

    std::string text;
    if (const auto* s = std::get_if<SpikeSignal>(&signal))
    {
        struct Row
        {
            double t;
            Complex v;
            int knot;
        };
        std::vector<Row> rows;
        for (std::size_t i = 0; i < a.points; ++i)
        {
            rows.push_back({grid(i), Complex(0.0, 0.0), 0});
        }
        for (std::size_t j = 0; j < s->knots.size(); ++j)
        {
            rows.push_back({s->knots[j], s->coefficients[j], 1});
        }
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& x, const Row& y) { return x.t < y.t; });
        text = "t,re,im,is_knot\n";
        for (const auto& r : rows)
        {
            text += io::format_real(r.t) + "," + io::format_real(r.v.real()) +
                    "," + io::format_real(r.v.imag()) + "," +
                    std::to_string(r.knot) + "\n";
        }
    }
    else
    {
        const auto& sp = std::get<SplineSignal>(signal);
        text = "t,re,im\n";
        for (std::size_t i = 0; i < a.points; ++i)
        {
            const double t = grid(i);
            const Complex v = splines::spline_value(sp, t);
            text += io::format_real(t) + "," + io::format_real(v.real()) +
                    "," + io::format_real(v.imag()) + "\n";
        }
    }
    emit(out, a.out, text);
    return exit_ok;
}

inline int run_compare(const CompareArgs& a, std::ostream& out)
{
    const auto ref = io::read_signal(a.ref);
    const auto rec = io::read_signal(a.rec);
    if (ref.index() != rec.index())
    {
        throw UsageError("model types differ between --ref and --rec");
    }
    if (synthesis::order_of(ref) != synthesis::order_of(rec))
    {
        throw UsageError("spline orders differ between --ref and --rec");
    }
    const auto eq = retrieval::equivalent_mod_trivial(ref, rec, a.tol);
    out << "max_knot_deviation " << io::format_real(eq.knot_deviation) << "\n"
        << "max_coefficient_deviation "
        << io::format_real(eq.coefficient_deviation) << "\n"
        << "equivalent " << (eq.equivalent ? "true" : "false") << "\n";
    return eq.equivalent ? exit_ok : exit_mismatch;
}

} // namespace detail

///
/// Runs the tool on `argv`, writing results to `out` (or to `--out` files)
/// and diagnostics to `err`. Returns the process exit code.
///
inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err)
{
    CLI::App app{"Sparse phase retrieval from Fourier magnitudes",
                 "sparse_phase"};
    app.require_subcommand(1);

    detail::SynthArgs synth;
    auto* cmd_synth =
        app.add_subcommand("synth", "Sample |F[f](hk)| of a signal to CSV");
    cmd_synth->add_option("--signal", synth.signal, "Signal JSON")->required();
    cmd_synth->add_option("--step", synth.step, "Step h > 0")->required();
    cmd_synth->add_option("--count", synth.count, "Number of samples")
        ->required();
    cmd_synth->add_option("--out", synth.out, "Output CSV ('-' for stdout)")
        ->required();

    detail::RecoverArgs recover;
    auto* cmd_recover = app.add_subcommand(
        "recover", "Recover spikes or a spline from measured magnitudes");
    cmd_recover->add_option("--measurements", recover.measurements,
                            "Measurement CSV")
        ->required();
    cmd_recover->add_option("--order", recover.config.order,
                            "Spline order m (0 for spikes)");
    cmd_recover->add_option("--bound", recover.config.upper_bound,
                            "Upper bound L on the number of knots N + m")
        ->required();
    cmd_recover->add_option("--eps", recover.config.eps,
                            "Knot matching accuracy");
    cmd_recover->add_option("--eps1", recover.config.eps1,
                            "APM root modulus accuracy");
    cmd_recover->add_option("--eps2", recover.config.eps2,
                            "APM root pairing accuracy");
    cmd_recover->add_option("--eps3", recover.config.eps3,
                            "APM coefficient threshold");
    cmd_recover->add_option("--out", recover.out,
                            "Output report JSON ('-' for stdout)")
        ->required();

    detail::EvalArgs eval;
    auto* cmd_eval = app.add_subcommand(
        "eval", "Evaluate a signal or report on an equispaced grid");
    cmd_eval->add_option("--signal", eval.signal, "Signal JSON");
    cmd_eval->add_option("--report", eval.report, "Report JSON");
    cmd_eval->add_option("--from", eval.from, "Grid start")->required();
    cmd_eval->add_option("--to", eval.to, "Grid end")->required();
    cmd_eval->add_option("--points", eval.points, "Grid size >= 2")
        ->required();
    cmd_eval->add_option("--out", eval.out, "Output CSV ('-' for stdout)")
        ->required();

    detail::CompareArgs compare;
    auto* cmd_compare = app.add_subcommand(
        "compare", "Compare two signals modulo trivial ambiguities");
    cmd_compare->add_option("--ref", compare.ref, "Reference signal or report")
        ->required();
    cmd_compare->add_option("--rec", compare.rec, "Recovered signal or report")
        ->required();
    cmd_compare->add_option("--tol", compare.tol, "Tolerance")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return exit_invalid;
    }

    try
    {
        if (cmd_synth->parsed())
        {
            return detail::run_synth(synth, out);
        }
        if (cmd_recover->parsed())
        {
            return detail::run_recover(recover, out);
        }
        if (cmd_eval->parsed())
        {
            return detail::run_eval(eval, out);
        }
        return detail::run_compare(compare, out);
    }
    catch (const io::IoError& e)
    {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return exit_io;
    }
    catch (const detail::PipelineError& e)
    {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return exit_pipeline;
    }
    catch (const detail::UsageError& e)
    {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return exit_invalid;
    }
    catch (const Error& e)
    {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return exit_invalid;
    }
    catch (const std::exception& e)
    {
        err << "error: " << detail::one_line(e.what()) << "\n";
        return exit_pipeline;
    }
}

} // namespace cli
} // namespace sparse_phase

#endif /* SPARSE_PHASE_CLI_HPP */
