///
/// \file io.hpp
///
/// File formats of the command-line tool: signal descriptions and recovery
/// reports as JSON, measurements as CSV with header `k,omega,magnitude`.
///
#ifndef SPARSE_PHASE_IO_HPP
#define SPARSE_PHASE_IO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>

namespace sparse_phase
{
namespace io
{

using Json = nlohmann::json;

/// A file could not be opened, read or written.
class IoError : public std::runtime_error
{
public:
    explicit IoError(const std::string& what) : std::runtime_error(what)
    {
    }
};

/// `%.17g`, which round-trips every double.
inline std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
    {
        throw IoError("cannot read '" + path + "'");
    }
    return ss.str();
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    out.flush();
    if (!out)
    {
        throw IoError("cannot write '" + path + "'");
    }
}

namespace detail
{

[[noreturn]] inline void bad_field(const std::string& field,
                                   const std::string& why)
{
    throw Error(ErrorKind::InvalidSignal, "field '" + field + "': " + why);
}

inline const Json& require(const Json& doc, const std::string& field)
{
    if (!doc.is_object() || !doc.contains(field))
    {
        bad_field(field, "missing");
    }
    return doc.at(field);
}

inline double to_real(const Json& v, const std::string& field)
{
    if (!v.is_number())
    {
        bad_field(field, "expected a number");
    }
    const double d = v.get<double>();
    if (!std::isfinite(d))
    {
        bad_field(field, "not finite");
    }
    return d;
}

inline std::vector<double> real_list(const Json& doc, const std::string& field)
{
    const auto& arr = require(doc, field);
    if (!arr.is_array())
    {
        bad_field(field, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        out.push_back(to_real(arr[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline std::vector<Complex> complex_list(const Json& doc,
                                         const std::string& field)
{
    const auto& arr = require(doc, field);
    if (!arr.is_array())
    {
        bad_field(field, "expected an array of [re, im] pairs");
    }
    std::vector<Complex> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
        const std::string name = field + "[" + std::to_string(i) + "]";
        const auto& pair = arr[i];
        if (pair.is_number())
        {
            out.emplace_back(to_real(pair, name), 0.0);
            continue;
        }
        if (!pair.is_array() || pair.size() != 2)
        {
            bad_field(name, "expected [re, im]");
        }
        out.emplace_back(to_real(pair[0], name), to_real(pair[1], name));
    }
    return out;
}

inline Json complex_json(const std::vector<Complex>& values)
{
    Json arr = Json::array();
    for (const auto& c : values)
    {
        arr.push_back(Json::array({c.real(), c.imag()}));
    }
    return arr;
}

inline int order_field(const Json& doc)
{
    if (!doc.contains("order") || doc.at("order").is_null())
    {
        return 0;
    }
    const auto& v = doc.at("order");
    if (!v.is_number_integer())
    {
        bad_field("order", "expected an integer");
    }
    return v.get<int>();
}

inline Json parse_json(const std::string& text, const std::string& origin)
{
    try
    {
        return Json::parse(text);
    }
    catch (const Json::parse_error& e)
    {
        throw Error(ErrorKind::InvalidSignal,
                    "'" + origin + "' is not valid JSON: " + e.what());
    }
}

} // namespace detail

///
/// Signal from `{"type": "spikes"|"spline", "order": m, "knots": [...],
/// "coefficients": [[re, im], ...]}`. A recovery report (recognised by its
/// `c0` field) is read as the signal it describes.
///
inline Signal signal_from_json(const Json& doc)
{
    if (!doc.is_object())
    {
        throw Error(ErrorKind::InvalidSignal, "document is not an object");
    }
    Signal signal;
    if (doc.contains("c0"))
    {
        const int order = detail::order_field(doc);
        auto knots = detail::real_list(doc, "knots");
        if (order == 0)
        {
            signal = SpikeSignal{std::move(knots), detail::complex_list(doc, "c0")};
        }
        else
        {
            signal = SplineSignal{order, std::move(knots),
                                  detail::complex_list(doc, "cm")};
        }
    }
    else
    {
        const auto& type = detail::require(doc, "type");
        if (!type.is_string())
        {
            detail::bad_field("type", "expected \"spikes\" or \"spline\"");
        }
        const auto name = type.get<std::string>();
        const int order = detail::order_field(doc);
        auto knots = detail::real_list(doc, "knots");
        auto coeffs = detail::complex_list(doc, "coefficients");
        if (name == "spikes")
        {
            if (order != 0)
            {
                detail::bad_field("order", "must be absent or 0 for spikes");
            }
            signal = SpikeSignal{std::move(knots), std::move(coeffs)};
        }
        else if (name == "spline")
        {
            if (order < 1)
            {
                detail::bad_field("order", "must be >= 1 for a spline");
            }
            signal = SplineSignal{order, std::move(knots), std::move(coeffs)};
        }
        else
        {
            detail::bad_field("type", "unknown type '" + name + "'");
        }
    }
    validate(signal);
    return signal;
}

inline Json signal_to_json(const Signal& signal)
{
    Json doc;
    if (const auto* s = std::get_if<SpikeSignal>(&signal))
    {
        doc["type"] = "spikes";
        doc["order"] = 0;
        doc["knots"] = s->knots;
        doc["coefficients"] = detail::complex_json(s->coefficients);
    }
    else
    {
        const auto& sp = std::get<SplineSignal>(signal);
        doc["type"] = "spline";
        doc["order"] = sp.order;
        doc["knots"] = sp.knots;
        doc["coefficients"] = detail::complex_json(sp.coefficients);
    }
    return doc;
}

inline Signal read_signal(const std::string& path)
{
    return signal_from_json(detail::parse_json(read_text(path), path));
}

inline void write_signal(const std::string& path, const Signal& signal)
{
    write_text(path, signal_to_json(signal).dump(2) + "\n");
}

inline std::string measurements_to_csv(const IntensitySamples& samples)
{
    std::string out = "k,omega,magnitude\n";
    for (std::size_t k = 0; k < samples.size(); ++k)
    {
        out += std::to_string(k);
        out += ',';
        out += format_real(samples.frequency(k));
        out += ',';
        out += format_real(samples.values[k]);
        out += '\n';
    }
    return out;
}

///
/// Parses a measurement CSV. The step is `omega[1] - omega[0]`, and every
/// row must satisfy `omega = step * k` to 1e-12 relative.
///
inline IntensitySamples measurements_from_csv(const std::string& text,
                                              const std::string& origin)
{
    std::istringstream in(text);
    std::string line;
    const auto fail = [&](std::size_t row, const std::string& why) {
        throw Error(ErrorKind::InvalidArgument,
                    "'" + origin + "' line " + std::to_string(row) + ": " +
                        why);
    };
    if (!std::getline(in, line))
    {
        fail(1, "empty file");
    }
    if (!line.empty() && line.back() == '\r')
    {
        line.pop_back();
    }
    if (line != "k,omega,magnitude")
    {
        fail(1, "header must be 'k,omega,magnitude'");
    }
    std::vector<double> omegas;
    IntensitySamples samples;
    samples.kind = SampleKind::Magnitude;
    std::size_t row = 1;
    while (std::getline(in, line))
    {
        ++row;
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (line.empty())
        {
            continue;
        }
        std::istringstream fields(line);
        std::string sk, sw, sm;
        if (!std::getline(fields, sk, ',') || !std::getline(fields, sw, ',') ||
            !std::getline(fields, sm) || sm.find(',') != std::string::npos)
        {
            fail(row, "expected three comma-separated fields");
        }
        std::size_t used = 0;
        long long k = -1;
        double w = 0.0;
        double m = 0.0;
        try
        {
            k = std::stoll(sk, &used);
            if (used != sk.size())
            {
                fail(row, "bad k");
            }
            w = std::stod(sw, &used);
            if (used != sw.size())
            {
                fail(row, "bad omega");
            }
            m = std::stod(sm, &used);
            if (used != sm.size())
            {
                fail(row, "bad magnitude");
            }
        }
        catch (const std::logic_error&)
        {
            fail(row, "unparsable number");
        }
        if (k != static_cast<long long>(samples.values.size()))
        {
            fail(row, "k must count up from 0");
        }
        if (!std::isfinite(w) || !std::isfinite(m) || m < 0.0)
        {
            fail(row, "omega and magnitude must be finite, magnitude >= 0");
        }
        omegas.push_back(w);
        samples.values.push_back(m);
    }
    if (samples.values.size() < 2)
    {
        fail(row, "need at least two rows to determine the step");
    }
    const double step = omegas[1] - omegas[0];
    if (omegas[0] != 0.0 || !(step > 0.0))
    {
        fail(2, "omega must start at 0 and increase");
    }
    for (std::size_t k = 0; k < omegas.size(); ++k)
    {
        const double expected = step * static_cast<double>(k);
        if (std::abs(omegas[k] - expected) >
            1e-12 * std::max(std::abs(expected), step))
        {
            fail(k + 2, "omega is not step * k");
        }
    }
    samples.step = step;
    return samples;
}

inline IntensitySamples read_measurements(const std::string& path)
{
    return measurements_from_csv(read_text(path), path);
}

inline void write_measurements(const std::string& path,
                               const IntensitySamples& samples)
{
    write_text(path, measurements_to_csv(samples));
}

inline Json report_to_json(const RecoveryReport& report,
                           const RecoveryConfig& config)
{
    Json doc;
    doc["type"] = report.order == 0 ? "spikes" : "spline";
    doc["order"] = report.order;
    doc["knots"] = report.knots;
    doc["c0"] = detail::complex_json(report.c0);
    doc["cm"] = detail::complex_json(report.cm);
    doc["positive_terms"] = report.positive_terms;
    doc["residuals"] = {{"apm", report.residuals.apm},
                        {"gamma0", report.residuals.gamma0},
                        {"gamma0_gap", report.residuals.gamma0_gap},
                        {"lifting", report.residuals.lifting},
                        {"intensity", report.residuals.intensity}};
    doc["config"] = {{"order", config.order},
                     {"bound", config.upper_bound},
                     {"eps", config.eps},
                     {"eps1", config.eps1},
                     {"eps2", config.eps2},
                     {"eps3", config.eps3},
                     {"lifting_tolerance", config.lifting_tolerance},
                     {"tie_margin", config.tie_margin}};
    doc["warnings"] = report.warnings;
    return doc;
}

} // namespace io
} // namespace sparse_phase

#endif /* SPARSE_PHASE_IO_HPP */
