#pragma once

// File formats: CSV with a unit-carrying header row, self-describing JSON,
// and a binary trace format with a text header. Doubles are written with
// 17 significant digits so files round-trip exactly.

#include <cstdio>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ddspec/coherence.hpp"
#include "ddspec/errors.hpp"
#include "ddspec/filter_function.hpp"
#include "ddspec/noise.hpp"
#include "ddspec/spectrum.hpp"
#include "ddspec/spectroscopy.hpp"
#include "ddspec/waveform.hpp"

namespace ddspec {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline std::vector<std::vector<double>> read_csv_columns(std::istream& in, const std::vector<std::string>& expected,
                                                         std::size_t required) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] != '#') break;
    }
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            header.push_back(cell);
        }
    }
    for (std::size_t i = 0; i < required; ++i)
        if (i >= header.size() || header[i] != expected[i])
            throw InvalidArgument("CSV line " + std::to_string(line_no) + ": expected column '" + expected[i] + "'");
    const std::size_t ncol = std::min(header.size(), expected.size());
    std::vector<std::vector<double>> cols(ncol);
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(ss, cell, ',') && c < ncol) {
            try {
                std::size_t used = 0;
                cols[c].push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                throw InvalidArgument("CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            ++c;
        }
        if (c < required) throw InvalidArgument("CSV line " + std::to_string(line_no) + ": too few columns");
        for (; c < ncol; ++c) cols[c].push_back(0.0);
    }
    return cols;
}

}  // namespace detail

// Filter functions -----------------------------------------------------------

inline void write_filter_csv(std::ostream& out, const FilterFunction& F) {
    out << "f_hz,F_s2\n";
    for (std::size_t i = 0; i < F.grid().size(); ++i)
        out << format_double(F.grid()[i]) << ',' << format_double(F.values()[i]) << '\n';
}

inline nlohmann::ordered_json filter_to_json(const FilterFunction& F) {
    nlohmann::ordered_json j;
    j["observation_time_s"] = F.observation_time();
    j["waveform"] = F.summary();
    j["grid_spacing"] = to_string(F.grid().spacing());
    j["integral_0_inf_s"] = F.integral();
    j["f_hz"] = F.grid().values();
    j["F_s2"] = F.values();
    return j;
}

// Spectra ------------------------------------------------------------------------

inline void write_spectrum_csv(std::ostream& out, const BathSpectrum& G, const FrequencyGrid* grid = nullptr) {
    out << "f_hz,G_per_s,sigma_per_s\n";
    if (!G.is_lorentzian()) {
        const auto& t = G.tabulated();
        for (std::size_t i = 0; i < t.grid.size(); ++i)
            out << format_double(t.grid[i]) << ',' << format_double(t.values[i]) << ','
                << format_double(t.sigma.empty() ? 0.0 : t.sigma[i]) << '\n';
        return;
    }
    detail::require(grid != nullptr, "a grid is needed to tabulate an analytic spectrum");
    for (double f : grid->values()) out << format_double(f) << ',' << format_double(G(f)) << ",0\n";
}

inline BathSpectrum read_spectrum_csv(std::istream& in) {
    auto cols = detail::read_csv_columns(in, {"f_hz", "G_per_s", "sigma_per_s"}, 2);
    detail::require(!cols[0].empty(), "spectrum file has no data rows");
    Tabulated t;
    t.grid = FrequencyGrid(cols[0]);
    t.values = cols[1];
    if (cols.size() > 2) t.sigma = cols[2];
    return BathSpectrum(std::move(t), SpectrumOrigin::Measured);
}

inline BathSpectrum read_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open spectrum file " + path);
    return read_spectrum_csv(in);
}

// Coherence and scans --------------------------------------------------------------

inline void write_coherence_csv(std::ostream& out, const CoherenceCurve& c) {
    out << "t_s,C,stderr\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        out << format_double(c.times[i]) << ',' << format_double(c.values[i]) << ','
            << format_double(c.std_errors.empty() ? 0.0 : c.std_errors[i]) << '\n';
}

inline void write_scans_csv(std::ostream& out, const std::vector<ScanRecord>& scans) {
    out << "f0_hz,t_s,z\n";
    for (const auto& s : scans)
        for (double z : s.z) out << format_double(s.f0) << ',' << format_double(s.t) << ',' << format_double(z) << '\n';
}

/// Groups (f0_hz, t_s, z) rows into scan points in file order.
inline std::vector<ScanPoint> read_scans_csv(std::istream& in) {
    auto cols = detail::read_csv_columns(in, {"f0_hz", "t_s", "z"}, 3);
    std::vector<ScanPoint> out;
    for (std::size_t i = 0; i < cols[0].size(); ++i) {
        if (out.empty() || out.back().f0 != cols[0][i] || out.back().t != cols[1][i])
            out.push_back({cols[0][i], cols[1][i], {}});
        out.back().z.push_back(cols[2][i]);
    }
    return out;
}

// Sequence specs ---------------------------------------------------------------------

inline SequenceKind parse_sequence_kind(const std::string& s) {
    if (s == "Hahn" || s == "hahn") return SequenceKind::Hahn;
    if (s == "CPMG" || s == "cpmg") return SequenceKind::CPMG;
    if (s == "UDD" || s == "udd") return SequenceKind::UDD;
    if (s == "CDD" || s == "cdd") return SequenceKind::CDD;
    throw InvalidArgument("unknown sequence kind '" + s + "'");
}

inline PhasePattern parse_phase_pattern(const std::string& s) {
    if (s == "Uniform" || s == "uniform") return PhasePattern::Uniform;
    if (s == "AlternatePairs" || s == "alternate_pairs") return PhasePattern::AlternatePairs;
    throw InvalidArgument("unknown phase pattern '" + s + "'");
}

inline nlohmann::ordered_json to_json(const SequenceSpec& s) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(s.kind);
    if (s.kind == SequenceKind::CDD)
        j["cdd_order"] = s.cdd_order;
    else
        j["n_pulses"] = s.n_pulses;
    j["total_time_s"] = s.total_time;
    j["phase_pattern"] = to_string(s.phase_pattern);
    return j;
}

inline SequenceSpec sequence_from_json(const nlohmann::json& j) {
    SequenceSpec s;
    if (!j.is_object()) throw InvalidArgument("sequence: expected an object");
    if (!j.contains("kind")) throw InvalidArgument("sequence.kind: missing");
    s.kind = parse_sequence_kind(j.at("kind").get<std::string>());
    if (s.kind == SequenceKind::CDD) {
        if (!j.contains("cdd_order")) throw InvalidArgument("sequence.cdd_order: missing");
        s.cdd_order = j.at("cdd_order").get<std::size_t>();
        if (s.cdd_order < 1) throw InvalidArgument("sequence.cdd_order: must be >= 1");
    } else if (s.kind == SequenceKind::Hahn) {
        s.n_pulses = 1;
    } else {
        if (!j.contains("n_pulses")) throw InvalidArgument("sequence.n_pulses: missing");
        const auto n = j.at("n_pulses").get<long long>();
        if (n < 1) throw InvalidArgument("sequence.n_pulses: must be >= 1");
        s.n_pulses = static_cast<std::size_t>(n);
    }
    if (!j.contains("total_time_s")) throw InvalidArgument("sequence.total_time_s: missing");
    s.total_time = j.at("total_time_s").get<double>();
    if (!(s.total_time > 0.0)) throw InvalidArgument("sequence.total_time_s: must be positive");
    s.phase_pattern = parse_phase_pattern(j.value("phase_pattern", std::string("Uniform")));
    return s;
}

// Traces -------------------------------------------------------------------------------

/// Text header terminated by "end_header\n", then little-endian float64
/// samples, atom-major.
inline void write_traces(std::ostream& out, const DetuningEnsemble& e) {
    out << "ddspec-traces 1\n"
        << "units rad/s\n"
        << "dt_s " << format_double(e.dt()) << '\n'
        << "n_steps " << e.n_steps() << '\n'
        << "n_atoms " << e.n_traces() << '\n'
        << "seed " << e.seed() << '\n'
        << "removed_offset_rad_s " << format_double(e.removed_offset()) << '\n'
        << "end_header\n";
    out.write(reinterpret_cast<const char*>(e.data().data()),
              static_cast<std::streamsize>(e.data().size() * sizeof(double)));
}

inline DetuningEnsemble read_traces(std::istream& in) {
    std::string line, key;
    double dt = 0.0, offset = 0.0;
    std::size_t steps = 0, atoms = 0;
    std::uint64_t seed = 0;
    std::getline(in, line);
    if (line != "ddspec-traces 1") throw InvalidArgument("not a trace file");
    while (std::getline(in, line) && line != "end_header") {
        std::stringstream ss(line);
        ss >> key;
        if (key == "dt_s") ss >> dt;
        else if (key == "n_steps") ss >> steps;
        else if (key == "n_atoms") ss >> atoms;
        else if (key == "seed") ss >> seed;
        else if (key == "removed_offset_rad_s") ss >> offset;
    }
    std::vector<double> data(steps * atoms);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
    if (!in) throw InvalidArgument("trace file truncated");
    return DetuningEnsemble(dt, steps, atoms, std::move(data), seed, {}, offset);
}

}  // namespace ddspec
