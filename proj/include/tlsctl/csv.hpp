#pragma once

#include <tlsctl/bath.hpp>
#include <tlsctl/bloch.hpp>
#include <tlsctl/errors.hpp>
#include <tlsctl/propagator.hpp>
#include <tlsctl/pulse.hpp>
#include <tlsctl/rates.hpp>
#include <tlsctl/robustness.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

// CSV conventions: comma separated, '.' decimal, exponent notation with 17
// significant digits, one header row naming columns and units.

namespace tlsctl::csv {

inline std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

class Writer {
public:
    Writer(const std::filesystem::path& path, std::initializer_list<const char*> header)
        : out_(path), path_(path) {
        if (!out_) throw OutputError("cannot open '" + path.string() + "' for writing");
        bool first = true;
        for (const char* h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            out_ << (first ? "" : ",") << number(v);
            first = false;
        }
        out_ << '\n';
    }

    void close() {
        out_.close();
        if (!out_) throw OutputError("failed writing '" + path_.string() + "'");
    }

private:
    std::ofstream out_;
    std::filesystem::path path_;
};

inline void write_trajectory(const std::filesystem::path& path, const TimeGrid& grid,
                             const BlochTrajectory& traj) {
    Writer w(path, {"t [1/cm^-1]", "p_x [1]", "p_y [1]", "p_z [1]", "purity [1]"});
    for (std::size_t k = 0; k < traj.p.size(); ++k)
        w.row({grid.t(k), traj.p[k].x(), traj.p[k].y(), traj.p[k].z(), traj.purity[k]});
    w.close();
}

inline void write_rates(const std::filesystem::path& path, const TimeGrid& grid,
                        const RateTable& rates) {
    Writer w(path, {"t [1/cm^-1]", "gamma_yx [cm^-1]", "gamma_yy [cm^-1]", "gamma_zx [cm^-1]",
                    "A_y [cm^-1]", "A_z [cm^-1]"});
    for (std::size_t k = 0; k < rates.rows.size(); ++k) {
        const RateRow& r = rates.rows[k];
        w.row({grid.t(k), r.gamma_yx, r.gamma_yy, r.gamma_zx, r.a_y, r.a_z});
    }
    w.close();
}

inline void write_pulse(const std::filesystem::path& path, const ControlPulse& pulse) {
    Writer w(path, {"t [1/cm^-1]", "eps [cm^-1]"});
    for (std::size_t i = 0; i < pulse.size(); ++i) w.row({pulse.grid().t(i + 1), pulse.values()[i]});
    w.close();
}

inline void write_bath(const std::filesystem::path& path, const BathCorrelationTable& bath) {
    Writer w(path, {"t [1/cm^-1]", "M_real [cm^-2]", "M_imag [cm^-2]"});
    for (std::size_t k = 0; k < bath.size(); ++k) w.row({bath.times[k], bath.m_real[k], bath.m_imag[k]});
    w.close();
}

inline void write_propagator(const std::filesystem::path& path, const PropagatorGrid& prop) {
    Writer w(path, {"t [1/cm^-1]", "re_u11 [1]", "im_u11 [1]", "re_u12 [1]", "im_u12 [1]"});
    for (std::size_t k = 0; k < prop.u11.size(); ++k)
        w.row({prop.grid.t(k), prop.u11[k].real(), prop.u11[k].imag(), prop.u12[k].real(),
               prop.u12[k].imag()});
    w.close();
}

inline void write_robustness(const std::filesystem::path& path, const RobustnessReport& rep) {
    Writer w(path, {"beta [1/cm^-1]", "purity [1]"});
    for (const auto& r : rep.records) w.row({r.beta, r.purity});
    w.close();
}

/// Reads a (t, eps) pulse file; the time column is informational, the row
/// count must equal the number of grid steps.
inline ControlPulse read_pulse(const std::filesystem::path& path, const TimeGrid& grid) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open pulse file '" + path.string() + "'");
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line_no == 1 && line.find_first_of("tTe") == 0) continue;  // header
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 't,eps'");
        const std::string field = line.substr(comma + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                             field + "'");
        }
        values.push_back(v);
    }
    if (values.size() != grid.n_steps())
        throw DomainError("pulse/grid length mismatch: " + std::to_string(values.size()) +
                          " rows for " + std::to_string(grid.n_steps()) + " steps");
    return ControlPulse(grid, std::move(values));
}

} // namespace tlsctl::csv
