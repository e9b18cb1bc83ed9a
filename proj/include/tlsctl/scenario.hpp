#pragma once

#include <tlsctl/errors.hpp>

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// Units throughout: energies are angular frequencies in cm^-1 with hbar = 1,
// times are in 1/cm^-1.

namespace tlsctl {

using Vec3 = Eigen::Vector3d;

/// Speed of light in cm/fs.
inline constexpr double kSpeedOfLightCmPerFs = 2.99792458e-5;

/// Coupling strength above which the weak-coupling (Bloch-Redfield) treatment is flagged.
inline constexpr double kWeakCouplingLimit = 0.05;

inline constexpr std::size_t kDefaultSteps = 512;
inline constexpr double kDefaultFluenceWeight = 1e-3;

/// Physical constants of the driven spin-boson problem.
struct ModelParams {
    double eps0 = 0.0;     ///< bare bias, cm^-1
    double delta = 0.0;    ///< tunnelling / transfer integral, cm^-1
    double alpha = 0.0;    ///< dimensionless Ohmic coupling
    double omega_c = 1.0;  ///< bath cutoff, cm^-1
    double inv_beta = 1.0; ///< temperature 1/beta, cm^-1
    double nu = 0.0;       ///< fluence weight
    double t_final = 1.0;  ///< final time, 1/cm^-1

    [[nodiscard]] double beta() const { return 1.0 / inv_beta; }
    /// Undriven precession frequency sqrt(eps0^2 + delta^2).
    [[nodiscard]] double rabi_frequency() const { return std::hypot(eps0, delta); }

    bool operator==(const ModelParams&) const = default;
};

/// FMO dimer parameter set (alpha deliberately small, weak-coupling regime).
inline ModelParams fmo_params() {
    return ModelParams{.eps0 = 175.4,
                       .delta = -75.0,
                       .alpha = 1e-3,
                       .omega_c = 166.7,
                       .inv_beta = 53.5,
                       .nu = 1e-3,
                       .t_final = 0.094};
}

/// Throws DomainError naming the first violated invariant.
inline void validate(const ModelParams& p) {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw DomainError(what);
    };
    require(std::isfinite(p.eps0), "eps0 must be finite");
    require(std::isfinite(p.delta), "delta must be finite");
    require(std::isfinite(p.alpha) && p.alpha >= 0.0, "alpha must be >= 0");
    require(std::isfinite(p.omega_c) && p.omega_c > 0.0, "omega_c must be > 0");
    require(std::isfinite(p.inv_beta) && p.inv_beta > 0.0, "inv_beta must be > 0");
    require(std::isfinite(p.nu) && p.nu >= 0.0, "nu must be >= 0");
    require(std::isfinite(p.t_final) && p.t_final > 0.0, "t_final must be > 0");
}

/// Non-fatal validity concerns (currently only the weak-coupling guard).
inline std::vector<std::string> validity_warnings(const ModelParams& p) {
    std::vector<std::string> out;
    if (p.alpha > kWeakCouplingLimit) {
        out.push_back("alpha = " + std::to_string(p.alpha) +
                      " exceeds 0.05; Bloch-Redfield weak-coupling treatment may be invalid");
    }
    return out;
}

/// Uniform grid t_0 = 0 ... t_M = t_final.
class TimeGrid {
public:
    TimeGrid(double t_final, std::size_t n_steps) : t_final_(t_final), n_steps_(n_steps) {
        if (n_steps == 0) throw DomainError("n_steps must be positive");
        if (!(t_final > 0.0) || !std::isfinite(t_final)) throw DomainError("t_final must be > 0");
        dt_ = t_final / static_cast<double>(n_steps);
    }

    [[nodiscard]] std::size_t n_steps() const { return n_steps_; }
    [[nodiscard]] std::size_t n_nodes() const { return n_steps_ + 1; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] double t_final() const { return t_final_; }

    /// Node time; the last node is pinned to t_final.
    [[nodiscard]] double t(std::size_t k) const {
        return k == n_steps_ ? t_final_ : static_cast<double>(k) * dt_;
    }

    bool operator==(const TimeGrid&) const = default;

private:
    double t_final_;
    std::size_t n_steps_;
    double dt_;
};

enum class Frame { unrotated, fmo_rotated };

struct TransferTask {
    Vec3 p_initial = Vec3::UnitX();
    Vec3 p_target = Vec3::UnitY();
    Frame frame = Frame::unrotated;

    bool operator==(const TransferTask&) const = default;
};

inline void validate(const TransferTask& task) {
    constexpr double slack = 1e-12;
    if (!task.p_initial.allFinite() || task.p_initial.norm() > 1.0 + slack)
        throw DomainError("p_initial must have norm <= 1");
    if (!task.p_target.allFinite() || task.p_target.norm() > 1.0 + slack)
        throw DomainError("p_target must have norm <= 1");
}

struct Scenario {
    ModelParams params;
    TimeGrid grid{1.0, kDefaultSteps};
    TransferTask task;
    std::vector<std::string> warnings;
};

/// States of the rotated (FMO site) frame used by the dimer transfer task.
enum class FmoState { ket1, superposition_plus_i_ket0 };

/// Unrotated-frame Bloch vector of a rotated-frame state. The site basis is
/// ordered (|1>, |0>) and the frames are related by exp(i pi sigma_y / 4).
inline Vec3 fmo_frame_map(FmoState state) {
    using C = std::complex<double>;
    using V2 = Eigen::Vector2cd;
    const double s = std::numbers::sqrt2 / 2.0;
    V2 rotated;
    switch (state) {
    case FmoState::ket1: rotated << C(1, 0), C(0, 0); break;
    case FmoState::superposition_plus_i_ket0: rotated << C(s, 0), C(0, s); break;
    }
    // exp(-i pi sigma_y / 4) = (I - i sigma_y)/sqrt(2)
    Eigen::Matrix2cd inv_rot;
    inv_rot << C(s, 0), C(-s, 0), C(s, 0), C(s, 0);
    const V2 psi = inv_rot * rotated;
    const C a = psi(0), b = psi(1);
    const C coh = std::conj(a) * b;
    return Vec3(2.0 * coh.real(), 2.0 * coh.imag(), std::norm(a) - std::norm(b));
}

/// t_fs = t / (2 pi c) for t in 1/cm^-1.
inline double time_to_femtoseconds(double t) {
    return t / (2.0 * std::numbers::pi * kSpeedOfLightCmPerFs);
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& text, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InputError(where + ": expected a number, got '" + text + "'");
    }
    if (trim(text.substr(used)).size() != 0)
        throw InputError(where + ": trailing characters in number '" + text + "'");
    return v;
}

inline Vec3 parse_state(const std::string& text, const std::string& where) {
    if (text == "ket1") return fmo_frame_map(FmoState::ket1);
    if (text == "superposition_plus_i_ket0") return fmo_frame_map(FmoState::superposition_plus_i_ket0);
    std::string buf = text;
    for (char& c : buf)
        if (c == ',') c = ' ';
    std::istringstream in(buf);
    std::vector<std::string> parts;
    for (std::string tok; in >> tok;) parts.push_back(tok);
    if (parts.size() != 3) throw InputError(where + ": expected 3 components, got '" + text + "'");
    return Vec3(parse_double(parts[0], where), parse_double(parts[1], where),
                parse_double(parts[2], where));
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Parses the flat `key = value` scenario format ('#' starts a comment).
///
/// Required keys: eps0, delta, alpha, omega_c, inv_beta, t_final, p_initial, p_target.
/// Optional keys: nu (default 1e-3), n_steps (default 512), frame (default unrotated).
/// State values are "x, y, z" or one of the labels ket1 / superposition_plus_i_ket0.
inline Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>") {
    std::map<std::string, std::pair<std::string, int>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = source + ":" + std::to_string(line_no);
        if (eq == std::string::npos) throw InputError(where + ": expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw InputError(where + ": expected 'key = value'");
        if (kv.contains(key)) throw InputError(where + ": duplicate key '" + key + "'");
        kv.emplace(key, std::make_pair(value, line_no));
    }

    static const char* const known[] = {"eps0",     "delta",   "alpha",     "omega_c",
                                        "inv_beta", "nu",      "t_final",   "n_steps",
                                        "p_initial", "p_target", "frame"};
    for (const auto& [key, val] : kv) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok)
            throw InputError(source + ":" + std::to_string(val.second) + ": unknown key '" + key +
                             "'");
    }

    auto where = [&](const std::string& key) {
        return source + ":" + std::to_string(kv.at(key).second);
    };
    auto number = [&](const std::string& key) -> double {
        if (!kv.contains(key)) throw InputError(source + ": missing required key '" + key + "'");
        return detail::parse_double(kv.at(key).first, where(key));
    };
    auto state = [&](const std::string& key) -> Vec3 {
        if (!kv.contains(key)) throw InputError(source + ": missing required key '" + key + "'");
        return detail::parse_state(kv.at(key).first, where(key));
    };

    Scenario sc;
    sc.params.eps0 = number("eps0");
    sc.params.delta = number("delta");
    sc.params.alpha = number("alpha");
    sc.params.omega_c = number("omega_c");
    sc.params.inv_beta = number("inv_beta");
    sc.params.t_final = number("t_final");
    sc.params.nu = kv.contains("nu") ? number("nu") : kDefaultFluenceWeight;

    std::size_t n_steps = kDefaultSteps;
    if (kv.contains("n_steps")) {
        const double raw = number("n_steps");
        if (raw < 1.0 || raw != std::floor(raw) || raw > 1e8)
            throw DomainError("n_steps must be a positive integer");
        n_steps = static_cast<std::size_t>(raw);
    }

    sc.task.p_initial = state("p_initial");
    sc.task.p_target = state("p_target");
    if (kv.contains("frame")) {
        const std::string& f = kv.at("frame").first;
        if (f == "unrotated")
            sc.task.frame = Frame::unrotated;
        else if (f == "fmo_rotated")
            sc.task.frame = Frame::fmo_rotated;
        else
            throw InputError(where("frame") + ": frame must be 'unrotated' or 'fmo_rotated'");
    }

    validate(sc.params);
    validate(sc.task);
    sc.grid = TimeGrid(sc.params.t_final, n_steps);
    sc.warnings = validity_warnings(sc.params);
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open scenario file '" + path.string() + "'");
    return parse_scenario(in, path.string());
}

inline void write_scenario(std::ostream& out, const Scenario& sc) {
    using detail::format_double;
    auto vec = [](const Vec3& v) {
        return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
    };
    out << "# energies in cm^-1, times in 1/cm^-1\n"
        << "eps0 = " << format_double(sc.params.eps0) << '\n'
        << "delta = " << format_double(sc.params.delta) << '\n'
        << "alpha = " << format_double(sc.params.alpha) << '\n'
        << "omega_c = " << format_double(sc.params.omega_c) << '\n'
        << "inv_beta = " << format_double(sc.params.inv_beta) << '\n'
        << "nu = " << format_double(sc.params.nu) << '\n'
        << "t_final = " << format_double(sc.params.t_final) << '\n'
        << "n_steps = " << sc.grid.n_steps() << '\n'
        << "p_initial = " << vec(sc.task.p_initial) << '\n'
        << "p_target = " << vec(sc.task.p_target) << '\n'
        << "frame = " << (sc.task.frame == Frame::fmo_rotated ? "fmo_rotated" : "unrotated")
        << '\n';
}

inline void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write scenario file '" + path.string() + "'");
    write_scenario(out, sc);
}

} // namespace tlsctl
