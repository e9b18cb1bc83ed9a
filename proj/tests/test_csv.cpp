#include <tlsctl.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace tlsctl;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> lines_of(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

} // namespace

TEST(Csv, NumberFormatHas17SignificantDigits) {
    EXPECT_EQ(csv::number(0.1), "1.0000000000000001e-01");
    EXPECT_EQ(std::stod(csv::number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(csv::number(-2.5e-300), "-2.5000000000000000e-300");
}

TEST(Csv, PulseRoundTripIsExact) {
    const TimeGrid g(0.094, 37);
    const ControlPulse pulse = random_smooth_pulse(g, 12.0, 2);
    const fs::path path = fs::temp_directory_path() / "tlsctl_pulse_rt.csv";
    csv::write_pulse(path, pulse);
    const auto lines = lines_of(path);
    ASSERT_EQ(lines.size(), 38u);
    EXPECT_EQ(lines[0], "t [1/cm^-1],eps [cm^-1]");
    EXPECT_EQ(csv::read_pulse(path, g).values(), pulse.values());
}

TEST(Csv, PulseLengthMismatch) {
    const TimeGrid g(0.094, 10);
    const fs::path path = fs::temp_directory_path() / "tlsctl_pulse_short.csv";
    csv::write_pulse(path, ControlPulse::zero(TimeGrid(0.094, 9)));
    try {
        csv::read_pulse(path, g);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("pulse/grid length mismatch"), std::string::npos);
    }
}

TEST(Csv, MalformedPulseAndMissingFile) {
    const TimeGrid g(0.094, 2);
    const fs::path path = fs::temp_directory_path() / "tlsctl_pulse_bad.csv";
    std::ofstream(path) << "t,eps\n0.047,1.0\n0.094,abc\n";
    EXPECT_THROW(csv::read_pulse(path, g), InputError);
    EXPECT_THROW(csv::read_pulse("/nonexistent/pulse.csv", g), InputError);
}

TEST(Csv, TrajectoryAndRatesHeaders) {
    const ModelParams p = fmo_params();
    const TimeGrid g(p.t_final, 64);
    const ControlProblem prob(p, g, {});
    const ForwardPass fp = prob.forward(ControlPulse::zero(g));
    const fs::path dir = fs::temp_directory_path();
    csv::write_trajectory(dir / "tlsctl_traj.csv", g, fp.trajectory);
    csv::write_rates(dir / "tlsctl_rates.csv", g, fp.rates);
    csv::write_bath(dir / "tlsctl_bath.csv", prob.bath());
    csv::write_propagator(dir / "tlsctl_prop.csv", fp.propagator);
    const auto t = lines_of(dir / "tlsctl_traj.csv");
    ASSERT_EQ(t.size(), 66u);
    EXPECT_EQ(t[0], "t [1/cm^-1],p_x [1],p_y [1],p_z [1],purity [1]");
    EXPECT_EQ(std::count(t[5].begin(), t[5].end(), ','), 4);
    EXPECT_EQ(lines_of(dir / "tlsctl_rates.csv")[0],
              "t [1/cm^-1],gamma_yx [cm^-1],gamma_yy [cm^-1],gamma_zx [cm^-1],A_y [cm^-1],A_z [cm^-1]");
    EXPECT_EQ(lines_of(dir / "tlsctl_bath.csv").size(), 66u);
    EXPECT_EQ(lines_of(dir / "tlsctl_prop.csv").size(), 66u);
}

TEST(Csv, UnwritablePathIsOutputError) {
    EXPECT_THROW(csv::write_pulse("/nonexistent/dir/p.csv", ControlPulse::zero(TimeGrid(1.0, 2))),
                 OutputError);
}
