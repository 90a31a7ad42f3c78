#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rotorlab/experiments/config.hpp"
#include "rotorlab/experiments/convergence.hpp"
#include "rotorlab/experiments/runner.hpp"

using namespace rotorlab;
using namespace rotorlab::experiments;
namespace fs = std::filesystem;

namespace {

std::string first_line(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    std::getline(f, line);
    return line;
}

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("rotorlab_test_" + name);
    fs::remove_all(d);
    return d;
}

std::string config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ParsesFullFile) {
    const auto p = parse_config(
        "# case b with decoherence\n"
        "name = mine\n"
        "mode = decoherence\n"
        "tau = 1\n"
        "k = 5\n"
        "m = 1\n"
        "n = 2\n"
        "beta = pi\n"
        "r = 0.15   # strength\n"
        "realizations = 20\n"
        "markers = 4, 20\n");
    EXPECT_EQ(p.name, "mine");
    EXPECT_EQ(p.mode, Mode::decoherence);
    EXPECT_DOUBLE_EQ(p.spec.beta, pi);
    EXPECT_DOUBLE_EQ(p.spec.alpha, pi / 4);
    EXPECT_TRUE(p.auto_basis);
    EXPECT_EQ(p.params.kicks(), 60);
    ASSERT_TRUE(p.decoherence);
    EXPECT_DOUBLE_EQ(p.decoherence->r, 0.15);
    EXPECT_EQ(p.decoherence->n_realizations, 20);
    EXPECT_EQ(p.markers, (std::vector<int>{4, 20}));
}

TEST(Config, PiExpressions) {
    for (auto [text, value] : {std::pair{"pi/2", pi / 2}, std::pair{"2pi/3", 2 * pi / 3}, std::pair{"0.25*pi", pi / 4},
                               std::pair{"0.5", 0.5}}) {
        const auto p = parse_config(std::string("tau=1\nk=5\nm=1\nn=2\nalpha=") + (value <= pi / 2 ? text : "0") +
                                    "\nbeta=" + text + "\n");
        EXPECT_NEAR(p.spec.beta, value, 1e-15) << text;
    }
}

TEST(Config, Errors) {
    EXPECT_EQ(config_error("tau=1\nk=5\n"), "missing required keys m, n");
    EXPECT_EQ(config_error("tau=1\nk=5\nm=1\nn=2\nfoo=3\n"), "line 5: unknown key 'foo'");
    EXPECT_EQ(config_error("tau=1\ntau=2\nk=5\nm=1\nn=2\n"), "line 2: duplicate key 'tau'");
    EXPECT_EQ(config_error("tau=1\nk=5\nm=1\nn=2\nr=2\n"), "line 5: r must satisfy r in [0, 1]");
    EXPECT_EQ(config_error("tau=-1\nk=5\nm=1\nn=2\n"), "line 1: tau must satisfy tau > 0");
    EXPECT_NE(config_error("tau=1\nk=five\nm=1\nn=2\n").find("line 2"), std::string::npos);
    EXPECT_NE(config_error("tau=1\nk=5\nm=1\nn=1\n").find("differ"), std::string::npos);
    EXPECT_NE(config_error("tau 1\n").find("key=value"), std::string::npos);
    EXPECT_NE(config_error("tau=1\nk=5\nm=1\nn=2\nbasis=255\n").find("basis"), std::string::npos);
}

TEST(Presets, AllConstruct) {
    for (const auto& n : preset_names()) EXPECT_EQ(make_preset(n).name, n);
    EXPECT_THROW(make_preset("nope"), std::invalid_argument);
    EXPECT_EQ(make_preset("fig4b").decoherence->r, 0.15);
    EXPECT_EQ(make_preset("fig3a").mode, Mode::classical);
}

TEST(Runner, QuantumOutputs) {
    const auto out = evaluate_preset(make_preset("fig2a"));
    EXPECT_GT(out.value("E_minus_40"), out.value("E_plus_40"));
    EXPECT_EQ(out.tables.at(0).rows.at(0), (std::vector<std::string>{"0", "0.3125", "0.3125"}));
    EXPECT_EQ(out.tables.at(0).rows.size(), 61u);
    const auto dir = scratch_dir("fig2a");
    write_outputs(out, dir);
    EXPECT_EQ(first_line(dir / "series.csv"), "kick,E_beta0,E_betapi");
    EXPECT_EQ(first_line(dir / "snapshot_k60.csv"), "m,P_beta0,P_betapi");
    EXPECT_TRUE(fs::exists(dir / "summary.txt"));
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
    fs::remove_all(dir);
}

TEST(Runner, ClassicalZeroKicks) {
    RunOverrides o;
    o.kicks = 0;
    o.samples_per_line = 1000;
    const auto out = evaluate_preset(make_preset("fig3a"), 0, o);
    EXPECT_NEAR(out.value("E_plus_0"), 0.3125, 1e-13);
    EXPECT_NEAR(out.value("E_minus_0"), 0.3125, 1e-13);
}

TEST(Runner, DecoherenceIsDeterministic) {
    RunOverrides o;
    o.kicks = 10;
    o.realizations = 6;
    const auto a = evaluate_preset(make_preset("fig4b"), 5, o);
    const auto b = evaluate_preset(make_preset("fig4b"), 5, o);
    EXPECT_EQ(a.tables.at(0).to_csv(), b.tables.at(0).to_csv());
    EXPECT_EQ(a.tables.at(0).header,
              (std::vector<std::string>{"kick", "E_beta0", "E_betapi", "S_beta0", "S_betapi"}));
    const auto c = evaluate_preset(make_preset("fig4b"), 6, o);
    EXPECT_NE(a.tables.at(0).to_csv(), c.tables.at(0).to_csv());
}

TEST(Runner, SpectrumExport) {
    const auto out = evaluate_spectrum(0.5, 5.0, 32);
    const auto dir = scratch_dir("spectrum");
    write_outputs(out, dir);
    EXPECT_EQ(first_line(dir / "eigenphases.csv"), "j,phi");
    EXPECT_EQ(fs::file_size(dir / "eigenvectors.bin"), 32u * 32u * 16u);
    fs::remove_all(dir);
    EXPECT_THROW(evaluate_spectrum(0.5, 5.0, 1024), std::invalid_argument);
}

TEST(Helpers, SlopeAndContrast) {
    std::vector<double> v;
    for (int i = 0; i < 10; ++i) v.push_back(3.0 * i + 1.0);
    EXPECT_NEAR(fitted_slope(v, 2, 9), 3.0, 1e-12);
    EXPECT_THROW(fitted_slope(v, 5, 5), std::invalid_argument);
    EXPECT_DOUBLE_EQ(relative_contrast(2.0, 1.0), 1.0);
    EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Convergence, QuantumBasisDoubling) {
    const auto rep = convergence_report(make_preset("fig1a"), 1);
    EXPECT_EQ(rep.parameter, "n_basis");
    EXPECT_LT(rep.row("E_minus_60").rel_delta.at(0), 1e-6);
    EXPECT_LT(rep.row("E_plus_60").rel_delta.at(0), 1e-6);
    EXPECT_NE(rep.to_text().find("E_minus_60"), std::string::npos);
}

TEST(Convergence, ClassicalSampleDoubling) {
    const auto rep = convergence_report(make_preset("fig3b"), 1);
    EXPECT_LT(rep.row("E_plus_60").rel_delta.at(0), 0.01);
    EXPECT_LT(rep.row("E_minus_60").rel_delta.at(0), 0.01);
}

TEST(Convergence, RealizationDoubling) {
    auto p = make_preset("fig4a");
    p.decoherence->entropy_every = 0;
    const auto rep = convergence_report(p, 1, 1);
    EXPECT_EQ(rep.levels, (std::vector<int>{100, 200}));
    EXPECT_LT(rep.row("E_plus_60").rel_delta.at(0), 0.05);
    EXPECT_LT(rep.row("E_minus_60").rel_delta.at(0), 0.05);
}

#ifdef ROTORLAB_CLI
TEST(Cli, ExitCodes) {
    const auto dir = scratch_dir("cli");
    fs::create_directories(dir);
    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(ROTORLAB_CLI) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    EXPECT_EQ(run("presets"), 0);
    EXPECT_EQ(run("run fig1a --kicks 5 --out " + (dir / "a").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "a" / "series.csv"));
    EXPECT_EQ(run("run nosuchpreset"), 1);
    EXPECT_EQ(run("bogus"), 1);
    {
        std::ofstream(dir / "bad.cfg") << "tau=1\nk=5\nm=1\n";
    }
    EXPECT_EQ(run("run --config " + (dir / "bad.cfg").string()), 1);
    EXPECT_EQ(run("run fig1b --basis 32 --out " + (dir / "b").string()), 2);
    fs::remove_all(dir);
}
#endif
