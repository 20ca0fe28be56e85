// Acceptance suite. Each criterion prints one PASS/FAIL line; run directly
// (./acceptance) or through ctest.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "holosim/cli.hpp"
#include "holosim/holosim.hpp"
#include "test_util.hpp"

using namespace holosim;
using holosim::testutil::random_state;

namespace {

constexpr double kOpSigma = 1e-3, kOpGamma = 10.0;
constexpr std::size_t kOpTraj = 100000, kOpGrid = 1024;

double now_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << " (" << name << "): " << (pass ? "PASS" : "FAIL")
              << "  [" << detail << "]" << std::endl;
}

std::string num(double v) { return cli::fmt(v); }

ScenarioParams op_scenario(double phi, double sigma_x = kOpSigma, double sigma_y = kOpSigma,
                           double gamma_x = kOpGamma, double gamma_y = kOpGamma) {
    return ScenarioParams{LoopPair::hadamard(1.0, 1.0), OuParams(sigma_x, gamma_x),
                          OuParams(sigma_y, gamma_y), QubitState::from_angles(0, 0, phi)};
}

struct PhiPoint {
    double phi;
    double purity_ref, fidelity_ref;
    McResult mc;
};

// One ensemble per phi grid point at the standard operating point, shared by
// criteria 5, 7 and 8. All points reuse the master seed (common random
// numbers).
const std::vector<PhiPoint>& phi_sweep() {
    static const std::vector<PhiPoint> data = [] {
        const std::array<double, 5> phis{0.0, std::numbers::pi / 8, std::numbers::pi / 4,
                                         3 * std::numbers::pi / 8, std::numbers::pi / 2};
        std::vector<PhiPoint> out;
        for (double phi : phis) {
            const ScenarioParams s = op_scenario(phi);
            out.push_back({phi, analytic_purity_angles(s, phi), analytic_fidelity_angles(s, phi),
                           run_ensemble(McConfig(s, kOpTraj, kOpGrid, 424242), 0)});
        }
        return out;
    }();
    return data;
}

struct CliRun {
    int exit_code;
    std::string output;
};

std::string cli_path() {
    const char* p = std::getenv("HOLOSIM_CLI");
    REQUIRE(p != nullptr);
    return p;
}

CliRun run_cli(const std::string& args) {
    FILE* pipe = popen((cli_path() + " " + args + " 2>/dev/null").c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("criterion 1: gate identity") {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> lx_dist(std::numbers::pi / 4 + 0.01, 50.0);
    std::uniform_real_distribution<double> ly_dist(0.01, 50.0);
    const Mat2 target = cplx(0, -1) * hadamard();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Mat2 gate = ideal_gate(LoopPair::hadamard(lx_dist(rng), ly_dist(rng)));
        worst = std::max(worst, max_abs_diff(gate, target));
    }
    const double elapsed = now_seconds(t0);
    const bool pass = worst <= 1e-12 && elapsed < 1.0;
    report(1, "gate identity", pass,
           "max residual " + num(worst) + ", " + num(elapsed) + " s");
    CHECK(worst <= 1e-12);
    CHECK(elapsed < 1.0);
}

TEST_CASE("criterion 2: closed-form equivalence") {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> wide(-1.0, 1.0);
    double worst_gate = 0.0, worst_rho = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const PerturbationAngles angles(wide(rng), wide(rng));
        const QubitState psi = random_state(rng);
        const Mat2 product = perturbed_gate(angles);
        worst_gate = std::max(
            worst_gate,
            max_abs_diff(product, detail::perturbed_gate_closed_form(angles.alpha, angles.beta)));
        worst_rho = std::max(worst_rho, max_abs_diff(realized_density(angles, psi).mat(),
                                                     density_from_pure(product, psi).mat()));
    }
    const double elapsed = now_seconds(t0);
    const bool pass = worst_gate <= 1e-12 && worst_rho <= 1e-12 && elapsed < 5.0;
    report(2, "closed-form equivalence", pass,
           "gate residual " + num(worst_gate) + ", density residual " + num(worst_rho) + ", " +
               num(elapsed) + " s");
    CHECK(worst_gate <= 1e-12);
    CHECK(worst_rho <= 1e-12);
    CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 3: per-realization purity") {
    const ScenarioParams s = op_scenario(std::numbers::pi / 8);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const TrajectoryStats t = compute_trajectory(s, kOpGrid, 30003, i);
        const DensityMatrix rho(
            Mat2{{cplx(t.a, 0), cplx(t.u, t.v), cplx(t.u, -t.v), cplx(1.0 - t.a, 0)}});
        worst = std::max(worst, std::abs(purity(rho) - 1.0));
    }
    const bool pass = worst <= 1e-10;
    report(3, "per-realization purity", pass, "max |tr rho^2 - 1| = " + num(worst));
    CHECK(worst <= 1e-10);
}

TEST_CASE("criterion 4: OU statistics") {
    const auto t0 = std::chrono::steady_clock::now();
    const OuParams p(kOpSigma, kOpGamma);
    const std::vector<std::size_t> lags{1, 2, 5, 10, 100};
    const auto checks = ou_selftest(p, p, 0.0, 1.0, 1024, 100000, 40004, lags, 4.0);
    const double elapsed = now_seconds(t0);
    bool pass = elapsed < 30.0;
    double worst_z = 0.0;
    for (const StatCheck& c : checks) {
        pass = pass && c.pass;
        worst_z = std::max(worst_z, std::abs(c.z));
    }
    report(4, "OU statistics", pass,
           std::to_string(checks.size()) + " statistics over 1e5 trajectories, worst |z| = " +
               num(worst_z) + ", " + num(elapsed) + " s");
    for (const StatCheck& c : checks) {
        INFO(c.name << " estimate " << c.estimate << " expected " << c.expected << " z " << c.z);
        CHECK(c.pass);
    }
    CHECK(elapsed < 30.0);
}

TEST_CASE("criterion 5: oracle agreement over the phi grid") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& data = phi_sweep();
    const double elapsed = now_seconds(t0);
    bool pass = elapsed < 120.0;
    std::string detail;
    for (const PhiPoint& pt : data) {
        const double purity_band = std::max(3.0 * pt.mc.purity_stderr, 10.0 * kOpSigma * kOpSigma);
        const double fidelity_band =
            std::max(3.0 * pt.mc.fidelity_stderr, 10.0 * kOpSigma * kOpSigma);
        const double dp = std::abs(pt.mc.purity_mc - pt.purity_ref);
        const double df = std::abs(pt.mc.fidelity_mc - pt.fidelity_ref);
        pass = pass && dp <= purity_band && df <= fidelity_band;
        CHECK(dp <= purity_band);
        CHECK(df <= fidelity_band);
    }
    report(5, "oracle agreement", pass,
           "5 phi points, N = 1e5, bands max(3 stderr, 10 sigma^2), " + num(elapsed) + " s");
    CHECK(elapsed < 120.0);
}

TEST_CASE("criterion 6: second moment of alpha across bandwidths") {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double gamma : {1e-6, 0.1, 1.0, 10.0, 100.0}) {
        const ScenarioParams s = op_scenario(0.0, kOpSigma, kOpSigma, gamma, kOpGamma);
        const McResult r = run_ensemble(McConfig(s, 30000, kOpGrid, 60006), 0);
        const double expected = noise_moments(s).combined_x;
        const double band = 3.0 * r.mean_alpha_sq_stderr + 10.0 * kOpSigma * kOpSigma;
        const bool ok = std::abs(r.mean_alpha_sq - expected) <= band;
        pass = pass && ok;
        detail += (detail.empty() ? "" : ", ") + std::string("G=") + num(gamma) +
                  (ok ? " ok" : " FAIL");
        CHECK(std::abs(r.mean_alpha_sq - expected) <= band);
    }
    const double elapsed = now_seconds(t0);
    pass = pass && elapsed < 60.0;
    report(6, "E[alpha^2] matches 8 sigma F / Gamma", pass,
           detail + ", " + num(elapsed) + " s");
    CHECK(elapsed < 60.0);
}

TEST_CASE("criterion 7: linear law I = 2F - 1") {
    std::mt19937_64 rng(70007);
    std::uniform_real_distribution<double> var(0.0, 5e-3), band(0.05, 50.0), len(1.0, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const ScenarioParams s{LoopPair::hadamard(len(rng), len(rng)),
                               OuParams(var(rng), band(rng)), OuParams(var(rng), band(rng)),
                               random_state(rng)};
        worst = std::max(worst,
                         std::abs(analytic_purity(s) - (2.0 * analytic_fidelity(s) - 1.0)));
    }

    // Monte Carlo image at the operating point (phi = pi/8 grid point)
    const McResult& r = phi_sweep()[1].mc;
    const double residual = (r.purity_mc - 1.0) - 2.0 * (r.fidelity_mc - 1.0);
    const double combined =
        std::sqrt(r.purity_stderr * r.purity_stderr + 4.0 * r.fidelity_stderr * r.fidelity_stderr);
    const bool pass = worst <= 1e-15 && std::abs(residual) <= 4.0 * combined;
    report(7, "linear law", pass,
           "analytic residual " + num(worst) + ", MC residual " + num(residual) +
               " vs 4 x combined stderr " + num(4.0 * combined));
    CHECK(worst <= 1e-15);
    CHECK(std::abs(residual) <= 4.0 * combined);
}

TEST_CASE("criterion 8: oscillation in the initial state") {
    const auto& data = phi_sweep();
    const PhiPoint &p0 = data[0], &p8 = data[1], &p4 = data[2], &p38 = data[3], &p2 = data[4];

    // analytic: maxima at 0 and pi/2, minimum at pi/4
    bool pass = p0.purity_ref > p8.purity_ref && p8.purity_ref > p4.purity_ref &&
                p4.purity_ref < p38.purity_ref && p38.purity_ref < p2.purity_ref &&
                std::abs(p0.purity_ref - p2.purity_ref) < 1e-15 &&
                p0.fidelity_ref > p4.fidelity_ref;

    // Monte Carlo: same shape with >= 3 sigma significance
    const double z_purity =
        (p0.mc.purity_mc - p4.mc.purity_mc) /
        std::sqrt(p0.mc.purity_stderr * p0.mc.purity_stderr +
                  p4.mc.purity_stderr * p4.mc.purity_stderr);
    const double z_fidelity =
        (p0.mc.fidelity_mc - p4.mc.fidelity_mc) /
        std::sqrt(p0.mc.fidelity_stderr * p0.mc.fidelity_stderr +
                  p4.mc.fidelity_stderr * p4.mc.fidelity_stderr);
    pass = pass && z_purity >= 3.0 && z_fidelity >= 3.0;
    CHECK(z_purity >= 3.0);
    CHECK(z_fidelity >= 3.0);

    // at phi = 0 the y-noise drops out of the fidelity to the implemented
    // order: sweep sigma_y with a common seed, analytic F must not move at
    // all and MC F must stay inside its own noise band
    double f_ref0 = 0.0, f_mc0 = 0.0, stderr0 = 0.0;
    double worst_ref_shift = 0.0, worst_mc_shift = 0.0;
    bool first = true;
    for (double sy : {0.0, 5e-4, 1e-3, 2e-3}) {
        const ScenarioParams s = op_scenario(0.0, kOpSigma, sy);
        const double f_ref = analytic_fidelity(s);
        const McResult r = run_ensemble(McConfig(s, 20000, kOpGrid, 80008), 0);
        if (first) {
            f_ref0 = f_ref;
            f_mc0 = r.fidelity_mc;
            stderr0 = r.fidelity_stderr;
            first = false;
        }
        worst_ref_shift = std::max(worst_ref_shift, std::abs(f_ref - f_ref0));
        worst_mc_shift = std::max(worst_mc_shift, std::abs(r.fidelity_mc - f_mc0));
    }
    pass = pass && worst_ref_shift < 1e-15 && worst_mc_shift <= 3.0 * stderr0;
    CHECK(worst_ref_shift < 1e-15);
    CHECK(worst_mc_shift <= 3.0 * stderr0);

    report(8, "purity/fidelity oscillations", pass,
           "z(purity) = " + num(z_purity) + ", z(fidelity) = " + num(z_fidelity) +
               ", max analytic F shift " + num(worst_ref_shift) + ", max MC F shift " +
               num(worst_mc_shift));
}

TEST_CASE("criterion 9: byte-identical output") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = dir / "holosim_acc9_a.csv";
    const auto b = dir / "holosim_acc9_b.csv";
    const auto c = dir / "holosim_acc9_c.csv";
    const std::string common =
        "sweep --sweep phi:0:1.5707963267948966:5 --trajectories 2000 --grid-steps 128 --seed 99 "
        "--out ";
    const int e1 = run_cli(common + a.string() + " --workers 1").exit_code;
    const int e2 = run_cli(common + b.string() + " --workers " +
                           std::to_string(std::max(2u, std::thread::hardware_concurrency())))
                       .exit_code;
    const int e3 = run_cli(common + c.string() + " --workers 1").exit_code;
    const bool ran = e1 == 0 && e2 == 0 && e3 == 0;
    const bool same = ran && slurp(a) == slurp(b) && slurp(a) == slurp(c);
    report(9, "determinism across runs and workers", same,
           ran ? "3 runs, 1 vs max workers, byte-compare" : "CLI runs failed");
    CHECK(ran);
    CHECK(same);
    std::filesystem::remove(a);
    std::filesystem::remove(b);
    std::filesystem::remove(c);
}

TEST_CASE("criterion 10: truncation and quadrature scaling") {
    // halving sigma shrinks the MC-vs-analytic purity bias ~4x (the dropped
    // terms are quadratic); run where the plateau stands well above MC noise
    auto bias_at = [&](double sigma) {
        const ScenarioParams s = op_scenario(0.0, sigma, sigma);
        const McResult r = run_ensemble(McConfig(s, kOpTraj, kOpGrid, 101010), 0);
        return std::pair{r.purity_mc - analytic_purity(s), r.purity_stderr};
    };
    const auto [d_big, se_big] = bias_at(0.02);
    const auto [d_small, se_small] = bias_at(0.01);
    const double ratio = d_big / d_small;
    const bool resolved = std::abs(d_big) > 3.0 * se_big && std::abs(d_small) > 3.0 * se_small;
    const bool quadratic = ratio > 2.0 && ratio < 8.0;

    // halving the grid step at the operating point stays inside the noise band
    const ScenarioParams s = op_scenario(0.0);
    const McResult coarse = run_ensemble(McConfig(s, kOpTraj, kOpGrid, 111111), 0);
    const McResult fine = run_ensemble(McConfig(s, kOpTraj, 2 * kOpGrid, 111111), 0);
    const double purity_shift = std::abs(coarse.purity_mc - fine.purity_mc);
    const double purity_band = 3.0 * std::sqrt(coarse.purity_stderr * coarse.purity_stderr +
                                               fine.purity_stderr * fine.purity_stderr);
    const double fidelity_shift = std::abs(coarse.fidelity_mc - fine.fidelity_mc);
    const double fidelity_band =
        3.0 * std::sqrt(coarse.fidelity_stderr * coarse.fidelity_stderr +
                        fine.fidelity_stderr * fine.fidelity_stderr);
    const bool grid_ok = purity_shift <= purity_band && fidelity_shift <= fidelity_band;

    const bool pass = resolved && quadratic && grid_ok;
    report(10, "bias scaling", pass,
           "bias ratio " + num(ratio) + " (plateaus " + num(d_big) + " / " + num(d_small) +
               "), grid shift " + num(purity_shift) + " vs band " + num(purity_band));
    CHECK(resolved);
    CHECK(ratio > 2.0);
    CHECK(ratio < 8.0);
    CHECK(purity_shift <= purity_band);
    CHECK(fidelity_shift <= fidelity_band);
}
