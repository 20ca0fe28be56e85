#pragma once

// Command-line front end: scenario configuration, sweeps and CSV/JSON
// emission. All numeric output goes through std::to_chars, so files are
// locale-independent and byte-identical for identical configs and seeds.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "holosim/analytic.hpp"
#include "holosim/mc.hpp"
#include "holosim/ou.hpp"

namespace holosim::cli {

struct RunConfig {
    double lx = 1.0, ly = 1.0;
    double sigma_x = 1e-3, gamma_x = 10.0;
    double sigma_y = 1e-3, gamma_y = 10.0;
    double phi = 0.0, xi = 0.0, chi = 0.0;
    // raw amplitudes; NaN marks "not given" (angle form is the default)
    double c0_re = NAN, c0_im = NAN, c1_re = NAN, c1_im = NAN;
    std::size_t trajectories = 100000;
    std::size_t grid_steps = 1024;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0 = all hardware threads
    std::string output_path;
    std::string format = "csv";

    bool amplitudes_given() const {
        return !std::isnan(c0_re) || !std::isnan(c0_im) || !std::isnan(c1_re) ||
               !std::isnan(c1_im);
    }
};

inline std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(std::uint64_t v) { return std::to_string(v); }

inline std::string fmt(cplx z) {
    const double im = z.imag() + 0.0;  // -0 displays as +0
    return fmt(z.real()) + (im < 0 ? "-" : "+") + fmt(std::abs(im)) + "i";
}

inline QubitState make_state(const RunConfig& cfg, std::ostream& diag = std::cerr) {
    if (!cfg.amplitudes_given()) return QubitState::from_angles(cfg.xi, cfg.chi, cfg.phi);
    if (std::isnan(cfg.c0_re) || std::isnan(cfg.c0_im) || std::isnan(cfg.c1_re) ||
        std::isnan(cfg.c1_im))
        throw std::invalid_argument("state amplitudes need all of c0_re, c0_im, c1_re, c1_im");
    const cplx c0(cfg.c0_re, cfg.c0_im), c1(cfg.c1_re, cfg.c1_im);
    const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    if (std::abs(norm - 1.0) > kAlgebraTol) {
        if (std::abs(norm - 1.0) > 1e-6)
            throw std::invalid_argument("state amplitudes off normalization by more than 1e-6");
        diag << "warning: renormalizing state amplitudes (|norm - 1| = " << fmt(std::abs(norm - 1.0))
             << ")\n";
        return QubitState(c0 / norm, c1 / norm);
    }
    return QubitState(c0, c1);
}

inline ScenarioParams make_scenario(const RunConfig& cfg, std::ostream& diag = std::cerr) {
    return ScenarioParams{LoopPair::hadamard(cfg.lx, cfg.ly), OuParams(cfg.sigma_x, cfg.gamma_x),
                          OuParams(cfg.sigma_y, cfg.gamma_y), make_state(cfg, diag)};
}

// --- sweep specification ----------------------------------------------------

enum class SweepVar { Phi, SigmaX, SigmaY, GammaX, GammaY, Lx, Ly };

struct SweepSpec {
    SweepVar var;
    std::string var_name;
    double start, stop;
    std::size_t count;  // >= 2, linear grid including both endpoints

    double value_at(std::size_t i) const {
        return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

inline SweepSpec parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ':')) parts.push_back(tok);
    if (parts.size() != 4)
        throw std::invalid_argument("sweep spec must be VAR:START:STOP:COUNT, got '" + text + "'");

    SweepSpec spec;
    spec.var_name = parts[0];
    if (parts[0] == "phi") spec.var = SweepVar::Phi;
    else if (parts[0] == "sigma_x") spec.var = SweepVar::SigmaX;
    else if (parts[0] == "sigma_y") spec.var = SweepVar::SigmaY;
    else if (parts[0] == "gamma_x") spec.var = SweepVar::GammaX;
    else if (parts[0] == "gamma_y") spec.var = SweepVar::GammaY;
    else if (parts[0] == "lx") spec.var = SweepVar::Lx;
    else if (parts[0] == "ly") spec.var = SweepVar::Ly;
    else throw std::invalid_argument("unknown sweep variable '" + parts[0] + "'");

    try {
        std::size_t used = 0;
        spec.start = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("");
        spec.stop = std::stod(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("");
        const long long c = std::stoll(parts[3], &used);
        if (used != parts[3].size() || c < 0) throw std::invalid_argument("");
        spec.count = static_cast<std::size_t>(c);
    } catch (const std::exception&) {
        throw std::invalid_argument("sweep spec has malformed numbers: '" + text + "'");
    }

    if (!(spec.count >= 2)) throw std::invalid_argument("sweep needs count >= 2");
    if (!(spec.start < spec.stop)) throw std::invalid_argument("sweep needs start < stop");
    switch (spec.var) {
        case SweepVar::Lx:
            if (!(spec.start > std::numbers::pi / 4))
                throw std::invalid_argument("lx sweep must stay above pi/4");
            break;
        case SweepVar::Ly:
        case SweepVar::GammaX:
        case SweepVar::GammaY:
            if (!(spec.start > 0)) throw std::invalid_argument("swept variable must stay > 0");
            break;
        case SweepVar::SigmaX:
        case SweepVar::SigmaY:
            if (spec.start < 0) throw std::invalid_argument("swept variance must stay >= 0");
            break;
        case SweepVar::Phi:
            break;
    }
    return spec;
}

inline RunConfig with_value(RunConfig cfg, SweepVar var, double value) {
    switch (var) {
        case SweepVar::Phi: cfg.phi = value; break;
        case SweepVar::SigmaX: cfg.sigma_x = value; break;
        case SweepVar::SigmaY: cfg.sigma_y = value; break;
        case SweepVar::GammaX: cfg.gamma_x = value; break;
        case SweepVar::GammaY: cfg.gamma_y = value; break;
        case SweepVar::Lx: cfg.lx = value; break;
        case SweepVar::Ly: cfg.ly = value; break;
    }
    return cfg;
}

// --- tabular output ----------------------------------------------------------

struct SweepRow {
    double value;
    double purity_analytic;
    double fidelity_analytic;
    std::optional<double> purity_mc, purity_mc_err;
    std::optional<double> fidelity_mc, fidelity_mc_err;
    std::optional<double> two_f_minus_one_mc;
    std::size_t n_traj;
    std::uint64_t seed;
};

inline std::string opt_fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

inline void write_sweep_csv(std::ostream& out, const std::string& var_name,
                            const std::vector<SweepRow>& rows) {
    out << var_name
        << ",purity_analytic,fidelity_analytic,purity_mc,purity_mc_err,fidelity_mc,"
           "fidelity_mc_err,two_f_minus_one_mc,n_traj,seed\n";
    for (const SweepRow& r : rows) {
        out << fmt(r.value) << ',' << fmt(r.purity_analytic) << ',' << fmt(r.fidelity_analytic)
            << ',' << opt_fmt(r.purity_mc) << ',' << opt_fmt(r.purity_mc_err) << ','
            << opt_fmt(r.fidelity_mc) << ',' << opt_fmt(r.fidelity_mc_err) << ','
            << opt_fmt(r.two_f_minus_one_mc) << ',' << fmt(r.n_traj) << ',' << fmt(r.seed)
            << '\n';
    }
}

inline void write_sweep_json(std::ostream& out, const std::string& var_name,
                             const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
    };
    for (const SweepRow& r : rows) {
        nlohmann::ordered_json row;
        row[var_name] = r.value;
        row["purity_analytic"] = r.purity_analytic;
        row["fidelity_analytic"] = r.fidelity_analytic;
        row["purity_mc"] = opt(r.purity_mc);
        row["purity_mc_err"] = opt(r.purity_mc_err);
        row["fidelity_mc"] = opt(r.fidelity_mc);
        row["fidelity_mc_err"] = opt(r.fidelity_mc_err);
        row["two_f_minus_one_mc"] = opt(r.two_f_minus_one_mc);
        row["n_traj"] = r.n_traj;
        row["seed"] = r.seed;
        arr.push_back(std::move(row));
    }
    out << arr.dump(2) << '\n';
}

// key/value pairs in fixed order, for single-row results
using KvRow = std::vector<std::pair<std::string, std::string>>;

inline void write_kv_csv(std::ostream& out, const KvRow& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << row[i].first << (i + 1 < row.size() ? "," : "\n");
    for (std::size_t i = 0; i < row.size(); ++i) out << row[i].second << (i + 1 < row.size() ? "," : "\n");
}

inline void write_kv_json(std::ostream& out, const KvRow& row) {
    nlohmann::ordered_json obj;
    for (const auto& [k, v] : row) {
        if (v.empty()) { obj[k] = nullptr; continue; }
        double d = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), d);
        if (res.ec == std::errc() && res.ptr == v.data() + v.size()) obj[k] = d;
        else obj[k] = v;
    }
    out << obj.dump(2) << '\n';
}

class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw std::invalid_argument("cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

// --- subcommands -------------------------------------------------------------

// Builds the loop pair, verifies the enclosed areas and the resulting gate
// against -i H_0. Exit 0 on pass, 1 on fail (domain errors propagate).
inline int cmd_gate_check(const RunConfig& cfg, std::ostream& out) {
    const LoopPair loops = LoopPair::hadamard(cfg.lx, cfg.ly);
    const double res_I = std::abs(sigma_I(loops.loop_I) - std::numbers::pi / 4);
    const double res_II = std::abs(sigma_II(loops.loop_II) - std::numbers::pi / 2);
    const Mat2 gate = ideal_gate(loops);
    const Mat2 target = cplx(0, -1) * hadamard();
    const double res_gate = max_abs_diff(gate, target);

    const bool pass = res_I <= 1e-12 && res_II <= 1e-12 && res_gate <= 1e-12;
    out << "loop I  (x,r1): l = " << fmt(cfg.lx) << ", d = " << fmt(loops.loop_I.d)
        << ", |Sigma_I - pi/4| = " << fmt(res_I) << '\n';
    out << "loop II (y,r1): l = " << fmt(cfg.ly) << ", d = " << fmt(loops.loop_II.d)
        << ", |Sigma_II - pi/2| = " << fmt(res_II) << '\n';
    out << "gate residual |Gamma(C_II) Gamma(C_I) - (-i H)| = " << fmt(res_gate) << '\n';
    out << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? 0 : 1;
}

inline SweepRow make_sweep_row(const RunConfig& point, double value, std::ostream& diag) {
    const ScenarioParams s = make_scenario(point, diag);
    SweepRow row{};
    row.value = value;
    row.purity_analytic = analytic_purity(s);
    row.fidelity_analytic = analytic_fidelity(s);
    row.n_traj = point.trajectories;
    row.seed = point.seed;
    if (point.trajectories > 0) {
        const McResult r = run_ensemble(McConfig(s, point.trajectories, point.grid_steps, point.seed),
                                        point.workers);
        row.purity_mc = r.purity_mc;
        row.purity_mc_err = r.purity_stderr;
        row.fidelity_mc = r.fidelity_mc;
        row.fidelity_mc_err = r.fidelity_stderr;
        row.two_f_minus_one_mc = 2.0 * r.fidelity_mc - 1.0;
    }
    return row;
}

// One row per grid point. Every point reuses the same master seed (common
// random numbers), so sweep differences are not washed out by resampling.
inline int cmd_sweep(const RunConfig& cfg, const SweepSpec& spec, std::ostream& diag) {
    std::vector<SweepRow> rows;
    rows.reserve(spec.count);
    for (std::size_t i = 0; i < spec.count; ++i) {
        const double value = spec.value_at(i);
        rows.push_back(make_sweep_row(with_value(cfg, spec.var, value), value, diag));
    }
    OutputTarget target(cfg.output_path);
    if (cfg.format == "json") write_sweep_json(target.stream(), spec.var_name, rows);
    else write_sweep_csv(target.stream(), spec.var_name, rows);
    return 0;
}

inline int cmd_mc_run(const RunConfig& cfg, std::ostream& out) {
    if (cfg.trajectories < 1) throw std::invalid_argument("mc-run needs trajectories >= 1");
    const ScenarioParams s = make_scenario(cfg);
    const McResult r =
        run_ensemble(McConfig(s, cfg.trajectories, cfg.grid_steps, cfg.seed), cfg.workers);
    const double purity_ref = analytic_purity(s);
    const double fidelity_ref = analytic_fidelity(s);
    // Monte Carlo image of I = 2F - 1
    const double linear_residual = (r.purity_mc - 1.0) - 2.0 * (r.fidelity_mc - 1.0);
    const double linear_stderr =
        std::sqrt(r.purity_stderr * r.purity_stderr + 4.0 * r.fidelity_stderr * r.fidelity_stderr);

    out << "trajectories: " << r.n << ", grid steps: " << cfg.grid_steps
        << ", seed: " << cfg.seed << '\n';
    out << "rho_bar = [ " << fmt(r.rho_bar(0, 0)) << ", " << fmt(r.rho_bar(0, 1)) << "; "
        << fmt(r.rho_bar(1, 0)) << ", " << fmt(r.rho_bar(1, 1)) << " ]\n";
    out << "purity   = " << fmt(r.purity_mc) << " +- " << fmt(r.purity_stderr)
        << "  (analytic " << fmt(purity_ref) << ")\n";
    out << "fidelity = " << fmt(r.fidelity_mc) << " +- " << fmt(r.fidelity_stderr)
        << "  (analytic " << fmt(fidelity_ref) << ")\n";
    out << "mean alpha    = " << fmt(r.mean_alpha) << " +- " << fmt(r.mean_alpha_stderr) << '\n';
    out << "mean beta     = " << fmt(r.mean_beta) << " +- " << fmt(r.mean_beta_stderr) << '\n';
    out << "mean alpha^2  = " << fmt(r.mean_alpha_sq) << " +- " << fmt(r.mean_alpha_sq_stderr)
        << '\n';
    out << "(I-1) - 2(F-1) = " << fmt(linear_residual) << "  (combined stderr "
        << fmt(linear_stderr) << ")\n";

    if (!cfg.output_path.empty()) {
        KvRow row{{"purity_mc", fmt(r.purity_mc)},
                  {"purity_mc_err", fmt(r.purity_stderr)},
                  {"fidelity_mc", fmt(r.fidelity_mc)},
                  {"fidelity_mc_err", fmt(r.fidelity_stderr)},
                  {"two_f_minus_one_mc", fmt(2.0 * r.fidelity_mc - 1.0)},
                  {"purity_analytic", fmt(purity_ref)},
                  {"fidelity_analytic", fmt(fidelity_ref)},
                  {"mean_alpha", fmt(r.mean_alpha)},
                  {"mean_beta", fmt(r.mean_beta)},
                  {"mean_alpha_sq", fmt(r.mean_alpha_sq)},
                  {"n_traj", fmt(r.n)},
                  {"seed", fmt(cfg.seed)}};
        OutputTarget target(cfg.output_path);
        if (cfg.format == "json") write_kv_json(target.stream(), row);
        else write_kv_csv(target.stream(), row);
    }
    return 0;
}

inline int cmd_analytic(const RunConfig& cfg, std::ostream& out) {
    const ScenarioParams s = make_scenario(cfg);
    const NoiseMoments m = noise_moments(s);
    const DensityMatrix rb = averaged_density(s);
    const double purity_ref = analytic_purity(s);
    const double fidelity_ref = analytic_fidelity(s);

    out << "F_x = " << fmt(m.Fx) << ", F_y = " << fmt(m.Fy) << '\n';
    out << "8 sigma_x F_x / Gamma_x = " << fmt(m.combined_x)
        << ", 8 sigma_y F_y / Gamma_y = " << fmt(m.combined_y) << '\n';
    out << "E[alpha] = " << fmt(m.mean_alpha) << ", E[beta] = " << fmt(m.mean_beta) << '\n';
    out << "rho_bar = [ " << fmt(rb(0, 0).real()) << ", " << fmt(rb(0, 1)) << "; "
        << fmt(rb(1, 0)) << ", " << fmt(rb(1, 1).real()) << " ]\n";
    out << "purity   I = " << fmt(purity_ref) << '\n';
    out << "fidelity F = " << fmt(fidelity_ref) << "  (f = sqrt(F) = "
        << fmt(std::sqrt(std::max(0.0, fidelity_ref))) << ")\n";
    out << "I - (2F - 1) = " << fmt(purity_ref - (2.0 * fidelity_ref - 1.0)) << '\n';
    if (!cfg.amplitudes_given()) {
        out << "angle form: purity = " << fmt(analytic_purity_angles(s, cfg.phi))
            << ", fidelity = " << fmt(analytic_fidelity_angles(s, cfg.phi)) << '\n';
    }

    if (!cfg.output_path.empty()) {
        KvRow row{{"Fx", fmt(m.Fx)},
                  {"Fy", fmt(m.Fy)},
                  {"combined_x", fmt(m.combined_x)},
                  {"combined_y", fmt(m.combined_y)},
                  {"mean_alpha", fmt(m.mean_alpha)},
                  {"mean_beta", fmt(m.mean_beta)},
                  {"purity_analytic", fmt(purity_ref)},
                  {"fidelity_analytic", fmt(fidelity_ref)}};
        OutputTarget target(cfg.output_path);
        if (cfg.format == "json") write_kv_json(target.stream(), row);
        else write_kv_csv(target.stream(), row);
    }
    return 0;
}

// Moment and autocovariance checks of the sampler at 4 sigma.
inline int cmd_ou_selftest(const RunConfig& cfg, std::ostream& out) {
    if (cfg.trajectories < 2) throw std::invalid_argument("ou-selftest needs trajectories >= 2");
    const std::vector<std::size_t> lags{1, 2, 5, 10, 50};
    const std::size_t n_steps = std::max<std::size_t>(cfg.grid_steps, 50);
    const std::vector<StatCheck> checks =
        ou_selftest(OuParams(cfg.sigma_x, cfg.gamma_x), OuParams(cfg.sigma_y, cfg.gamma_y), 0.0,
                    cfg.lx, n_steps, cfg.trajectories, cfg.seed, lags, 4.0);
    bool all_pass = true;
    for (const StatCheck& c : checks) {
        out << (c.pass ? "PASS" : "FAIL") << "  " << c.name << ": estimate " << fmt(c.estimate)
            << ", expected " << fmt(c.expected) << ", stderr " << fmt(c.stderr_) << ", z = "
            << fmt(c.z) << '\n';
        all_pass = all_pass && c.pass;
    }
    out << (all_pass ? "PASS" : "FAIL") << "  (" << checks.size() << " statistics, 4 sigma)\n";
    return all_pass ? 0 : 1;
}

}  // namespace holosim::cli
