#pragma once

// Monte Carlo ensemble over noise realizations. Results are bit-identical for
// a fixed config regardless of worker count:
//   * every trajectory draws from streams keyed by (seed, index, plane);
//   * trajectories are summed into chunks aligned to fixed kBlockSize
//     boundaries, in index order, whatever thread computes them;
//   * merging accumulators only unions chunk lists (no floating-point adds);
//   * the cross-chunk reduction happens once, in finalize(), as a pairwise
//     tree over the index-sorted chunk list.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "holosim/analytic.hpp"
#include "holosim/holonomy.hpp"
#include "holosim/ou.hpp"
#include "holosim/qubit.hpp"

namespace holosim {

constexpr std::size_t kBlockSize = 128;  // trajectories per summation chunk

struct McConfig {
    ScenarioParams scenario;
    std::size_t n_trajectories;
    std::size_t n_grid_steps;
    std::uint64_t master_seed;

    McConfig(ScenarioParams scenario_, std::size_t n_trajectories_, std::size_t n_grid_steps_,
             std::uint64_t master_seed_)
        : scenario(std::move(scenario_)),
          n_trajectories(n_trajectories_),
          n_grid_steps(n_grid_steps_),
          master_seed(master_seed_) {
        if (n_trajectories < 1 || n_grid_steps < 1)
            throw std::invalid_argument("McConfig: need n_trajectories >= 1 and n_grid_steps >= 1");
    }
};

// Per-trajectory contribution. rho is parametrized by (a, u, v):
// rho00 = a, rho01 = u + iv, the rest fixed by Hermiticity and unit trace.
struct TrajectoryStats {
    double a, u, v;
    double alpha, beta;
};

struct BlockSums {
    std::size_t n = 0;
    double sa = 0, su = 0, sv = 0;
    double saa = 0, suu = 0, svv = 0, sau = 0, sav = 0, suv = 0;
    double salpha = 0, salpha2 = 0, salpha4 = 0;
    double sbeta = 0, sbeta2 = 0;

    void add(const TrajectoryStats& t) {
        ++n;
        sa += t.a; su += t.u; sv += t.v;
        saa += t.a * t.a; suu += t.u * t.u; svv += t.v * t.v;
        sau += t.a * t.u; sav += t.a * t.v; suv += t.u * t.v;
        const double a2 = t.alpha * t.alpha;
        salpha += t.alpha; salpha2 += a2; salpha4 += a2 * a2;
        sbeta += t.beta; sbeta2 += t.beta * t.beta;
    }

    void combine(const BlockSums& o) {
        n += o.n;
        sa += o.sa; su += o.su; sv += o.sv;
        saa += o.saa; suu += o.suu; svv += o.svv; sau += o.sau; sav += o.sav; suv += o.suv;
        salpha += o.salpha; salpha2 += o.salpha2; salpha4 += o.salpha4;
        sbeta += o.sbeta; sbeta2 += o.sbeta2;
    }
};

// Sums over disjoint, index-sorted trajectory ranges. Chunks never cross a
// kBlockSize boundary, so the chunk structure (and hence every floating-point
// addition) is a function of the trajectory set alone, not of scheduling.
class EnsembleAccumulator {
  public:
    struct Chunk {
        std::size_t lo, hi;  // inclusive trajectory index range
        BlockSums sums;
    };

    void add(std::size_t index, const TrajectoryStats& t) {
        if (!chunks_.empty()) {
            Chunk& back = chunks_.back();
            if (index <= back.hi)
                throw std::invalid_argument("EnsembleAccumulator: indices must be added in order");
            if (index == back.hi + 1 && index / kBlockSize == back.lo / kBlockSize) {
                back.sums.add(t);
                back.hi = index;
                return;
            }
        }
        Chunk c{index, index, {}};
        c.sums.add(t);
        chunks_.push_back(std::move(c));
    }

    std::size_t count() const {
        std::size_t n = 0;
        for (const Chunk& c : chunks_) n += c.sums.n;
        return n;
    }
    bool empty() const { return chunks_.empty(); }
    const std::vector<Chunk>& chunks() const { return chunks_; }

    // union of disjoint chunk lists; associative and commutative exactly,
    // since no sums are added here
    friend EnsembleAccumulator merge(const EnsembleAccumulator& a, const EnsembleAccumulator& b) {
        EnsembleAccumulator out;
        out.chunks_.reserve(a.chunks_.size() + b.chunks_.size());
        std::size_t i = 0, j = 0;
        while (i < a.chunks_.size() || j < b.chunks_.size()) {
            const bool take_a = j == b.chunks_.size() ||
                                (i < a.chunks_.size() && a.chunks_[i].lo < b.chunks_[j].lo);
            const Chunk& c = take_a ? a.chunks_[i++] : b.chunks_[j++];
            if (!out.chunks_.empty() && c.lo <= out.chunks_.back().hi)
                throw std::invalid_argument("merge: accumulators overlap");
            out.chunks_.push_back(c);
        }
        return out;
    }

    // pairwise-tree reduction over the index-sorted chunk sums
    BlockSums finalize() const {
        if (chunks_.empty()) throw std::invalid_argument("finalize: empty accumulator");
        std::vector<BlockSums> level;
        level.reserve(chunks_.size());
        for (const Chunk& c : chunks_) level.push_back(c.sums);
        while (level.size() > 1) {
            std::vector<BlockSums> next;
            next.reserve((level.size() + 1) / 2);
            for (std::size_t k = 0; k + 1 < level.size(); k += 2) {
                BlockSums s = level[k];
                s.combine(level[k + 1]);
                next.push_back(s);
            }
            if (level.size() % 2 == 1) next.push_back(level.back());
            level = std::move(next);
        }
        return level.front();
    }

  private:
    std::vector<Chunk> chunks_;
};

struct McResult {
    DensityMatrix rho_bar;
    double purity_mc, purity_stderr;
    double fidelity_mc, fidelity_stderr;
    double mean_alpha, mean_alpha_stderr;
    double mean_beta, mean_beta_stderr;
    double mean_alpha_sq, mean_alpha_sq_stderr;
    std::size_t n;
};

inline TrajectoryStats compute_trajectory(const ScenarioParams& s, std::size_t grid_steps,
                                          std::uint64_t seed, std::uint64_t index) {
    RngStream rng_x(seed, index, Plane::XR1);
    RngStream rng_y(seed, index, Plane::YR1);
    const RectLoop& lx = s.loops.loop_I;
    const RectLoop& ly = s.loops.loop_II;
    const NoisePath path_x = sample_path(s.noise_x, lx.a, lx.b, grid_steps, rng_x);
    const NoisePath path_y = sample_path(s.noise_y, ly.a, ly.b, grid_steps, rng_y);
    const double alpha = alpha_from_path(lx, path_x);
    const double beta = beta_from_path(ly, path_y);
    const DensityMatrix rho = realized_density(PerturbationAngles(alpha, beta), s.psi);
    return {rho(0, 0).real(), rho(0, 1).real(), rho(0, 1).imag(), alpha, beta};
}

namespace detail {
inline double safe_sqrt(double x) { return std::sqrt(std::max(0.0, x)); }

inline McResult assemble_result(const BlockSums& s, const ScenarioParams& scenario) {
    const double n = static_cast<double>(s.n);
    const double ma = s.sa / n, mu = s.su / n, mv = s.sv / n;

    const DensityMatrix rho_bar(
        Mat2{{cplx(ma, 0), cplx(mu, mv), cplx(mu, -mv), cplx(1.0 - ma, 0)}});
    const DensityMatrix rho0 = rho_ideal(scenario.psi);

    // sample covariance of the per-trajectory (a, u, v)
    const double denom = s.n > 1 ? n - 1.0 : 1.0;
    const double caa = (s.saa - s.sa * s.sa / n) / denom;
    const double cuu = (s.suu - s.su * s.su / n) / denom;
    const double cvv = (s.svv - s.sv * s.sv / n) / denom;
    const double cau = (s.sau - s.sa * s.su / n) / denom;
    const double cav = (s.sav - s.sa * s.sv / n) / denom;
    const double cuv = (s.suv - s.su * s.sv / n) / denom;
    auto quad_form = [&](double ga, double gu, double gv) {
        return ga * ga * caa + gu * gu * cuu + gv * gv * cvv +
               2.0 * (ga * gu * cau + ga * gv * cav + gu * gv * cuv);
    };

    McResult r{rho_bar, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, s.n};
    r.purity_mc = purity(rho_bar);
    // delta method: purity = a^2 + (1-a)^2 + 2(u^2 + v^2)
    r.purity_stderr = safe_sqrt(quad_form(4.0 * ma - 2.0, 4.0 * mu, 4.0 * mv) / n);
    r.fidelity_mc = fidelity(rho0, rho_bar);
    // fidelity is linear in (a, u, v)
    const double wa = rho0(0, 0).real() - rho0(1, 1).real();
    const double wu = 2.0 * rho0(0, 1).real();
    const double wv = 2.0 * rho0(0, 1).imag();
    r.fidelity_stderr = safe_sqrt(quad_form(wa, wu, wv) / n);

    r.mean_alpha = s.salpha / n;
    r.mean_alpha_stderr = safe_sqrt((s.salpha2 - s.salpha * s.salpha / n) / denom / n);
    r.mean_beta = s.sbeta / n;
    r.mean_beta_stderr = safe_sqrt((s.sbeta2 - s.sbeta * s.sbeta / n) / denom / n);
    r.mean_alpha_sq = s.salpha2 / n;
    r.mean_alpha_sq_stderr =
        safe_sqrt((s.salpha4 - s.salpha2 * s.salpha2 / n) / denom / n);
    return r;
}
}  // namespace detail

inline unsigned resolve_workers(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

inline McResult run_ensemble(const McConfig& cfg, unsigned workers = 1) {
    const std::size_t n = cfg.n_trajectories;
    const std::size_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<EnsembleAccumulator> parts(n_blocks);

    std::atomic<std::size_t> next_block{0};
    auto drain = [&] {
        for (std::size_t b = next_block.fetch_add(1); b < n_blocks; b = next_block.fetch_add(1)) {
            EnsembleAccumulator acc;
            const std::size_t lo = b * kBlockSize;
            const std::size_t hi = std::min(n, lo + kBlockSize);
            for (std::size_t i = lo; i < hi; ++i)
                acc.add(i, compute_trajectory(cfg.scenario, cfg.n_grid_steps, cfg.master_seed, i));
            parts[b] = std::move(acc);
        }
    };

    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), n_blocks));
    if (n_workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(drain);
        for (std::thread& t : pool) t.join();
    }

    EnsembleAccumulator total;
    for (const EnsembleAccumulator& p : parts) total = merge(total, p);
    return detail::assemble_result(total.finalize(), cfg.scenario);
}

struct ConvergenceRow {
    std::size_t n;
    double purity_mc, purity_stderr, purity_abs_err;
    double fidelity_mc, fidelity_stderr, fidelity_abs_err;
};

// MC error decay against the closed forms for increasing trajectory counts.
inline std::vector<ConvergenceRow> convergence_sweep(const McConfig& cfg,
                                                     const std::vector<std::size_t>& n_values,
                                                     unsigned workers = 1) {
    if (!std::is_sorted(n_values.begin(), n_values.end()))
        throw std::invalid_argument("convergence_sweep: n_values must be ascending");
    const double purity_ref = analytic_purity(cfg.scenario);
    const double fidelity_ref = analytic_fidelity(cfg.scenario);
    std::vector<ConvergenceRow> rows;
    rows.reserve(n_values.size());
    for (std::size_t nv : n_values) {
        McConfig point(cfg.scenario, nv, cfg.n_grid_steps, cfg.master_seed);
        const McResult r = run_ensemble(point, workers);
        rows.push_back({nv, r.purity_mc, r.purity_stderr, std::abs(r.purity_mc - purity_ref),
                        r.fidelity_mc, r.fidelity_stderr,
                        std::abs(r.fidelity_mc - fidelity_ref)});
    }
    return rows;
}

}  // namespace holosim
