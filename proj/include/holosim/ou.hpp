#pragma once

// Stationary Ornstein-Uhlenbeck path sampling with exact second-order
// statistics: zero mean, variance sigma, autocovariance sigma*exp(-Gamma*tau).
//
// The transition is the exact Gaussian one, not Euler-Maruyama:
//   x_0     ~ N(0, sigma)
//   x_{k+1} = rho * x_k + sqrt(sigma * (1 - rho^2)) * xi_k,   rho = exp(-Gamma*dt)
// so every finite-dimensional marginal is exact at any step size.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace holosim {

enum class Plane : std::uint64_t { XR1 = 1, YR1 = 2 };

namespace detail {
// splitmix64 finalizer; stable across platforms
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

inline std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t trajectory,
                                Plane plane) {
    using detail::mix64;
    return mix64(mix64(mix64(master_seed) ^ trajectory) ^ static_cast<std::uint64_t>(plane));
}

// Deterministic Gaussian stream. mt19937_64 output is fixed by the standard;
// normals use the trig Box-Muller form (two draws per normal, sine branch
// unused) so the draw count per sample never varies.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : engine_(key) {}

    RngStream(std::uint64_t master_seed, std::uint64_t trajectory, Plane plane)
        : engine_(stream_key(master_seed, trajectory, plane)) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::mt19937_64 engine_;
};

// OU parameters: stationary variance sigma (>= 0) and bandwidth Gamma (> 0)
// in inverse units of the loop coordinate. The Gamma -> 0 limit is handled by
// closed forms elsewhere, never by the sampler.
struct OuParams {
    double variance;
    double bandwidth;

    OuParams(double variance_, double bandwidth_) : variance(variance_), bandwidth(bandwidth_) {
        if (!std::isfinite(variance) || variance < 0.0)
            throw std::invalid_argument("OuParams: variance must be finite and >= 0");
        if (!std::isfinite(bandwidth) || bandwidth <= 0.0)
            throw std::invalid_argument("OuParams: bandwidth must be finite and > 0");
    }
};

// Sampled noise trajectory on a uniform grid: values[k] = dr(start + k*step).
struct NoisePath {
    double start;
    double step;
    std::vector<double> values;  // length n_steps + 1

    NoisePath(double start_, double step_, std::vector<double> values_)
        : start(start_), step(step_), values(std::move(values_)) {
        if (!std::isfinite(start) || !std::isfinite(step) || step <= 0.0)
            throw std::invalid_argument("NoisePath: bad grid");
        if (values.size() < 2) throw std::invalid_argument("NoisePath: need at least 2 points");
        for (double v : values)
            if (!std::isfinite(v)) throw std::invalid_argument("NoisePath: non-finite value");
    }

    std::size_t n_steps() const { return values.size() - 1; }
    double end() const { return start + step * static_cast<double>(n_steps()); }
};

inline NoisePath sample_path(const OuParams& params, double a, double b, std::size_t n_steps,
                             RngStream& rng) {
    if (!(std::isfinite(a) && std::isfinite(b) && b > a) || n_steps < 1)
        throw std::invalid_argument("sample_path: invalid grid");
    const double step = (b - a) / static_cast<double>(n_steps);
    const double rho = std::exp(-params.bandwidth * step);
    const double innov = std::sqrt(params.variance * (1.0 - rho * rho));
    std::vector<double> v(n_steps + 1);
    v[0] = std::sqrt(params.variance) * rng.normal();
    for (std::size_t k = 0; k + 1 < v.size(); ++k) v[k + 1] = rho * v[k] + innov * rng.normal();
    return NoisePath(a, step, std::move(v));
}

// Pooled autocovariance at integer lag, using the known zero process mean:
// mean over all pairs (i, i+lag) in all paths of values[i]*values[i+lag].
inline double autocov_estimate(std::span<const NoisePath> paths, std::size_t lag) {
    if (paths.empty()) throw std::invalid_argument("autocov_estimate: no paths");
    double sum = 0.0;
    std::size_t count = 0;
    for (const NoisePath& p : paths) {
        if (lag >= p.values.size())
            throw std::invalid_argument("autocov_estimate: lag exceeds path length");
        for (std::size_t i = 0; i + lag < p.values.size(); ++i) sum += p.values[i] * p.values[i + lag];
        count += p.values.size() - lag;
    }
    return sum / static_cast<double>(count);
}

// --- statistical self-test -------------------------------------------------

struct StatCheck {
    std::string name;
    double estimate;
    double expected;
    double stderr_;  // standard error of `estimate`
    double z;        // (estimate - expected) / stderr
    bool pass;
};

namespace detail {
// across-path mean and standard error of per-path statistics
struct PathStat {
    double sum = 0.0, sumsq = 0.0;
    std::size_t n = 0;
    void add(double x) { sum += x; sumsq += x * x; ++n; }
    double mean() const { return sum / static_cast<double>(n); }
    double stderr_() const {
        const double nn = static_cast<double>(n);
        const double var = std::max(0.0, (sumsq - sum * sum / nn) / (nn - 1.0));
        return std::sqrt(var / nn);
    }
};

inline StatCheck make_check(std::string name, const PathStat& s, double expected, double z_max) {
    const double se = s.stderr_();
    const double z = se > 0.0 ? (s.mean() - expected) / se : (s.mean() == expected ? 0.0 : INFINITY);
    return {std::move(name), s.mean(), expected, se, z, std::abs(z) <= z_max};
}
}  // namespace detail

// Draws n_paths trajectories per plane and checks mean, variance, lag
// autocovariances and the cross-plane covariance against the exact values.
// Per-path statistics are i.i.d. across paths, which gives honest standard
// errors despite the in-path correlation. `expected_x`/`expected_y` let a
// harness inject deliberately wrong parameters to demonstrate sensitivity.
inline std::vector<StatCheck> ou_selftest(const OuParams& params_x, const OuParams& params_y,
                                          double a, double b, std::size_t n_steps,
                                          std::size_t n_paths, std::uint64_t seed,
                                          std::span<const std::size_t> lags, double z_max,
                                          const OuParams* expected_x = nullptr,
                                          const OuParams* expected_y = nullptr) {
    if (n_paths < 2) throw std::invalid_argument("ou_selftest: need at least 2 paths");
    const OuParams& exp_x = expected_x ? *expected_x : params_x;
    const OuParams& exp_y = expected_y ? *expected_y : params_y;
    const double step = (b - a) / static_cast<double>(n_steps);
    for (std::size_t lag : lags)
        if (lag > n_steps) throw std::invalid_argument("ou_selftest: lag exceeds path length");

    struct PlaneStats {
        detail::PathStat mean, var;
        std::vector<detail::PathStat> lag;
    };
    PlaneStats st_x{{}, {}, std::vector<detail::PathStat>(lags.size())};
    PlaneStats st_y{{}, {}, std::vector<detail::PathStat>(lags.size())};
    detail::PathStat cross_stat;

    auto scan = [&lags](const NoisePath& p, PlaneStats& st) {
        double s = 0.0, s2 = 0.0;
        for (double v : p.values) { s += v; s2 += v * v; }
        const double np = static_cast<double>(p.values.size());
        st.mean.add(s / np);
        st.var.add(s2 / np);
        for (std::size_t j = 0; j < lags.size(); ++j) {
            double sl = 0.0;
            for (std::size_t k = 0; k + lags[j] < p.values.size(); ++k)
                sl += p.values[k] * p.values[k + lags[j]];
            st.lag[j].add(sl / static_cast<double>(p.values.size() - lags[j]));
        }
    };

    for (std::size_t i = 0; i < n_paths; ++i) {
        RngStream rx(seed, i, Plane::XR1);
        RngStream ry(seed, i, Plane::YR1);
        const NoisePath px = sample_path(params_x, a, b, n_steps, rx);
        const NoisePath py = sample_path(params_y, a, b, n_steps, ry);
        scan(px, st_x);
        scan(py, st_y);
        double sxy = 0.0;
        for (std::size_t k = 0; k < px.values.size(); ++k) sxy += px.values[k] * py.values[k];
        cross_stat.add(sxy / static_cast<double>(px.values.size()));
    }

    std::vector<StatCheck> out;
    auto emit = [&](const char* tag, const PlaneStats& st, const OuParams& exp_params) {
        out.push_back(detail::make_check(std::string(tag) + " mean", st.mean, 0.0, z_max));
        out.push_back(
            detail::make_check(std::string(tag) + " variance", st.var, exp_params.variance, z_max));
        for (std::size_t j = 0; j < lags.size(); ++j) {
            const double tau = static_cast<double>(lags[j]) * step;
            out.push_back(detail::make_check(
                std::string(tag) + " autocov lag " + std::to_string(lags[j]), st.lag[j],
                exp_params.variance * std::exp(-exp_params.bandwidth * tau), z_max));
        }
    };
    emit("x", st_x, exp_x);
    emit("y", st_y, exp_y);
    out.push_back(detail::make_check("cross-plane cov", cross_stat, 0.0, z_max));
    return out;
}

}  // namespace holosim
