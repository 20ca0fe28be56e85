#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "holosim/ou.hpp"

using namespace holosim;

TEST_CASE("stream keying and determinism") {
    RngStream a(7, 3, Plane::XR1);
    RngStream b(7, 3, Plane::XR1);
    RngStream other_traj(7, 4, Plane::XR1);
    RngStream other_plane(7, 3, Plane::YR1);

    const OuParams p(0.01, 5.0);
    const NoisePath pa = sample_path(p, 0, 1, 100, a);
    const NoisePath pb = sample_path(p, 0, 1, 100, b);
    const NoisePath pc = sample_path(p, 0, 1, 100, other_traj);
    const NoisePath pd = sample_path(p, 0, 1, 100, other_plane);

    CHECK(pa.values == pb.values);  // bit-identical
    CHECK(pa.values != pc.values);
    CHECK(pa.values != pd.values);
}

TEST_CASE("parameter and grid validation") {
    CHECK_THROWS_AS(OuParams(-1e-3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(OuParams(1e-3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(OuParams(1e-3, -2.0), std::invalid_argument);

    RngStream rng(1);
    const OuParams p(1e-3, 1.0);
    CHECK_THROWS_AS(sample_path(p, 1.0, 0.0, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_path(p, 0.0, 1.0, 0, rng), std::invalid_argument);
    CHECK_THROWS_AS(NoisePath(0.0, -0.1, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(NoisePath(0.0, 0.1, {0.0}), std::invalid_argument);
}

TEST_CASE("zero variance gives the zero path") {
    RngStream rng(11, 0, Plane::XR1);
    const NoisePath p = sample_path(OuParams(0.0, 3.0), 0, 1, 200, rng);
    for (double v : p.values) CHECK(v == 0.0);
    CHECK(autocov_estimate(std::span(&p, 1), 0) == 0.0);
}

TEST_CASE("autocov_estimate argument checks") {
    CHECK_THROWS_AS(autocov_estimate({}, 0), std::invalid_argument);
    RngStream rng(5, 0, Plane::XR1);
    const NoisePath p = sample_path(OuParams(1e-2, 1.0), 0, 1, 16, rng);
    CHECK_THROWS_AS(autocov_estimate(std::span(&p, 1), 17), std::invalid_argument);
}

TEST_CASE("moments match the stationary law") {
    // sigma = 0.01, Gamma = 5, step 0.01; pooled over enough paths that the
    // 4-sigma bands are tight
    const OuParams p(0.01, 5.0);
    const std::vector<std::size_t> lags{1, 2, 5, 10};
    const auto checks = ou_selftest(p, p, 0.0, 1.0, 100, 20000, 99, lags, 4.0);
    for (const StatCheck& c : checks) {
        INFO(c.name << ": estimate " << c.estimate << " expected " << c.expected << " z " << c.z);
        CHECK(c.pass);
    }
}

TEST_CASE("selftest flags a wrong bandwidth") {
    // expectation computed from Gamma/2 must fail at least one autocov lag
    const OuParams p(0.01, 5.0);
    const OuParams wrong(0.01, 2.5);
    const std::vector<std::size_t> lags{5, 10, 20};
    const auto checks =
        ou_selftest(p, p, 0.0, 1.0, 100, 20000, 99, lags, 4.0, &wrong, &wrong);
    bool any_fail = false;
    for (const StatCheck& c : checks)
        if (c.name.find("autocov") != std::string::npos) any_fail = any_fail || !c.pass;
    CHECK(any_fail);
}

TEST_CASE("stationarity: first and last grid point have equal variance") {
    const OuParams p(2e-3, 4.0);
    const std::size_t n_paths = 20000, n_steps = 32;
    double s2_first = 0, s4_first = 0, s2_last = 0, s4_last = 0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        RngStream rng(123, i, Plane::XR1);
        const NoisePath path = sample_path(p, 0, 1, n_steps, rng);
        const double f = path.values.front(), l = path.values.back();
        s2_first += f * f; s4_first += f * f * f * f;
        s2_last += l * l; s4_last += l * l * l * l;
    }
    const double n = static_cast<double>(n_paths);
    const double var_first = s2_first / n, var_last = s2_last / n;
    // var of the variance estimator, from the empirical fourth moment
    const double se_first = std::sqrt((s4_first / n - var_first * var_first) / n);
    const double se_last = std::sqrt((s4_last / n - var_last * var_last) / n);
    const double z = (var_first - var_last) / std::sqrt(se_first * se_first + se_last * se_last);
    CHECK(std::abs(z) < 4.0);
    CHECK(std::abs(var_first - p.variance) < 4.0 * se_first);  // no transient
    CHECK(std::abs(var_last - p.variance) < 4.0 * se_last);
}

TEST_CASE("one-step correlation equals exp(-Gamma step)") {
    const OuParams p(1e-2, 5.0);
    const std::size_t n_paths = 4000, n_steps = 100;
    std::vector<NoisePath> paths;
    paths.reserve(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        RngStream rng(777, i, Plane::XR1);
        paths.push_back(sample_path(p, 0, 1, n_steps, rng));
    }
    const double c0 = autocov_estimate(paths, 0);
    const double c1 = autocov_estimate(paths, 1);
    const double rho_expected = std::exp(-p.bandwidth * 0.01);
    // pooled sample count ~ 4e5; allow a generous band for the ratio
    CHECK(c1 / c0 == Catch::Approx(rho_expected).margin(0.01));
    CHECK(c0 == Catch::Approx(p.variance).margin(4.0 * p.variance * std::sqrt(2.0 / 4000.0)));
}

TEST_CASE("large Gamma * step decorrelates consecutive samples") {
    const OuParams p(1e-2, 1e9);
    std::vector<NoisePath> paths;
    for (std::size_t i = 0; i < 2000; ++i) {
        RngStream rng(31, i, Plane::XR1);
        paths.push_back(sample_path(p, 0, 1, 20, rng));
    }
    const double c0 = autocov_estimate(paths, 0);
    const double c1 = autocov_estimate(paths, 1);
    CHECK(c0 == Catch::Approx(p.variance).epsilon(0.05));
    CHECK(std::abs(c1 / c0) < 0.02);
}
