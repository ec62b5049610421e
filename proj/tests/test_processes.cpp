#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "otk/processes.hpp"
#include "otk/quadrature.hpp"
#include "test_util.hpp"

using namespace otk;
using processes::InitialLaw;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

processes::JumpProcess three_state() {
    processes::JumpProcess jp;
    jp.rate_lambda = 1.0;
    jp.states = 3;
    jp.transition_P = {0.5, 0.3, 0.2, 0.3, 0.4, 0.3, 0.2, 0.3, 0.5};
    jp.stationary_mu = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    return jp;
}
}  // namespace

TEST_SUITE("processes") {

TEST_CASE("ou exact one-step formula") {
    // Var(X_{t+d} | X_t) = 1 - e^{-2d} by the simulator's own coefficients
    for (double d : {0.01, 0.25, 2.0}) {
        const double a = std::exp(-d);
        const double s2 = -std::expm1(-2.0 * d);
        CHECK(a * a + s2 == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("ou paths are deterministic given the seed") {
    const TimeGrid g = make_grid(1.0, 64);
    const auto p1 = processes::simulate_ou(g, InitialLaw::stationary(), {123, 5});
    const auto p2 = processes::simulate_ou(g, InitialLaw::stationary(), {123, 5});
    REQUIRE(p1.values.size() == p2.values.size());
    for (std::size_t i = 0; i < p1.values.size(); ++i) CHECK(p1.values[i] == p2.values[i]);
}

TEST_CASE("ou stationary moments and lag-1 autocorrelation") {
    const double delta = 0.25;
    const TimeGrid g = make_grid(delta * 4.0, 4);
    const std::size_t reps = 100000;
    std::vector<double> xT(reps), lag_prod(reps), x0sq(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_ou(g, InitialLaw::stationary(),
                                              {2024, static_cast<std::uint32_t>(r)});
        xT[r] = p.values.back();
        lag_prod[r] = p.values[0] * p.values[1];
        x0sq[r] = p.values[0] * p.values[0];
    }
    const auto mT = otk::test::moments(xT);
    CHECK(std::fabs(mT.mean) <= 4.0 * mT.stderr_mean);

    // lag-1 autocovariance of the stationary sequence is e^{-delta}
    const auto mP = otk::test::moments(lag_prod);
    CHECK(std::fabs(mP.mean - std::exp(-delta)) <= 3.0 * mP.stderr_mean);

    const auto m0 = otk::test::moments(x0sq);
    CHECK(std::fabs(m0.mean - 1.0) <= 3.0 * m0.stderr_mean);
}

TEST_CASE("ou delta to zero: consecutive samples decorrelate slowly") {
    const TimeGrid g = make_grid(1e-4, 1);
    double num = 0.0, den = 0.0;
    for (std::uint32_t r = 0; r < 4000; ++r) {
        const auto p = processes::simulate_ou(g, InitialLaw::stationary(), {88, r});
        num += p.values[0] * p.values[1];
        den += p.values[0] * p.values[0];
    }
    CHECK(num / den == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("bm basics") {
    const TimeGrid g = make_grid(0.5, 1);
    const std::size_t reps = 100000;
    std::vector<double> xd(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_bm(g, InitialLaw::point(0.0),
                                              {7, static_cast<std::uint32_t>(r)});
        xd[r] = p.values.back();
    }
    std::vector<double> sq(reps);
    for (std::size_t r = 0; r < reps; ++r) sq[r] = xd[r] * xd[r];
    const auto m = otk::test::moments(sq);
    CHECK(std::fabs(m.mean - 0.5) <= 3.0 * m.stderr_mean);

    // disjoint increments uncorrelated
    const TimeGrid g2 = make_grid(1.0, 2);
    std::vector<double> prod(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_bm(g2, InitialLaw::point(0.0),
                                              {8, static_cast<std::uint32_t>(r)});
        prod[r] = (p.values[1] - p.values[0]) * (p.values[2] - p.values[1]);
    }
    const auto mp = otk::test::moments(prod);
    CHECK(std::fabs(mp.mean) <= 3.0 * mp.stderr_mean);

    CHECK_THROWS_AS(processes::simulate_bm(g, InitialLaw::stationary(), {1, 0}),
                    std::domain_error);
}

TEST_CASE("fold: identity, reference point, periodicity, Lipschitz") {
    CHECK(processes::fold(0.5, 1.0) == 0.5);
    CHECK(processes::fold(1.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));

    // periodicity 4M against direct piecewise evaluation
    for (double M : {0.5, 1.0, 3.0}) {
        for (double x0 : {-0.9, -0.3, 0.0, 0.4, 0.99}) {
            const double base = processes::fold(x0 * M, M);
            CHECK(base == doctest::Approx(x0 * M).epsilon(1e-12));  // identity on [-M, M]
            for (int k : {-3, -1, 1, 2, 5}) {
                const double shifted = processes::fold(x0 * M + 4.0 * k * M, M);
                CHECK(shifted == doctest::Approx(base).epsilon(1e-10));
            }
        }
    }

    // 1-Lipschitz and range on a dense grid
    const double M = 1.3;
    double prev_x = -20.0, prev_y = processes::fold(prev_x, M);
    for (double x = -20.0 + 1e-3; x <= 20.0; x += 1e-3) {
        const double y = processes::fold(x, M);
        CHECK(std::fabs(y) <= M + 1e-12);
        CHECK(std::fabs(y - prev_y) <= std::fabs(x - prev_x) * (1.0 + 1e-9));
        prev_x = x;
        prev_y = y;
    }

    CHECK_THROWS_AS(processes::fold(1.0, 0.0), std::domain_error);
}

TEST_CASE("reflected bm stays in the band and matches free bm for large M") {
    const TimeGrid g = make_grid(1.0, 256);
    const auto refl = processes::simulate_reflected_bm(g, 2.0, InitialLaw::point(0.0), {31, 4});
    for (double v : refl.values) CHECK(std::fabs(v) <= 2.0);

    const auto wide = processes::simulate_reflected_bm(g, 500.0, InitialLaw::point(0.0), {31, 4});
    const auto free = processes::simulate_bm(g, InitialLaw::point(0.0), {31, 4});
    for (std::size_t i = 0; i < free.values.size(); ++i)
        CHECK(wide.values[i] == doctest::Approx(free.values[i]).epsilon(1e-12));

    CHECK_THROWS_AS(processes::simulate_reflected_bm(g, 1.0, InitialLaw::point(3.0), {1, 0}),
                    std::domain_error);
}

TEST_CASE("reflected bm long-run occupation of the upper half band is 1/2") {
    const TimeGrid g = make_grid(50.0, 2000);
    const std::size_t reps = 400;
    std::vector<double> frac(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_reflected_bm(
            g, 1.0, InitialLaw::stationary(), {99, static_cast<std::uint32_t>(r)});
        double cnt = 0.0;
        for (double v : p.values) cnt += (v >= 0.0) ? 1.0 : 0.0;
        frac[r] = cnt / static_cast<double>(p.values.size());
    }
    const auto m = otk::test::moments(frac);
    CHECK(std::fabs(m.mean - 0.5) <= 3.0 * m.stderr_mean);
}

TEST_CASE("jump process: trivial rate, jump count, occupation fractions") {
    auto jp = three_state();

    // lambda -> 0: constant path
    jp.rate_lambda = 1e-12;
    const TimeGrid g = make_grid(1.0, 32);
    const auto frozen = processes::simulate_jump(g, jp, InitialLaw::point(1.0), {3, 0});
    for (double v : frozen.values) CHECK(v == 1.0);

    // jump count ~ Poisson(lambda T)
    jp.rate_lambda = 2.0;
    const TimeGrid g5 = make_grid(5.0, 2000);
    const std::size_t reps = 10000;
    std::vector<double> jumps(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_jump(g5, jp, InitialLaw::stationary(),
                                                {55, static_cast<std::uint32_t>(r)});
        double cnt = 0.0;
        for (std::size_t i = 1; i < p.values.size(); ++i)
            cnt += (p.values[i] != p.values[i - 1]) ? 1.0 : 0.0;
        jumps[r] = cnt;
    }
    const auto m = otk::test::moments(jumps);
    // state changes = events that move the chain; P(self-jump) = avg diag 0.466..
    const double p_move = 1.0 - (0.5 + 0.4 + 0.5) / 3.0;
    CHECK(std::fabs(m.mean - 2.0 * 5.0 * p_move) <= 4.0 * m.stderr_mean);

    // occupation fractions approach stationary_mu at T = 200, lambda = 1
    jp.rate_lambda = 1.0;
    const TimeGrid gl = make_grid(200.0, 4000);
    std::vector<double> occ0(200);
    for (std::size_t r = 0; r < occ0.size(); ++r) {
        const auto p = processes::simulate_jump(gl, jp, InitialLaw::stationary(),
                                                {77, static_cast<std::uint32_t>(r)});
        double cnt = 0.0;
        for (double v : p.values) cnt += (v == 0.0) ? 1.0 : 0.0;
        occ0[r] = cnt / static_cast<double>(p.values.size());
    }
    const auto mo = otk::test::moments(occ0);
    CHECK(std::fabs(mo.mean - 1.0 / 3.0) <= 3.0 * mo.stderr_mean);

    // values stay in the state set
    const auto p = processes::simulate_jump(g5, jp, InitialLaw::stationary(), {6, 1});
    for (double v : p.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 2.0);
        CHECK(v == std::floor(v));
    }
}

TEST_CASE("jump process validation") {
    auto jp = three_state();
    jp.transition_P[0] = 0.6;  // row no longer sums to 1
    CHECK_THROWS_AS(jp.validate(), std::domain_error);

    auto jp2 = three_state();
    jp2.stationary_mu = {0.5, 0.25, 0.25};  // not stationary for symmetric P
    CHECK_THROWS_AS(jp2.validate(), std::domain_error);
}

TEST_CASE("euler diffusion with OU coefficients matches the exact OU marginal") {
    // b = -x, sigma = sqrt(2): marginal after burn-in should be N(0,1)
    const double T = 8.0;
    const TimeGrid g = make_grid(T, 2048);
    const std::size_t reps = 10000;
    std::vector<double> xs(reps);
    auto b = [](double x) { return -x; };
    auto s = [](double) { return std::sqrt(2.0); };
    const auto start = processes::stationary_diffusion_law(b, s, -kInf, kInf);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_scalar_diffusion(
            g, b, s, -kInf, kInf, start, {404, static_cast<std::uint32_t>(r)});
        xs[r] = p.values.back();
    }
    const double d = otk::test::ks_statistic(xs, otk::test::normal_cdf);
    CHECK(d < otk::test::ks_critical(0.01, reps));
}

TEST_CASE("euler diffusion with zero drift in a band matches reflected bm marginal") {
    const double M = 1.0;
    const TimeGrid g = make_grid(4.0, 1024);
    const std::size_t reps = 10000;
    std::vector<double> euler(reps), folded(reps);
    auto b = [](double) { return 0.0; };
    auto s = [](double) { return 1.0; };
    for (std::size_t r = 0; r < reps; ++r) {
        const auto pe = processes::simulate_scalar_diffusion(
            g, b, s, -M, M, InitialLaw::point(0.0), {505, static_cast<std::uint32_t>(r)});
        euler[r] = pe.values.back();
        const auto pf = processes::simulate_reflected_bm(g, M, InitialLaw::point(0.0),
                                                         {606, static_cast<std::uint32_t>(r)});
        folded[r] = pf.values.back();
    }
    const double d = otk::test::ks_statistic2(euler, folded);
    CHECK(d < otk::test::ks_critical2(0.01, reps, reps));
}

TEST_CASE("diffusion volatility guard") {
    const TimeGrid g = make_grid(1.0, 16);
    auto b = [](double) { return 0.0; };
    auto s = [](double x) { return std::fabs(x); };  // touches zero
    CHECK_THROWS_AS(processes::simulate_scalar_diffusion(g, b, s, -1.0, 1.0,
                                                         InitialLaw::point(0.5), {1, 0}),
                    std::domain_error);
}

TEST_CASE("speed_density: OU, flat band, and a divergent case") {
    auto bou = [](double x) { return -x; };
    auto sou = [](double) { return std::sqrt(2.0); };
    const auto sd = processes::speed_density(bou, sou, 0.0, -kInf, kInf);
    REQUIRE(sd.integrable);
    // normalized density equals the standard normal
    for (double x : {-2.0, -0.5, 0.0, 1.0, 2.5}) {
        const double expect = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
        CHECK(sd.normalizer * sd.unnormalized(x) == doctest::Approx(expect).epsilon(1e-8));
    }

    auto b0 = [](double) { return 0.0; };
    auto s1 = [](double) { return 1.0; };
    const double M = 3.0;
    const auto flat = processes::speed_density(b0, s1, 0.0, -M, M);
    REQUIRE(flat.integrable);
    CHECK(flat.normalizer * flat.unnormalized(0.3) == doctest::Approx(1.0 / (2.0 * M)));

    auto s2 = [](double) { return std::sqrt(2.0); };
    const auto div = processes::speed_density(b0, s2, 0.0, -kInf, kInf);
    CHECK_FALSE(div.integrable);
}

TEST_CASE("stationary start: marginal at time T matches the start marginal (KS)") {
    const std::size_t reps = 10000;
    const TimeGrid g = make_grid(2.0, 64);
    std::vector<double> x0(reps), xT(reps);

    // OU
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_ou(g, InitialLaw::stationary(),
                                              {808, static_cast<std::uint32_t>(r)});
        x0[r] = p.values.front();
        xT[r] = p.values.back();
    }
    CHECK(otk::test::ks_statistic2(x0, xT) < otk::test::ks_critical2(0.01, reps, reps));

    // reflected BM
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_reflected_bm(g, 1.0, InitialLaw::stationary(),
                                                        {909, static_cast<std::uint32_t>(r)});
        x0[r] = p.values.front();
        xT[r] = p.values.back();
    }
    CHECK(otk::test::ks_statistic2(x0, xT) < otk::test::ks_critical2(0.01, reps, reps));

    // jump chain: compare occupation at start and end across replications
    auto jp = three_state();
    std::vector<double> s0(reps), sT(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = processes::simulate_jump(g, jp, InitialLaw::stationary(),
                                                {1010, static_cast<std::uint32_t>(r)});
        s0[r] = p.values.front();
        sT[r] = p.values.back();
    }
    CHECK(otk::test::ks_statistic2(s0, sT) < otk::test::ks_critical2(0.01, reps, reps));
}

TEST_CASE("initial law validation and sampling") {
    CHECK_THROWS_AS(InitialLaw::density([](double) { return 2.0; }, 0.0, 1.0),
                    std::domain_error);
    const auto unif = InitialLaw::density([](double) { return 0.5; }, -1.0, 1.0);
    // inverse CDF of the uniform law is affine
    CHECK(unif.sample(0.0) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(unif.sample(0.5) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(unif.sample(0.75) == doctest::Approx(0.5).epsilon(1e-9));
}

}  // TEST_SUITE
