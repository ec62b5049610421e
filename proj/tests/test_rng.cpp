#include <doctest.h>

#include <vector>

#include "otk/rng.hpp"
#include "test_util.hpp"

using namespace otk;

TEST_SUITE("rng") {

TEST_CASE("streams are pure functions of (master_seed, replication_index)") {
    rng::NormalStream a({42, 7});
    rng::NormalStream b({42, 7});
    for (int i = 0; i < 5000; ++i) CHECK(a.next() == b.next());

    rng::NormalStream c({42, 8});
    bool all_equal = true;
    rng::NormalStream a2({42, 7});
    for (int i = 0; i < 100; ++i) all_equal = all_equal && (a2.next() == c.next());
    CHECK_FALSE(all_equal);
}

TEST_CASE("different tags give different streams") {
    rng::UniformStream u({42, 7}, rng::StreamTag::uniforms);
    rng::UniformStream e({42, 7}, rng::StreamTag::events);
    bool all_equal = true;
    for (int i = 0; i < 64; ++i) all_equal = all_equal && (u.next_open01() == e.next_open01());
    CHECK_FALSE(all_equal);
}

TEST_CASE("uniform ranges") {
    rng::UniformStream u({9, 0}, rng::StreamTag::uniforms);
    for (int i = 0; i < 100000; ++i) {
        const double x = u.next_open01();
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
    }
    rng::UniformStream h({9, 1}, rng::StreamTag::uniforms);
    for (int i = 0; i < 100000; ++i) {
        const double x = h.next_halfopen01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("normals pass moment and KS checks") {
    const std::size_t n = 200000;
    std::vector<double> z(n);
    rng::NormalStream ns({20240801, 0});
    ns.fill(z.data(), n);

    const auto m = otk::test::moments(z);
    CHECK(std::fabs(m.mean) < 4.0 * m.stderr_mean);
    CHECK(m.var == doctest::Approx(1.0).epsilon(0.02));

    const double d = otk::test::ks_statistic(z, otk::test::normal_cdf);
    CHECK(d < otk::test::ks_critical(0.01, n));
}

TEST_CASE("fill equals repeated next") {
    rng::NormalStream a({5, 3});
    rng::NormalStream b({5, 3});
    std::vector<double> buf(1537);
    a.fill(buf.data(), buf.size());
    for (double v : buf) CHECK(v == b.next());
}

}  // TEST_SUITE
