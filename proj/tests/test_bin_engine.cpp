#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <vector>

#include "medbin/bench.hpp"
#include "medbin/bin_engine.hpp"
#include "medbin/core_select.hpp"
#include "oracles.hpp"

using namespace medbin;

TEST_CASE("compute_moments") {
    const std::vector<double> a{1, 2, 3};
    const Moments m = compute_moments(a);
    CHECK(m.count == 3);
    CHECK(m.mean() == 2);
    CHECK(m.sigma() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));

    const std::vector<double> c(7, 0.1);
    const Moments k = compute_moments(c);
    CHECK(k.sigma() == 0);
    CHECK(k.mean() == 0.1);

    CHECK(compute_moments({}).count == 0);
    CHECK(compute_moments({}).sigma() == 0);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> v(10000);
    for (double& x : v) x = u(rng);
    const Moments mu = compute_moments(v);
    CHECK(std::fabs(mu.mean() - 0.5) < 0.02);
    CHECK(std::fabs(mu.sigma() - std::sqrt(1.0 / 12)) < 0.02);
    const auto ref = oracle::two_pass(v);
    CHECK(mu.mean() == doctest::Approx(ref.mean).epsilon(1e-9));
    CHECK(mu.sigma() == doctest::Approx(ref.sigma).epsilon(1e-9));
}

TEST_CASE("merge of moments is commutative and associative") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(3, 2);
    std::vector<Moments> parts;
    for (int i = 0; i < 4; ++i) {
        std::vector<double> v(1 + rng() % 50);
        for (double& x : v) x = static_cast<double>(static_cast<int>(g(rng) * 8)) / 8; // exact sums
        parts.push_back(compute_moments(v));
    }
    CHECK(merge(parts[0], parts[1]) == merge(parts[1], parts[0]));
    CHECK(merge(merge(parts[0], parts[1]), parts[2]) == merge(parts[0], merge(parts[1], parts[2])));
    CHECK(merge(parts[3], Moments{}) == parts[3]);
}

TEST_CASE("bin_index boundaries") {
    const double mu = 1.25, sigma = 0.5;
    const BinRange r{mu - sigma, mu + sigma};
    CHECK(bin_index(mu, r, 1000) == BinSlot{BinSide::In, 500});
    CHECK(bin_index(r.lo, r, 1000) == BinSlot{BinSide::In, 0});
    CHECK(bin_index(r.hi, r, 1000) == BinSlot{BinSide::In, 999});
    CHECK(bin_index(std::nextafter(r.lo, -1.0), r, 1000).side == BinSide::Left);
    CHECK(bin_index(std::nextafter(r.hi, 9.0), r, 1000).side == BinSide::Right);
    CHECK_THROWS_AS(bin_index(0.0, BinRange{1, 1}, 10), ContractViolation);
    CHECK_THROWS_AS(bin_index(0.0, BinRange{0, 1}, 1), ConfigError);
}

TEST_CASE("bin_index agrees with exact rational binning away from edges") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3, 3);
    const BinRange r{-1.7320508075688772, 2.0943951023931953};
    const long bins = 1000;
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        const long want = oracle::exact_bin(x, r.lo, r.hi, bins);
        if (want >= 0 && want < bins && oracle::near_edge(x, r.lo, r.hi, bins)) continue;
        const BinSlot got = bin_index(x, r, bins);
        const long label = got.side == BinSide::Left ? -1 : got.side == BinSide::Right ? bins : static_cast<long>(got.index);
        REQUIRE(label == want);
        ++compared;
    }
    CHECK(compared > 990);
}

TEST_CASE("bin mapping is monotone on extreme ranges") {
    const double big = std::numeric_limits<double>::max();
    const double tiny = std::numeric_limits<double>::denorm_min();
    for (const BinRange r : {BinRange{-big, big}, BinRange{0, 64 * tiny}, BinRange{1.0, std::nextafter(1.0, 2.0)}}) {
        const BinMapper map(r, 1000);
        CHECK(map.slot(r.lo) == 0);
        CHECK(map.slot(r.hi) == 999);
        std::mt19937_64 rng(8);
        std::vector<double> xs{r.lo, r.hi};
        std::uniform_real_distribution<double> u(0, 1);
        for (int i = 0; i < 200; ++i) xs.push_back(r.lo + (r.hi / 2 - r.lo / 2) * 2 * u(rng));
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 1; i < xs.size(); ++i) CHECK(map.slot(xs[i - 1]) <= map.slot(xs[i]));
        CHECK(map.edge(0) == r.lo);
        CHECK(map.edge(1000) == r.hi);
    }
}

TEST_CASE("build_sketch") {
    SUBCASE("three points, four bins") {
        const std::vector<double> v{0, 0, 10};
        const Moments m = compute_moments(v);
        const double mu = 10.0 / 3.0, sigma = std::sqrt(200.0) / 3.0;
        CHECK(m.mean() == doctest::Approx(mu));
        CHECK(m.sigma() == doctest::Approx(sigma));
        const auto sk = build_sketch(v, m.mean(), m.sigma(), 4);
        REQUIRE(sk);
        // Direct interval membership: bin i is [lo + i*w, lo + (i+1)*w).
        const double lo = m.mean() - m.sigma(), w = 2 * m.sigma() / 4;
        std::vector<std::uint64_t> want(4, 0);
        std::uint64_t left = 0, right = 0;
        for (double x : v) {
            if (x < lo) ++left;
            else if (x > lo + 4 * w) ++right;
            else ++want[std::min<std::size_t>(3, static_cast<std::size_t>((x - lo) / w))];
        }
        CHECK(sk->counts == want);
        CHECK(sk->n_left == 0);
        CHECK(sk->n_left == left);
        CHECK(sk->n_right == right);
        CHECK(sk->n_total() == 3);
    }
    SUBCASE("degenerate") {
        const std::vector<double> one{4.5};
        CHECK_FALSE(build_sketch(one, 4.5, 0.0, 1000).has_value());
    }
    SUBCASE("normal data, left tail fraction") {
        const auto v = bench::generate(bench::Distribution::normal(0, 1), 10000, 9);
        const Moments m = compute_moments(v);
        const auto sk = build_sketch(v, m.mean(), m.sigma(), 1000);
        REQUIRE(sk);
        std::uint64_t left = 0;
        for (double x : v) left += x < m.mean() - m.sigma();
        CHECK(sk->n_left == left);
        CHECK(sk->n_total() == 10000);
        CHECK(std::fabs(static_cast<double>(sk->n_left) / 1e4 - 0.1587) < 0.02);
    }
}

TEST_CASE("find_median_bin") {
    BinSketch s(BinRange{0, 1}, 3);
    s.counts = {2, 3, 1};
    CHECK(find_median_bin(s, 4) == MedianBin{MedianBin::Where::InBin, 1, 2});

    BinSketch t(BinRange{0, 1}, 2);
    t.counts = {1, 1};
    t.n_left = 5;
    CHECK(find_median_bin(t, 3).where == MedianBin::Where::OutsideLeft);
    t.n_right = 4;
    CHECK(find_median_bin(t, 8).where == MedianBin::Where::OutsideRight);

    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t bins = 1 + rng() % 16;
        BinSketch r(BinRange{0, 1}, bins);
        for (auto& c : r.counts) c = rng() % 10;
        r.n_left = rng() % 10;
        r.n_right = rng() % 10;
        for (std::uint64_t k = 1; k <= r.n_total(); ++k) {
            const long want = oracle::expanded_bin(r.n_left, r.counts, r.n_right, k);
            const MedianBin got = find_median_bin(r, k);
            if (want < 0) {
                REQUIRE(got.where == MedianBin::Where::OutsideLeft);
            } else if (want == static_cast<long>(bins)) {
                REQUIRE(got.where == MedianBin::Where::OutsideRight);
            } else {
                REQUIRE(got.where == MedianBin::Where::InBin);
                REQUIRE(got.bin == static_cast<std::size_t>(want));
                std::uint64_t before = r.n_left;
                for (std::size_t i = 0; i < got.bin; ++i) before += r.counts[i];
                REQUIRE(got.rank_within == k - before);
            }
        }
    }
}

TEST_CASE("binmedian small cases") {
    CHECK(binmedian(std::vector<double>{5, 1, 9, 3, 7}) == 5);
    CHECK(binmedian(std::vector<double>{1, 2, 3, 4}) == 2.5);
    CHECK(binmedian(std::vector<double>{-2}) == -2);
    CHECK_THROWS_AS(binmedian(std::vector<double>{}), ContractViolation);
    CHECK_THROWS_AS(binmedian(std::vector<double>{1, 2}, BinParams{1, 20}), ConfigError);
    CHECK_THROWS_AS(binmedian(std::vector<double>{1, 2}, BinParams{10, 0}), ConfigError);
}

TEST_CASE("binmedian equals the sort oracle on every generator") {
    for (const auto& s : bench::table1_scenarios()) {
        CAPTURE(s.name);
        const auto v = bench::generate(s.base_dist, 100001, 77);
        BinmedianStats st;
        CHECK(binmedian(v, {}, &st) == oracle::sorted_median(v));
        CHECK(st.iterations >= 1);
        auto even = v;
        even.pop_back();
        CHECK(binmedian(even) == oracle::sorted_median(even));
    }
}

TEST_CASE("binmedian on the uniform(-1e4,1e4) mixture") {
    const auto v = bench::generate(
        bench::Distribution::even_mixture(bench::Distribution::normal(0, 1), bench::Distribution::uniform(-1e4, 1e4)),
        100001, 5);
    BinmedianStats st;
    CHECK(binmedian(v, {}, &st) == oracle::sorted_median(v));
    MESSAGE("mixture iterations: " << st.iterations);
    CHECK(st.iterations >= 2);
}

TEST_CASE("binmedian randomized shapes, both parities") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 1 + rng() % 400;
        std::vector<double> v(n);
        switch (trial % 5) {
        case 0: for (double& x : v) x = g(rng); break;
        case 1: for (double& x : v) x = static_cast<double>(rng() % 4); break;  // heavy duplicates
        case 2: std::fill(v.begin(), v.end(), 0.3); break;                        // constant
        case 3: for (double& x : v) x = (rng() % 2) ? 1e6 : -2.5; break;          // two-point
        case 4: for (double& x : v) x = 1e9 + 1e-4 * g(rng); break;               // cancellation-prone
        }
        const BinParams p{2 + rng() % 50, 1 + rng() % 30};
        BinmedianStats st;
        REQUIRE(binmedian(v, p, &st) == oracle::sorted_median(v));
        for (std::size_t i = 1; i < st.survivors.size(); ++i) {
            if (st.survivors[i] == st.survivors[i - 1]) continue; // extent re-bin of the same set
            REQUIRE(st.survivors[i] < st.survivors[i - 1]);
        }
    }
}

TEST_CASE("binmedian survivors shrink strictly between collections") {
    const auto v = bench::generate(bench::Distribution::normal(0, 1), 1000001, 3);
    BinmedianStats st;
    CHECK(binmedian(v, BinParams{10, 5}, &st) == oracle::sorted_median(v));
    REQUIRE(st.survivors.size() >= 3);
    for (std::size_t i = 1; i < st.survivors.size(); ++i) CHECK(st.survivors[i] < st.survivors[i - 1]);
}

TEST_CASE("binmedian on extreme magnitudes") {
    const double big = std::numeric_limits<double>::max();
    const double tiny = std::numeric_limits<double>::denorm_min();
    std::vector<std::vector<double>> cases{
        {-big, big, 0, big, -big, 1, 2},
        {tiny, 2 * tiny, 3 * tiny, 0, 5 * tiny, tiny, 7 * tiny, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    };
    std::mt19937_64 rng(2);
    std::vector<double> spread(500);
    for (double& x : spread) x = std::ldexp(1.0, static_cast<int>(rng() % 2000) - 1000) * ((rng() % 2) ? 1 : -1);
    cases.push_back(spread);
    for (const auto& v : cases) {
        CHECK(binmedian(v, BinParams{1000, 3}) == oracle::sorted_median(v));
    }
}

TEST_CASE("binmedian iteration count stays logarithmic") {
    std::vector<double> means;
    for (std::size_t n : {1000u, 10000u, 100000u, 1000000u}) {
        double total = 0;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const auto v = bench::generate(bench::Distribution::normal(0, 1), n, seed);
            BinmedianStats st;
            binmedian(v, {}, &st);
            total += static_cast<double>(st.iterations);
        }
        means.push_back(total / 3);
    }
    MESSAGE("mean iterations 1e3..1e6: " << means[0] << " " << means[1] << " " << means[2] << " " << means[3]);
    CHECK(means.back() - means.front() <= 9.0);
}

TEST_CASE("binapprox") {
    CHECK(binapprox(std::vector<double>{0.7, 0.7, 0.7}) == 0.7);
    CHECK_THROWS_AS(binapprox(std::vector<double>{}), ContractViolation);

    SUBCASE("three points, four bins") {
        const std::vector<double> v{0, 0, 10};
        const double mu = 10.0 / 3.0, sigma = std::sqrt(200.0) / 3.0;
        const double lo = mu - sigma;
        const double want = lo + 0.5 * (2 * sigma / 4);
        const double got = binapprox(v, 4);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got == doctest::Approx(-0.2018).epsilon(1e-3));
        CHECK(std::fabs(got - 0.0) <= sigma / 4);
    }

    SUBCASE("within sigma/B on every generator, input untouched") {
        for (const auto& s : bench::table1_scenarios()) {
            CAPTURE(s.name);
            for (std::size_t n : {100001u, 100000u}) {
                const auto v = bench::generate(s.base_dist, n, 123);
                const auto before = v;
                const double sigma = compute_moments(v).sigma();
                for (std::size_t bins : {10u, 100u, 1000u}) {
                    const double a = binapprox(v, bins);
                    CHECK(std::fabs(a - oracle::sorted_median(v)) <= sigma / static_cast<double>(bins));
                }
                CHECK(std::memcmp(v.data(), before.data(), v.size() * sizeof(double)) == 0);
            }
        }
    }
}

TEST_CASE("approx_from_sketch reports outside ranks") {
    BinSketch s(BinRange{0, 1}, 4);
    s.n_left = 10;
    s.counts = {1, 1, 1, 1};
    CHECK_FALSE(approx_from_sketch(s, MedianTarget::single(7)).has_value());
    s.n_left = 0;
    CHECK(*approx_from_sketch(s, MedianTarget::single(1)) == 0.125);
    CHECK(*approx_from_sketch(s, MedianTarget::pair(2)) == 0.5);
}

TEST_CASE("median lies within one sd of the mean on generated data") {
    for (const auto& s : bench::table1_scenarios()) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto v = bench::generate(s.base_dist, 2001 + seed, seed);
            const Moments m = compute_moments(v);
            const double med = oracle::sorted_median(v);
            CHECK(med >= m.mean() - m.sigma());
            CHECK(med <= m.mean() + m.sigma());
        }
    }
}
