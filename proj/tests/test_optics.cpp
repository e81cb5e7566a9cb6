#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "qkd/optics.hpp"

using namespace qkd;

namespace {

PhasePattern pattern(std::vector<std::uint8_t> q) { return PhasePattern{std::move(q)}; }

PhasePattern random_pattern(std::size_t n, RngStream& rng, bool binary_only = false) {
    PhasePattern p;
    p.quarter_turns.resize(n);
    for (auto& q : p.quarter_turns)
        q = binary_only ? static_cast<std::uint8_t>(2 * rng.coin())
                        : static_cast<std::uint8_t>(rng.uniform_int(4));
    return p;
}

double detector_mass(const DetectionDistribution& d, Detector det) {
    double sum = 0;
    for (int s = 0; s < d.slot_count(); ++s) sum += d.probability(s, det);
    return sum;
}

}  // namespace

TEST_CASE("build_train produces equal-magnitude phased amplitudes") {
    auto t = build_train(4, pattern({0, 0, 0, 0}));
    for (const auto& a : t.amplitudes) CHECK(a.real() == doctest::Approx(0.5).epsilon(1e-14));

    t = build_train(4, pattern({0, 2, 0, 2}));
    CHECK(t.amplitudes[0].real() == doctest::Approx(0.5));
    CHECK(t.amplitudes[1].real() == doctest::Approx(-0.5));
    CHECK(t.amplitudes[2].real() == doctest::Approx(0.5));
    CHECK(t.amplitudes[3].real() == doctest::Approx(-0.5));

    t = build_train(3, pattern({0, 0, 2}));
    const double r3 = 1.0 / std::sqrt(3.0);
    CHECK(t.amplitudes[0].real() == doctest::Approx(r3));
    CHECK(t.amplitudes[1].real() == doctest::Approx(r3));
    CHECK(t.amplitudes[2].real() == doctest::Approx(-r3));
    CHECK(t.is_normalized());

    CHECK_THROWS_AS(build_train(3, pattern({0, 0})), std::invalid_argument);
    CHECK_THROWS_AS(build_train(0, pattern({})), std::invalid_argument);
}

TEST_CASE("serial transmitter equals the direct construction") {
    auto t = serial_transmitter_train(2, pattern({0, 0, 0, 0}));
    REQUIRE(t.length() == 4);
    for (const auto& a : t.amplitudes) CHECK(std::abs(a - Complex{0.5, 0}) < 1e-14);

    t = serial_transmitter_train(1, pattern({0, 2}));
    CHECK(std::abs(t.amplitudes[0] - Complex{1 / std::sqrt(2.0), 0}) < 1e-14);
    CHECK(std::abs(t.amplitudes[1] + Complex{1 / std::sqrt(2.0), 0}) < 1e-14);

    RngStream rng(7);
    t = serial_transmitter_train(3, random_pattern(8, rng, true));
    REQUIRE(t.length() == 8);
    for (const auto& a : t.amplitudes)
        CHECK(std::abs(a) == doctest::Approx(1 / std::sqrt(8.0)).epsilon(1e-13));

    // cascade equivalence, m <= 6, random patterns
    for (int m = 1; m <= 6; ++m) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto p = random_pattern(std::size_t{1} << m, rng, true);
            const auto cascade = serial_transmitter_train(m, p);
            const auto direct = build_train(1 << m, p);
            REQUIRE(cascade.length() == direct.length());
            for (std::size_t j = 0; j < cascade.length(); ++j)
                CHECK(std::abs(cascade.amplitudes[j] - direct.amplitudes[j]) <= 1e-12);
        }
    }

    CHECK_THROWS_AS(serial_transmitter_train(2, pattern({0, 0, 0})), std::invalid_argument);
}

TEST_CASE("parallel transmitter with pinned first phase") {
    auto t = parallel_transmitter_train(2, pattern({0, 0, 0}));
    REQUIRE(t.length() == 3);
    for (const auto& a : t.amplitudes) CHECK(std::abs(a - Complex{1 / std::sqrt(3.0), 0}) < 1e-14);

    t = parallel_transmitter_train(2, pattern({0, 2, 0}));
    CHECK(t.amplitudes[1].real() == doctest::Approx(-1 / std::sqrt(3.0)));

    t = parallel_transmitter_train(4, pattern({0, 0, 2, 0, 2}));
    REQUIRE(t.length() == 5);
    for (const auto& a : t.amplitudes) CHECK(std::abs(a) == doctest::Approx(1 / std::sqrt(5.0)));

    CHECK_THROWS_AS(parallel_transmitter_train(2, pattern({0, 0})), std::invalid_argument);
    CHECK_THROWS_AS(parallel_transmitter_train(2, pattern({2, 0, 0})), std::invalid_argument);
}

TEST_CASE("interferometer distribution: uniform trains") {
    const auto d4 = interferometer_distribution(build_train(4, pattern({0, 0, 0, 0})), DelaySpec{1, 0});
    REQUIRE(d4.slot_count() == 5);
    CHECK(d4.probability(0, Detector::D0) == doctest::Approx(1.0 / 16));
    CHECK(d4.probability(0, Detector::D1) == doctest::Approx(1.0 / 16));
    for (int s = 1; s <= 3; ++s) {
        CHECK(d4.probability(s, Detector::D0) == doctest::Approx(0.25));
        CHECK(d4.probability(s, Detector::D1) == doctest::Approx(0.0));
    }
    CHECK(d4.probability(4, Detector::D0) == doctest::Approx(1.0 / 16));
    CHECK(d4.probability(4, Detector::D1) == doctest::Approx(1.0 / 16));
    double interior = 0;
    for (int s = 1; s <= 3; ++s)
        interior += d4.probability(s, Detector::D0) + d4.probability(s, Detector::D1);
    CHECK(interior == doctest::Approx(0.75).epsilon(1e-13));

    const auto d3 = interferometer_distribution(build_train(3, pattern({0, 0, 0})), DelaySpec{1, 0});
    double interior3 = 0;
    for (int s = 1; s <= 2; ++s)
        interior3 += d3.probability(s, Detector::D0) + d3.probability(s, Detector::D1);
    CHECK(interior3 == doctest::Approx(2.0 / 3).epsilon(1e-13));

    const auto d2 = interferometer_distribution(build_train(2, pattern({0, 2})), DelaySpec{1, 0});
    CHECK(d2.probability(1, Detector::D1) == doctest::Approx(0.5));
    CHECK(d2.probability(1, Detector::D0) == doctest::Approx(0.0));

    CHECK_THROWS_AS(interferometer_distribution(build_train(2, pattern({0, 0})), DelaySpec{0, 0}),
                    std::invalid_argument);
}

TEST_CASE("unitarity and the interior-mass law") {
    RngStream rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform_int(64));
        const int d = 1 + static_cast<int>(rng.uniform_int(5));
        const int theta = static_cast<int>(rng.uniform_int(4));
        const auto train = build_train(n, random_pattern(static_cast<std::size_t>(n), rng));
        const auto dist = interferometer_distribution(train, DelaySpec{d, theta});
        CHECK(std::abs(dist.total() - 1.0) <= 1e-12);
    }
    // uniform N-train, d = 1: interior slots carry exactly 1 - 1/N
    for (int n = 2; n <= 64; ++n) {
        const auto dist = interferometer_distribution(
            build_train(n, pattern(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0))),
            DelaySpec{1, 0});
        double interior = 0;
        for (int s = 1; s <= n - 1; ++s)
            interior += dist.probability(s, Detector::D0) + dist.probability(s, Detector::D1);
        CHECK(std::abs(interior - (1.0 - 1.0 / n)) <= 1e-12);
    }
}

TEST_CASE("deterministic interference and phase-shift covariance") {
    RngStream rng(13);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(15));
        const auto p = random_pattern(static_cast<std::size_t>(n), rng, true);
        const auto dist = interferometer_distribution(build_train(n, p), DelaySpec{1, 0});
        for (int s = 1; s <= n - 1; ++s) {
            const int diff = (p.quarter_turns[static_cast<std::size_t>(s)] -
                              p.quarter_turns[static_cast<std::size_t>(s) - 1] + 4) % 4;
            if (diff == 0)
                CHECK(dist.probability(s, Detector::D1) == 0.0);
            else
                CHECK(dist.probability(s, Detector::D0) == 0.0);
        }

        // a global phase leaves the distribution untouched
        auto shifted = p;
        const int g = static_cast<int>(rng.uniform_int(4));
        for (auto& q : shifted.quarter_turns) q = static_cast<std::uint8_t>((q + g) % 4);
        const auto dist2 = interferometer_distribution(build_train(n, shifted), DelaySpec{1, 0});
        for (int s = 0; s < dist.slot_count(); ++s)
            for (Detector det : {Detector::D0, Detector::D1})
                CHECK(std::abs(dist.probability(s, det) - dist2.probability(s, det)) <= 1e-15);
    }
}

TEST_CASE("switch overlap distribution") {
    SwitchSchedule even;
    even.pairs = {{0, 1}, {2, 3}};

    auto d = switch_overlap_distribution(build_train(4, pattern({0, 0, 0, 0})), even);
    REQUIRE(d.slot_count() == 2);
    CHECK(d.probability(0, Detector::D0) == doctest::Approx(0.5));
    CHECK(d.probability(0, Detector::D1) == doctest::Approx(0.0));
    CHECK(d.probability(1, Detector::D0) == doctest::Approx(0.5));

    d = switch_overlap_distribution(build_train(4, pattern({0, 2, 2, 2})), even);
    CHECK(d.probability(0, Detector::D1) == doctest::Approx(0.5));
    CHECK(d.probability(0, Detector::D0) == doctest::Approx(0.0));
    CHECK(d.probability(1, Detector::D0) == doctest::Approx(0.5));

    const auto odd = SwitchSchedule::fixed_adjacent(3);
    REQUIRE(odd.pairs.size() == 1);
    REQUIRE(odd.pass_through == std::vector<int>{2});
    d = switch_overlap_distribution(build_train(3, pattern({0, 0, 0})), odd);
    CHECK(d.probability(1, Detector::D0) + d.probability(1, Detector::D1) ==
          doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(std::abs(d.total() - 1.0) <= 1e-12);

    // no probability leaks for any schedule
    RngStream rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(12));
        const auto sched = SwitchSchedule::random_adjacent(n, rng);
        const auto train = build_train(n, random_pattern(static_cast<std::size_t>(n), rng));
        CHECK(std::abs(switch_overlap_distribution(train, sched).total() - 1.0) <= 1e-12);
    }

    const auto train4 = build_train(4, pattern({0, 0, 0, 0}));
    SwitchSchedule bad;
    bad.pairs = {{0, 1}};  // bins 2, 3 uncovered
    CHECK_THROWS_AS(switch_overlap_distribution(train4, bad), std::invalid_argument);
    bad.pairs = {{0, 1}, {1, 2}, {3, 3}};
    CHECK_THROWS_AS(switch_overlap_distribution(train4, bad), std::invalid_argument);
    bad.pairs = {{0, 1}, {2, 5}};
    CHECK_THROWS_AS(switch_overlap_distribution(train4, bad), std::invalid_argument);
    bad.pairs = {{0, 1}, {1, 2}};
    bad.pass_through = {3};
    CHECK_THROWS_AS(switch_overlap_distribution(train4, bad), std::invalid_argument);
}

TEST_CASE("random adjacent pairings cover odd trains uniformly") {
    RngStream rng(23);
    std::array<int, 3> unpaired_counts{};
    for (int rep = 0; rep < 3000; ++rep) {
        const auto sched = SwitchSchedule::random_adjacent(5, rng);
        REQUIRE(sched.pairs.size() == 2);
        REQUIRE(sched.pass_through.size() == 1);
        const int u = sched.pass_through[0];
        REQUIRE(u % 2 == 0);
        ++unpaired_counts[static_cast<std::size_t>(u / 2)];
    }
    for (int c : unpaired_counts) CHECK(std::abs(c - 1000) < 150);  // ~4 sigma

    const auto even = SwitchSchedule::random_adjacent(4, rng);
    CHECK(even.pairs == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
    CHECK(even.pass_through.empty());
}

TEST_CASE("sample_detection follows the distribution") {
    RngStream rng(31);

    DetectionDistribution point(3);
    point.set(2, Detector::D1, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const auto ev = sample_detection(point, rng);
        CHECK(ev.slot == 2);
        CHECK(ev.detector == Detector::D1);
    }

    const auto dist = interferometer_distribution(build_train(4, pattern({0, 0, 0, 0})), DelaySpec{1, 0});
    constexpr int kDraws = 100000;
    std::vector<int> counts(static_cast<std::size_t>(dist.slot_count()) * 2, 0);
    for (int i = 0; i < kDraws; ++i) {
        const auto ev = sample_detection(dist, rng);
        ++counts[static_cast<std::size_t>(ev.slot) * 2 + static_cast<std::size_t>(ev.detector)];
        if (ev.slot >= 1 && ev.slot <= 3) CHECK(ev.detector == Detector::D0);
    }
    for (int s = 0; s < dist.slot_count(); ++s)
        for (Detector det : {Detector::D0, Detector::D1}) {
            const double p = dist.probability(s, det);
            const double hat =
                counts[static_cast<std::size_t>(s) * 2 + static_cast<std::size_t>(det)] /
                static_cast<double>(kDraws);
            const double sigma = std::sqrt(std::max(p * (1 - p) / kDraws, 1e-12));
            CHECK(std::abs(hat - p) <= 4 * sigma + 1e-9);
        }

    DetectionDistribution leaky(2);
    leaky.set(0, Detector::D0, 0.5);  // sums to 0.5
    CHECK_THROWS_AS(sample_detection(leaky, rng), std::invalid_argument);
}
