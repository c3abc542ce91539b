#include "hpsogwo/baselines.hpp"
#include "hpsogwo/workload.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace hpsogwo;

namespace {

std::vector<std::size_t> rr(std::size_t n, std::size_t m)
{
    return round_robin(generate_synthetic({n, 100, 1000, 1}), standard_fleet(m)).vm_of;
}

} // namespace

TEST(RoundRobin, Examples)
{
    EXPECT_EQ(rr(4, 4), (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_EQ(rr(5, 2), (std::vector<std::size_t>{0, 1, 0, 1, 0}));
    EXPECT_EQ(rr(1, 3), (std::vector<std::size_t>{0}));
}

TEST(RoundRobin, CountsDifferByAtMostOne)
{
    for (std::size_t n = 1; n < 40; ++n)
        for (std::size_t m = 1; m < 7; ++m) {
            std::vector<std::size_t> count(m, 0);
            for (std::size_t j : rr(n, m))
                ++count[j];
            const auto [lo, hi] = std::minmax_element(count.begin(), count.end());
            EXPECT_LE(*hi - *lo, 1u);
        }
}

TEST(SeededRandom, DeterministicAndInRange)
{
    const Workload w = generate_synthetic({200, 100, 1000, 3});
    const auto fleet = standard_fleet(5);
    const Assignment a = seeded_random(w, fleet, 11);
    EXPECT_EQ(a, seeded_random(w, fleet, 11));
    EXPECT_NE(a, seeded_random(w, fleet, 12));
    for (std::size_t j : a.vm_of)
        EXPECT_LT(j, 5u);
}

TEST(MinMin, SingleTaskPicksFasterVm)
{
    EXPECT_EQ(min_min(EtcMatrix(1, 2, {2.0, 1.0})).vm_of, (std::vector<std::size_t>{1}));
}

TEST(MinMin, EqualTasksSplit)
{
    EXPECT_EQ(min_min(EtcMatrix(2, 2, {1, 1, 1, 1})).vm_of, (std::vector<std::size_t>{0, 1}));
}

TEST(MinMin, FixedInstanceMatchesReference)
{
    const std::vector<double> lengths{420, 130, 980, 610, 275, 860, 150, 740};
    const EtcMatrix etc = build_etc(make_workload(lengths), make_fleet(std::vector<double>{800, 1000, 1250}));
    EXPECT_EQ(min_min(etc).vm_of, oracle::min_min(etc));
}

TEST(MinMin, RandomInstancesMatchReference)
{
    std::mt19937_64 rng(31);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng() % 10;
        const std::size_t m = 1 + rng() % 4;
        const EtcMatrix etc = oracle::random_instance(n, m, rng);
        EXPECT_EQ(min_min(etc).vm_of, oracle::min_min(etc));
    }
}

TEST(MinMin, TiesOnIntegerInstances)
{
    // Small integer ETCs force many exact ties.
    std::mt19937_64 rng(8);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng() % 9;
        const std::size_t m = 1 + rng() % 4;
        std::vector<double> e(n * m);
        for (double &x : e)
            x = 1.0 + static_cast<double>(rng() % 3);
        const EtcMatrix etc(n, m, e);
        EXPECT_EQ(min_min(etc).vm_of, oracle::min_min(etc));
    }
}

TEST(Encoding, AssignmentRoundTrips)
{
    const Assignment a{{3, 0, 2, 1, 1, 3}};
    EXPECT_EQ(decode_position(encode_assignment(a), 4), a);
}

TEST(MinMinHybrid, NeverWorseThanSeed)
{
    const Workload w = generate_synthetic({200, 100, 1000, 12});
    const auto fleet = standard_fleet(4);
    const EtcMatrix etc = build_etc(w, fleet);
    const MetricsReport seed_metrics = evaluate(min_min(etc), etc, default_beta(etc));
    for (std::uint64_t s = 0; s < 20; ++s) {
        OptimizerConfig c;
        c.max_iterations = 15;
        c.seed = s;
        const RunResult r = minmin_seeded_hybrid(w, fleet, c);
        EXPECT_LE(r.metrics.fitness, seed_metrics.fitness);
        EXPECT_LE(r.metrics.makespan_s, seed_metrics.makespan_s);
    }
}

TEST(MinMinHybrid, SameSeedSameOutput)
{
    const Workload w = generate_synthetic({60, 100, 1000, 2});
    const auto fleet = standard_fleet(3);
    OptimizerConfig c;
    c.max_iterations = 10;
    c.seed = 4;
    const RunResult a = minmin_seeded_hybrid(w, fleet, c);
    const RunResult b = minmin_seeded_hybrid(w, fleet, c);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.log, b.log);
}
