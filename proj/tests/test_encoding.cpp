#include "hpsogwo/encoding.hpp"
#include "hpsogwo/metrics.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <vector>

using namespace hpsogwo;

TEST(Decode, Examples)
{
    EXPECT_EQ(decode_coordinate(0.0, 4), 0u);
    EXPECT_EQ(decode_coordinate(7.3, 4), 3u);
    EXPECT_EQ(decode_coordinate(-2.5, 4), 2u);
    EXPECT_EQ(decode_coordinate(3.999, 4), 3u);
    EXPECT_EQ(decode_coordinate(4.0, 4), 0u);
    EXPECT_EQ(decode_coordinate(1e18, 3), static_cast<std::size_t>(std::fmod(1e18, 3.0)));
}

TEST(Decode, NonFiniteRejected)
{
    EXPECT_THROW(decode_coordinate(std::numeric_limits<double>::quiet_NaN(), 4), InvalidInput);
    EXPECT_THROW(decode_coordinate(std::numeric_limits<double>::infinity(), 4), InvalidInput);
    EXPECT_THROW(decode_position(std::vector<double>{1.0}, 0), InvalidInput);
}

TEST(Decode, AlwaysInRange)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(-1e6, 1e6);
    for (std::size_t m = 1; m <= 7; ++m)
        for (int k = 0; k < 2000; ++k)
            EXPECT_LT(decode_coordinate(x(rng), m), m);
}

TEST(ClampPosition, Bounds)
{
    std::vector<double> x{-100, -3, 0, 3, 100};
    clamp_position(x, 40.0);
    EXPECT_EQ(x, (std::vector<double>{-40, -3, 0, 3, 40}));
    EXPECT_EQ(position_bound(4), 40.0);
}

TEST(VmAwareMap, HandTrace)
{
    const EtcMatrix etc(3, 2, std::vector<double>(6, 10.0));
    const std::vector<double> thresholds{15.0, 15.0};
    const Assignment a = vm_aware_map(std::vector<double>{0.1, 0.2, 0.3}, etc, thresholds);
    EXPECT_EQ(a.vm_of, (std::vector<std::size_t>{0, 1, 0}));
}

TEST(VmAwareMap, InfiniteThresholdsMatchDecode)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> len(1, 10), x(-40, 40);
    std::vector<double> entries;
    for (int i = 0; i < 50 * 4; ++i)
        entries.push_back(len(rng));
    const EtcMatrix etc(50, 4, entries);
    const std::vector<double> inf(4, std::numeric_limits<double>::infinity());
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pos(50);
        for (double &v : pos)
            v = x(rng);
        EXPECT_EQ(vm_aware_map(pos, etc, inf), decode_position(pos, 4));
    }
}

TEST(VmAwareMap, SingleVm)
{
    const EtcMatrix etc(3, 1, {1, 2, 3});
    EXPECT_EQ(vm_aware_map(std::vector<double>{5.5, -9.1, 0.0}, etc).vm_of, (std::vector<std::size_t>{0, 0, 0}));
}

TEST(VmAwareMap, ArgumentChecks)
{
    const EtcMatrix etc(2, 2, {1, 1, 1, 1});
    EXPECT_THROW(vm_aware_map(std::vector<double>{1.0}, etc), InvalidInput);
    EXPECT_THROW(vm_aware_map(std::vector<double>{1.0, 2.0}, etc, std::vector<double>{1.0}), InvalidInput);
    EXPECT_THROW(capacity_thresholds(etc, CapacityPolicy{0.5}), InvalidInput);
}

TEST(CapacityThresholds, ProportionalShare)
{
    // 600 MI total on VMs of 1000 and 2000 MIPS: share 600 / 3000 = 0.2 s.
    const EtcMatrix etc = build_etc(make_workload(std::vector<double>{100, 200, 300}),
                                    make_fleet(std::vector<double>{1000, 2000}));
    const std::vector<double> t = capacity_thresholds(etc, CapacityPolicy{1.2});
    ASSERT_EQ(t.size(), 2u);
    EXPECT_NEAR(t[0], 0.24, 1e-12);
    EXPECT_NEAR(t[1], 0.24, 1e-12);
}

TEST(VmAwareMap, OnlyReroutesToLeastLoaded)
{
    // Replays the mapping and checks each rerouted task landed on a VM of
    // minimum running load.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> len(100, 1000), x(0, 40);
    std::vector<double> lengths(200);
    for (double &l : lengths)
        l = len(rng);
    const EtcMatrix etc = build_etc(make_workload(lengths), make_fleet(std::vector<double>(4, 1000.0)));
    const std::vector<double> thresholds = capacity_thresholds(etc, {});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> pos(200);
        for (double &v : pos)
            v = x(rng);
        const Assignment raw = decode_position(pos, 4);
        const Assignment mapped = vm_aware_map(pos, etc, thresholds);
        std::vector<double> load(4, 0.0);
        for (std::size_t i = 0; i < 200; ++i) {
            if (mapped.vm_of[i] != raw.vm_of[i]) {
                EXPECT_GT(load[raw.vm_of[i]] + etc(i, raw.vm_of[i]), thresholds[raw.vm_of[i]]);
                EXPECT_EQ(load[mapped.vm_of[i]], *std::min_element(load.begin(), load.end()));
            }
            load[mapped.vm_of[i]] += etc(i, mapped.vm_of[i]);
        }
    }
}

TEST(VmAwareMap, ImprovesMeanCvOnRandomPositions)
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> len(100, 1000);
    std::vector<double> lengths(100);
    for (double &l : lengths)
        l = len(rng);
    const EtcMatrix etc = build_etc(make_workload(lengths), make_fleet(std::vector<double>(4, 1000.0)));
    std::uniform_real_distribution<double> x(0, 4);
    double raw_cv = 0.0, mapped_cv = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> pos(100);
        for (double &v : pos)
            v = x(rng);
        raw_cv += coefficient_of_variation(load_vector(decode_position(pos, 4), etc));
        mapped_cv += coefficient_of_variation(load_vector(vm_aware_map(pos, etc), etc));
    }
    EXPECT_LE(mapped_cv, raw_cv);
}
