#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "wsansim/channel.hpp"
#include "wsansim/rng.hpp"

using namespace wsansim;
using Catch::Matchers::WithinAbs;

namespace {

LossTable two_distance_table() {
    return LossTable(LossTable::Entries{{2.0, {0.1}}, {10.0, {0.9}}});
}

MobilityProfile approach_profile() {
    return MobilityProfile({{0.0, 16.0, 5.0}, {16.0, 20.0, 10.0}});
}

} // namespace

TEST_CASE("splitmix64 matches the published reference sequence") {
    // First five outputs for seed 1234567, as listed in the generator's
    // public test vectors.
    SplitMix64 rng(1234567);
    REQUIRE(rng.next_u64() == UINT64_C(6457827717110365317));
    REQUIRE(rng.next_u64() == UINT64_C(3203168211198807973));
    REQUIRE(rng.next_u64() == UINT64_C(9817491932198370423));
    REQUIRE(rng.next_u64() == UINT64_C(4593380528125082431));
    REQUIRE(rng.next_u64() == UINT64_C(16408922859458223821));

    SplitMix64 zero(0);
    REQUIRE(zero.next_u64() == UINT64_C(16294208416658607535));
}

TEST_CASE("unit draws are the high 53 bits scaled into [0, 1)") {
    SplitMix64 rng(1);
    SplitMix64 twin(1);
    const std::uint64_t raw = twin.next_u64();
    const double expected = static_cast<double>(raw >> 11) * 0x1.0p-53;
    REQUIRE(rng.next_unit() == expected);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.next_unit();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
    }
}

TEST_CASE("loss table validation") {
    REQUIRE_THROWS_AS(LossTable(LossTable::Entries{}), ValidationError);
    REQUIRE_THROWS_AS(LossTable(LossTable::Entries{{-1.0, {0.5}}}), ValidationError);
    REQUIRE_THROWS_AS(LossTable(LossTable::Entries{{5.0, {}}}), ValidationError);
    REQUIRE_THROWS_AS(LossTable(LossTable::Entries{{5.0, {1.5}}}), ValidationError);
    REQUIRE_THROWS_AS(LossTable(LossTable::Entries{{5.0, {-0.1}}}), ValidationError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(LossTable(LossTable::Entries{{nan, {0.5}}}), ValidationError);
}

TEST_CASE("nearest distance lookup, ties toward the smaller key") {
    const LossTable table = two_distance_table();
    REQUIRE(table.nearest_distance(0.0) == 2.0);
    REQUIRE(table.nearest_distance(2.0) == 2.0);
    REQUIRE(table.nearest_distance(5.9) == 2.0);
    REQUIRE(table.nearest_distance(6.0) == 2.0); // midpoint tie
    REQUIRE(table.nearest_distance(6.1) == 10.0);
    REQUIRE(table.nearest_distance(100.0) == 10.0);

    // Total over arbitrary non-negative queries.
    SplitMix64 rng(5);
    for (int i = 0; i < 200; ++i) {
        const double d = 50.0 * rng.next_unit();
        const double key = table.nearest_distance(d);
        REQUIRE((key == 2.0 || key == 10.0));
    }
}

TEST_CASE("mobility profile validation") {
    REQUIRE_THROWS_AS(MobilityProfile({}), ValidationError);
    // must start at t = 0
    REQUIRE_THROWS_AS(MobilityProfile({{1.0, 2.0, 5.0}}), ValidationError);
    // empty segment
    REQUIRE_THROWS_AS(MobilityProfile({{0.0, 0.0, 5.0}}), ValidationError);
    // gap between segments
    REQUIRE_THROWS_AS(MobilityProfile({{0.0, 1.0, 5.0}, {1.5, 2.0, 5.0}}), ValidationError);
    // overlap
    REQUIRE_THROWS_AS(MobilityProfile({{0.0, 2.0, 5.0}, {1.0, 3.0, 5.0}}), ValidationError);
    // negative distance
    REQUIRE_THROWS_AS(MobilityProfile({{0.0, 1.0, -5.0}}), ValidationError);
}

TEST_CASE("distance over time follows half-open segments") {
    const MobilityProfile profile = approach_profile();
    REQUIRE(profile.end_time() == 20.0);
    REQUIRE(distance_at(profile, 0.0) == 5.0);
    REQUIRE(distance_at(profile, 15.999) == 5.0);
    REQUIRE(distance_at(profile, 16.0) == 10.0);
    REQUIRE(distance_at(profile, 19.99) == 10.0);
    REQUIRE_THROWS_AS(distance_at(profile, 20.0), ValidationError);
    REQUIRE_THROWS_AS(distance_at(profile, -0.01), ValidationError);
    REQUIRE(profile.segment_index(7.0) == 0);
    REQUIRE(profile.segment_index(16.0) == 1);
}

TEST_CASE("sampled rates are members of the stored set") {
    const LossTable table = embedded_10m_table();
    const auto& samples = table.entries().at(10.0);
    SplitMix64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const double rate = sample_loss_rate(table, 10.0, rng);
        REQUIRE(std::find(samples.begin(), samples.end(), rate) != samples.end());
    }
}

TEST_CASE("a single-sample distance always yields that sample and one draw") {
    const LossTable table(LossTable::Entries{{5.0, {0.05}}});
    SplitMix64 rng(3);
    SplitMix64 twin(3);
    twin.next_u64(); // the selection draw
    const std::uint64_t expected_next = twin.next_u64();
    REQUIRE(sample_loss_rate(table, 5.0, rng) == 0.05);
    REQUIRE(rng.next_u64() == expected_next);
}

TEST_CASE("selection over a sample set is close to uniform") {
    // 15 distinct synthetic rates so each value identifies its slot.
    LossTable::Entries entries;
    std::vector<double> rates;
    for (int i = 1; i <= 15; ++i) rates.push_back(0.01 * i);
    entries[10.0] = rates;
    const LossTable table(std::move(entries));

    std::map<double, int> counts;
    SplitMix64 rng(2024);
    const int n = 15000;
    for (int i = 0; i < n; ++i) counts[sample_loss_rate(table, 10.0, rng)]++;

    // three-sigma band around n/15 for a binomial with p = 1/15
    const double expected = n / 15.0;
    const double band = 3.0 * std::sqrt(n * (1.0 / 15.0) * (14.0 / 15.0));
    REQUIRE(counts.size() == 15);
    for (const auto& [rate, count] : counts) {
        INFO("rate " << rate << " count " << count);
        REQUIRE(std::abs(count - expected) <= band);
    }
}

TEST_CASE("loss decisions follow the rate") {
    SplitMix64 rng(17);
    for (int i = 0; i < 100; ++i) {
        REQUIRE_FALSE(packet_lost(0.0, rng));
        REQUIRE(packet_lost(1.0, rng));
    }
    int lost = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) lost += packet_lost(0.5, rng) ? 1 : 0;
    const double freq = static_cast<double>(lost) / n;
    REQUIRE(freq > 0.47);
    REQUIRE(freq < 0.53);

    REQUIRE_THROWS_AS(packet_lost(-0.1, rng), ValidationError);
    REQUIRE_THROWS_AS(packet_lost(1.1, rng), ValidationError);
    REQUIRE_THROWS_AS(packet_lost(std::numeric_limits<double>::quiet_NaN(), rng), ValidationError);
}

TEST_CASE("channel draws are reproducible per seed") {
    const LossTable table = embedded_10m_table();
    std::vector<double> first, second;
    for (int pass = 0; pass < 2; ++pass) {
        SplitMix64 rng(77);
        auto& out = pass == 0 ? first : second;
        for (int i = 0; i < 50; ++i) {
            const double rate = sample_loss_rate(table, 10.0, rng);
            out.push_back(rate);
            out.push_back(packet_lost(rate, rng) ? 1.0 : 0.0);
        }
    }
    REQUIRE(first == second);
}

TEST_CASE("per-distance summary") {
    const LossTable table({{10.0, {0.1, 0.2, 0.3}}, {5.0, {0.05}}});
    const std::vector<DistanceStats> stats = summarize(table);
    REQUIRE(stats.size() == 2);
    REQUIRE(stats[0].distance == 5.0);
    REQUIRE(stats[0].count == 1);
    REQUIRE_THAT(stats[0].mean, WithinAbs(0.05, 1e-15));
    REQUIRE(stats[1].distance == 10.0);
    REQUIRE(stats[1].count == 3);
    REQUIRE_THAT(stats[1].mean, WithinAbs(0.2, 1e-15));
    REQUIRE_THAT(stats[1].min, WithinAbs(0.1, 1e-15));
    REQUIRE_THAT(stats[1].max, WithinAbs(0.3, 1e-15));
}

TEST_CASE("embedded 10 m sample set") {
    const LossTable table = embedded_10m_table();
    REQUIRE(table.entries().size() == 1);
    const auto& samples = table.entries().at(10.0);
    REQUIRE(samples.size() == 15);
    const std::vector<DistanceStats> stats = summarize(table);
    REQUIRE_THAT(stats[0].mean, WithinAbs(0.5464866666666667, 1e-12));
    REQUIRE_THAT(stats[0].min, WithinAbs(0.1358, 1e-15));
    REQUIRE_THAT(stats[0].max, WithinAbs(0.9259, 1e-15));
    REQUIRE(table.meta().power_dbm.has_value());
    REQUIRE_THAT(*table.meta().power_dbm, WithinAbs(0.0, 0.0));
}
