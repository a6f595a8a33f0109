#include <gtest/gtest.h>

#include <vector>

#include "visbp/errors.hpp"
#include "visbp/metrics.hpp"
#include "visbp/model.hpp"

using namespace visbp;

namespace {

AssignmentMatrix with_owners(const std::vector<int>& owners, std::size_t k = 1) {
    AssignmentMatrix a(owners.size(), owners.size(), k);
    for (std::size_t j = 0; j < owners.size(); ++j) {
        if (owners[j] >= 0) a.assign(ConsumerId{static_cast<std::size_t>(owners[j])}, PartitionId{j});
    }
    return a;
}

std::vector<std::size_t> ids(const std::vector<PartitionId>& v) {
    std::vector<std::size_t> out;
    for (auto p : v) out.push_back(p.index);
    return out;
}

}  // namespace

TEST(SpeedMapTest, TotalsAndMax) {
    SpeedMap s({0.25, 0.5, 0.0}, 3);
    EXPECT_EQ(s.size(), 3u);
    EXPECT_EQ(s.iteration(), 3u);
    EXPECT_DOUBLE_EQ(s.total(), 0.75);
    EXPECT_DOUBLE_EQ(s.max(), 0.5);
    EXPECT_DOUBLE_EQ(s[PartitionId{1}], 0.5);
}

TEST(SpeedMapTest, ValidationRejectsOversizeAndNegative) {
    EXPECT_NO_THROW(validate_speeds(SpeedMap({0.0, 1.0}, 1), 1.0));
    EXPECT_THROW(validate_speeds(SpeedMap({1.01}, 1), 1.0), InputError);
    EXPECT_THROW(validate_speeds(SpeedMap({-0.1}, 1), 1.0), InputError);
    EXPECT_THROW(validate_speeds(SpeedMap({std::numeric_limits<double>::quiet_NaN()}, 1), 1.0),
                 InputError);
}

TEST(AssignmentMatrixTest, AssignSetsUsage) {
    AssignmentMatrix a(3, 3);
    EXPECT_TRUE(a.is_zero());
    a.assign(ConsumerId{2}, PartitionId{0});
    EXPECT_TRUE(a.used(ConsumerId{2}));
    EXPECT_FALSE(a.used(ConsumerId{0}));
    EXPECT_EQ(a.owner(PartitionId{0}), ConsumerId{2});
    EXPECT_EQ(a.owner(PartitionId{1}), std::nullopt);
    EXPECT_EQ(a.bins_used(), 1u);
}

TEST(AssignmentMatrixTest, OwnerOfDoubleAssignedColumnThrows) {
    AssignmentMatrix a(2, 1);
    a.assign(ConsumerId{0}, PartitionId{0});
    a.assign(ConsumerId{1}, PartitionId{0});
    EXPECT_THROW((void)a.owner(PartitionId{0}), InvariantViolation);
}

TEST(AssignmentMatrixTest, LoadSumsAssignedSpeeds) {
    const auto a = with_owners({0, 0, 1});
    SpeedMap s({0.2, 0.3, 0.4}, 1);
    EXPECT_DOUBLE_EQ(a.load(ConsumerId{0}, s), 0.5);
    EXPECT_DOUBLE_EQ(a.load(ConsumerId{1}, s), 0.4);
}

TEST(ComputeDeltaTest, IdenticalMatricesGiveZero) {
    const auto a = with_owners({0, 1, 1});
    auto b = a;
    b.set_iteration(2);
    EXPECT_TRUE(compute_delta(a, b).is_zero());
}

TEST(ComputeDeltaTest, FirstIterationIsAllArrivals) {
    const AssignmentMatrix zero(4, 4, 0);
    const auto next = with_owners({0, 0, 1, 2});
    const auto d = compute_delta(zero, next);
    for (std::size_t j = 0; j < 4; ++j) {
        int sum = 0, plus = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            sum += d.at(ConsumerId{i}, PartitionId{j});
            plus += d.at(ConsumerId{i}, PartitionId{j}) == 1;
        }
        EXPECT_EQ(sum, 1);
        EXPECT_EQ(plus, 1);
    }
    const auto r = classify_migrations(d);
    EXPECT_EQ(ids(r.arrivals), (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_TRUE(r.rebalanced.empty());
    EXPECT_TRUE(r.departures.empty());
}

TEST(ComputeDeltaTest, MoveFromLastConsumerToFirst) {
    // p0 moves from consumer |B|-1 to consumer 0.
    const auto prev = with_owners({2, 1, 1}, 1);
    const auto next = with_owners({0, 1, 1}, 2);
    const auto d = compute_delta(prev, next);
    EXPECT_EQ(d.at(ConsumerId{0}, PartitionId{0}), 1);
    EXPECT_EQ(d.at(ConsumerId{1}, PartitionId{0}), 0);
    EXPECT_EQ(d.at(ConsumerId{2}, PartitionId{0}), -1);
}

TEST(ComputeDeltaTest, DimensionMismatchThrows) {
    EXPECT_THROW((void)compute_delta(AssignmentMatrix(2, 2), AssignmentMatrix(3, 3)),
                 StructuralError);
}

TEST(ComputeDeltaTest, RoundTripRestoresNext) {
    const auto prev = with_owners({0, 1, 2, 0, -1});
    const auto next = with_owners({1, 1, 0, -1, 3}, 2);
    const auto d = compute_delta(prev, next);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            const int x = prev.assigned(ConsumerId{i}, PartitionId{j}) + d.at(ConsumerId{i}, PartitionId{j});
            EXPECT_EQ(x, next.assigned(ConsumerId{i}, PartitionId{j}) ? 1 : 0);
        }
    }
}

TEST(ClassifyMigrationsTest, ZeroMatrixIsEmpty) {
    const auto r = classify_migrations(DeltaMatrix(3, 3, 1));
    EXPECT_TRUE(r.rebalanced.empty());
    EXPECT_TRUE(r.arrivals.empty());
    EXPECT_TRUE(r.departures.empty());
}

TEST(ClassifyMigrationsTest, MixedColumns) {
    const auto prev = with_owners({0, 1, 2, -1});
    const auto next = with_owners({1, 1, -1, 0}, 2);
    const auto r = classify_migrations(compute_delta(prev, next));
    EXPECT_EQ(ids(r.rebalanced), (std::vector<std::size_t>{0}));
    EXPECT_EQ(ids(r.departures), (std::vector<std::size_t>{2}));
    EXPECT_EQ(ids(r.arrivals), (std::vector<std::size_t>{3}));
}

TEST(ClassifyMigrationsTest, TwoPlusOnesInColumnThrows) {
    DeltaMatrix d(3, 1, 1);
    d.set(ConsumerId{0}, PartitionId{0}, 1);
    d.set(ConsumerId{1}, PartitionId{0}, 1);
    EXPECT_THROW((void)classify_migrations(d), InvariantViolation);
}

TEST(ClassifyMigrationsTest, TwoMinusOnesInColumnThrows) {
    DeltaMatrix d(3, 1, 1);
    d.set(ConsumerId{0}, PartitionId{0}, -1);
    d.set(ConsumerId{2}, PartitionId{0}, -1);
    EXPECT_THROW((void)classify_migrations(d), InvariantViolation);
}

TEST(ValidateAssignmentTest, ExactCapacityPasses) {
    const auto a = with_owners({0});
    EXPECT_TRUE(validate_assignment(a, SpeedMap({1.0}, 1), 1.0).ok());
}

TEST(ValidateAssignmentTest, UncoveredPartitionFailsCoverage) {
    const auto a = with_owners({0, -1});
    const auto r = validate_assignment(a, SpeedMap({0.1, 0.1}, 1), 1.0);
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.coverage_ok);
    EXPECT_TRUE(r.capacity_ok);
    EXPECT_EQ(ids(r.uncovered), (std::vector<std::size_t>{1}));
}

TEST(ValidateAssignmentTest, OverloadedConsumerIsListed) {
    const auto a = with_owners({1, 1, 0});
    const auto r = validate_assignment(a, SpeedMap({0.51, 0.5, 0.2}, 1), 1.0);
    EXPECT_FALSE(r.capacity_ok);
    ASSERT_EQ(r.overloaded.size(), 1u);
    EXPECT_EQ(r.overloaded[0], ConsumerId{1});
    EXPECT_FALSE(r.describe().empty());
}

TEST(ValidateAssignmentTest, DoubleCoverageFails) {
    AssignmentMatrix a(2, 1);
    a.assign(ConsumerId{0}, PartitionId{0});
    a.assign(ConsumerId{1}, PartitionId{0});
    const auto r = validate_assignment(a, SpeedMap({0.1}, 1), 1.0);
    EXPECT_FALSE(r.coverage_ok);
}

TEST(ValidateAssignmentTest, UnmarkedRowFailsUsage) {
    auto a = with_owners({0});
    a.set_used(ConsumerId{0}, false);
    const auto r = validate_assignment(a, SpeedMap({0.1}, 1), 1.0);
    EXPECT_FALSE(r.usage_ok);
}

TEST(RscoreTest, WorkedExampleThreePartitionsAtCapacity) {
    // Three partitions at 100 B/s migrate at k = 2, C = 100 B/s.
    const auto prev = with_owners({0, 0, 1, 1}, 1);
    const auto next = with_owners({1, 2, 0, 1}, 2);
    const SpeedMap s({100, 100, 100, 40}, 2);
    EXPECT_DOUBLE_EQ(rscore(classify_migrations(compute_delta(prev, next)), s, 100.0), 3.0);
}
