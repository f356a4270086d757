#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "tsallis/parallel.hpp"
#include "tsallis/random.hpp"
#include "tsallis/stats.hpp"

using namespace tsallis;

TEST(Philox, KnownAnswers) {
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::eval({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox4x32::eval({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox4x32::eval({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalStream, DeterministicPerSubstream) {
    NormalStream a(42, 3, 17), b(42, 3, 17), c(42, 3, 18), d(43, 3, 17);
    for (int i = 0; i < 10; ++i) {
        const double x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
        EXPECT_NE(x, d.next());
    }
}

TEST(NormalStream, Moments) {
    constexpr std::size_t N = 200000;
    std::vector<double> x(N), x2(N);
    for (std::size_t i = 0; i < N; ++i) {
        NormalStream s(7, 0, i);
        x[i] = s.next();
        x2[i] = x[i] * x[i];
    }
    const Estimate m = mean_se(x), v = mean_se(x2);
    EXPECT_LT(std::abs(m.value) / m.se, 4.0);
    EXPECT_LT(std::abs(v.value - 1.0) / v.se, 4.0);
}

TEST(NormalStream, UnitIntervalIsOpen) {
    EXPECT_GT(NormalStream::to_unit(0, 0), 0.0);
    EXPECT_LT(NormalStream::to_unit(0xffffffffu, 0xffffffffu), 1.0);
}

TEST(Parallel, SumIndependentOfThreadCount) {
    std::vector<double> x(100003);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(static_cast<double>(i)) * 1e3 + 1e-7 * i;
    set_thread_count(1);
    const double s1 = pairwise_sum(x);
    std::vector<double> blocks1((x.size() + kBlockSize - 1) / kBlockSize);
    parallel_for(x.size(), [&](std::size_t b, std::size_t e) {
        blocks1[b / kBlockSize] = pairwise_sum(std::span<const double>(x.data() + b, e - b));
    });
    set_thread_count(4);
    EXPECT_EQ(pairwise_sum(x), s1);
    std::vector<double> blocks4(blocks1.size());
    parallel_for(x.size(), [&](std::size_t b, std::size_t e) {
        blocks4[b / kBlockSize] = pairwise_sum(std::span<const double>(x.data() + b, e - b));
    });
    EXPECT_EQ(blocks1, blocks4);
    set_thread_count(1);
}

TEST(Parallel, RethrowsLowestBlockException) {
    set_thread_count(3);
    try {
        parallel_for(10 * kBlockSize, [](std::size_t b, std::size_t) {
            if (b >= 3 * kBlockSize) throw std::runtime_error(std::to_string(b / kBlockSize));
        });
        FAIL() << "expected an exception";
    } catch (const std::runtime_error& e) {
        EXPECT_STREQ(e.what(), "3");
    }
    set_thread_count(1);
}

TEST(Stats, MeanAndCombinedSe) {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const Estimate e = mean_se(x);
    EXPECT_DOUBLE_EQ(e.value, 2.5);
    EXPECT_NEAR(e.se, std::sqrt((1.25 * 4.0 / 3.0) / 4.0), 1e-15);
    EXPECT_DOUBLE_EQ(combined_se(3.0, 4.0), 5.0);
}
