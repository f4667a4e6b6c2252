#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "helpann/error.hpp"
#include "helpann/metric.hpp"
#include "oracles.hpp"

using namespace helpann;

namespace {

AttributeRow attrs(std::initializer_list<AttributeValue> v) {
    AttributeRow r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) r(i++) = x;
    return r;
}

MaskRow mask(std::initializer_list<int> v) {
    MaskRow r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (auto x : v) r(i++) = static_cast<std::uint8_t>(x);
    return r;
}

SampleStats stats(double sv, double sa) {
    SampleStats s;
    s.avg_feature_distance = sv;
    s.avg_attribute_distance = sa;
    s.sample_size = 1000;
    return s;
}

}  // namespace

TEST(MapAttributes, PositionalMapping) {
    AttributeSchema schema({{"red", "green", "blue"}});
    EXPECT_EQ(map_attributes({{"green"}}, schema)(0, 0), 2u);
    const auto m = map_attributes({{"blue"}, {"blue"}}, schema);
    EXPECT_EQ(m.row(0), m.row(1));
    try {
        map_attributes({{"purple"}}, schema);
        FAIL() << "expected MappingError";
    } catch (const MappingError& e) {
        EXPECT_NE(std::string(e.what()).find("purple"), std::string::npos);
    }
}

TEST(MapAttributes, EqualityIsPreserved) {
    AttributeSchema schema({{"a", "b", "c"}, {"x", "y"}});
    const RawLabelMatrix raw{{"a", "x"}, {"c", "y"}, {"a", "y"}, {"c", "y"}};
    const auto m = map_attributes(raw, schema);
    for (std::size_t i = 0; i < raw.size(); ++i)
        for (std::size_t j = 0; j < raw.size(); ++j)
            for (std::size_t d = 0; d < 2; ++d)
                EXPECT_EQ(raw[i][d] == raw[j][d], m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) ==
                                                      m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(d)));
}

TEST(AttributeSchema, RejectsEmptyDictionaries) {
    EXPECT_THROW(AttributeSchema(std::vector<std::vector<std::string>>{{}}), ArgumentError);
    EXPECT_THROW(AttributeSchema(std::vector<std::vector<std::string>>{{"a", "a"}}), ArgumentError);
}

TEST(AttributeDistance, Examples) {
    EXPECT_EQ(attribute_distance(attrs({1, 2, 3}), attrs({1, 2, 3})), 0.0);
    EXPECT_EQ(attribute_distance(attrs({1, 2, 3}), attrs({2, 2, 1})), 3.0);
    EXPECT_THROW(attribute_distance(attrs({1, 2}), attrs({1, 2, 3})), ArgumentError);
}

TEST(AttributeDistance, DominatesHammingAndEuclidean) {
    std::mt19937 rng(1);
    std::uniform_int_distribution<AttributeValue> v(1, 9);
    std::uniform_int_distribution<int> len(1, 8);
    int checked = 0;
    while (checked < 10000) {
        const int l = len(rng);
        AttributeRow a(l), b(l);
        for (int i = 0; i < l; ++i) a(i) = v(rng), b(i) = v(rng);
        if (a == b) continue;
        ++checked;
        oracle::IVec oa(a.data(), a.data() + l), ob(b.data(), b.data() + l);
        const double man = attribute_distance(a, b);
        ASSERT_EQ(man, oracle::manhattan(oa, ob));
        ASSERT_GE(man, oracle::hamming(oa, ob));
        ASSERT_GE(man, oracle::attr_euclid(oa, ob));
    }
}

TEST(AttributeDistanceMasked, Reductions) {
    EXPECT_EQ(attribute_distance_masked(attrs({1, 2, 3}), attrs({3, 2, 9}), mask({1, 0, 0})), 2.0);
    EXPECT_EQ(attribute_distance_masked(attrs({1, 2, 3}), attrs({3, 2, 9}), mask({0, 0, 0})), 0.0);
    std::mt19937 rng(2);
    std::uniform_int_distribution<AttributeValue> v(1, 5);
    for (int t = 0; t < 1000; ++t) {
        AttributeRow a(4), b(4);
        for (int i = 0; i < 4; ++i) a(i) = v(rng), b(i) = v(rng);
        EXPECT_EQ(attribute_distance_masked(a, b, mask({1, 1, 1, 1})), attribute_distance(a, b));
        EXPECT_EQ(attribute_distance_masked(a, b, mask({0, 0, 0, 0})), 0.0);
    }
    EXPECT_THROW(attribute_distance_masked(attrs({1, 2}), attrs({1, 2}), mask({1})), ArgumentError);
}

TEST(FeatureDistance, Examples) {
    FeatureRow a(2), b(2);
    a << 0, 0;
    b << 3, 4;
    EXPECT_EQ(feature_distance(a, a), 0.0);
    EXPECT_EQ(feature_distance(a, b), 5.0);
    FeatureRow c(3);
    EXPECT_THROW(feature_distance(a, c), ArgumentError);
}

TEST(FeatureDistance, SymmetricAndTriangle) {
    const auto f = generate_synthetic(3000, 7, Distribution::Gaussian, 4);
    for (Eigen::Index t = 0; t < 1000; ++t) {
        const auto u = f.row(3 * t), v = f.row(3 * t + 1), w = f.row(3 * t + 2);
        EXPECT_EQ(feature_distance(u, v), feature_distance(v, u));
        EXPECT_LE(feature_distance(u, w), feature_distance(u, v) + feature_distance(v, w) + 1e-12);
        EXPECT_NEAR(feature_distance(u, v), oracle::euclid(oracle::row(f, 3 * t), oracle::row(f, 3 * t + 1)), 1e-12);
    }
}

TEST(NormScale, Examples) {
    EXPECT_NEAR(norm_scale(1862.44), 0.186244, 1e-12);
    EXPECT_NEAR(norm_scale(0.05), 0.5, 1e-12);
    EXPECT_NEAR(norm_scale(0.1), 1.0, 1e-12);
    EXPECT_EQ(norm_scale(1.0), 1.0);
    EXPECT_THROW(norm_scale(-1.0), ArgumentError);
    EXPECT_THROW(norm_scale(0.0), ArgumentError);
}

TEST(NormScale, RangeAndPeriodicity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mant(0.1, 10.0);
    std::uniform_int_distribution<int> ex(-6, 6);
    for (int t = 0; t < 5000; ++t) {
        const double x = mant(rng) * std::pow(10.0, ex(rng));
        const double y = norm_scale(x);
        ASSERT_GT(y, 0.1);
        ASSERT_LE(y, 1.0);
        EXPECT_NEAR(y, oracle::norm(x), 1e-9);
        for (int k : {-3, -1, 1, 2}) EXPECT_NEAR(norm_scale(x * std::pow(10.0, k)), y, 1e-9);
    }
}

TEST(ComputeAlpha, SiftStatistics) {
    const auto cfg = compute_alpha(stats(536.93, 1.67), 1000000, 3);
    const double expected = oracle::alpha(1e6, 536.93, 1.67, 3);
    EXPECT_NEAR(cfg.alpha, expected, 1e-9);
    EXPECT_NEAR(cfg.alpha, 0.743, 0.001);
    EXPECT_NEAR(cfg.alpha, 0.8, 0.1);
    EXPECT_NEAR(cfg.feature_term, 0.186244, 1e-5);
    EXPECT_EQ(cfg.source, AlphaSource::Calibrated);
    EXPECT_EQ(cfg.n_total, 1000000u);
}

TEST(ComputeAlpha, AttributeTermAtIntervalTop) {
    const auto cfg = compute_alpha(stats(536.93, 3.0), 1000000, 3);
    EXPECT_EQ(cfg.attribute_term, 1.0);
}

TEST(ComputeAlpha, DegenerateInputs) {
    EXPECT_THROW(compute_alpha(stats(0.0, 1.0), 100, 3), CalibrationError);
    const auto cfg = compute_alpha(stats(5.0, 0.0), 100, 3);
    EXPECT_EQ(cfg.attribute_term, 0.0);
    EXPECT_EQ(cfg.alpha, norm_scale(20.0));
    EXPECT_FALSE(cfg.warning.empty());
}

TEST(ManualAlpha, RecordsOverride) {
    const auto cfg = manual_alpha(0.8, stats(1, 1), 10, 2);
    EXPECT_EQ(cfg.alpha, 0.8);
    EXPECT_EQ(cfg.source, AlphaSource::Manual);
    EXPECT_THROW(manual_alpha(0.0, stats(1, 1), 10, 2), ArgumentError);
}

TEST(AutoDistance, Arithmetic) {
    EXPECT_EQ(fuse(10, 0, 0.8), 10.0);
    EXPECT_NEAR(fuse(10, 2, 0.8), 35.0, 1e-12);

    FeatureRow node(2), qf(2);
    node << 0, 0;
    qf << 6, 8;
    const auto cfg = manual_alpha(0.8, stats(1, 1), 10, 2);
    Query q{qf, attrs({1, 3}), std::nullopt};
    EXPECT_NEAR(auto_distance(node, attrs({2, 2}), q, cfg), 35.0, 1e-12);
    q.attributes = attrs({2, 2});
    EXPECT_EQ(auto_distance(node, attrs({2, 2}), q, cfg), 10.0);
}

TEST(AutoDistance, MaskReductionsAreBitExact) {
    const auto d = fixture::synthetic(200, 8, 4, 3, 5);
    const auto cfg = fixture::calibrated(d);
    for (Eigen::Index i = 0; i + 1 < d.features.rows(); ++i) {
        Query q{d.features.row(i + 1), d.attributes.row(i + 1), std::nullopt};
        const double plain = auto_distance(d.features.row(i), d.attributes.row(i), q, cfg);
        q.mask = MaskRow::Ones(4);
        EXPECT_EQ(auto_distance(d.features.row(i), d.attributes.row(i), q, cfg), plain);
        q.mask = MaskRow::Zero(4);
        EXPECT_EQ(auto_distance(d.features.row(i), d.attributes.row(i), q, cfg),
                  feature_distance(d.features.row(i), q.feature));
    }
}

TEST(AutoDistance, SymmetricBetweenNodes) {
    const auto d = fixture::synthetic(300, 6, 3, 4, 6);
    const AutoMetric metric(d, fixture::calibrated(d));
    std::mt19937 rng(1);
    std::uniform_int_distribution<NodeId> pick(0, 299);
    for (int t = 0; t < 2000; ++t) {
        const NodeId a = pick(rng), b = pick(rng);
        EXPECT_EQ(metric.between(a, b), metric.between(b, a));
        const double expected = oracle::fused(oracle::euclid(oracle::row(d.features, a), oracle::row(d.features, b)),
                                              oracle::manhattan(oracle::row(d.attributes, a), oracle::row(d.attributes, b)),
                                              metric.config().alpha);
        EXPECT_NEAR(metric.between(a, b), expected, 1e-9 * (1 + expected));
    }
}

TEST(AutoDistance, UniformAttributesPreserveEuclideanOrder) {
    auto d = fixture::synthetic(400, 5, 3, 3, 7);
    const auto cfg = fixture::calibrated(d);
    std::mt19937 rng(2);
    for (int t = 0; t < 20; ++t) {
        const auto pattern = d.attributes.row(static_cast<Eigen::Index>(rng() % 400)).eval();
        Query q{d.features.row(static_cast<Eigen::Index>(rng() % 400)), pattern, std::nullopt};
        q.attributes(0) = q.attributes(0) % 3 + 1;  // constant offset c for every member
        std::vector<Eigen::Index> members;
        for (Eigen::Index i = 0; i < 400; ++i)
            if (d.attributes.row(i) == pattern) members.push_back(i);
        auto by_auto = members, by_euclid = members;
        std::sort(by_auto.begin(), by_auto.end(), [&](auto a, auto b) {
            return auto_distance(d.features.row(a), d.attributes.row(a), q, cfg) <
                   auto_distance(d.features.row(b), d.attributes.row(b), q, cfg);
        });
        std::sort(by_euclid.begin(), by_euclid.end(), [&](auto a, auto b) {
            return feature_distance(d.features.row(a), q.feature) < feature_distance(d.features.row(b), q.feature);
        });
        EXPECT_EQ(by_auto, by_euclid);
    }
}

TEST(SelectionMargin, Examples) {
    const auto cfg = manual_alpha(0.8, stats(1, 1), 10, 2);
    auto m = selection_margin(0.0, cfg);
    EXPECT_EQ(m.lambda, 0.0);
    EXPECT_EQ(m.threshold_ratio, 1.0);
    m = selection_margin(2.0, cfg);
    EXPECT_NEAR(m.lambda, 2.5, 1e-12);
    EXPECT_NEAR(m.threshold_ratio, 1.0 / 3.5, 1e-12);
    EXPECT_THROW(selection_margin(-1.0, cfg), ArgumentError);
}

TEST(SelectionMargin, AgreesWithFusedOrdering) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> sv(0.01, 100.0), al(0.2, 2.0);
    std::uniform_int_distribution<int> sa(1, 12);
    int disagreements = 0;
    for (int t = 0; t < 10000; ++t) {
        const double mism = sv(rng), match = sv(rng), a = al(rng);
        const double s_a = sa(rng);
        const auto cfg = manual_alpha(a, stats(1, 1), 10, 2);
        const bool by_metric = fuse(mism, s_a, a) < fuse(match, 0.0, a);
        if (by_metric != selection_margin(s_a, cfg).mismatched_outranks(mism, match)) ++disagreements;
    }
    EXPECT_EQ(disagreements, 0);
}
