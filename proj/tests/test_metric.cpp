#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "bsphere/errors.hpp"
#include "bsphere/experiments.hpp"
#include "bsphere/metric.hpp"

using namespace bsphere;

class MetricFixture : public ::testing::Test {
protected:
    void SetUp() override {
        RandomStream rng(60, 0);
        w = sample_normalized_snake(rng, 1024);
        tol = default_ident_tol(w);
    }
    SnakeTrajectory w;
    double tol = 0.0;
};

TEST_F(MetricFixture, MeshContainsRequiredAnchors) {
    const QuotientMesh mesh = build_mesh(w, 16, tol, {5, 777});
    const ArgMin star = w_star(w);
    EXPECT_TRUE(std::is_sorted(mesh.anchors.begin(), mesh.anchors.end()));
    for (std::size_t g : {std::size_t{0}, std::size_t{1024}, star.index, std::size_t{5}, std::size_t{777}})
        EXPECT_LT(mesh.position(g), mesh.size()) << g;
    EXPECT_EQ(mesh.position(3), mesh.size());
    EXPECT_EQ(mesh.argmin_anchor, star.index);
    EXPECT_LE(mesh.class_count(), mesh.size());
    // 0 and n are the root: tree distance 0
    EXPECT_EQ(mesh.class_of[mesh.position(0)], mesh.class_of[mesh.position(1024)]);
}

TEST_F(MetricFixture, OversizedMeshIsClamped) {
    const QuotientMesh mesh = build_mesh(w, 5000, tol);
    EXPECT_EQ(mesh.size(), 1025u);
}

TEST_F(MetricFixture, EstimateIsBracketedAndSymmetric) {
    const QuotientMesh mesh = build_mesh(w, 128, tol);
    const LabelDistance d(w);
    MeshMetric metric(mesh, d);
    for (std::size_t a = 0; a < mesh.size(); a += 9)
        for (std::size_t b = 0; b < mesh.size(); b += 13) {
            const std::size_t i = mesh.anchors[a], j = mesh.anchors[b];
            const MetricEstimate e = metric.approx_D(i, j);
            ASSERT_LE(e.lower_bound, e.value + 1e-12);
            ASSERT_LE(e.value, e.upper_bound + 1e-12);
            ASSERT_NEAR(e.value, metric.approx_D(j, i).value, 1e-12);
            ASSERT_DOUBLE_EQ(e.upper_bound, d(i, j));
        }
}

TEST_F(MetricFixture, TriangleInequality) {
    const QuotientMesh mesh = build_mesh(w, 64, tol);
    const LabelDistance d(w);
    MeshMetric metric(mesh, d);
    std::vector<std::vector<double>> D(mesh.size());
    for (std::size_t a = 0; a < mesh.size(); ++a) D[a] = metric.from(mesh.anchors[a]);
    for (std::size_t a = 0; a < mesh.size(); ++a)
        for (std::size_t b = 0; b < mesh.size(); ++b)
            for (std::size_t c = 0; c < mesh.size(); c += 5) ASSERT_LE(D[a][b], D[a][c] + D[c][b] + 1e-12);
}

TEST_F(MetricFixture, DistanceToMinimumIsExact) {
    const QuotientMesh mesh = build_mesh(w, 64, tol);
    const ArgMin star = w_star(w);
    for (std::size_t g : mesh.anchors) {
        const MetricEstimate e = approx_D(mesh, w, star.index, g);
        EXPECT_NEAR(e.value, w.tip[g] - star.value, 1e-12);
    }
    EXPECT_THROW(approx_D(mesh, w, 3, 0), ContractError);
}

TEST_F(MetricFixture, LadderIsMonotone) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs{{3, 900}, {100, 600}, {512, 20}, {w_star(w).index, 401}};
    const std::vector<std::size_t> ladder{16, 64, 256, 1025};
    const auto rows = refine_and_compare(w, ladder, pairs, tol);
    ASSERT_EQ(rows.size(), ladder.size() * pairs.size());
    for (std::size_t l = 1; l < ladder.size(); ++l)
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const MetricRow& prev = rows[(l - 1) * pairs.size() + q];
            const MetricRow& cur = rows[l * pairs.size() + q];
            EXPECT_LE(cur.estimate, prev.estimate + 1e-12);
            EXPECT_EQ(cur.i, prev.i);
            EXPECT_EQ(cur.m, ladder[l]);
        }
    EXPECT_THROW(refine_and_compare(w, {64, 16}, pairs, tol), ParameterError);
}

TEST_F(MetricFixture, CsvHeader) {
    std::ostringstream os;
    write_metric_csv(os, {{16, 1, 2, 0.5, 0.75, 1.0}});
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "m,i,j,lower,estimate,upper");
}

TEST(MetricIdentification, ZeroToleranceKeepsDistinctPointsApart) {
    RandomStream rng(61, 0);
    const SnakeTrajectory w = sample_normalized_snake(rng, 256);
    const QuotientMesh loose = build_mesh(w, 257, 10.0);
    EXPECT_EQ(loose.class_count(), 1u);
    const QuotientMesh tight = build_mesh(w, 257, 0.0);
    EXPECT_GT(tight.class_count(), 1u);
}
