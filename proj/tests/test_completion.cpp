#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "nttkit/completion.hpp"
#include "oracles.hpp"

using namespace nttkit;

namespace {

std::shared_ptr<ObservationSet> observe(const DenseTensor& a, const std::vector<MultiIndex>& omega) {
    auto obs = std::make_shared<ObservationSet>();
    obs->shape = a.shape();
    obs->omega = omega;
    obs->values.resize(static_cast<Index>(omega.size()));
    for (std::size_t e = 0; e < omega.size(); ++e) obs->values[static_cast<Index>(e)] = a(omega[e]);
    return obs;
}

} // namespace

TEST(Sampling, DistinctAndReproducible) {
    const Shape shape{4, 5, 3};
    const auto a = sample_omega(shape, 40, 3), b = sample_omega(shape, 40, 3);
    EXPECT_EQ(a, b);
    std::set<MultiIndex> s(a.begin(), a.end());
    EXPECT_EQ(s.size(), 40u);
    for (const auto& idx : a)
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_GE(idx[k], 0);
            EXPECT_LT(idx[k], shape[k]);
        }
    EXPECT_EQ(sample_omega(shape, 60, 1).size(), 60u);
    EXPECT_THROW(sample_omega(shape, 61, 1), DomainError);
}

TEST(Sampling, SplitIsDisjoint) {
    Rng rng(4);
    const auto [om, ga] = sample_split({3, 3, 3}, 20, rng);
    EXPECT_EQ(om.size(), 20u);
    EXPECT_EQ(ga.size(), 7u);
    std::set<MultiIndex> s(om.begin(), om.end());
    for (const auto& g : ga) EXPECT_EQ(s.count(g), 0u);
}

TEST(Sampling, MarginalsAreUniform) {
    const Shape shape(6, 5);
    const Index m = 10000;
    const auto om = sample_omega(shape, m, 17);
    for (std::size_t k = 0; k < shape.size(); ++k) {
        std::vector<Index> count(5, 0);
        for (const auto& idx : om) ++count[static_cast<std::size_t>(idx[k])];
        for (Index c : count) EXPECT_NEAR(static_cast<double>(c), m / 5.0, 0.05 * m / 5.0);
    }
}

TEST(Objective, HandComputedValues) {
    // A = 0, X = e_1 o e_1 on 2x2, Omega = {(0,0),(1,1)}: f = 1/2
    std::vector<Vector> f{Vector::Unit(2, 0), Vector::Unit(2, 0)};
    const NTTPoint x = ntt_svd(TTTensor::rank_one(f), TTRank::ones(2));
    auto obs = observe(DenseTensor(Shape{2, 2}), {{0, 0}, {1, 1}});
    EXPECT_NEAR(completion_objective(obs).cost(x), 0.5, 1e-15);
    auto miss = observe(DenseTensor(Shape{2, 2}), {{0, 1}, {1, 1}});
    EXPECT_NEAR(completion_objective(miss).cost(x), 0.0, 1e-15);
    EXPECT_NEAR(train_error(x, *miss), 0.0, 1e-15);
}

TEST(Objective, GradientEqualsDenseProjection) {
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        const Shape shape{3, 4, 3};
        const PointPtr x = make_point(random_point(shape, TTRank::uniform(3, 2), 50 + t));
        const DenseTensor a = oracle::random_dense(shape, rng);
        auto obs = observe(a, sample_omega(shape, 20, t));
        DenseTensor r(shape);
        const DenseTensor xd = x->full();
        for (const auto& idx : obs->omega) r(idx) = xd(idx) - a(idx);
        const NTTTangent want = project_tangent(x, r);
        const NTTTangent got = completion_objective(obs).grad(x);
        EXPECT_LT(tangent_norm(got - want), 1e-11 * tangent_norm(want));
    }
}

TEST(Objective, GradientMatchesFiniteDifferences) {
    Rng rng(6);
    const Shape shape{3, 3, 3};
    const PointPtr x = make_point(random_point(shape, TTRank::uniform(3, 2), 7));
    auto obs = observe(oracle::random_dense(shape, rng), sample_omega(shape, 15, 8));
    const Objective o = completion_objective(obs);
    const NTTTangent g = o.grad(x), fd = fd_gradient(x, o.cost, 1e-7);
    EXPECT_LT(tangent_norm(g - fd), 1e-5 * tangent_norm(g));
}

TEST(Objective, ModelStepMinimizesAlongLine) {
    Rng rng(7);
    const Shape shape{3, 3, 3};
    const PointPtr x = make_point(random_point(shape, TTRank::uniform(3, 2), 9));
    auto obs = observe(oracle::random_dense(shape, rng), sample_omega(shape, 20, 10));
    const Objective o = completion_objective(obs);
    const NTTTangent v = -o.grad(x);
    const double s = *o.model_step(x, v);
    // the linearized residual is quadratic in s; check stationarity by central differences
    const DenseTensor xd = x->full();
    const Vector vd = oracle::densify(tangent_to_tt(v)).data();
    auto q = [&](double t) {
        double acc = 0;
        for (Index e = 0; e < static_cast<Index>(obs->omega.size()); ++e) {
            const Index l = xd.linear_index(obs->omega[static_cast<std::size_t>(e)]);
            acc += std::norm(xd.data()[l] + t * vd[l] - obs->values[e]);
        }
        return 0.5 * acc;
    };
    const double h = 1e-4 * s;
    EXPECT_LT(std::abs(q(s + h) - q(s - h)), 1e-8 * q(0));
    EXPECT_LT(q(s), q(0));
}

TEST(Objective, NeverDensifiesLargeShapes) {
    // 40^6 entries is far beyond the dense guard; cost and gradient must stay sparse
    const Shape shape(6, 40);
    const NTTPoint truth = random_point(shape, TTRank::uniform(6, 2), 1);
    auto obs = std::make_shared<ObservationSet>();
    obs->shape = shape;
    obs->omega = sample_omega(shape, 500, 2);
    obs->values = tt_gather(truth.left(), obs->omega);
    const PointPtr x = make_point(random_point(shape, TTRank::uniform(6, 2), 3));
    const Objective o = completion_objective(obs);
    EXPECT_TRUE(std::isfinite(o.cost(*x)));
    EXPECT_GT(tangent_norm(o.grad(x)), 0.0);
    EXPECT_THROW(x->full(), SizeGuardError);
}

TEST(Recovery, NoiselessRecoversTruth) {
    RCGConfig cfg;
    cfg.max_iters = 250;
    const Shape shape{8, 8, 8};
    const RecoveryReport rep = recovery_run({shape, TTRank::uniform(3, 2), 200, 0.0, 3, 1e-4}, cfg);
    EXPECT_LT(rep.test_error, 1e-6);
    EXPECT_GE(rep.hit_iteration, 1);
    EXPECT_EQ(rep.test_errors.size(), rep.trace.rows.size());
}

TEST(Recovery, FullyObservedUsesTrainError) {
    RCGConfig cfg;
    cfg.max_iters = 100;
    const RecoveryReport rep = recovery_run({{3, 3, 3}, TTRank::uniform(3, 1), 1000, 0.0, 1, 1e-4}, cfg);
    EXPECT_EQ(rep.test_error, rep.train_error);
    EXPECT_LT(rep.test_error, 1e-8);
    EXPECT_THROW(recovery_run({{3, 3}, TTRank::uniform(2, 1), 4, -1.0, 1, 1e-4}, cfg), DomainError);
}

TEST(Phase, SuccessGrowsWithSamples) {
    RCGConfig cfg;
    cfg.max_iters = 150;
    const auto cells = phase_experiment(3, {8}, {20, 300}, 2, 3, 5, cfg);
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_LE(cells[0].success_fraction, cells[1].success_fraction);
    EXPECT_EQ(cells[1].success_fraction, 1.0);
    EXPECT_EQ(cells[0].test_errors.size(), 3u);
}
