#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "otx/pipeline.hpp"

using namespace otx;

TEST_CASE("parameter maps")
{
    CHECK(pipeline_eta(0.4, 10) == doctest::Approx(0.04342944819032518).epsilon(1e-15));
    CHECK(pipeline_eps_prime(0.4, 1.0) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("smooth_marginals")
{
    const auto [r, l] = smooth_marginals(make_histogram(Vector{{1.0, 0.0}}), make_histogram(Vector{{1.0, 1.0}}), 0.8);
    CHECK(r[0] == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(r[1] == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(l[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(l[1] == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 gen(3);
    const auto h = Histogram::from_normalized(oracle::random_simplex(gen, 7, 0.0));
    for (double e : {1e-6, 0.01, 1.0, 8.0}) {
        const auto [a, b] = smooth_marginals(h, h, e);
        CHECK(std::abs(a.weights().sum() - 1.0) <= 1e-15);
    }
    CHECK_THROWS_AS(smooth_marginals(h, h, 0.0), Error);
    CHECK_THROWS_AS(smooth_marginals(h, h, 8.5), Error);
}

TEST_CASE("algorithm names")
{
    CHECK(parse_algorithm("APDGCD") == Algorithm::APDGCD);
    CHECK(parse_algorithm("sinkhorn") == Algorithm::Sinkhorn);
    CHECK(algorithm_name(Algorithm::APDRCD) == "apdrcd");
    CHECK_THROWS_AS(parse_algorithm("greenkhorn"), Error);
}

TEST_CASE("monotone coupling oracle")
{
    const Vector s01{{0.0, 1.0}};
    const auto c = monotone_coupling_oracle(s01, make_histogram(Vector{{1.0, 0.0}}),
                                            make_histogram(Vector{{0.0, 1.0}}), 1.0);
    CHECK(c.cost == doctest::Approx(1.0));
    CHECK(c.plan(0, 1) == doctest::Approx(1.0));

    const auto same = make_histogram(Vector{{0.3, 0.3, 0.4}});
    CHECK(monotone_coupling_oracle(Vector{{0.0, 1.0, 2.0}}, same, same, 2.0).cost == doctest::Approx(0.0));

    const Vector s{{0.0, 1.0, 2.0}};
    const auto r = make_histogram(Vector{{0.2, 0.3, 0.5}});
    const auto l = make_histogram(Vector{{0.5, 0.3, 0.2}});
    CHECK(monotone_coupling_oracle(s, r, l, 1.0).cost == doctest::Approx(0.6).epsilon(1e-14));

    std::mt19937_64 gen(10);
    for (int t = 0; t < 10; ++t) {
        Vector sup = oracle::random_vec(gen, 9, 0.0, 1.0);
        std::sort(sup.begin(), sup.end());
        const Vector a = oracle::random_simplex(gen, 9, 0.0);
        const Vector b = oracle::random_simplex(gen, 9, 0.0);
        const auto res = monotone_coupling_oracle(sup, Histogram::from_normalized(a), Histogram::from_normalized(b), 1.0);
        CHECK(res.cost == doctest::Approx(oracle::w1_cdf(sup, a, b)).epsilon(1e-12));
        CHECK(oracle::violation(res.plan.entries(), a, b) <= 1e-14);
    }
    CHECK_THROWS_AS(monotone_coupling_oracle(Vector{{1.0, 0.0}}, same, same, 1.0), Error);
}

TEST_CASE("approximate_ot on the three-point instance")
{
    const Vector s{{0.0, 1.0, 2.0}};
    const auto r = make_histogram(Vector{{0.2, 0.3, 0.5}});
    const auto l = make_histogram(Vector{{0.5, 0.3, 0.2}});
    const auto cost = line_cost(s, 1.0);
    for (Algorithm a : {Algorithm::APDRCD, Algorithm::APDGCD, Algorithm::Sinkhorn}) {
        ApproxConfig cfg;
        cfg.epsilon = 0.4;
        cfg.algorithm = a;
        cfg.seed = 1;
        const auto res = approximate_ot(cost, r, l, cfg);
        CAPTURE(algorithm_name(a));
        CHECK(res.report.status == SolveStatus::Converged);
        CHECK(oracle::violation(res.plan.entries(), r.weights(), l.weights()) <= 1e-12);
        CHECK(res.ot_value <= 0.6 + 0.4);
        CHECK(res.ot_value >= 0.6 - 1e-12);
        CHECK(res.eta == doctest::Approx(0.4 / (4.0 * std::log(3.0))));
        CHECK(res.eps_prime == doctest::Approx(0.4 / 16.0));
    }
}

TEST_CASE("approximate_ot edge cases")
{
    const auto r = make_histogram(Vector{{0.25, 0.75}});
    const auto res = approximate_ot(CostMatrix(Matrix::Zero(2, 2)), r, r, {});
    CHECK(res.ot_value == 0.0);
    CHECK(res.plan.entries().isApprox(r.weights() * r.weights().transpose()));

    const auto one = make_histogram(Vector::Ones(1));
    CHECK_THROWS_AS(approximate_ot(CostMatrix(Matrix::Zero(1, 1)), one, one, {}), Error);
    ApproxConfig bad;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(approximate_ot(CostMatrix(Matrix{{0.0, 1.0}, {1.0, 0.0}}), r, r, bad), Error);
}
