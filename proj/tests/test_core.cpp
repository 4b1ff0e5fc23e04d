#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "otx/core.hpp"

using namespace otx;

namespace {

Errc code_of(const auto& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected otx::Error");
    return Errc::InvalidArgument;
}

} // namespace

TEST_CASE("make_histogram normalizes")
{
    auto h = make_histogram(Vector{{2.0, 2.0}});
    CHECK(h[0] == doctest::Approx(0.5));
    CHECK(h[1] == doctest::Approx(0.5));

    h = make_histogram(Vector{{1.0, 0.0, 0.0}});
    CHECK(h[0] == 1.0);
    CHECK(h[1] == 0.0);

    h = make_histogram(Vector{{1.0, 2.0, 3.0, 4.0}});
    for (std::size_t i = 0; i < 4; ++i) CHECK(h[i] == doctest::Approx(0.1 * double(i + 1)).epsilon(1e-15));
    CHECK(h.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("make_histogram rejects bad input")
{
    CHECK(code_of([] { make_histogram(Vector{}); }) == Errc::EmptyVector);
    CHECK(code_of([] { make_histogram(Vector{{1.0, -0.5}}); }) == Errc::NegativeEntry);
    CHECK(code_of([] { make_histogram(Vector{{1.0, std::nan("")}}); }) == Errc::NonFiniteEntry);
    CHECK_THROWS_AS(make_histogram(Vector{{0.0, 0.0}}), Error);
}

TEST_CASE("from_normalized validates without rescaling")
{
    const auto h = Histogram::from_normalized(Vector{{0.25, 0.75}});
    CHECK(h[1] == 0.75);
    CHECK_THROWS_AS(Histogram::from_normalized(Vector{{0.5, 0.6}}), Error);
    CHECK_THROWS_AS(Histogram::from_normalized(Vector{{1.5, -0.5}}), Error);
}

TEST_CASE("cost and plan validation")
{
    CHECK(code_of([] { CostMatrix(Matrix::Zero(2, 3)); }) == Errc::DimensionMismatch);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = -1.0;
    CHECK(code_of([&] { CostMatrix{bad}; }) == Errc::NegativeEntry);
    CHECK(code_of([&] { TransportPlan{bad}; }) == Errc::NegativeEntry);
    bad(0, 1) = std::numeric_limits<double>::infinity();
    CHECK(code_of([&] { CostMatrix{bad}; }) == Errc::NonFiniteEntry);

    Matrix c{{0.0, 3.0}, {1.0, 0.0}};
    CHECK(CostMatrix(c).max_abs() == 3.0);
}

TEST_CASE("marginals")
{
    auto m = marginals(Matrix(0.5 * Matrix::Identity(2, 2)));
    CHECK(m.row.isApprox(Vector{{0.5, 0.5}}));
    CHECK(m.col.isApprox(Vector{{0.5, 0.5}}));

    m = marginals(TransportPlan(Matrix{{0.2, 0.3}, {0.1, 0.4}}));
    CHECK(m.row[0] == doctest::Approx(0.5));
    CHECK(m.row[1] == doctest::Approx(0.5));
    CHECK(m.col[0] == doctest::Approx(0.3));
    CHECK(m.col[1] == doctest::Approx(0.7));

    m = marginals(Matrix(Matrix::Zero(3, 3)));
    CHECK(m.row.isZero());
    CHECK(m.col.isZero());
}

TEST_CASE("marginal_violation")
{
    const auto r = make_histogram(Vector{{0.3, 0.7}});
    Matrix diag = Matrix::Zero(2, 2);
    diag.diagonal() = r.weights();
    CHECK(marginal_violation(TransportPlan(diag), r, r) == 0.0);

    const auto half = make_histogram(Vector{{1.0, 1.0}});
    CHECK(marginal_violation(TransportPlan(Matrix{{1.0, 0.0}, {0.0, 0.0}}), half, half) == doctest::Approx(2.0));

    std::mt19937_64 gen(7);
    for (int t = 0; t < 5; ++t) {
        const Matrix x = oracle::random_mat(gen, 5, 0.0, 0.1);
        const Vector a = oracle::random_simplex(gen, 5);
        const Vector b = oracle::random_simplex(gen, 5);
        CHECK(marginal_violation(x, a, b) == doctest::Approx(oracle::violation(x, a, b)).epsilon(1e-13));
    }
    CHECK(code_of([] { marginal_violation(Matrix(Matrix::Zero(2, 2)), Vector::Zero(3), Vector::Zero(2)); }) ==
          Errc::DimensionMismatch);
}

TEST_CASE("ot_objective")
{
    std::mt19937_64 gen(11);
    const Matrix x = oracle::random_mat(gen, 4, 0.0, 1.0);
    CHECK(ot_objective(CostMatrix(Matrix::Zero(4, 4)), x) == 0.0);
    CHECK(ot_objective(CostMatrix(Matrix{{0.0, 1.0}, {1.0, 0.0}}), Matrix(0.5 * Matrix::Identity(2, 2))) == 0.0);

    const Matrix c = oracle::random_mat(gen, 4, 0.0, 2.0);
    double expect = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) expect += c(i, j) * x(i, j);
    CHECK(ot_objective(CostMatrix(c), TransportPlan(x)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("error messages carry the code name")
{
    try {
        make_histogram(Vector{});
    } catch (const Error& e) {
        CHECK(std::string(e.what()).rfind("EmptyVector", 0) == 0);
    }
}
