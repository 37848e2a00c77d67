#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "qsf/errors.hpp"
#include "qsf/rng.hpp"
#include "qsf/states.hpp"

using namespace qsf;

namespace {

// Independent Ginibre draw used only for distribution statistics.
double ginibre_gap(std::uint64_t seed) {
    Rng rng(seed, 7);
    Complex g[2][2];
    for (auto& row : g)
        for (auto& z : row) z = Complex(rng.normal(), rng.normal());
    const double a = std::norm(g[0][0]) + std::norm(g[0][1]);
    const double d = std::norm(g[1][0]) + std::norm(g[1][1]);
    const Complex b = g[0][0] * std::conj(g[1][0]) + g[0][1] * std::conj(g[1][1]);
    const double t = a + d;
    return 2.0 * std::sqrt(0.25 * (a - d) * (a - d) + std::norm(b)) / t;
}

}  // namespace

TEST_CASE("DensityMatrix validation") {
    CHECK_NOTHROW(DensityMatrix(Complex(0.5) * ComplexMatrix::identity(2)));
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(2)), ValidationError);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix(2, 2, {0.5, 0.1, 0.2, 0.5})), ValidationError);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix(2, 2, {1.5, 0.0, 0.0, -0.5})), ValidationError);
    const std::vector<double> p{0.7, 0.3};
    CHECK(DensityMatrix::from_diagonal(p).eigenvalues()[1] == doctest::Approx(0.7));
}

TEST_CASE("random_state") {
    const auto pure = random_state(2, 1, 11);
    CHECK(std::abs(trace_power(pure, 2) - 1.0) < 1e-10);
    CHECK(random_state(3, 2, 5).matrix().max_abs_diff(random_state(3, 2, 5).matrix()) == 0.0);
    CHECK(random_state(3, 2, 5).matrix().max_abs_diff(random_state(3, 2, 6).matrix()) > 0.0);
    CHECK_THROWS_AS(random_state(2, 0, 1), ArgumentError);
    CHECK_THROWS_AS(random_state(2, 3, 1), ArgumentError);

    // Mean eigenvalue gap over 1000 seeds agrees with the duplicate recipe.
    double mine = 0.0;
    double other = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const auto ev = random_state(2, 2, s).eigenvalues();
        mine += ev[1] - ev[0];
        other += ginibre_gap(1'000'000 + s);
    }
    mine /= 1000;
    other /= 1000;
    CHECK(std::abs(mine - other) < 0.05);
}

TEST_CASE("trace_power") {
    const auto mixed = DensityMatrix::maximally_mixed(2);
    CHECK(trace_power(mixed, 4) == doctest::Approx(0.125).epsilon(1e-15));
    const auto pure = random_state(3, 1, 2);
    for (int j = 1; j <= 6; ++j) CHECK(std::abs(trace_power(pure, j) - 1.0) < 1e-10);
    const auto rho = random_state(2, 2, 9);
    const double oracle = qsf::testing::sum_of_powers(hermitian_eig(rho.matrix()).eigenvalues, 5);
    CHECK(std::abs(trace_power(rho, 5) - oracle) < 1e-12);
    CHECK(trace_power(rho, 2) < 1.0);
    CHECK_THROWS_AS(trace_power(rho, 0), ArgumentError);
    const auto powers = trace_powers(rho, 4);
    REQUIRE(powers.size() == 4);
    CHECK(powers[2] == doctest::Approx(trace_power(rho, 3)).epsilon(1e-12));
}

TEST_CASE("von_neumann_entropy") {
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::abs(von_neumann_entropy(random_state(2, 1, 4))) < 1e-9);
    const std::vector<double> p{0.7, 0.3};
    CHECK(von_neumann_entropy(DensityMatrix::from_diagonal(p)) ==
          doctest::Approx(-0.7 * std::log(0.7) - 0.3 * std::log(0.3)).epsilon(1e-14));
}

TEST_CASE("fidelity_exact") {
    const auto rho = random_state(2, 2, 21);
    CHECK(std::abs(fidelity_exact(rho, rho) - 1.0) < 1e-9);
    const std::vector<double> e0{1.0, 0.0};
    const std::vector<double> e1{0.0, 1.0};
    CHECK(fidelity_exact(DensityMatrix::from_diagonal(e0), DensityMatrix::from_diagonal(e1)) == 0.0);

    // Second form: (sum sqrt(eig(rho sigma)))^2 from the non-Hermitian product's 2x2 characteristic polynomial.
    const auto mixed = DensityMatrix::maximally_mixed(2);
    const auto prod = rho.matrix() * mixed.matrix();
    const Complex tr = prod(0, 0) + prod(1, 1);
    const Complex det = prod(0, 0) * prod(1, 1) - prod(0, 1) * prod(1, 0);
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    const double l1 = ((tr + disc) / 2.0).real();
    const double l2 = ((tr - disc) / 2.0).real();
    const double second = std::pow(std::sqrt(std::max(l1, 0.0)) + std::sqrt(std::max(l2, 0.0)), 2);
    CHECK(std::abs(fidelity_exact(rho, mixed) - second) < 1e-10);
    CHECK_THROWS_AS(fidelity_exact(rho, DensityMatrix::maximally_mixed(3)), ArgumentError);
}

TEST_CASE("min_nonzero_eigenvalue") {
    CHECK(min_nonzero_eigenvalue(DensityMatrix::maximally_mixed(2)) == doctest::Approx(0.5));
    const std::vector<double> p{0.9, 0.1};
    CHECK(min_nonzero_eigenvalue(DensityMatrix::from_diagonal(p)) == doctest::Approx(0.1));
    CHECK(min_nonzero_eigenvalue(random_state(4, 1, 3)) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("poly_function_exact and poly_transform_exact") {
    const auto pure = random_state(2, 1, 8);
    CHECK(std::abs(poly_function_exact(PolySpec::make({{2, 1.0}}), pure) - 1.0) < 1e-10);
    const auto rho = random_state(3, 3, 8);
    CHECK(std::abs(poly_function_exact(PolySpec::make({{1, 1.0}}), rho) - 1.0) < 1e-12);
    CHECK(poly_function_exact(entropy_taylor_spec(2), DensityMatrix::maximally_mixed(2)) ==
          doctest::Approx(0.625).epsilon(1e-14));

    CHECK(poly_transform_exact(PolySpec::make({{1, 1.0}}), rho).max_abs_diff(rho.matrix()) < 1e-15);
    CHECK(poly_transform_exact(PolySpec::make({{2, 1.0}}), pure).max_abs_diff(pure.matrix()) < 1e-10);
    const auto spec = PolySpec::make({{1, 0.3}, {2, -1.1}, {4, 0.4}}, 0.7);
    const auto m = poly_transform_exact(spec, rho);
    CHECK(m.is_hermitian(1e-12));
    Complex tr = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) tr += m(i, i);
    CHECK(std::abs(tr.real() - (poly_function_exact(spec, rho) - 0.7)) < 1e-12);
}

TEST_CASE("state text round trip") {
    const auto rho = random_state(3, 2, 77);
    std::stringstream buffer;
    write_state(buffer, rho);
    const auto back = read_state(buffer);
    CHECK(back.matrix().max_abs_diff(rho.matrix()) < 1e-15);

    CHECK(parse_complex("0.5-0.25j") == Complex(0.5, -0.25));
    CHECK(parse_complex("1") == Complex(1.0, 0.0));
    CHECK(parse_complex(format_complex(Complex(-1e-17, 3.5))) == Complex(-1e-17, 3.5));
    CHECK_THROWS_AS(parse_complex("abc"), ParseError);

    std::istringstream short_input("2\n1 0\n");
    CHECK_THROWS_AS(read_state(short_input), ParseError);
}
