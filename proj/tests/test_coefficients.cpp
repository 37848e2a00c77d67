#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "helpers.hpp"
#include "qsf/coefficients.hpp"
#include "qsf/errors.hpp"
#include "qsf/states.hpp"

using namespace qsf;

namespace {

void check_mode_invariants(const PolySpec& spec) {
    double sum = 0.0;
    double max = 0.0;
    for (double a : spec.alphas()) {
        sum += std::abs(a);
        max = std::max(max, std::abs(a));
    }
    if (spec.mode() == Mode::standard) {
        CHECK(spec.gamma() == doctest::Approx(sum).epsilon(1e-14));
        for (int j = 1; j <= spec.register_size(); ++j) {
            const double a = spec.alpha(j);
            const double expected = a > 0 ? std::numbers::pi / 2 : (a < 0 ? -std::numbers::pi / 2 : 0.0);
            CHECK(spec.theta(j) == expected);
        }
    } else {
        CHECK(spec.gamma() == max);
        for (int j = 1; j <= spec.register_size(); ++j) {
            CHECK(std::abs(spec.alpha(j) / spec.gamma()) <= 1.0);
            CHECK(std::abs(std::sin(spec.theta(j)) * spec.gamma() - spec.alpha(j)) < 1e-12);
        }
    }
    const int n = spec.register_size();
    CHECK((n & (n - 1)) == 0);
    CHECK(n >= spec.degree());
    CHECK(n < 2 * spec.degree() + 1);
}

}  // namespace

TEST_CASE("PolySpec construction and padding") {
    const auto spec = PolySpec::make({{1, 0.5}, {3, -0.25}}, 0.1);
    CHECK(spec.degree() == 3);
    CHECK(spec.register_size() == 4);
    CHECK(spec.control_qubits() == 2);
    CHECK(spec.alpha(4) == 0.0);
    CHECK(spec.gamma() == doctest::Approx(0.75));
    CHECK(spec.branch_probability(1) == doctest::Approx(2.0 / 3.0));
    CHECK(spec.branch_probability(2) == 0.0);
    check_mode_invariants(spec);
    check_mode_invariants(spec.with_mode(Mode::variant));
    CHECK(spec.with_mode(Mode::variant).estimator_scale() == doctest::Approx(4 * 0.5));

    CHECK_THROWS_AS(PolySpec::make({{1, 0.0}}), ArgumentError);
    CHECK_THROWS_AS(PolySpec::make({{0, 1.0}}), ArgumentError);
    CHECK(PolySpec::make({{1, 1.0}}).register_size() == 1);
}

TEST_CASE("zero padding never changes the polynomial value") {
    const auto rho = random_state(3, 3, 8);
    const auto a = PolySpec::make({{1, 0.3}, {2, -0.7}, {3, 0.2}});
    const auto b = PolySpec::make({{1, 0.3}, {2, -0.7}, {3, 0.2}, {4, 0.0}, {7, 0.0}});
    CHECK(b.register_size() == 4);
    CHECK(poly_function_exact(a, rho) == poly_function_exact(b, rho));
}

TEST_CASE("entropy_taylor_spec small orders") {
    const auto s1 = entropy_taylor_spec(1);
    CHECK(s1.degree() == 2);
    CHECK(s1.alpha(1) == 1.0);
    CHECK(s1.alpha(2) == -1.0);
    CHECK(s1.const_term() == 0.0);

    const auto s2 = entropy_taylor_spec(2);
    CHECK(s2.alpha(1) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(s2.alpha(2) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(s2.alpha(3) == doctest::Approx(0.5).epsilon(1e-15));
    check_mode_invariants(s2);
    check_mode_invariants(entropy_taylor_spec(6, Mode::variant));

    CHECK_THROWS_AS(entropy_taylor_spec(0), ArgumentError);
    CHECK_THROWS_AS(entropy_taylor_spec(61), ArithmeticError);
    CHECK_NOTHROW(entropy_taylor_spec(60));
}

TEST_CASE("entropy_taylor_spec matches the direct matrix series") {
    const auto mixed = DensityMatrix::maximally_mixed(2);
    CHECK(std::abs(poly_function_exact(entropy_taylor_spec(6), mixed) -
                   qsf::testing::entropy_series_direct(mixed, 6)) < 1e-12);
    for (int order : {1, 3, 7, 12, 20}) {
        for (std::size_t d : {2u, 3u, 4u}) {
            const auto rho = random_state(d, d, 40 + order * 7 + d);
            CHECK(std::abs(poly_function_exact(entropy_taylor_spec(order), rho) -
                           qsf::testing::entropy_series_direct(rho, order)) < 1e-10);
        }
    }
}

TEST_CASE("entropy_truncation_order") {
    CHECK(entropy_truncation_order(0.1, 0.5) == 6);
    CHECK(entropy_truncation_order(0.1, 0.9) == 6);  // clamps to 1/2
    int previous = 1 << 30;
    for (double kappa = 0.05; kappa <= 0.5; kappa += 0.05) {
        const int n = entropy_truncation_order(0.1, kappa);
        CHECK(n <= previous);
        previous = n;
    }
    CHECK_THROWS_AS(entropy_truncation_order(0.0, 0.5), ArgumentError);
    CHECK_THROWS_AS(entropy_truncation_order(0.1, 0.0), ArgumentError);
}

TEST_CASE("sqrt_taylor_spec coefficients") {
    const auto s1 = sqrt_taylor_spec(1);
    CHECK(s1.const_term() == doctest::Approx(0.5));
    CHECK(s1.alpha(1) == doctest::Approx(0.5));
    CHECK(s1.evaluate_scalar(1.0) == doctest::Approx(1.0).epsilon(1e-15));

    const auto s2 = sqrt_taylor_spec(2);
    CHECK(s2.const_term() == doctest::Approx(3.0 / 8.0).epsilon(1e-15));
    CHECK(s2.alpha(1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(s2.alpha(2) == doctest::Approx(-0.125).epsilon(1e-15));

    for (int n = 1; n <= 30; ++n) {
        const auto s = sqrt_taylor_spec(n);
        double total = s.const_term();
        for (double a : s.alphas()) total += a;
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("sqrt Taylor error is monotone in the degree for kappa >= 0.2") {
    for (double kappa : {0.2, 0.35, 0.6}) {
        double previous = 1e9;
        for (int n = 1; n <= 40; ++n) {
            const double err = sqrt_taylor_max_error(n, kappa);
            // Below ~1e-6 the monomial evaluation hits its rounding floor.
            if (previous > 1e-6) CHECK(err <= previous);
            else CHECK(err < 1e-6);
            previous = err;
        }
    }
    const int n = sqrt_taylor_degree(0.1, 0.2);
    CHECK(sqrt_taylor_max_error(n, 0.2) <= 0.025);
    CHECK(sqrt_taylor_max_error(n - 1, 0.2) > 0.025);
    CHECK_THROWS_AS(sqrt_taylor_degree(1e-6, 1e-4), ApproximationError);
}

TEST_CASE("step_poly_spec examples") {
    const StepFit fit = step_poly_spec(0.5, 16);
    CHECK(fit.steepness == 64.0);
    CHECK(std::abs(fit.spec.evaluate_scalar(0.5) - 0.5) <= fit.residual);
    CHECK(std::abs(fit.spec.evaluate_scalar(1.0) - 1.0) <= 0.05);
    CHECK(std::abs(fit.spec.evaluate_scalar(0.1)) <= 0.05);
    CHECK(fit.residual <= kDefaultStepResidualLimit);

    CHECK_THROWS_AS(step_poly_spec(0.0, 16), ArgumentError);
    CHECK_THROWS_AS(step_poly_spec(0.5, 3), ArgumentError);
    // A very steep logistic cannot be fitted at low degree.
    CHECK_THROWS_AS(step_poly_spec(0.5, 4, 200.0), ApproximationError);
}

TEST_CASE("shots_for") {
    CHECK(shots_for(1.0, 2.0 / std::exp(2.0), 1.0) == 4);
    CHECK(shots_for(2.5, 2.0 / std::exp(2.0), 2.5) == 4);
    const auto base = shots_for(0.1, 0.05, 3.0);
    const auto half_eps = shots_for(0.05, 0.05, 3.0);
    const auto double_gamma = shots_for(0.1, 0.05, 6.0);
    CHECK(std::llabs(static_cast<long long>(half_eps) - 4 * static_cast<long long>(base)) <= 4);
    CHECK(std::llabs(static_cast<long long>(double_gamma) - 4 * static_cast<long long>(base)) <= 4);
    CHECK_THROWS_AS(shots_for(0.1, 1.0, 1.0), ArgumentError);
}

TEST_CASE("spec text round trip") {
    const auto spec = PolySpec::make({{1, 0.25}, {2, -1.0 / 3.0}, {5, 1e-7}}, 0.125, Mode::variant);
    std::stringstream buffer;
    write_spec(buffer, spec);
    const auto back = read_spec(buffer);
    CHECK(back.mode() == Mode::variant);
    CHECK(back.const_term() == spec.const_term());
    CHECK(back.degree() == 5);
    for (int j = 1; j <= spec.register_size(); ++j) CHECK(back.alpha(j) == spec.alpha(j));

    std::istringstream with_comments("# purity\nmode standard\n2 1.0  # tr rho^2\n");
    const auto purity = read_spec(with_comments);
    CHECK(purity.degree() == 2);
    CHECK(purity.alpha(2) == 1.0);

    std::istringstream dup("1 0.5\n1 0.5\n");
    CHECK_THROWS_AS(read_spec(dup), ParseError);
    std::istringstream bad_mode("mode sideways\n1 1\n");
    CHECK_THROWS_AS(read_spec(bad_mode), ParseError);
    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(read_spec(empty), ParseError);
}
