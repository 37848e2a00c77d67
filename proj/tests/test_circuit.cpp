#include <doctest.h>

#include <cmath>

#include "qsf/circuit.hpp"
#include "qsf/errors.hpp"
#include "qsf/linalg.hpp"

using namespace qsf;

namespace {

double atoms_over_gamma(const PolySpec& spec, const DensityMatrix& rho) {
    return (poly_function_exact(spec, rho) - spec.const_term()) / spec.gamma();
}

PolySpec negated(const PolySpec& spec) {
    auto m = spec.coefficient_map();
    for (auto& [j, a] : m) a = -a;
    return PolySpec::make(m, spec.const_term(), spec.mode());
}

}  // namespace

TEST_CASE("layout_for") {
    const auto spec = entropy_taylor_spec(5);
    const auto l = layout_for(spec, 2);
    CHECK(l.a_dim == 8);
    CHECK(l.b_copies == 6);
    CHECK(l.total_dim() == 2 * 8 * 64);
    CHECK(layout_for(PolySpec::make({{1, 1.0}, {2, 1.0}}), 2, 2).b_copies == 4);
    CHECK_THROWS_AS(layout_for(spec, 2, 2), CapacityError);
    CHECK_NOTHROW(layout_for(entropy_taylor_spec(6), 2));
    CHECK_THROWS_AS(layout_for(entropy_taylor_spec(8), 2), CapacityError);
    CHECK_THROWS_AS(layout_for(spec, 3), CapacityError);
}

TEST_CASE("simulate_full small examples") {
    const auto rho = random_state(2, 2, 3);
    CHECK(std::abs(expectation_x(simulate_full(PolySpec::make({{1, 1.0}}), rho)) - 1.0) < 1e-12);

    const auto purity = PolySpec::make({{2, 1.0}});
    CHECK(std::abs(expectation_x(simulate_full(purity, random_state(2, 1, 4))) - 1.0) < 1e-10);
    const auto joint = simulate_full(purity, DensityMatrix::maximally_mixed(2));
    CHECK(joint.density.rows() == 16);
    CHECK(std::abs(expectation_x(joint) - 0.5) < 1e-12);
    CHECK(std::abs(expectation_x(joint) - trace_power(DensityMatrix::maximally_mixed(2), 2)) < 1e-12);
}

TEST_CASE("expectation_x matches f/gamma and flips with the signs") {
    const auto s2 = entropy_taylor_spec(2);
    const auto mixed = DensityMatrix::maximally_mixed(2);
    CHECK(s2.gamma() == doctest::Approx(4.0));
    CHECK(std::abs(expectation_x(simulate_full(s2, mixed)) - 0.625 / 4.0) < 1e-12);
    CHECK(std::abs(expectation_x(simulate_full(negated(s2), mixed)) + 0.625 / 4.0) < 1e-12);

    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto rho = random_state(3, 2, seed);
        const auto spec = PolySpec::make({{1, 0.4}, {2, -0.9}, {3, 0.3}});
        CHECK(std::abs(expectation_x(simulate_full(spec, rho)) - atoms_over_gamma(spec, rho)) < 1e-10);
    }
}

TEST_CASE("circuit_unitary is unitary") {
    const auto spec = PolySpec::make({{1, 0.5}, {2, -0.5}, {3, 1.0}});
    const auto u = circuit_unitary(spec, 2, default_prep(spec));
    CHECK((u.adjoint() * u).max_abs_diff(ComplexMatrix::identity(u.rows())) < 1e-12);
}

TEST_CASE("joint_distribution analytic examples") {
    const auto rho = random_state(2, 2, 31);
    const auto d1 = joint_distribution(PolySpec::make({{1, 1.0}}), rho);
    CHECK(d1.p_plus(1) == doctest::Approx(1.0));
    CHECK(d1.p_minus(1) == 0.0);

    const auto spec = entropy_taylor_spec(5);
    const auto dist = joint_distribution(spec, rho);
    for (int j = 1; j <= spec.register_size(); ++j) {
        CHECK(std::abs(dist.marginal(j) - std::abs(spec.alpha(j)) / spec.gamma()) < 1e-14);
    }
    CHECK(std::abs(dist.expectation_x() - atoms_over_gamma(spec, rho)) < 1e-12);

    CHECK_THROWS_AS(JointDistribution({0.5, 0.6}, {0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(JointDistribution({1.1}, {-0.1}), ValidationError);
}

TEST_CASE("full simulation agrees with the analytic distribution") {
    const auto spec = entropy_taylor_spec(5);  // degree 6
    for (std::uint64_t seed = 50; seed < 52; ++seed) {
        const auto rho = random_state(2, 2, seed);
        const auto joint = simulate_full(spec, rho);
        const auto full = joint_distribution(joint);
        CHECK(full.max_abs_diff(joint_distribution(spec, rho)) < 1e-9);
        CHECK(std::abs(expectation_x(joint) - atoms_over_gamma(spec, rho)) < 1e-9);
    }
}

TEST_CASE("measurement order does not change the statistics") {
    const auto spec = PolySpec::make({{1, 0.3}, {2, -0.6}, {3, 0.1}});
    const auto rho = random_state(2, 2, 77);
    const auto joint = simulate_full(spec, rho);
    const auto xz = measure_joint(joint, MeasurementOrder::x_then_z);
    const auto zx = measure_joint(joint, MeasurementOrder::z_then_x);
    CHECK(xz.max_abs_diff(zx) < 1e-12);
    CHECK(xz.max_abs_diff(joint_distribution(spec, rho)) < 1e-10);
}

TEST_CASE("variant mode") {
    const auto unit = PolySpec::make({{1, 1.0}, {2, 0.25}}, 0.0, Mode::variant);
    const auto mixed = DensityMatrix::maximally_mixed(2);

    const auto spec = entropy_taylor_spec(5, Mode::variant);
    const auto rho = random_state(2, 2, 12);
    const double scaled = variant_expectation(spec, rho) * spec.estimator_scale();
    CHECK(std::abs(scaled - poly_function_exact(spec, rho)) < 1e-9);
    CHECK(std::abs(poly_function_exact(spec, rho) - poly_function_exact(entropy_taylor_spec(5), rho)) < 1e-12);

    const auto joint = simulate_full(spec, rho, default_prep(spec));
    CHECK(std::abs(expectation_x(joint) - variant_expectation(spec, rho)) < 1e-10);
    const auto dist = joint_distribution(spec, rho);
    for (int j = 1; j <= spec.register_size(); ++j) CHECK(dist.marginal(j) == doctest::Approx(0.125));
    CHECK(joint_distribution(joint).max_abs_diff(dist) < 1e-9);

    // sin(theta_1) = 1 contributes tr(rho)/n; the second branch adds sin(theta_2) tr(rho^2)/n.
    CHECK(std::abs(variant_expectation(unit, mixed) - (1.0 + 0.25 * 0.5) / 2.0) < 1e-12);
    CHECK_THROWS_AS(variant_expectation(entropy_taylor_spec(2), rho), ArgumentError);
}

TEST_CASE("imperfect preparation weights") {
    const auto spec = PolySpec::make({{1, 0.5}, {2, 0.5}});
    const std::vector<double> atoms{1.0, 0.6};
    const std::vector<double> weights{0.7, 0.3};
    const auto dist = joint_distribution(spec, atoms, weights);
    CHECK(dist.marginal(1) == doctest::Approx(0.7));
    CHECK(dist.p_plus(2) == doctest::Approx(0.3 * 0.8));
    const auto bw = branch_weights(hadamard_prep(2));
    for (double w : bw) CHECK(w == doctest::Approx(0.25));
}

TEST_CASE("product register uses the doubled cycle") {
    const auto spec = PolySpec::make({{1, 0.5}, {2, 0.5}});
    const auto rho = random_state(2, 2, 5);
    const auto sigma = random_state(2, 2, 6);
    const auto joint = simulate_full_product(spec, rho, sigma, default_prep(spec));
    const auto prod = rho.matrix() * sigma.matrix();
    const double t1 = matrix_power_trace(prod, 1).real();
    const double t2 = matrix_power_trace(prod, 2).real();
    CHECK(std::abs(expectation_x(joint) - (0.5 * t1 + 0.5 * t2) / spec.gamma()) < 1e-10);
}
