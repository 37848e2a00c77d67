#include <doctest.h>

#include <cmath>

#include "qsf/applications.hpp"
#include "qsf/circuit.hpp"
#include "qsf/errors.hpp"
#include "qsf/linalg.hpp"

using namespace qsf;

TEST_CASE("estimate_entropy on a pure state is exactly zero") {
    const auto pure = random_state(2, 1, 6);
    const auto r = estimate_entropy_fixed(pure, 6, 10000, 1);
    REQUIRE(r.exact_value.has_value());
    CHECK(std::abs(*r.exact_value) < 1e-9);
    CHECK(std::abs(r.estimate) <= 4 * r.std_error + 1e-9);
}

TEST_CASE("estimate_entropy plans from epsilon and delta") {
    const auto mixed = DensityMatrix::maximally_mixed(2);
    const auto r = estimate_entropy(mixed, 0.1, 0.05, 3);
    const int order = entropy_truncation_order(0.1, 0.5);
    CHECK(r.spec_degree == order + 1);
    CHECK(r.shots == shots_for(0.05, 0.05, entropy_taylor_spec(order).gamma()));
    REQUIRE(r.reference_value.has_value());
    CHECK(*r.reference_value == doctest::Approx(std::log(2.0)));
    CHECK(std::abs(r.estimate - std::log(2.0)) <= 0.1);
    CHECK_THROWS_AS(estimate_entropy(mixed, 0.0, 0.05, 3), ArgumentError);
    CHECK_THROWS_AS(estimate_entropy(mixed, 0.1, 1.0, 3), ArgumentError);
    CHECK_THROWS_AS(estimate_entropy_fixed(mixed, 1, 10, 3), ArgumentError);
}

TEST_CASE("fidelity problem atoms") {
    const auto rho = random_state(2, 2, 40);
    const auto sigma = random_state(2, 2, 41);
    const FidelityProblem problem(rho, sigma);
    const auto atoms = problem.product_trace_powers(4);
    const auto prod = rho.matrix() * sigma.matrix();
    for (int k = 1; k <= 4; ++k) {
        const Complex dense = matrix_power_trace(prod, k);
        CHECK(std::abs(dense.real() - atoms[static_cast<std::size_t>(k - 1)]) < 1e-10);
        CHECK(std::abs(dense.imag()) < 1e-10);
        CHECK(atoms[static_cast<std::size_t>(k - 1)] >= -1e-10);
    }
    // Dense permutation oracle for the k = 2 atom on the interleaved register.
    const auto p = cycle_permutation_matrix(4, 4, 2);
    const auto rs = kron_list(std::vector{rho.matrix(), sigma.matrix()});
    const auto both = kron_list(std::vector{rs, rs});
    CHECK(std::abs(trace_of_product(p, both).real() - atoms[1]) < 1e-10);
    CHECK(std::abs(problem.exact_fidelity() - fidelity_exact(rho, sigma)) < 1e-9);
    CHECK(problem.rank() == 2);
}

TEST_CASE("fidelity chain for the chosen degree") {
    const double eps = 0.1;
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
        const auto rho = random_state(2, 2, seed);
        const auto sigma = seed % 2 ? DensityMatrix::maximally_mixed(2) : random_state(2, 2, seed + 100);
        const FidelityProblem problem(rho, sigma);
        const double kappa = problem.min_nonzero();
        if (kappa < 0.2) continue;
        const int degree = sqrt_taylor_degree(eps, kappa);
        const auto r = estimate_fidelity_fixed(problem, degree, 100, 1);
        CHECK(std::abs(r.exact_poly_fidelity - problem.exact_fidelity()) <= eps);
    }
}

TEST_CASE("estimate_fidelity on identical pure states") {
    const auto pure = random_state(2, 1, 9);
    const auto r = estimate_fidelity(pure, pure, 0.1, 0.05, 2);
    CHECK(r.exact_fidelity == doctest::Approx(1.0));
    CHECK(std::abs(r.exact_poly_fidelity - 1.0) < 1e-9);
    CHECK(std::abs(r.root.estimate - 1.0) <= 4 * r.root.std_error + 1e-12);
    CHECK(r.fidelity_clamped <= 1.0);
    CHECK(r.root.copies.expected_per_shot > 0.0);

    // The top eigenvalue of rho sigma may round above 1; planning must still work.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto p = random_state(2, 1, seed);
        CHECK_NOTHROW(estimate_fidelity(p, p, 0.2, 0.1, seed));
    }

    const std::vector<double> e0{1.0, 0.0};
    const std::vector<double> e1{0.0, 1.0};
    CHECK_THROWS_AS(estimate_fidelity(DensityMatrix::from_diagonal(e0), DensityMatrix::from_diagonal(e1), 0.1,
                                      0.05, 2),
                    ApproximationError);
}

TEST_CASE("step indicator counts eigenvalues above the threshold") {
    const std::vector<double> p{0.7, 0.3};
    const auto rho = DensityMatrix::from_diagonal(p);
    const StepFit fit = step_poly_spec(0.5, 16);
    const double o = step_indicator_exact(rho, fit.spec);
    const double direct = fit.spec.evaluate_scalar(0.7) + fit.spec.evaluate_scalar(0.3);
    // The monomial coefficients reach ~1e9, so agreement is limited by cancellation.
    CHECK(std::abs(o - direct) < 1e-6);
    CHECK(o == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("max_eigenvalue with exact probes") {
    const std::vector<double> two{0.7, 0.3};
    const auto r2 = max_eigenvalue(DensityMatrix::from_diagonal(two));
    CHECK(std::abs(r2.beta - 0.7) <= 0.02);
    CHECK_FALSE(r2.degenerate);
    CHECK(r2.history.back().action == "stop");

    const std::vector<double> three{0.6, 0.25, 0.15};
    CHECK(std::abs(max_eigenvalue(DensityMatrix::from_diagonal(three)).beta - 0.6) <= 0.02);

    const std::vector<double> pure{1.0, 0.0};
    const auto rp = max_eigenvalue(DensityMatrix::from_diagonal(pure));
    CHECK(rp.beta > 0.9);

    const auto text = format_trajectory(r2.history);
    CHECK(text.find("1,0.5,") == 0);

    MaxEigOptions bad;
    bad.tol = 0.5;
    CHECK_THROWS_AS(max_eigenvalue(DensityMatrix::from_diagonal(two), bad), ArgumentError);
}

TEST_CASE("max_eigenvalue sampled probes report the unresolved probe") {
    const std::vector<double> two{0.7, 0.3};
    MaxEigOptions opts;
    opts.probes = ProbeKind::sampled;
    opts.shots = 1000;
    opts.seed = 4;
    // The monomial form of the degree-16 step has a gamma near 1e9, so no
    // practical shot count resolves the band and the search must say so.
    try {
        max_eigenvalue(DensityMatrix::from_diagonal(two), opts);
        FAIL("expected SearchError");
    } catch (const SearchError& e) {
        const std::string what = e.what();
        CHECK(what.find("step,beta,o_beta,action") != std::string::npos);
        CHECK(what.find("1,0.5,") != std::string::npos);
    }
}

TEST_CASE("exact-probe brackets keep every band crossing") {
    const std::vector<double> two{0.7, 0.3};
    const std::vector<double> three{0.6, 0.25, 0.15};
    for (const auto& diag : {two, three}) {
        const auto rho = DensityMatrix::from_diagonal(diag);
        const MaxEigOptions opts;
        std::vector<double> in_band;
        for (int i = 1; i < 400; ++i) {
            const double beta = i / 400.0;
            const double o = step_indicator_exact(rho, step_poly_spec(beta, opts.degree).spec);
            if (o >= opts.tol && o <= 1.0 - opts.tol) in_band.push_back(beta);
        }
        REQUIRE_FALSE(in_band.empty());
        const auto r = max_eigenvalue(rho, opts);
        double left = 0.0;
        double right = 1.0;
        for (const auto& s : r.history) {
            if (s.action == "lower_right") right = s.beta;
            if (s.action == "raise_left") left = s.beta;
            for (double b : in_band) {
                CHECK(b >= left);
                CHECK(b <= right);
            }
        }
    }
}
