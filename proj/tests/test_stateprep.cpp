#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "qsf/coefficients.hpp"
#include "qsf/errors.hpp"
#include "qsf/rng.hpp"
#include "qsf/stateprep.hpp"

using namespace qsf;

namespace {

bool is_unitary(const ComplexMatrix& u, double tol) {
    return (u.adjoint() * u).max_abs_diff(ComplexMatrix::identity(u.rows())) < tol;
}

}  // namespace

TEST_CASE("exact_prep first column") {
    const std::vector<double> e0{1.0, 0.0, 0.0, 0.0};
    const auto p0 = exact_prep(e0);
    CHECK(is_unitary(p0.unitary, 1e-12));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(p0.first_column()[i] - e0[i]) < 1e-15);

    const std::vector<double> uniform(4, 0.5);
    const auto pu = exact_prep(uniform);
    for (const auto& z : pu.first_column()) CHECK(std::abs(z - Complex(0.5)) < 1e-14);
    CHECK(pu.qubits == 2);

    const auto spec = entropy_taylor_spec(6);
    const auto amps = spec.amplitudes();
    const auto pe = exact_prep(amps);
    CHECK(is_unitary(pe.unitary, 1e-12));
    for (int j = 1; j <= spec.register_size(); ++j) {
        const double expected = std::sqrt(std::abs(spec.alpha(j)) / spec.gamma());
        CHECK(std::abs(pe.first_column()[static_cast<std::size_t>(j - 1)] - expected) < 1e-12);
    }
    CHECK(pe.infidelity < 1e-12);

    const std::vector<double> unnormalized{1.0, 1.0};
    CHECK_THROWS_AS(exact_prep(unnormalized), ArgumentError);
    const std::vector<double> odd{1.0, 0.0, 0.0};
    CHECK_THROWS_AS(exact_prep(odd), ArgumentError);
}

TEST_CASE("hadamard_prep is uniform") {
    const auto h = hadamard_prep(3);
    CHECK(is_unitary(h.unitary, 1e-12));
    for (const auto& z : h.first_column()) CHECK(std::abs(z - Complex(1.0 / std::sqrt(8.0))) < 1e-14);
}

TEST_CASE("pqc_state") {
    PqcParams zero{3, 3, std::vector<double>(9, 0.0)};
    const auto s0 = pqc_state(zero);
    CHECK(s0[0] == doctest::Approx(1.0));
    for (std::size_t i = 1; i < s0.size(); ++i) CHECK(s0[i] == 0.0);

    PqcParams flip{1, 1, {std::numbers::pi}};
    const auto s1 = pqc_state(flip);
    const std::vector<double> e1{0.0, 1.0};
    CHECK(state_infidelity(e1, s1) < 1e-14);

    Rng rng(5);
    PqcParams random{4, 3, {}};
    for (int i = 0; i < 12; ++i) random.angles.push_back(2 * std::numbers::pi * rng.uniform());
    const auto s = pqc_state(random);
    double norm = 0.0;
    for (double a : s) norm += a * a;
    CHECK(std::abs(norm - 1.0) < 1e-12);

    // The realized unitary agrees with the statevector.
    const auto prep = pqc_prep(random);
    CHECK(is_unitary(prep.unitary, 1e-12));
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(prep.first_column()[i] - s[i]) < 1e-12);

    PqcParams bad{2, 2, {0.1, 0.2, 0.3}};
    CHECK_THROWS_AS(pqc_state(bad), ArgumentError);
}

TEST_CASE("two-qubit ring entangler on a known input") {
    // Layer Ry(pi) on qubit 0 only: |00> -> |10>, CNOT(0->1) -> |11>, CNOT(1->0) -> |01>.
    PqcParams p{1, 2, {std::numbers::pi, 0.0}};
    const auto s = pqc_state(p);
    CHECK(std::abs(std::abs(s[1]) - 1.0) < 1e-12);
}

TEST_CASE("train_pqc") {
    const std::vector<double> e0{1.0, 0.0, 0.0, 0.0};
    const auto r0 = train_pqc(e0, 1, 3);
    CHECK(r0.infidelity <= 1e-10);

    const std::vector<double> uniform(4, 0.5);
    const auto ru = train_pqc(uniform, 2, 3);
    CHECK(ru.infidelity <= 1e-3);
    CHECK(std::abs(state_infidelity(uniform, pqc_state(ru.params)) - ru.infidelity) < 1e-12);

    // One layer maps Ry products to amplitudes with out[00]*out[10] == out[01]*out[11],
    // so (|00> + |10>)/sqrt(2) is out of reach.
    const std::vector<double> unreachable{std::sqrt(0.5), 0.0, std::sqrt(0.5), 0.0};
    TrainOptions quick;
    quick.max_iterations = 200;
    quick.restarts = 2;
    CHECK_THROWS_AS(train_pqc(unreachable, 1, 3, quick), TrainingError);
}

TEST_CASE("pqc params text round trip") {
    PqcParams p{2, 2, {0.1, -0.2, 0.3, 1e-9}};
    std::stringstream buffer;
    write_pqc_params(buffer, p);
    const auto back = read_pqc_params(buffer);
    CHECK(back.layers == 2);
    CHECK(back.qubits == 2);
    CHECK(back.angles == p.angles);
    std::istringstream bad("qubits 2\n0.1\n");
    CHECK_THROWS_AS(read_pqc_params(bad), ParseError);
    CHECK(parse_prep_kind("hadamard") == PrepKind::hadamard);
    CHECK_THROWS_AS(parse_prep_kind("magic"), ParseError);
}
