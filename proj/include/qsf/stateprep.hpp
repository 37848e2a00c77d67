#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsf/linalg.hpp"

namespace qsf {

enum class PrepKind { exact, pqc, hadamard };

std::string to_string(PrepKind kind);
PrepKind parse_prep_kind(const std::string& text);

// Layered ansatz: each layer applies Ry(angle) to every qubit, then a ring of
// CNOTs (control i, target i+1, the last qubit controls qubit 0). Qubit 0 is
// the most significant bit of the register index.
struct PqcParams {
    std::size_t layers = 1;
    std::size_t qubits = 1;
    std::vector<double> angles;  // layer-major, layers * qubits entries
};

// Unitary V acting on the control register. V|0> is the prepared state.
struct PrepCircuit {
    PrepKind kind = PrepKind::exact;
    std::size_t qubits = 0;
    ComplexMatrix unitary;
    std::optional<PqcParams> params;
    double infidelity = 0.0;  // 1 - |<target|V|0>|^2 when a target is known

    std::size_t dim() const { return unitary.rows(); }
    std::vector<Complex> first_column() const;
};

// Unitary whose first column is the (real, nonnegative, normalized) target.
// The target length must be a power of two.
PrepCircuit exact_prep(std::span<const double> target);

// H^{⊗q}; prepares uniform amplitudes 1/sqrt(2^q).
PrepCircuit hadamard_prep(std::size_t qubits);

// Realizes the PQC as a unitary; infidelity is computed when a target is given.
PrepCircuit pqc_prep(const PqcParams& params, std::span<const double> target = {});

// V(beta)|0...0>; real because the ansatz uses only Ry and CNOT.
std::vector<double> pqc_state(const PqcParams& params);

double state_infidelity(std::span<const double> target, std::span<const double> state);

struct TrainOptions {
    double learning_rate = 0.1;
    int max_iterations = 2000;
    int restarts = 5;
    double target_infidelity = 1e-3;
};

struct TrainResult {
    PqcParams params;
    double infidelity = 1.0;
    int restarts_used = 0;
};

// Gradient descent on 1 - |<target|psi(beta)>|^2 with parameter-shift gradients.
// Throws TrainingError when no restart reaches options.target_infidelity.
TrainResult train_pqc(std::span<const double> target, std::size_t layers, std::uint64_t seed,
                      const TrainOptions& options = {});

// Text format: "layers L", "qubits q", then one angle per line.
PqcParams read_pqc_params(std::istream& in);
void write_pqc_params(std::ostream& out, const PqcParams& params);
PqcParams load_pqc_params(const std::string& path);

}  // namespace qsf
