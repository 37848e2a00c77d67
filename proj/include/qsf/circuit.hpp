#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsf/coefficients.hpp"
#include "qsf/linalg.hpp"
#include "qsf/stateprep.hpp"
#include "qsf/states.hpp"

namespace qsf {

// Registers A' (one qubit), A (n-dim control) and B (copies of the input).
// Global index = (a' * n + a) * b_dim + b, A' most significant.
struct RegisterLayout {
    std::size_t a_dim = 1;
    std::size_t b_local_dim = 2;
    std::size_t b_copies = 1;

    std::size_t b_dim() const;
    std::size_t total_dim() const { return 2 * a_dim * b_dim(); }
};

// Layout for a spec on d-dimensional inputs. Branch j permutes j * copies_per_power
// factors, so B holds degree * copies_per_power factors. Throws CapacityError
// above kMaxSimulationDim.
RegisterLayout layout_for(const PolySpec& spec, std::size_t d, std::size_t copies_per_power = 1);

struct JointState {
    ComplexMatrix density;
    RegisterLayout layout;
};

// P(j, x) for control outcome j in 1..n and X outcome x in {+1, -1}.
class JointDistribution {
public:
    JointDistribution(std::vector<double> p_plus, std::vector<double> p_minus);

    int register_size() const { return static_cast<int>(p_plus_.size()); }
    double p_plus(int j) const { return p_plus_.at(static_cast<std::size_t>(j - 1)); }
    double p_minus(int j) const { return p_minus_.at(static_cast<std::size_t>(j - 1)); }
    double probability(int j, int x) const { return x > 0 ? p_plus(j) : p_minus(j); }
    double marginal(int j) const { return p_plus(j) + p_minus(j); }
    // Sum_j [P(j, +) - P(j, -)] = <X on A'>.
    double expectation_x() const;
    double max_abs_diff(const JointDistribution& other) const;

private:
    std::vector<double> p_plus_;
    std::vector<double> p_minus_;
};

// V = exact amplitude preparation (standard) or the Hadamard wall (variant).
PrepCircuit default_prep(const PolySpec& spec);

// U (|0><0| ⊗ |0><0| ⊗ rho^{⊗L}) U^†, L = degree.
JointState simulate_full(const PolySpec& spec, const DensityMatrix& rho, const PrepCircuit& prep);
JointState simulate_full(const PolySpec& spec, const DensityMatrix& rho);

// Same circuit on B = (rho ⊗ sigma)^{⊗L}; branch j applies the cycle P_{2j}.
JointState simulate_full_product(const PolySpec& spec, const DensityMatrix& rho,
                                 const DensityMatrix& sigma, const PrepCircuit& prep);

// The assembled circuit unitary U for d-dimensional inputs.
ComplexMatrix circuit_unitary(const PolySpec& spec, std::size_t d, const PrepCircuit& prep);

// tr[(X_{A'} ⊗ I) state].
double expectation_x(const JointState& joint);

// Analytic distribution from trace powers: P(j) from the spec,
// P(+|j) = (1 + sin(theta_j) atoms[j-1]) / 2. Atoms must cover 1..degree.
JointDistribution joint_distribution(const PolySpec& spec, std::span<const double> atoms);
JointDistribution joint_distribution(const PolySpec& spec, const DensityMatrix& rho);
// Same conditionals with branch weights from an imperfect preparation, e.g. |V|0>|^2.
JointDistribution joint_distribution(const PolySpec& spec, std::span<const double> atoms,
                                     std::span<const double> branch_weights);
// Branch weights |<j-1|V|0>|^2 of a preparation circuit.
std::vector<double> branch_weights(const PrepCircuit& prep);

// Distribution read off a simulated joint state.
JointDistribution joint_distribution(const JointState& joint);

enum class MeasurementOrder { x_then_z, z_then_x };

// Sequential projective measurement with explicit post-measurement states.
JointDistribution measure_joint(const JointState& joint, MeasurementOrder order);

// sum_j sin(theta_j) tr(rho^j) / n; multiplying by n * gamma gives f_n(rho) - const.
double variant_expectation(const PolySpec& spec, const DensityMatrix& rho);

}  // namespace qsf
