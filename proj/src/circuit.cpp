#include "qsf/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "qsf/errors.hpp"

namespace qsf {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kProbSumTol = 1e-10;

std::size_t row_index(const RegisterLayout& l, std::size_t db, std::size_t aprime, std::size_t a,
                      std::size_t b) {
    return (aprime * l.a_dim + a) * db + b;
}

// Left-multiplies m by the circuit unitary using row operations only.
// cycle_factor: number of B factors permuted per unit of power (1, or 2 for
// interleaved rho/sigma pairs).
void apply_circuit_left(const PolySpec& spec, const PrepCircuit& prep, const RegisterLayout& l,
                        std::size_t cycle_factor, ComplexMatrix& m) {
    const std::size_t n = l.a_dim;
    const std::size_t db = l.b_dim();
    const std::size_t cols = m.cols();

    // V on A, for both values of A'.
    std::vector<Complex> buffer(n);
    for (std::size_t aprime = 0; aprime < 2; ++aprime) {
        for (std::size_t b = 0; b < db; ++b) {
            for (std::size_t c = 0; c < cols; ++c) {
                for (std::size_t a = 0; a < n; ++a) buffer[a] = m(row_index(l, db, aprime, a, b), c);
                for (std::size_t a = 0; a < n; ++a) {
                    Complex acc = 0.0;
                    for (std::size_t a2 = 0; a2 < n; ++a2) acc += prep.unitary(a, a2) * buffer[a2];
                    m(row_index(l, db, aprime, a, b), c) = acc;
                }
            }
        }
    }

    std::vector<Complex> scratch;
    for (int j = 1; j <= static_cast<int>(n); ++j) {
        const std::size_t a = static_cast<std::size_t>(j - 1);
        const double half = 0.5 * spec.theta(j);
        const double cs = std::cos(half);
        const double sn = std::sin(half);
        if (sn != 0.0) {
            for (std::size_t b = 0; b < db; ++b) {
                auto r0 = m.row(row_index(l, db, 0, a, b));
                auto r1 = m.row(row_index(l, db, 1, a, b));
                for (std::size_t c = 0; c < cols; ++c) {
                    const Complex v0 = r0[c];
                    const Complex v1 = r1[c];
                    r0[c] = cs * v0 - sn * v1;
                    r1[c] = sn * v0 + cs * v1;
                }
            }
        }
        const std::size_t cycle = static_cast<std::size_t>(j) * cycle_factor;
        if (spec.alpha(j) == 0.0 || cycle < 2) continue;
        const auto table = cycle_permutation_table(cycle, l.b_copies, l.b_local_dim);
        // P|b> = |table[b]>, so row table[b] of P M is row b of M.
        scratch.assign(db * cols, Complex{});
        for (std::size_t b = 0; b < db; ++b) {
            auto src = m.row(row_index(l, db, 1, a, b));
            std::copy(src.begin(), src.end(), scratch.begin() + static_cast<std::ptrdiff_t>(table[b] * cols));
        }
        for (std::size_t b = 0; b < db; ++b) {
            auto dst = m.row(row_index(l, db, 1, a, b));
            std::copy_n(scratch.begin() + static_cast<std::ptrdiff_t>(b * cols), cols, dst.begin());
        }
    }
}

void check_prep(const PolySpec& spec, const PrepCircuit& prep) {
    if (prep.dim() != static_cast<std::size_t>(spec.register_size())) {
        throw ArgumentError(fmt::format("prep circuit acts on {} levels, spec needs {}", prep.dim(),
                                        spec.register_size()));
    }
}

JointState run(const PolySpec& spec, const ComplexMatrix& b_state, const PrepCircuit& prep,
               const RegisterLayout& layout, std::size_t cycle_factor) {
    check_prep(spec, prep);
    const std::size_t total = layout.total_dim();
    const std::size_t db = layout.b_dim();
    ComplexMatrix state(total, total);
    for (std::size_t r = 0; r < db; ++r) {
        for (std::size_t c = 0; c < db; ++c) state(r, c) = b_state(r, c);
    }
    apply_circuit_left(spec, prep, layout, cycle_factor, state);
    state = state.adjoint();
    apply_circuit_left(spec, prep, layout, cycle_factor, state);
    return JointState{std::move(state), layout};
}

// Pi rho Pi for Pi = |x><x| on A' (x = +1 -> |+>, -1 -> |->).
ComplexMatrix project_x(const ComplexMatrix& rho, const RegisterLayout& l, int x) {
    const std::size_t half = l.a_dim * l.b_dim();
    const std::size_t total = l.total_dim();
    const double s = x > 0 ? 1.0 : -1.0;
    // Pi = 1/2 [[I, sI], [sI, I]] in the A' block structure.
    ComplexMatrix left(total, total);
    for (std::size_t r = 0; r < half; ++r) {
        for (std::size_t c = 0; c < total; ++c) {
            const Complex v = 0.5 * (rho(r, c) + s * rho(r + half, c));
            left(r, c) = v;
            left(r + half, c) = s * v;
        }
    }
    ComplexMatrix out(total, total);
    for (std::size_t r = 0; r < total; ++r) {
        for (std::size_t c = 0; c < half; ++c) {
            const Complex v = 0.5 * (left(r, c) + s * left(r, c + half));
            out(r, c) = v;
            out(r, c + half) = s * v;
        }
    }
    return out;
}

// Pi rho Pi for Pi = |a><a| on A.
ComplexMatrix project_z(const ComplexMatrix& rho, const RegisterLayout& l, std::size_t a) {
    const std::size_t total = l.total_dim();
    const std::size_t db = l.b_dim();
    auto keep = [&](std::size_t index) { return (index / db) % l.a_dim == a; };
    ComplexMatrix out(total, total);
    for (std::size_t r = 0; r < total; ++r) {
        if (!keep(r)) continue;
        for (std::size_t c = 0; c < total; ++c) {
            if (keep(c)) out(r, c) = rho(r, c);
        }
    }
    return out;
}

double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

}  // namespace

std::size_t RegisterLayout::b_dim() const {
    return checked_power(b_local_dim, b_copies, kMaxSimulationDim);
}

RegisterLayout layout_for(const PolySpec& spec, std::size_t d, std::size_t copies_per_power) {
    if (d < 1) throw ArgumentError("layout_for: local dimension must be >= 1");
    RegisterLayout l;
    l.a_dim = static_cast<std::size_t>(spec.register_size());
    l.b_local_dim = d;
    l.b_copies = static_cast<std::size_t>(spec.degree()) * copies_per_power;
    std::size_t db = 0;
    try {
        db = checked_power(d, l.b_copies, kMaxSimulationDim);
    } catch (const CapacityError&) {
        db = kMaxSimulationDim + 1;
    }
    if (db > kMaxSimulationDim || 2 * l.a_dim * db > kMaxSimulationDim) {
        throw CapacityError(fmt::format(
            "full simulation needs dimension 2*{}*{}^{} > {}; use the analytic joint_distribution "
            "path and the sampler instead",
            l.a_dim, d, l.b_copies, kMaxSimulationDim));
    }
    return l;
}

JointDistribution::JointDistribution(std::vector<double> p_plus, std::vector<double> p_minus)
    : p_plus_(std::move(p_plus)), p_minus_(std::move(p_minus)) {
    if (p_plus_.empty() || p_plus_.size() != p_minus_.size()) {
        throw ValidationError("JointDistribution: outcome tables must be nonempty and equal length");
    }
    double total = 0.0;
    for (auto* table : {&p_plus_, &p_minus_}) {
        for (double& p : *table) {
            if (p < -kProbClamp) {
                throw ValidationError(fmt::format("JointDistribution: negative probability {}", p));
            }
            if (p < 0.0) p = 0.0;
            total += p;
        }
    }
    if (std::abs(total - 1.0) > kProbSumTol) {
        throw ValidationError(fmt::format("JointDistribution: probabilities sum to {}", total));
    }
}

double JointDistribution::expectation_x() const {
    double e = 0.0;
    for (std::size_t i = 0; i < p_plus_.size(); ++i) e += p_plus_[i] - p_minus_[i];
    return e;
}

double JointDistribution::max_abs_diff(const JointDistribution& other) const {
    if (other.p_plus_.size() != p_plus_.size()) {
        throw ArgumentError("JointDistribution::max_abs_diff: register sizes differ");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < p_plus_.size(); ++i) {
        worst = std::max(worst, std::abs(p_plus_[i] - other.p_plus_[i]));
        worst = std::max(worst, std::abs(p_minus_[i] - other.p_minus_[i]));
    }
    return worst;
}

PrepCircuit default_prep(const PolySpec& spec) {
    if (spec.mode() == Mode::variant) {
        return hadamard_prep(static_cast<std::size_t>(spec.control_qubits()));
    }
    return exact_prep(spec.amplitudes());
}

JointState simulate_full(const PolySpec& spec, const DensityMatrix& rho, const PrepCircuit& prep) {
    const RegisterLayout layout = layout_for(spec, rho.dim());
    std::vector<ComplexMatrix> copies(layout.b_copies, rho.matrix());
    return run(spec, kron_list(copies), prep, layout, 1);
}

JointState simulate_full(const PolySpec& spec, const DensityMatrix& rho) {
    return simulate_full(spec, rho, default_prep(spec));
}

JointState simulate_full_product(const PolySpec& spec, const DensityMatrix& rho,
                                 const DensityMatrix& sigma, const PrepCircuit& prep) {
    if (rho.dim() != sigma.dim()) {
        throw ArgumentError(fmt::format("dimension mismatch: {} vs {}", rho.dim(), sigma.dim()));
    }
    const RegisterLayout layout = layout_for(spec, rho.dim(), 2);
    std::vector<ComplexMatrix> factors;
    for (std::size_t i = 0; i < layout.b_copies; ++i) {
        factors.push_back(i % 2 == 0 ? rho.matrix() : sigma.matrix());
    }
    return run(spec, kron_list(factors), prep, layout, 2);
}

ComplexMatrix circuit_unitary(const PolySpec& spec, std::size_t d, const PrepCircuit& prep) {
    check_prep(spec, prep);
    const RegisterLayout layout = layout_for(spec, d);
    ComplexMatrix u = ComplexMatrix::identity(layout.total_dim());
    apply_circuit_left(spec, prep, layout, 1, u);
    return u;
}

double expectation_x(const JointState& joint) {
    const auto& l = joint.layout;
    const std::size_t half = l.a_dim * l.b_dim();
    double e = 0.0;
    for (std::size_t r = 0; r < half; ++r) e += 2.0 * joint.density(r, r + half).real();
    return e;
}

JointDistribution joint_distribution(const PolySpec& spec, std::span<const double> atoms,
                                     std::span<const double> weights) {
    if (atoms.size() < static_cast<std::size_t>(spec.degree())) {
        throw ArgumentError(fmt::format("joint_distribution: {} atoms for degree {}", atoms.size(),
                                        spec.degree()));
    }
    const int n = spec.register_size();
    if (weights.size() != static_cast<std::size_t>(n)) {
        throw ArgumentError(fmt::format("joint_distribution: {} branch weights for register size {}",
                                        weights.size(), n));
    }
    std::vector<double> plus(static_cast<std::size_t>(n));
    std::vector<double> minus(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j) {
        const double pj = weights[static_cast<std::size_t>(j - 1)];
        const double s = std::sin(spec.theta(j));
        const double t = j <= spec.degree() ? atoms[static_cast<std::size_t>(j - 1)] : 0.0;
        const double bias = s == 0.0 ? 0.0 : s * t;
        plus[static_cast<std::size_t>(j - 1)] = 0.5 * pj * (1.0 + bias);
        minus[static_cast<std::size_t>(j - 1)] = 0.5 * pj * (1.0 - bias);
    }
    return JointDistribution(std::move(plus), std::move(minus));
}

JointDistribution joint_distribution(const PolySpec& spec, std::span<const double> atoms) {
    std::vector<double> weights(static_cast<std::size_t>(spec.register_size()));
    for (int j = 1; j <= spec.register_size(); ++j) {
        weights[static_cast<std::size_t>(j - 1)] = spec.branch_probability(j);
    }
    return joint_distribution(spec, atoms, weights);
}

std::vector<double> branch_weights(const PrepCircuit& prep) {
    std::vector<double> w;
    for (const Complex& z : prep.first_column()) w.push_back(std::norm(z));
    return w;
}

JointDistribution joint_distribution(const PolySpec& spec, const DensityMatrix& rho) {
    return joint_distribution(spec, trace_powers(rho, spec.degree()));
}

JointDistribution joint_distribution(const JointState& joint) {
    const auto& l = joint.layout;
    const auto& rho = joint.density;
    const std::size_t db = l.b_dim();
    std::vector<double> plus(l.a_dim);
    std::vector<double> minus(l.a_dim);
    for (std::size_t a = 0; a < l.a_dim; ++a) {
        // |+-><+-| = (I +- X)/2 on A'.
        double diag = 0.0;
        double coherence = 0.0;
        for (std::size_t b = 0; b < db; ++b) {
            const std::size_t r0 = row_index(l, db, 0, a, b);
            const std::size_t r1 = row_index(l, db, 1, a, b);
            diag += rho(r0, r0).real() + rho(r1, r1).real();
            coherence += 2.0 * rho(r0, r1).real();
        }
        plus[a] = 0.5 * (diag + coherence);
        minus[a] = 0.5 * (diag - coherence);
    }
    return JointDistribution(std::move(plus), std::move(minus));
}

JointDistribution measure_joint(const JointState& joint, MeasurementOrder order) {
    const auto& l = joint.layout;
    std::vector<double> plus(l.a_dim);
    std::vector<double> minus(l.a_dim);
    for (int x : {1, -1}) {
        auto& table = x > 0 ? plus : minus;
        if (order == MeasurementOrder::x_then_z) {
            const ComplexMatrix after_x = project_x(joint.density, l, x);
            for (std::size_t a = 0; a < l.a_dim; ++a) {
                table[a] = real_trace(project_z(after_x, l, a));
            }
        } else {
            for (std::size_t a = 0; a < l.a_dim; ++a) {
                const ComplexMatrix after_z = project_z(joint.density, l, a);
                table[a] = real_trace(project_x(after_z, l, x));
            }
        }
    }
    return JointDistribution(std::move(plus), std::move(minus));
}

double variant_expectation(const PolySpec& spec, const DensityMatrix& rho) {
    if (spec.mode() != Mode::variant) {
        throw ArgumentError("variant_expectation: spec is not in variant mode");
    }
    const auto atoms = trace_powers(rho, spec.degree());
    double e = 0.0;
    for (int j = 1; j <= spec.degree(); ++j) {
        e += std::sin(spec.theta(j)) * atoms[static_cast<std::size_t>(j - 1)];
    }
    return e / spec.register_size();
}

}  // namespace qsf
