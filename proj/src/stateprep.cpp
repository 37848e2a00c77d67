#include "qsf/stateprep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "qsf/errors.hpp"
#include "qsf/rng.hpp"

namespace qsf {

namespace {

constexpr double kNormTol = 1e-10;

std::size_t qubits_for(std::size_t dim) {
    std::size_t q = 0;
    while ((std::size_t{1} << q) < dim) ++q;
    if ((std::size_t{1} << q) != dim) {
        throw ArgumentError(fmt::format("register length {} is not a power of two", dim));
    }
    return q;
}

void check_params(const PqcParams& p) {
    if (p.layers < 1) throw ArgumentError("PqcParams: need at least one layer");
    if (p.angles.size() != p.layers * p.qubits) {
        throw ArgumentError(fmt::format("PqcParams: {} angles for {} layers x {} qubits",
                                        p.angles.size(), p.layers, p.qubits));
    }
}

// Applies the ansatz to a real statevector in place.
void apply_pqc(const PqcParams& p, std::vector<double>& psi) {
    const std::size_t q = p.qubits;
    const std::size_t dim = psi.size();
    for (std::size_t layer = 0; layer < p.layers; ++layer) {
        for (std::size_t qubit = 0; qubit < q; ++qubit) {
            const double half = 0.5 * p.angles[layer * q + qubit];
            const double c = std::cos(half);
            const double s = std::sin(half);
            const std::size_t mask = std::size_t{1} << (q - 1 - qubit);
            for (std::size_t i = 0; i < dim; ++i) {
                if (i & mask) continue;
                const double a0 = psi[i];
                const double a1 = psi[i | mask];
                psi[i] = c * a0 - s * a1;
                psi[i | mask] = s * a0 + c * a1;
            }
        }
        if (q < 2) continue;
        for (std::size_t control = 0; control < q; ++control) {
            const std::size_t target = (control + 1) % q;
            const std::size_t cmask = std::size_t{1} << (q - 1 - control);
            const std::size_t tmask = std::size_t{1} << (q - 1 - target);
            for (std::size_t i = 0; i < dim; ++i) {
                if ((i & cmask) && !(i & tmask)) std::swap(psi[i], psi[i | tmask]);
            }
        }
    }
}

double infidelity_of(const PqcParams& p, std::span<const double> target) {
    return state_infidelity(target, pqc_state(p));
}

void check_target(std::span<const double> target) {
    if (target.empty()) throw ArgumentError("target amplitudes are empty");
    double norm = 0.0;
    for (double a : target) norm += a * a;
    if (std::abs(norm - 1.0) > kNormTol) {
        throw ArgumentError(fmt::format("target amplitudes have squared norm {}, expected 1", norm));
    }
}

}  // namespace

std::string to_string(PrepKind kind) {
    switch (kind) {
        case PrepKind::exact: return "exact";
        case PrepKind::pqc: return "pqc";
        case PrepKind::hadamard: return "hadamard";
    }
    return "exact";
}

PrepKind parse_prep_kind(const std::string& text) {
    if (text == "exact") return PrepKind::exact;
    if (text == "pqc") return PrepKind::pqc;
    if (text == "hadamard") return PrepKind::hadamard;
    throw ParseError("unknown prep kind '" + text + "' (expected exact|pqc|hadamard)");
}

std::vector<Complex> PrepCircuit::first_column() const {
    std::vector<Complex> col(unitary.rows());
    for (std::size_t r = 0; r < col.size(); ++r) col[r] = unitary(r, 0);
    return col;
}

PrepCircuit exact_prep(std::span<const double> target) {
    check_target(target);
    const std::size_t n = target.size();
    PrepCircuit prep;
    prep.kind = PrepKind::exact;
    prep.qubits = qubits_for(n);
    // Householder reflection mapping e_0 to the target: H = I - 2 w w^T / (w^T w), w = e_0 - v.
    prep.unitary = ComplexMatrix::identity(n);
    std::vector<double> w(target.begin(), target.end());
    for (auto& x : w) x = -x;
    w[0] += 1.0;
    double ww = 0.0;
    for (double x : w) ww += x * x;
    if (ww > 1e-30) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = 0; c < n; ++c) prep.unitary(r, c) -= 2.0 * w[r] * w[c] / ww;
        }
    }
    // Pin the first column to the target exactly.
    for (std::size_t r = 0; r < n; ++r) prep.unitary(r, 0) = target[r];
    return prep;
}

PrepCircuit hadamard_prep(std::size_t qubits) {
    const std::size_t n = std::size_t{1} << qubits;
    PrepCircuit prep;
    prep.kind = PrepKind::hadamard;
    prep.qubits = qubits;
    prep.unitary = ComplexMatrix(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            prep.unitary(r, c) = (std::popcount(r & c) % 2 == 0) ? scale : -scale;
        }
    }
    return prep;
}

std::vector<double> pqc_state(const PqcParams& params) {
    check_params(params);
    std::vector<double> psi(std::size_t{1} << params.qubits, 0.0);
    psi[0] = 1.0;
    apply_pqc(params, psi);
    return psi;
}

PrepCircuit pqc_prep(const PqcParams& params, std::span<const double> target) {
    check_params(params);
    const std::size_t n = std::size_t{1} << params.qubits;
    PrepCircuit prep;
    prep.kind = PrepKind::pqc;
    prep.qubits = params.qubits;
    prep.params = params;
    prep.unitary = ComplexMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> column(n, 0.0);
        column[c] = 1.0;
        apply_pqc(params, column);
        for (std::size_t r = 0; r < n; ++r) prep.unitary(r, c) = column[r];
    }
    if (!target.empty()) {
        if (target.size() != n) throw ArgumentError("pqc_prep: target length mismatch");
        prep.infidelity = infidelity_of(params, target);
    }
    return prep;
}

double state_infidelity(std::span<const double> target, std::span<const double> state) {
    if (target.size() != state.size()) throw ArgumentError("state_infidelity: length mismatch");
    double overlap = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) overlap += target[i] * state[i];
    return 1.0 - overlap * overlap;
}

TrainResult train_pqc(std::span<const double> target, std::size_t layers, std::uint64_t seed,
                      const TrainOptions& options) {
    check_target(target);
    if (layers < 1) throw ArgumentError("train_pqc: need at least one layer");
    const std::size_t q = qubits_for(target.size());

    TrainResult best;
    best.params = PqcParams{layers, q, std::vector<double>(layers * q, 0.0)};
    best.infidelity = infidelity_of(best.params, target);
    if (q == 0) return best;

    for (int restart = 0; restart < options.restarts; ++restart) {
        Rng rng(seed, static_cast<std::uint64_t>(restart));
        PqcParams p{layers, q, std::vector<double>(layers * q)};
        for (auto& a : p.angles) a = 2.0 * std::numbers::pi * rng.uniform();

        std::vector<double> grad(p.angles.size());
        double loss = infidelity_of(p, target);
        for (int it = 0; it < options.max_iterations && loss > 1e-14; ++it) {
            for (std::size_t i = 0; i < p.angles.size(); ++i) {
                const double saved = p.angles[i];
                p.angles[i] = saved + std::numbers::pi / 2;
                const double plus = infidelity_of(p, target);
                p.angles[i] = saved - std::numbers::pi / 2;
                const double minus = infidelity_of(p, target);
                p.angles[i] = saved;
                grad[i] = 0.5 * (plus - minus);
            }
            for (std::size_t i = 0; i < p.angles.size(); ++i) p.angles[i] -= options.learning_rate * grad[i];
            loss = infidelity_of(p, target);
        }
        best.restarts_used = restart + 1;
        if (loss < best.infidelity) {
            best.infidelity = loss;
            best.params = p;
        }
        if (best.infidelity <= options.target_infidelity) break;
    }
    if (best.infidelity > options.target_infidelity) {
        throw TrainingError(fmt::format(
            "train_pqc: best infidelity {:.3g} after {} restarts exceeds {:.3g}; try more layers",
            best.infidelity, options.restarts, options.target_infidelity));
    }
    return best;
}

PqcParams read_pqc_params(std::istream& in) {
    PqcParams p;
    bool have_layers = false;
    bool have_qubits = false;
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        if (key == "layers") {
            if (!(fields >> p.layers)) throw ParseError("pqc params: bad layers line");
            have_layers = true;
        } else if (key == "qubits") {
            if (!(fields >> p.qubits)) throw ParseError("pqc params: bad qubits line");
            have_qubits = true;
        } else {
            std::istringstream value(line);
            double a = 0.0;
            if (!(value >> a)) throw ParseError("pqc params: bad angle line '" + line + "'");
            p.angles.push_back(a);
        }
    }
    if (!have_layers) throw ParseError("pqc params: missing 'layers'");
    if (!have_qubits) {
        if (p.layers == 0 || p.angles.size() % p.layers != 0) {
            throw ParseError("pqc params: angle count not divisible by layers");
        }
        p.qubits = p.angles.size() / p.layers;
    }
    try {
        check_params(p);
    } catch (const ArgumentError& e) {
        throw ParseError(e.what());
    }
    return p;
}

void write_pqc_params(std::ostream& out, const PqcParams& params) {
    out << "layers " << params.layers << '\n';
    out << "qubits " << params.qubits << '\n';
    for (double a : params.angles) out << fmt::format("{:.17g}\n", a);
}

PqcParams load_pqc_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open pqc params file '" + path + "'");
    return read_pqc_params(in);
}

}  // namespace qsf
