#include "qsf/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "qsf/errors.hpp"
#include "qsf/rng.hpp"

namespace qsf {

namespace {

constexpr double kLogCutoff = 1e-12;

}  // namespace

DensityMatrix::DensityMatrix(ComplexMatrix m) : matrix_(std::move(m)) {
    if (!matrix_.is_square() || matrix_.rows() == 0) {
        throw ValidationError("DensityMatrix: matrix must be square and nonempty");
    }
    if (!matrix_.is_hermitian(kStateTol)) {
        throw ValidationError("DensityMatrix: matrix is not Hermitian within 1e-10");
    }
    const Complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > kStateTol) {
        throw ValidationError(fmt::format("DensityMatrix: trace {} differs from 1", tr.real()));
    }
    eigenvalues_ = hermitian_eig(matrix_).eigenvalues;
    if (eigenvalues_.front() < -kStateTol) {
        throw ValidationError(
            fmt::format("DensityMatrix: negative eigenvalue {}", eigenvalues_.front()));
    }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t d) {
    ComplexMatrix m = ComplexMatrix::identity(d);
    m *= 1.0 / static_cast<double>(d);
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::from_diagonal(std::span<const double> probabilities) {
    return DensityMatrix(ComplexMatrix::diagonal(probabilities));
}

DensityMatrix DensityMatrix::pure(std::span<const Complex> psi) {
    ComplexMatrix m(psi.size(), psi.size());
    for (std::size_t r = 0; r < psi.size(); ++r) {
        for (std::size_t c = 0; c < psi.size(); ++c) m(r, c) = psi[r] * std::conj(psi[c]);
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix random_state(std::size_t d, std::size_t rank, std::uint64_t seed) {
    if (d < 1) throw ArgumentError("random_state: dimension must be >= 1");
    if (rank < 1 || rank > d) {
        throw ArgumentError(fmt::format("random_state: rank {} outside [1, {}]", rank, d));
    }
    Rng rng(seed);
    ComplexMatrix g(d, rank);
    for (auto& z : g.data()) {
        const double re = rng.normal();
        const double im = rng.normal();
        z = Complex(re, im);
    }
    ComplexMatrix rho = g * g.adjoint();
    rho *= 1.0 / rho.trace().real();
    // Remove rounding asymmetry from the product.
    for (std::size_t r = 0; r < d; ++r) {
        rho(r, r) = rho(r, r).real();
        for (std::size_t c = r + 1; c < d; ++c) rho(c, r) = std::conj(rho(r, c));
    }
    return DensityMatrix(std::move(rho));
}

double trace_power(const DensityMatrix& rho, int j) {
    if (j < 1) throw ArgumentError("trace_power: power must be >= 1");
    return matrix_power_trace(rho.matrix(), j).real();
}

std::vector<double> trace_powers(const DensityMatrix& rho, int max_power) {
    if (max_power < 1) throw ArgumentError("trace_powers: max power must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(max_power));
    out[0] = rho.matrix().trace().real();
    ComplexMatrix power = rho.matrix();
    for (int j = 2; j <= max_power; ++j) {
        out[static_cast<std::size_t>(j - 1)] = trace_of_product(power, rho.matrix()).real();
        if (j < max_power) power = power * rho.matrix();
    }
    return out;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (double lambda : rho.eigenvalues()) {
        if (lambda > kLogCutoff) s -= lambda * std::log(lambda);
    }
    return s;
}

std::vector<double> product_spectrum(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw ArgumentError(fmt::format("dimension mismatch: {} vs {}", rho.dim(), sigma.dim()));
    }
    const ComplexMatrix root = matrix_sqrt_psd(rho.matrix());
    ComplexMatrix sandwich = root * sigma.matrix() * root;
    for (std::size_t r = 0; r < sandwich.rows(); ++r) {
        sandwich(r, r) = sandwich(r, r).real();
        for (std::size_t c = r + 1; c < sandwich.cols(); ++c) {
            const Complex avg = 0.5 * (sandwich(r, c) + std::conj(sandwich(c, r)));
            sandwich(r, c) = avg;
            sandwich(c, r) = std::conj(avg);
        }
    }
    return hermitian_eig(sandwich).eigenvalues;
}

double fidelity_exact(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const auto spectrum = product_spectrum(rho, sigma);
    double root_trace = 0.0;
    for (double mu : spectrum) {
        if (mu < -kStateTol) throw ValidationError("fidelity_exact: sandwiched operator not PSD");
        root_trace += std::sqrt(std::max(mu, 0.0));
    }
    const double f = root_trace * root_trace;
    if (f > 1.0 + 1e-9 || f < -1e-9) {
        throw NumericalError(fmt::format("fidelity_exact: value {} outside [0, 1]", f));
    }
    return std::clamp(f, 0.0, 1.0);
}

double min_nonzero_eigenvalue(const DensityMatrix& rho) {
    for (double lambda : rho.eigenvalues()) {
        if (lambda > kRankCutoff) return lambda;
    }
    throw NumericalError("min_nonzero_eigenvalue: state has no eigenvalue above the cutoff");
}

double poly_function_exact(const PolySpec& spec, const DensityMatrix& rho) {
    return spec.evaluate_atoms(trace_powers(rho, spec.degree()));
}

ComplexMatrix poly_transform_exact(const PolySpec& spec, const DensityMatrix& rho) {
    const std::size_t d = rho.dim();
    ComplexMatrix out(d, d);
    ComplexMatrix power = rho.matrix();
    for (int j = 1; j <= spec.degree(); ++j) {
        if (j > 1) power = power * rho.matrix();
        if (spec.alpha(j) != 0.0) out += Complex(spec.alpha(j)) * power;
    }
    return out;
}

Complex parse_complex(const std::string& token) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double re = std::strtod(begin, &end);
    if (end == begin) throw ParseError("bad complex entry '" + token + "'");
    if (*end == '\0') return {re, 0.0};
    if (*end == 'j' && end[1] == '\0') return {0.0, re};  // bare imaginary, e.g. "2j"
    const char* im_begin = end;
    const double im = std::strtod(im_begin, &end);
    if (end == im_begin || *end != 'j' || end[1] != '\0') {
        throw ParseError("bad complex entry '" + token + "' (expected re+imj)");
    }
    return {re, im};
}

std::string format_complex(Complex z) { return fmt::format("{:.17g}{:+.17g}j", z.real(), z.imag()); }

DensityMatrix read_state(std::istream& in) {
    long long d = 0;
    if (!(in >> d) || d < 1) throw ParseError("state file: first token must be a positive dimension");
    const auto n = static_cast<std::size_t>(d);
    ComplexMatrix m(n, n);
    std::string token;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (!(in >> token)) {
                throw ParseError(fmt::format("state file: expected {} entries, ran out at row {}", n * n, r));
            }
            m(r, c) = parse_complex(token);
        }
    }
    return DensityMatrix(std::move(m));
}

void write_state(std::ostream& out, const DensityMatrix& rho) {
    out << rho.dim() << '\n';
    for (std::size_t r = 0; r < rho.dim(); ++r) {
        for (std::size_t c = 0; c < rho.dim(); ++c) {
            if (c) out << ' ';
            out << format_complex(rho.matrix()(r, c));
        }
        out << '\n';
    }
}

DensityMatrix load_state_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open state file '" + path + "'");
    return read_state(in);
}

void save_state_file(const std::string& path, const DensityMatrix& rho) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write state file '" + path + "'");
    write_state(out, rho);
}

}  // namespace qsf
