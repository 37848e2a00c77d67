#include "qsf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qsf/errors.hpp"

namespace qsf {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kJacobiTol = 1e-12;
constexpr int kJacobiSweepCap = 100;
constexpr double kPsdTol = 1e-10;

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ArgumentError(std::string(what) + ": shape mismatch");
    }
}

double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            if (r != c) sum += std::norm(a(r, c));
        }
    }
    return std::sqrt(sum);
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_) {
        throw ArgumentError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(rows_) + "x" +
                            std::to_string(cols_));
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
    }
    return out;
}

Complex ComplexMatrix::trace() const {
    if (!is_square()) throw ArgumentError("trace: matrix is not square");
    Complex t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix& other) const {
    require_same_shape(*this, other, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
    }
    return worst;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& other, double abs_tol) const {
    if (rows_ != other.rows_ || cols_ != other.cols_) return false;
    return max_abs_diff(other) <= abs_tol;
}

bool ComplexMatrix::is_hermitian(double abs_tol) const {
    if (!is_square()) return false;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = r; c < cols_; ++c) {
            if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > abs_tol) return false;
        }
    }
    return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
    for (auto& z : data_) z *= scale;
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw ArgumentError("matrix product: inner dimension mismatch");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto out_row = out.row(r);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex s = a(r, k);
            if (s == Complex{}) continue;
            auto b_row = b.row(k);
            for (std::size_t c = 0; c < b.cols(); ++c) out_row[c] += s * b_row[c];
        }
    }
    return out;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }

Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw ArgumentError("trace_of_product: shape mismatch");
    }
    Complex t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) t += a(i, k) * b(k, i);
    }
    return t;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar) {
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const Complex s = a(ar, ac);
            if (s == Complex{}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br) {
                for (std::size_t bc = 0; bc < b.cols(); ++bc) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
                }
            }
        }
    }
    return out;
}

std::size_t checked_power(std::size_t base, std::size_t exponent, std::size_t cap) {
    std::size_t v = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
        if (base != 0 && v > cap / base) {
            throw CapacityError("dimension " + std::to_string(base) + "^" +
                                std::to_string(exponent) + " exceeds the simulation cap " +
                                std::to_string(cap));
        }
        v *= base;
    }
    return v;
}

ComplexMatrix kron_list(std::span<const ComplexMatrix> factors, std::size_t max_dim) {
    if (factors.empty()) throw ArgumentError("kron_list: empty factor list");
    std::size_t dim = 1;
    for (const auto& f : factors) {
        if (!f.is_square()) throw ArgumentError("kron_list: factors must be square");
        if (f.rows() != 0 && dim > max_dim / f.rows()) {
            throw CapacityError("kron_list: product dimension exceeds the simulation cap " +
                                std::to_string(max_dim));
        }
        dim *= f.rows();
    }
    if (dim > max_dim) {
        throw CapacityError("kron_list: product dimension " + std::to_string(dim) +
                            " exceeds the simulation cap " + std::to_string(max_dim));
    }
    ComplexMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
    return out;
}

HermitianEigen hermitian_eig(const ComplexMatrix& m) {
    if (!m.is_square()) throw ValidationError("hermitian_eig: matrix is not square");
    if (!m.is_hermitian(kHermitianTol)) {
        throw ValidationError("hermitian_eig: matrix is not Hermitian within 1e-10");
    }
    const std::size_t n = m.rows();
    ComplexMatrix a = m;
    // Symmetrize so the rotations see an exactly Hermitian matrix.
    for (std::size_t r = 0; r < n; ++r) {
        a(r, r) = a(r, r).real();
        for (std::size_t c = r + 1; c < n; ++c) {
            const Complex avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = avg;
            a(c, r) = std::conj(avg);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double tol = kJacobiTol * std::max(1.0, a.frobenius_norm());

    int sweep = 0;
    while (off_diagonal_norm(a) > tol) {
        if (++sweep > kJacobiSweepCap) {
            throw NumericalError("hermitian_eig: no convergence after " +
                                 std::to_string(kJacobiSweepCap) + " sweeps");
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-300) continue;
                // Phase-rotate a_pq onto the positive real axis, then apply the
                // real symmetric Jacobi rotation.
                const Complex phase = apq / mag;  // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                // J = diag(1, e^{-i phi}) * [[c, s], [-s, c]] on the (p, q) plane.
                const Complex jpp = c;
                const Complex jpq = s;
                const Complex jqp = -s * std::conj(phase);
                const Complex jqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {  // a <- a J
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * jpp + akq * jqp;
                    a(k, q) = akp * jpq + akq * jqq;
                }
                for (std::size_t k = 0; k < n; ++k) {  // a <- J^† a
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
                    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {  // v <- v J
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
    HermitianEigen out{std::vector<double>(n), ComplexMatrix(n, n)};
    for (std::size_t col = 0; col < n; ++col) {
        out.eigenvalues[col] = a(order[col], order[col]).real();
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, col) = v(r, order[col]);
    }
    return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
    const HermitianEigen eig = hermitian_eig(m);
    const std::size_t n = m.rows();
    std::vector<double> roots(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lambda = eig.eigenvalues[i];
        if (lambda < -kPsdTol) {
            throw ValidationError("matrix_sqrt_psd: eigenvalue " + std::to_string(lambda) +
                                  " violates positive semidefiniteness");
        }
        roots[i] = std::sqrt(std::max(lambda, 0.0));
    }
    ComplexMatrix out(n, n);
    const ComplexMatrix& v = eig.eigenvectors;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            Complex s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += v(r, k) * roots[k] * std::conj(v(c, k));
            out(r, c) = s;
        }
    }
    return out;
}

Complex matrix_power_trace(const ComplexMatrix& m, int j) {
    if (!m.is_square()) throw ArgumentError("matrix_power_trace: matrix is not square");
    if (j < 1) throw ArgumentError("matrix_power_trace: power must be >= 1");
    if (j == 1) return m.trace();
    ComplexMatrix power = m;
    for (int i = 2; i < j; ++i) power = power * m;
    return trace_of_product(power, m);
}

std::size_t cycle_permutation_apply(std::size_t state_index, std::size_t k, std::size_t n,
                                    std::size_t d) {
    if (d < 1 || n < 1) throw ArgumentError("cycle_permutation_apply: empty register");
    if (k < 1 || k > n) {
        throw ArgumentError("cycle_permutation_apply: cycle length " + std::to_string(k) +
                            " outside [1, " + std::to_string(n) + "]");
    }
    const std::size_t total = checked_power(d, n, std::numeric_limits<std::size_t>::max() / 2);
    if (state_index >= total) {
        throw ArgumentError("cycle_permutation_apply: index " + std::to_string(state_index) +
                            " out of range");
    }
    if (k == 1) return state_index;
    // Digits of the first k factors live in the high part of the index.
    const std::size_t tail = checked_power(d, n - k, total);
    const std::size_t head = state_index / tail;
    const std::size_t rest = state_index % tail;
    const std::size_t top = checked_power(d, k - 1, total);
    // Factor 0 is the leading digit; shifting left by one digit rotates factor 1
    // into slot 0 and factor 0 into slot k-1.
    const std::size_t leading = head / top;
    const std::size_t rotated = (head % top) * d + leading;
    return rotated * tail + rest;
}

std::vector<std::size_t> cycle_permutation_table(std::size_t k, std::size_t n, std::size_t d) {
    const std::size_t total = checked_power(d, n, std::numeric_limits<std::size_t>::max() / 2);
    std::vector<std::size_t> table(total);
    for (std::size_t i = 0; i < total; ++i) table[i] = cycle_permutation_apply(i, k, n, d);
    return table;
}

ComplexMatrix cycle_permutation_matrix(std::size_t k, std::size_t n, std::size_t d) {
    const auto table = cycle_permutation_table(k, n, d);
    ComplexMatrix p(table.size(), table.size());
    for (std::size_t s = 0; s < table.size(); ++s) p(table[s], s) = 1.0;
    return p;
}

}  // namespace qsf
