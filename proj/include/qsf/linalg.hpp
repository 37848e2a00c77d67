#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qsf {

using Complex = std::complex<double>;

// Largest total register dimension handled by dense simulation.
inline constexpr std::size_t kMaxSimulationDim = 4096;

// Dense complex matrix, row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<Complex> data() { return data_; }
    std::span<const Complex> data() const { return data_; }
    std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    ComplexMatrix adjoint() const;
    Complex trace() const;
    double frobenius_norm() const;

    // Largest elementwise |a - b|; matrices must have equal shapes.
    double max_abs_diff(const ComplexMatrix& other) const;
    bool approx_equal(const ComplexMatrix& other, double abs_tol) const;
    bool is_hermitian(double abs_tol) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex scale);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix m);

// tr(a * b) without forming the product.
Complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Kronecker product of square factors in list order. Throws CapacityError if
// the product dimension exceeds max_dim.
ComplexMatrix kron_list(std::span<const ComplexMatrix> factors,
                        std::size_t max_dim = kMaxSimulationDim);

struct HermitianEigen {
    std::vector<double> eigenvalues;  // ascending
    ComplexMatrix eigenvectors;       // column i pairs with eigenvalues[i]
};

// Cyclic complex Jacobi. Throws ValidationError for non-Hermitian input and
// NumericalError if the sweep cap is reached.
HermitianEigen hermitian_eig(const ComplexMatrix& m);

// Hermitian PSD square root; eigenvalues in [-1e-10, 0) are clamped to zero.
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m);

// tr(m^j), j >= 1, by repeated multiplication.
Complex matrix_power_trace(const ComplexMatrix& m, int j);

// Image of a basis index of (C^d)^{⊗n} under the cyclic shift of the first k
// tensor factors (factor i takes the value of factor i+1 mod k). Factor 0 is
// the most significant digit of the index.
std::size_t cycle_permutation_apply(std::size_t state_index, std::size_t k, std::size_t n,
                                    std::size_t d);

// cycle_permutation_apply evaluated on every basis index.
std::vector<std::size_t> cycle_permutation_table(std::size_t k, std::size_t n, std::size_t d);

// Dense permutation matrix P with P|s> = |perm(s)>. Meant for oracles and tests.
ComplexMatrix cycle_permutation_matrix(std::size_t k, std::size_t n, std::size_t d);

std::size_t checked_power(std::size_t base, std::size_t exponent, std::size_t cap);

}  // namespace qsf
