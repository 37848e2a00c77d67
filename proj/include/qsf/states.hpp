#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qsf/coefficients.hpp"
#include "qsf/linalg.hpp"

namespace qsf {

inline constexpr double kStateTol = 1e-10;
inline constexpr double kRankCutoff = 1e-10;

// A d x d matrix that is Hermitian, unit trace and PSD within 1e-10.
// Construction validates; a DensityMatrix value is always a valid state.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);

    static DensityMatrix maximally_mixed(std::size_t d);
    static DensityMatrix from_diagonal(std::span<const double> probabilities);
    // |psi><psi| for a normalized vector.
    static DensityMatrix pure(std::span<const Complex> psi);

    std::size_t dim() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }
    // Ascending eigenvalues, computed once at construction.
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }

private:
    ComplexMatrix matrix_;
    std::vector<double> eigenvalues_;
};

// Ginibre ensemble: rho = G G^† / tr(G G^†), G a d x rank standard complex Gaussian.
DensityMatrix random_state(std::size_t d, std::size_t rank, std::uint64_t seed);

// tr(rho^j) for j >= 1.
double trace_power(const DensityMatrix& rho, int j);
// tr(rho^j) for j = 1..max_power.
std::vector<double> trace_powers(const DensityMatrix& rho, int max_power);

double von_neumann_entropy(const DensityMatrix& rho);

// (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0, 1].
double fidelity_exact(const DensityMatrix& rho, const DensityMatrix& sigma);

// Ascending eigenvalues of sqrt(rho) sigma sqrt(rho), i.e. the spectrum of rho sigma.
std::vector<double> product_spectrum(const DensityMatrix& rho, const DensityMatrix& sigma);

double min_nonzero_eigenvalue(const DensityMatrix& rho);

// Ground truth: const_term + sum_j alpha_j tr(rho^j).
double poly_function_exact(const PolySpec& spec, const DensityMatrix& rho);

// sum_j alpha_j rho^j (const term excluded).
ComplexMatrix poly_transform_exact(const PolySpec& spec, const DensityMatrix& rho);

// Text format: first line d, then d rows of d entries "re+imj".
DensityMatrix read_state(std::istream& in);
void write_state(std::ostream& out, const DensityMatrix& rho);
DensityMatrix load_state_file(const std::string& path);
void save_state_file(const std::string& path, const DensityMatrix& rho);

Complex parse_complex(const std::string& token);
std::string format_complex(Complex z);

}  // namespace qsf
