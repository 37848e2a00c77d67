#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qsf/linalg.hpp"
#include "qsf/rng.hpp"
#include "qsf/states.hpp"

namespace qsf::testing {

inline ComplexMatrix pauli_x() { return ComplexMatrix(2, 2, {0.0, 1.0, 1.0, 0.0}); }
inline ComplexMatrix pauli_z() { return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, -1.0}); }

inline ComplexMatrix random_hermitian(std::size_t d, std::uint64_t seed) {
    Rng rng(seed, 99);
    ComplexMatrix m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
        m(r, r) = rng.normal();
        for (std::size_t c = r + 1; c < d; ++c) {
            m(r, c) = Complex(rng.normal(), rng.normal());
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

// Direct matrix series sum_{i=1}^{N} (1/i) tr[rho (I - rho)^i].
inline double entropy_series_direct(const DensityMatrix& rho, int order) {
    const std::size_t d = rho.dim();
    ComplexMatrix complement = ComplexMatrix::identity(d) - rho.matrix();
    ComplexMatrix power = ComplexMatrix::identity(d);
    double s = 0.0;
    for (int i = 1; i <= order; ++i) {
        power = power * complement;
        s += trace_of_product(rho.matrix(), power).real() / i;
    }
    return s;
}

inline double sum_of_powers(const std::vector<double>& eigenvalues, int j) {
    double s = 0.0;
    for (double l : eigenvalues) s += std::pow(l, j);
    return s;
}

}  // namespace qsf::testing
