#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qsf {

// standard: control register prepared in sqrt(|alpha_j|/gamma), gamma = sum |alpha_j|.
// variant:  uniform control register, gamma = max |alpha_j|, arcsin-encoded angles.
enum class Mode { standard, variant };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

// Target polynomial const_term + sum_j alpha_j tr(X^j) together with the
// circuit parameters that encode it. Powers run 1..register_size(); powers
// above degree() are zero padding up to a power of two.
class PolySpec {
public:
    // alphas: power j >= 1 -> coefficient. At least one coefficient must be nonzero.
    static PolySpec make(const std::map<int, double>& alphas, double const_term = 0.0,
                         Mode mode = Mode::standard);

    Mode mode() const { return mode_; }
    double const_term() const { return const_term_; }
    double gamma() const { return gamma_; }

    // Highest power with a nonzero coefficient.
    int degree() const { return degree_; }
    // n: degree rounded up to a power of two (size of the control register).
    int register_size() const { return static_cast<int>(alphas_.size()); }
    // Number of qubits in the control register, log2(n).
    int control_qubits() const;

    double alpha(int j) const { return alphas_.at(static_cast<std::size_t>(j - 1)); }
    double theta(int j) const { return thetas_.at(static_cast<std::size_t>(j - 1)); }
    std::span<const double> alphas() const { return alphas_; }
    std::span<const double> thetas() const { return thetas_; }

    // Probability of control outcome j: |alpha_j|/gamma (standard) or 1/n (variant).
    double branch_probability(int j) const;
    // Factor that turns <X> into the polynomial value: gamma or n*gamma.
    double estimator_scale() const;
    // Control-register amplitudes sqrt(|alpha_j|/gamma), length n.
    std::vector<double> amplitudes() const;

    // const_term + sum_j alpha_j atoms[j-1]; atoms must cover 1..degree().
    double evaluate_atoms(std::span<const double> atoms) const;
    // Scalar polynomial const_term + sum_j alpha_j x^j.
    double evaluate_scalar(double x) const;

    PolySpec with_mode(Mode mode) const;
    PolySpec with_const_term(double const_term) const;
    std::map<int, double> coefficient_map() const;

private:
    Mode mode_ = Mode::standard;
    double const_term_ = 0.0;
    double gamma_ = 1.0;
    int degree_ = 1;
    std::vector<double> alphas_;
    std::vector<double> thetas_;
};

// Truncated Taylor series of the von Neumann entropy,
// S_N = sum_{i=1}^{N} (1/i) tr[rho (I - rho)^i], as monomials in rho (degree N+1).
PolySpec entropy_taylor_spec(int truncation_order, Mode mode = Mode::standard);

// Smallest N with |S_N - S| <= epsilon/2 for states whose smallest nonzero
// eigenvalue is kappa (kappa > 1/2 is treated as 1/2).
int entropy_truncation_order(double epsilon, double kappa);

// Degree-N Taylor polynomial of sqrt(x) about 1; the x^0 term is the const_term.
PolySpec sqrt_taylor_spec(int degree, Mode mode = Mode::standard);

// Max deviation |p_N(x) - sqrt(x)| over a uniform grid on [kappa, 1].
double sqrt_taylor_max_error(int degree, double kappa, int grid_points = 1001);

// Smallest N <= 60 whose Taylor error on [kappa, 1] is <= epsilon/4.
// Throws ApproximationError when no such N exists.
int sqrt_taylor_degree(double epsilon, double kappa);

struct StepFit {
    PolySpec spec;
    double residual = 0.0;  // max |p - logistic| on the grid away from the jump
    double steepness = 0.0;
};

inline constexpr double kDefaultStepResidualLimit = 0.125;

// Chebyshev least-squares fit on [0, 1] of 1/(1 + exp(-s (x - beta))),
// converted to monomials. steepness <= 0 selects s = 4 * degree.
StepFit step_poly_spec(double beta, int degree, double steepness = 0.0,
                       double max_residual = kDefaultStepResidualLimit);

// Hoeffding shot count for an estimator gamma * mean(+-1):
// ceil(2 gamma^2 ln(2/delta) / epsilon^2).
std::uint64_t shots_for(double epsilon, double delta, double gamma);

// Text record: "mode <m>", "const_term <c>", then "j alpha_j" lines. '#' starts a comment.
PolySpec read_spec(std::istream& in);
void write_spec(std::ostream& out, const PolySpec& spec);
PolySpec load_spec_file(const std::string& path);

}  // namespace qsf
