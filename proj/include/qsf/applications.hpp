#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsf/coefficients.hpp"
#include "qsf/sampler.hpp"
#include "qsf/states.hpp"

namespace qsf {

struct SampleOptions {
    Mode mode = Mode::standard;
    unsigned workers = 1;
    Accounting accounting = Accounting::reuse;
};

// Plans the truncation order and the shot count from (epsilon, delta), then
// samples. exact_value = S_N(rho), reference_value = S(rho).
EstimateReport estimate_entropy(const DensityMatrix& rho, double epsilon, double delta,
                                std::uint64_t seed, const SampleOptions& options = {});

// Fixed polynomial degree (highest power) and shot count.
EstimateReport estimate_entropy_fixed(const DensityMatrix& rho, int degree, std::uint64_t shots,
                                      std::uint64_t seed, const SampleOptions& options = {});

// rho, sigma and the atoms tr[(rho sigma)^k], k = 1..max_power, from the spectrum
// of sqrt(rho) sigma sqrt(rho).
struct FidelityProblem {
    DensityMatrix rho;
    DensityMatrix sigma;
    std::vector<double> spectrum;  // ascending, clamped at zero

    FidelityProblem(DensityMatrix rho_in, DensityMatrix sigma_in);

    std::vector<double> product_trace_powers(int max_power) const;
    // Smallest eigenvalue of rho sigma above the rank cutoff.
    double min_nonzero() const;
    // Number of eigenvalues of rho sigma above the rank cutoff.
    std::size_t rank() const;
    double exact_fidelity() const;
};

struct FidelityReport {
    EstimateReport root;             // estimate of sqrt(F) via the polynomial
    double fidelity_raw = 0.0;       // root.estimate squared
    double fidelity_clamped = 0.0;
    double exact_poly_fidelity = 0.0;  // square of the noise-free polynomial value
    double exact_fidelity = 0.0;
    int degree = 0;
};

// Picks the square-root polynomial degree from (epsilon, kappa) and plans
// shots so that the squared estimate is within epsilon with probability 1 - delta.
FidelityReport estimate_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon,
                                 double delta, std::uint64_t seed, const SampleOptions& options = {});

FidelityReport estimate_fidelity_fixed(const FidelityProblem& problem, int degree, std::uint64_t shots,
                                       std::uint64_t seed, const SampleOptions& options = {});

enum class ProbeKind { exact, sampled };

std::string to_string(ProbeKind kind);
ProbeKind parse_probe_kind(const std::string& text);

struct MaxEigOptions {
    // Stop band [tol, 1 - tol]; see README for how the default was chosen.
    double tol = 0.3;
    int degree = 16;
    double steepness = 0.0;  // <= 0 selects 4 * degree
    std::uint64_t shots = 100000;
    double width_cutoff = 1e-3;
    ProbeKind probes = ProbeKind::exact;
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct MaxEigStep {
    int step = 0;
    double beta = 0.0;
    double o_beta = 0.0;
    double std_error = 0.0;  // zero for exact probes
    std::string action;      // lower_right | raise_left | stop
};

struct MaxEigResult {
    double beta = 0.0;
    // Set when the loop ended through the bracket-width cutoff instead of the band.
    bool degenerate = false;
    std::vector<MaxEigStep> history;
    std::uint64_t total_shots = 0;
};

// o_beta = sum_k p_beta(lambda_k) for a step polynomial p_beta centred at beta.
double step_indicator_exact(const DensityMatrix& rho, const PolySpec& step_spec);

// Bisection on beta in [0, 1]. Throws SearchError (with the probe trajectory)
// when a sampled probe cannot resolve the band.
MaxEigResult max_eigenvalue(const DensityMatrix& rho, const MaxEigOptions& options = {});

std::string format_trajectory(const std::vector<MaxEigStep>& history);

}  // namespace qsf
