#include "qsf/applications.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "qsf/errors.hpp"
#include "qsf/rng.hpp"

namespace qsf {

namespace {

void check_open_unit(double value, const char* name) {
    if (!(value > 0.0 && value < 1.0)) {
        throw ArgumentError(fmt::format("{} must lie in (0, 1), got {}", name, value));
    }
}

CopyModel model_for(const SampleOptions& options, std::size_t copies_per_power) {
    return CopyModel{copies_per_power, options.accounting};
}

FidelityReport fidelity_from_spec(const FidelityProblem& problem, const PolySpec& spec,
                                  std::uint64_t shots, std::uint64_t seed, const SampleOptions& options) {
    const auto atoms = problem.product_trace_powers(spec.degree());
    // sum_i p(mu_i) over the nonzero eigenvalues: the constant counts once per eigenvalue.
    const PolySpec summed = spec.with_const_term(spec.const_term() * static_cast<double>(problem.rank()));
    FidelityReport out;
    // Each unit of power consumes one copy of rho and one of sigma.
    out.root = estimate_poly(summed, atoms, shots, seed, options.workers, model_for(options, 2));
    out.exact_fidelity = problem.exact_fidelity();
    out.root.reference_value = std::sqrt(out.exact_fidelity);
    out.fidelity_raw = out.root.estimate * out.root.estimate;
    out.fidelity_clamped = std::clamp(out.fidelity_raw, 0.0, 1.0);
    const double f = *out.root.exact_value;
    out.exact_poly_fidelity = f * f;
    out.degree = spec.degree();
    return out;
}

}  // namespace

EstimateReport estimate_entropy(const DensityMatrix& rho, double epsilon, double delta, std::uint64_t seed,
                                const SampleOptions& options) {
    check_open_unit(epsilon, "epsilon");
    check_open_unit(delta, "delta");
    const double kappa = min_nonzero_eigenvalue(rho);
    const int order = entropy_truncation_order(epsilon, kappa);
    const PolySpec spec = entropy_taylor_spec(order, options.mode);
    // Truncation uses epsilon/2, sampling the other half.
    const std::uint64_t shots = shots_for(epsilon / 2, delta, spec.estimator_scale());
    EstimateReport r = estimate_poly(spec, trace_powers(rho, spec.degree()), shots, seed,
                                     options.workers, model_for(options, 1));
    r.reference_value = von_neumann_entropy(rho);
    return r;
}

EstimateReport estimate_entropy_fixed(const DensityMatrix& rho, int degree, std::uint64_t shots,
                                      std::uint64_t seed, const SampleOptions& options) {
    if (degree < 2) throw ArgumentError("entropy polynomial degree must be >= 2");
    const PolySpec spec = entropy_taylor_spec(degree - 1, options.mode);
    EstimateReport r = estimate_poly(spec, trace_powers(rho, spec.degree()), shots, seed,
                                     options.workers, model_for(options, 1));
    r.reference_value = von_neumann_entropy(rho);
    return r;
}

FidelityProblem::FidelityProblem(DensityMatrix rho_in, DensityMatrix sigma_in)
    : rho(std::move(rho_in)), sigma(std::move(sigma_in)) {
    spectrum = product_spectrum(rho, sigma);
    for (double& mu : spectrum) {
        if (mu < -kStateTol) {
            throw ValidationError(fmt::format("product spectrum has negative eigenvalue {}", mu));
        }
        mu = std::max(mu, 0.0);
    }
}

std::vector<double> FidelityProblem::product_trace_powers(int max_power) const {
    if (max_power < 1) throw ArgumentError("product_trace_powers: max power must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(max_power), 0.0);
    for (double mu : spectrum) {
        double p = 1.0;
        for (int k = 1; k <= max_power; ++k) {
            p *= mu;
            out[static_cast<std::size_t>(k - 1)] += p;
        }
    }
    return out;
}

double FidelityProblem::min_nonzero() const {
    for (double mu : spectrum) {
        // Eigenvalues of rho sigma lie in [0, 1]; rounding can overshoot 1 for identical pure states.
        if (mu > kRankCutoff) return std::min(mu, 1.0);
    }
    throw ApproximationError("fidelity: rho sigma has no eigenvalue above the cutoff (orthogonal supports)");
}

std::size_t FidelityProblem::rank() const {
    return static_cast<std::size_t>(
        std::count_if(spectrum.begin(), spectrum.end(), [](double mu) { return mu > kRankCutoff; }));
}

double FidelityProblem::exact_fidelity() const {
    double root = 0.0;
    for (double mu : spectrum) root += std::sqrt(mu);
    return std::clamp(root * root, 0.0, 1.0);
}

FidelityReport estimate_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon,
                                 double delta, std::uint64_t seed, const SampleOptions& options) {
    check_open_unit(epsilon, "epsilon");
    check_open_unit(delta, "delta");
    const FidelityProblem problem(rho, sigma);
    const int degree = sqrt_taylor_degree(epsilon, problem.min_nonzero());
    const PolySpec spec = sqrt_taylor_spec(degree, options.mode);
    // epsilon/4 from the polynomial plus epsilon/4 from sampling keeps the root
    // within epsilon/2, hence the square within epsilon.
    const std::uint64_t shots = shots_for(epsilon / 4, delta, spec.estimator_scale());
    return fidelity_from_spec(problem, spec, shots, seed, options);
}

FidelityReport estimate_fidelity_fixed(const FidelityProblem& problem, int degree, std::uint64_t shots,
                                       std::uint64_t seed, const SampleOptions& options) {
    return fidelity_from_spec(problem, sqrt_taylor_spec(degree, options.mode), shots, seed, options);
}

std::string to_string(ProbeKind kind) { return kind == ProbeKind::exact ? "exact" : "sampled"; }

ProbeKind parse_probe_kind(const std::string& text) {
    if (text == "exact") return ProbeKind::exact;
    if (text == "sampled") return ProbeKind::sampled;
    throw ParseError("unknown probe kind '" + text + "' (expected exact|sampled)");
}

double step_indicator_exact(const DensityMatrix& rho, const PolySpec& step_spec) {
    // The constant multiplies tr(I) = d.
    const double d = static_cast<double>(rho.dim());
    return step_spec.const_term() * d + step_spec.evaluate_atoms(trace_powers(rho, step_spec.degree())) -
           step_spec.const_term();
}

std::string format_trajectory(const std::vector<MaxEigStep>& history) {
    std::string out;
    for (const auto& s : history) {
        out += fmt::format("{},{:.12g},{:.12g},{}\n", s.step, s.beta, s.o_beta, s.action);
    }
    return out;
}

MaxEigResult max_eigenvalue(const DensityMatrix& rho, const MaxEigOptions& options) {
    if (!(options.tol > 0.0 && options.tol < 0.5)) {
        throw ArgumentError(fmt::format("band tolerance must lie in (0, 1/2), got {}", options.tol));
    }
    if (!(options.width_cutoff > 0.0)) throw ArgumentError("width cutoff must be > 0");
    if (options.probes == ProbeKind::sampled && options.shots < 1) {
        throw ArgumentError("sampled probes need at least one shot");
    }

    MaxEigResult result;
    double left = 0.0;
    double right = 1.0;
    const double d = static_cast<double>(rho.dim());
    std::vector<double> atoms;
    for (int step = 1;; ++step) {
        const double beta = 0.5 * (left + right);
        const StepFit fit = step_poly_spec(beta, options.degree, options.steepness);
        const PolySpec spec = fit.spec.with_const_term(fit.spec.const_term() * d);
        if (atoms.size() < static_cast<std::size_t>(spec.degree())) atoms = trace_powers(rho, spec.degree());

        MaxEigStep s;
        s.step = step;
        s.beta = beta;
        if (options.probes == ProbeKind::exact) {
            s.o_beta = spec.evaluate_atoms(atoms);
        } else {
            const auto report = estimate_poly(spec, atoms, options.shots,
                                              derive_seed(options.seed, static_cast<std::uint64_t>(step)),
                                              options.workers);
            s.o_beta = report.estimate;
            s.std_error = report.std_error;
            result.total_shots += report.shots;
            if (report.std_error > 0.5 - options.tol) {
                s.action = "unresolved";
                result.history.push_back(s);
                throw SearchError(fmt::format(
                    "max_eigenvalue: probe at beta={:.6g} has std error {:.3g} with {} shots, wider "
                    "than the band margin {:.3g}; step polynomial gamma = {:.3g}\ntrajectory "
                    "(step,beta,o_beta,action):\n{}",
                    beta, report.std_error, options.shots, 0.5 - options.tol, spec.gamma(),
                    format_trajectory(result.history)));
            }
        }

        if (s.o_beta < options.tol) {
            s.action = "lower_right";
            right = beta;
        } else if (s.o_beta > 1.0 - options.tol) {
            s.action = "raise_left";
            left = beta;
        } else {
            s.action = "stop";
            result.history.push_back(s);
            result.beta = beta;
            return result;
        }
        result.history.push_back(s);
        if (right - left < options.width_cutoff) {
            result.beta = 0.5 * (left + right);
            result.degenerate = true;
            return result;
        }
    }
}

}  // namespace qsf
