#include "qsf/coefficients.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "qsf/errors.hpp"

namespace qsf {

namespace {

constexpr int kMaxSeriesOrder = 60;

int next_power_of_two(int v) {
    int n = 1;
    while (n < v) n <<= 1;
    return n;
}

// Pascal's triangle up to row 60; C(60, 30) ~ 1.2e17 fits in 64 bits exactly.
const std::array<std::array<std::uint64_t, kMaxSeriesOrder + 1>, kMaxSeriesOrder + 1>& pascal() {
    static const auto table = [] {
        std::array<std::array<std::uint64_t, kMaxSeriesOrder + 1>, kMaxSeriesOrder + 1> t{};
        for (int k = 0; k <= kMaxSeriesOrder; ++k) {
            t[k][0] = 1;
            for (int j = 1; j <= k; ++j) t[k][j] = t[k - 1][j - 1] + (j < k ? t[k - 1][j] : 0);
        }
        return t;
    }();
    return table;
}

void check_series_order(int order, const char* what) {
    if (order < 1) throw ArgumentError(fmt::format("{}: order must be >= 1, got {}", what, order));
    if (order > kMaxSeriesOrder) {
        throw ArithmeticError(fmt::format("{}: order {} exceeds the exact-binomial cap {}", what,
                                          order, kMaxSeriesOrder));
    }
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::standard ? "standard" : "variant"; }

Mode parse_mode(const std::string& text) {
    if (text == "standard") return Mode::standard;
    if (text == "variant") return Mode::variant;
    throw ParseError("unknown mode '" + text + "' (expected standard|variant)");
}

PolySpec PolySpec::make(const std::map<int, double>& alphas, double const_term, Mode mode) {
    int degree = 0;
    for (const auto& [j, a] : alphas) {
        if (j < 1) throw ArgumentError(fmt::format("PolySpec: power {} must be >= 1", j));
        if (!std::isfinite(a)) throw ArgumentError("PolySpec: non-finite coefficient");
        if (a != 0.0) degree = std::max(degree, j);
    }
    if (degree == 0) throw ArgumentError("PolySpec: at least one coefficient must be nonzero");
    if (!std::isfinite(const_term)) throw ArgumentError("PolySpec: non-finite constant term");

    PolySpec spec;
    spec.mode_ = mode;
    spec.const_term_ = const_term;
    spec.degree_ = degree;
    const int n = next_power_of_two(degree);
    spec.alphas_.assign(static_cast<std::size_t>(n), 0.0);
    for (const auto& [j, a] : alphas) {
        if (j <= degree) spec.alphas_[static_cast<std::size_t>(j - 1)] = a;
    }

    double gamma = 0.0;
    for (double a : spec.alphas_) {
        gamma = mode == Mode::standard ? gamma + std::abs(a) : std::max(gamma, std::abs(a));
    }
    spec.gamma_ = gamma;

    spec.thetas_.resize(spec.alphas_.size());
    for (std::size_t i = 0; i < spec.alphas_.size(); ++i) {
        const double a = spec.alphas_[i];
        if (mode == Mode::standard) {
            spec.thetas_[i] = a > 0.0 ? std::numbers::pi / 2 : (a < 0.0 ? -std::numbers::pi / 2 : 0.0);
        } else {
            spec.thetas_[i] = std::asin(std::clamp(a / gamma, -1.0, 1.0));
        }
    }
    return spec;
}

int PolySpec::control_qubits() const {
    int q = 0;
    while ((1 << q) < register_size()) ++q;
    return q;
}

double PolySpec::branch_probability(int j) const {
    if (mode_ == Mode::variant) return 1.0 / register_size();
    return std::abs(alpha(j)) / gamma_;
}

double PolySpec::estimator_scale() const {
    return mode_ == Mode::variant ? register_size() * gamma_ : gamma_;
}

std::vector<double> PolySpec::amplitudes() const {
    std::vector<double> amps(alphas_.size());
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = std::sqrt(std::abs(alphas_[i]) / gamma_);
    return amps;
}

double PolySpec::evaluate_atoms(std::span<const double> atoms) const {
    if (atoms.size() < static_cast<std::size_t>(degree_)) {
        throw ArgumentError(fmt::format("evaluate_atoms: need {} trace powers, got {}", degree_,
                                        atoms.size()));
    }
    double value = const_term_;
    for (int j = 1; j <= degree_; ++j) value += alpha(j) * atoms[static_cast<std::size_t>(j - 1)];
    return value;
}

double PolySpec::evaluate_scalar(double x) const {
    // Horner on sum_j alpha_j x^j.
    double acc = 0.0;
    for (int j = degree_; j >= 1; --j) acc = (acc + alpha(j)) * x;
    return const_term_ + acc;
}

PolySpec PolySpec::with_mode(Mode mode) const { return make(coefficient_map(), const_term_, mode); }

PolySpec PolySpec::with_const_term(double const_term) const {
    PolySpec copy = *this;
    copy.const_term_ = const_term;
    return copy;
}

std::map<int, double> PolySpec::coefficient_map() const {
    std::map<int, double> out;
    for (int j = 1; j <= degree_; ++j) {
        if (alpha(j) != 0.0) out[j] = alpha(j);
    }
    return out;
}

PolySpec entropy_taylor_spec(int truncation_order, Mode mode) {
    check_series_order(truncation_order, "entropy_taylor_spec");
    const auto& binom = pascal();
    std::map<int, double> alphas;
    for (int j = 0; j <= truncation_order; ++j) {
        long double sum = 0.0L;
        for (int k = std::max(j, 1); k <= truncation_order; ++k) {
            sum += static_cast<long double>(binom[k][j]) / k;
        }
        const long double signed_sum = (j % 2 == 0) ? sum : -sum;
        alphas[j + 1] = static_cast<double>(signed_sum);
    }
    return PolySpec::make(alphas, 0.0, mode);
}

int entropy_truncation_order(double epsilon, double kappa) {
    if (!(epsilon > 0.0) || epsilon > 1.0) {
        throw ArgumentError(fmt::format("entropy_truncation_order: epsilon {} outside (0, 1]", epsilon));
    }
    if (!(kappa > 0.0) || kappa > 1.0) {
        throw ArgumentError(fmt::format("entropy_truncation_order: kappa {} outside (0, 1]", kappa));
    }
    kappa = std::min(kappa, 0.5);
    const double n = std::log(2.0 / (epsilon * kappa)) / std::log(1.0 / (1.0 - kappa));
    return std::max(1, static_cast<int>(std::ceil(n * (1.0 - 1e-12))));
}

PolySpec sqrt_taylor_spec(int degree, Mode mode) {
    check_series_order(degree, "sqrt_taylor_spec");
    const auto& binom = pascal();
    // Generalized binomials C(1/2, k).
    std::vector<long double> half(static_cast<std::size_t>(degree) + 1);
    half[0] = 1.0L;
    for (int k = 1; k <= degree; ++k) half[k] = half[k - 1] * (0.5L - (k - 1)) / k;

    std::vector<long double> mono(static_cast<std::size_t>(degree) + 1, 0.0L);
    for (int k = 0; k <= degree; ++k) {
        // (x - 1)^k = sum_m C(k, m) x^m (-1)^{k-m}
        for (int m = 0; m <= k; ++m) {
            const long double sign = ((k - m) % 2 == 0) ? 1.0L : -1.0L;
            mono[m] += half[k] * static_cast<long double>(binom[k][m]) * sign;
        }
    }
    std::map<int, double> alphas;
    for (int m = 1; m <= degree; ++m) alphas[m] = static_cast<double>(mono[m]);
    return PolySpec::make(alphas, static_cast<double>(mono[0]), mode);
}

double sqrt_taylor_max_error(int degree, double kappa, int grid_points) {
    if (!(kappa > 0.0) || kappa > 1.0) throw ArgumentError("sqrt_taylor_max_error: kappa outside (0, 1]");
    if (grid_points < 2) throw ArgumentError("sqrt_taylor_max_error: need at least 2 grid points");
    const PolySpec spec = sqrt_taylor_spec(degree);
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double x = kappa + (1.0 - kappa) * i / (grid_points - 1);
        worst = std::max(worst, std::abs(spec.evaluate_scalar(x) - std::sqrt(x)));
    }
    return worst;
}

int sqrt_taylor_degree(double epsilon, double kappa) {
    if (!(epsilon > 0.0)) throw ArgumentError("sqrt_taylor_degree: epsilon must be positive");
    if (!(kappa > 0.0) || kappa > 1.0) throw ArgumentError("sqrt_taylor_degree: kappa outside (0, 1]");
    for (int n = 1; n <= kMaxSeriesOrder; ++n) {
        if (sqrt_taylor_max_error(n, kappa) <= epsilon / 4.0) return n;
    }
    throw ApproximationError(fmt::format(
        "sqrt_taylor_degree: no degree <= {} reaches error {} on [{}, 1]; kappa too small",
        kMaxSeriesOrder, epsilon / 4.0, kappa));
}

StepFit step_poly_spec(double beta, int degree, double steepness, double max_residual) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw ArgumentError(fmt::format("step_poly_spec: threshold {} outside (0, 1)", beta));
    }
    if (degree < 4) throw ArgumentError("step_poly_spec: degree must be >= 4");
    if (degree > kMaxSeriesOrder) throw ArithmeticError("step_poly_spec: degree above 60");
    const double s = steepness > 0.0 ? steepness : 4.0 * degree;
    auto logistic = [&](double x) { return 1.0 / (1.0 + std::exp(-s * (x - beta))); };

    // Chebyshev-weighted least squares on [0, 1] (t = 2x - 1) via Gauss-Chebyshev quadrature.
    constexpr int kNodes = 4096;
    std::vector<long double> cheb(static_cast<std::size_t>(degree) + 1, 0.0L);
    for (int i = 0; i < kNodes; ++i) {
        const long double angle = (i + 0.5L) * std::numbers::pi_v<long double> / kNodes;
        const double t = static_cast<double>(std::cos(angle));
        const long double f = logistic(0.5 * (t + 1.0));
        for (int k = 0; k <= degree; ++k) cheb[k] += f * std::cos(k * angle);
    }
    for (int k = 0; k <= degree; ++k) cheb[k] *= (k == 0 ? 1.0L : 2.0L) / kNodes;

    // Expand T_k(2x - 1) into monomials of x.
    std::vector<long double> mono(static_cast<std::size_t>(degree) + 1, 0.0L);
    std::vector<long double> t_prev(mono.size(), 0.0L), t_cur(mono.size(), 0.0L);
    t_prev[0] = 1.0L;                  // T_0
    t_cur[0] = -1.0L, t_cur[1] = 2.0L; // T_1 = 2x - 1
    mono[0] += cheb[0];
    for (std::size_t m = 0; m < mono.size(); ++m) mono[m] += cheb[1] * t_cur[m];
    for (int k = 2; k <= degree; ++k) {
        std::vector<long double> t_next(mono.size(), 0.0L);
        for (std::size_t m = 0; m < mono.size(); ++m) {
            // T_{k} = 2 (2x - 1) T_{k-1} - T_{k-2}
            t_next[m] += -2.0L * t_cur[m] - t_prev[m];
            if (m + 1 < mono.size()) t_next[m + 1] += 4.0L * t_cur[m];
        }
        for (std::size_t m = 0; m < mono.size(); ++m) mono[m] += cheb[k] * t_next[m];
        t_prev = std::move(t_cur);
        t_cur = std::move(t_next);
    }

    std::map<int, double> alphas;
    for (int m = 1; m <= degree; ++m) alphas[m] = static_cast<double>(mono[m]);
    StepFit fit{PolySpec::make(alphas, static_cast<double>(mono[0])), 0.0, s};

    const double exclusion = 2.0 / s;
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        if (std::abs(x - beta) < exclusion) continue;
        fit.residual = std::max(fit.residual, std::abs(fit.spec.evaluate_scalar(x) - logistic(x)));
    }
    if (fit.residual > max_residual) {
        throw ApproximationError(fmt::format(
            "step_poly_spec: fit residual {:.4g} exceeds {:.4g} (beta={}, degree={}, s={}); "
            "raise the degree or lower the steepness",
            fit.residual, max_residual, beta, degree, s));
    }
    return fit;
}

std::uint64_t shots_for(double epsilon, double delta, double gamma) {
    if (!(epsilon > 0.0) || !(delta > 0.0) || !(gamma > 0.0)) {
        throw ArgumentError("shots_for: epsilon, delta and gamma must be positive");
    }
    if (!(delta < 1.0)) throw ArgumentError("shots_for: delta must be < 1");
    const double n = 2.0 * gamma * gamma * std::log(2.0 / delta) / (epsilon * epsilon);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(n * (1.0 - 1e-12))));
}

PolySpec read_spec(std::istream& in) {
    Mode mode = Mode::standard;
    double const_term = 0.0;
    std::map<int, double> alphas;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        std::string key;
        if (!(fields >> key)) continue;
        if (key == "mode") {
            std::string value;
            if (!(fields >> value)) throw ParseError(fmt::format("spec line {}: missing mode", line_no));
            mode = parse_mode(value);
        } else if (key == "const_term") {
            if (!(fields >> const_term)) {
                throw ParseError(fmt::format("spec line {}: bad const_term", line_no));
            }
        } else {
            int j = 0;
            double a = 0.0;
            std::istringstream pair(line);
            if (!(pair >> j >> a)) {
                throw ParseError(fmt::format("spec line {}: expected 'j alpha_j'", line_no));
            }
            if (alphas.contains(j)) throw ParseError(fmt::format("spec line {}: duplicate power {}", line_no, j));
            alphas[j] = a;
        }
    }
    try {
        return PolySpec::make(alphas, const_term, mode);
    } catch (const ArgumentError& e) {
        throw ParseError(std::string("spec: ") + e.what());
    }
}

void write_spec(std::ostream& out, const PolySpec& spec) {
    out << "mode " << to_string(spec.mode()) << '\n';
    out << fmt::format("const_term {:.17g}\n", spec.const_term());
    for (const auto& [j, a] : spec.coefficient_map()) out << fmt::format("{} {:.17g}\n", j, a);
}

PolySpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file '" + path + "'");
    return read_spec(in);
}

}  // namespace qsf
