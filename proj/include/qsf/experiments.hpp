#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsf/applications.hpp"
#include "qsf/states.hpp"

namespace qsf {

enum class Application { entropy, fidelity };

std::string to_string(Application app);
Application parse_application(const std::string& text);

std::vector<std::uint64_t> decade_schedule(std::uint64_t first, std::uint64_t last);

struct ConvergenceConfig {
    Application app = Application::entropy;
    int degree = 6;
    std::vector<std::uint64_t> shots = decade_schedule(100, 1000000);
    int repeats = 10;
    std::vector<Mode> modes{Mode::standard, Mode::variant};
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct ConvergenceRow {
    std::uint64_t shots = 0;
    int repeat = 0;
    double estimate = 0.0;
    double exact_truncated = 0.0;
    double exact_full = 0.0;
    double abs_error = 0.0;
    std::uint64_t copies_consumed = 0;
    Mode mode = Mode::standard;
};

// Rows sorted by (shots, repeat, mode). sigma is required for fidelity.
std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config, const DensityMatrix& rho,
                                            const std::optional<DensityMatrix>& sigma = std::nullopt);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);

// Mean abs_error over repeats at one (shots, mode) point.
double mean_abs_error(const std::vector<ConvergenceRow>& rows, std::uint64_t shots, Mode mode);

struct BaselineConfig {
    std::vector<int> degrees{2, 4, 8};
    std::vector<std::uint64_t> budgets{10000, 100000, 1000000};
    int repeats = 10;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct BaselineRow {
    std::string method;  // qsf_pessimistic | qsf_reuse | swap_baseline
    int n = 0;
    std::uint64_t budget = 0;
    int repeats = 0;
    std::uint64_t shots = 0;  // per run; per term for the baseline
    double copies_used = 0.0;  // mean over repeats
    double mse = 0.0;
    double exact = 0.0;

    double mse_times_copies() const { return mse * copies_used; }
};

// Polynomial used for the comparison at degree n: the entropy series with highest power n.
PolySpec comparison_spec(int n);

// Rows sorted by (method, n, budget).
std::vector<BaselineRow> run_compare_baselines(const BaselineConfig& config, const DensityMatrix& rho);

void write_baselines_csv(std::ostream& out, const std::vector<BaselineRow>& rows);

// Copies the baseline needs relative to QSF (reuse ledger) for equal mean squared
// error, assuming MSE ~ c / copies and averaging c over the budgets.
double matched_mse_copy_ratio(const std::vector<BaselineRow>& rows, int n);

}  // namespace qsf
