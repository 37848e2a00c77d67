#include "qsf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "qsf/errors.hpp"
#include "qsf/rng.hpp"

namespace qsf {

namespace {

// Runs fn(i) for i in [0, count) on a fixed pool; fn must write only to slot i.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
    const unsigned pool = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(workers, count)));
    if (pool <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < pool; ++w) {
        threads.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string g12(double v) { return fmt::format("{:.12g}", v); }

}  // namespace

std::string to_string(Application app) { return app == Application::entropy ? "entropy" : "fidelity"; }

Application parse_application(const std::string& text) {
    if (text == "entropy") return Application::entropy;
    if (text == "fidelity") return Application::fidelity;
    throw ParseError("unknown application '" + text + "' (expected entropy|fidelity)");
}

std::vector<std::uint64_t> decade_schedule(std::uint64_t first, std::uint64_t last) {
    if (first < 1 || last < first) throw ArgumentError("decade_schedule: need 1 <= first <= last");
    std::vector<std::uint64_t> out;
    for (std::uint64_t s = first; s <= last; s *= 10) {
        out.push_back(s);
        if (s > last / 10) break;
    }
    return out;
}

std::vector<ConvergenceRow> run_convergence(const ConvergenceConfig& config, const DensityMatrix& rho,
                                            const std::optional<DensityMatrix>& sigma) {
    if (config.repeats < 1) throw ArgumentError("repeats must be >= 1");
    if (config.shots.empty()) throw ArgumentError("shot schedule is empty");
    if (config.modes.empty()) throw ArgumentError("no modes selected");
    std::optional<FidelityProblem> problem;
    if (config.app == Application::fidelity) {
        if (!sigma) throw ArgumentError("fidelity convergence needs a second state");
        problem.emplace(rho, *sigma);
    }

    struct Task {
        std::uint64_t shots;
        int repeat;
        Mode mode;
    };
    std::vector<Task> tasks;
    for (auto shots : config.shots) {
        for (int r = 0; r < config.repeats; ++r) {
            for (Mode m : config.modes) tasks.push_back({shots, r, m});
        }
    }
    std::sort(tasks.begin(), tasks.end(), [](const Task& a, const Task& b) {
        return std::tie(a.shots, a.repeat, a.mode) < std::tie(b.shots, b.repeat, b.mode);
    });

    std::vector<ConvergenceRow> rows(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        const Task& t = tasks[i];
        const std::uint64_t seed = derive_seed(config.seed, t.shots, static_cast<std::uint64_t>(t.repeat),
                                               static_cast<std::uint64_t>(t.mode));
        SampleOptions options;
        options.mode = t.mode;
        ConvergenceRow row;
        row.shots = t.shots;
        row.repeat = t.repeat;
        row.mode = t.mode;
        if (config.app == Application::entropy) {
            const auto r = estimate_entropy_fixed(rho, config.degree, t.shots, seed, options);
            row.estimate = r.estimate;
            row.exact_truncated = *r.exact_value;
            row.exact_full = *r.reference_value;
            row.copies_consumed = r.copies.fresh_copies_total;
        } else {
            const auto r = estimate_fidelity_fixed(*problem, config.degree, t.shots, seed, options);
            row.estimate = r.fidelity_raw;
            row.exact_truncated = r.exact_poly_fidelity;
            row.exact_full = r.exact_fidelity;
            row.copies_consumed = r.root.copies.fresh_copies_total;
        }
        row.abs_error = std::abs(row.estimate - row.exact_truncated);
        rows[i] = row;
    });
    return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    out << "shots,repeat,estimate,exact_truncated,exact_full,abs_error,copies_consumed,mode\n";
    for (const auto& r : rows) {
        out << r.shots << ',' << r.repeat << ',' << g12(r.estimate) << ',' << g12(r.exact_truncated) << ','
            << g12(r.exact_full) << ',' << g12(r.abs_error) << ',' << r.copies_consumed << ','
            << to_string(r.mode) << '\n';
    }
}

double mean_abs_error(const std::vector<ConvergenceRow>& rows, std::uint64_t shots, Mode mode) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : rows) {
        if (r.shots == shots && r.mode == mode) {
            sum += r.abs_error;
            ++count;
        }
    }
    if (count == 0) throw ArgumentError(fmt::format("no rows at {} shots in mode {}", shots, to_string(mode)));
    return sum / count;
}

PolySpec comparison_spec(int n) {
    if (n < 1) throw ArgumentError("comparison degree must be >= 1");
    if (n == 1) return PolySpec::make({{1, 1.0}});
    return entropy_taylor_spec(n - 1);
}

std::vector<BaselineRow> run_compare_baselines(const BaselineConfig& config, const DensityMatrix& rho) {
    if (config.repeats < 1) throw ArgumentError("repeats must be >= 1");
    const std::vector<std::string> methods{"qsf_pessimistic", "qsf_reuse", "swap_baseline"};

    struct Task {
        std::size_t method;
        int n;
        std::uint64_t budget;
    };
    std::vector<Task> tasks;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (int n : config.degrees) {
            for (auto budget : config.budgets) tasks.push_back({m, n, budget});
        }
    }
    std::sort(tasks.begin(), tasks.end(), [&](const Task& a, const Task& b) {
        return std::tie(methods[a.method], a.n, a.budget) < std::tie(methods[b.method], b.n, b.budget);
    });

    std::vector<BaselineRow> rows(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
        const Task& t = tasks[i];
        const PolySpec spec = comparison_spec(t.n);
        const auto atoms = trace_powers(rho, spec.degree());
        BaselineRow row;
        row.method = methods[t.method];
        row.n = t.n;
        row.budget = t.budget;
        row.repeats = config.repeats;
        row.exact = spec.evaluate_atoms(atoms);

        const bool baseline = row.method == "swap_baseline";
        CopyModel model;
        model.accounting = row.method == "qsf_pessimistic" ? Accounting::pessimistic : Accounting::reuse;
        const double per_shot = baseline ? static_cast<double>(baseline_copies_per_round(spec))
                                         : expected_copies_per_shot(joint_distribution(spec, atoms), model);
        row.shots = std::max<std::uint64_t>(
            1, static_cast<std::uint64_t>(std::floor(static_cast<double>(t.budget) / per_shot)));

        double sq = 0.0;
        double copies = 0.0;
        for (int r = 0; r < config.repeats; ++r) {
            const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(t.n),
                                                   t.budget, static_cast<std::uint64_t>(r) * 4 + t.method);
            const EstimateReport rep = baseline ? baseline_generalized_swap(spec, atoms, row.shots, seed)
                                                : estimate_poly(spec, atoms, row.shots, seed, 1, model);
            sq += (rep.estimate - row.exact) * (rep.estimate - row.exact);
            copies += static_cast<double>(rep.copies.fresh_copies_total);
        }
        row.mse = sq / config.repeats;
        row.copies_used = copies / config.repeats;
        rows[i] = row;
    });
    return rows;
}

void write_baselines_csv(std::ostream& out, const std::vector<BaselineRow>& rows) {
    out << "method,n,budget,repeats,shots,copies_used,mse,mse_times_copies,exact\n";
    for (const auto& r : rows) {
        out << r.method << ',' << r.n << ',' << r.budget << ',' << r.repeats << ',' << r.shots << ','
            << g12(r.copies_used) << ',' << g12(r.mse) << ',' << g12(r.mse_times_copies()) << ','
            << g12(r.exact) << '\n';
    }
}

double matched_mse_copy_ratio(const std::vector<BaselineRow>& rows, int n) {
    double base = 0.0;
    double qsf = 0.0;
    int base_count = 0;
    int qsf_count = 0;
    for (const auto& r : rows) {
        if (r.n != n) continue;
        if (r.method == "swap_baseline") {
            base += r.mse_times_copies();
            ++base_count;
        } else if (r.method == "qsf_reuse") {
            qsf += r.mse_times_copies();
            ++qsf_count;
        }
    }
    if (base_count == 0 || qsf_count == 0) {
        throw ArgumentError(fmt::format("matched_mse_copy_ratio: missing rows for n={}", n));
    }
    if (qsf == 0.0) throw NumericalError("matched_mse_copy_ratio: QSF mean squared error is zero");
    return (base / base_count) / (qsf / qsf_count);
}

}  // namespace qsf
