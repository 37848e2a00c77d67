#include "qsf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "qsf/errors.hpp"
#include "qsf/rng.hpp"

namespace qsf {

namespace {

// Precomputed draw tables for one distribution.
struct Sampler {
    std::vector<double> cdf;
    std::vector<double> p_plus_given_j;
    double total = 0.0;

    explicit Sampler(const JointDistribution& dist) {
        const int n = dist.register_size();
        cdf.resize(static_cast<std::size_t>(n));
        p_plus_given_j.resize(static_cast<std::size_t>(n));
        double acc = 0.0;
        int last_nonzero = 0;
        for (int j = 1; j <= n; ++j) {
            const double m = dist.marginal(j);
            acc += m;
            cdf[static_cast<std::size_t>(j - 1)] = acc;
            p_plus_given_j[static_cast<std::size_t>(j - 1)] = m > 0.0 ? dist.p_plus(j) / m : 0.0;
            if (m > 0.0) last_nonzero = j;
        }
        total = acc;
        // Rounding must never select a zero-probability outcome past the last live one.
        for (int j = last_nonzero; j <= n; ++j) cdf[static_cast<std::size_t>(j - 1)] = 2.0;
    }

    std::pair<int, int> draw(Rng& rng) const {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto index = static_cast<std::size_t>(it - cdf.begin());
        const int x = rng.uniform() < p_plus_given_j[index] ? 1 : -1;
        return {static_cast<int>(index) + 1, x};
    }
};

template <typename ChunkFn>
void for_each_chunk(std::uint64_t n_shots, unsigned workers, ChunkFn&& fn) {
    const std::uint64_t chunks = (n_shots + kShotChunk - 1) / kShotChunk;
    const unsigned pool = static_cast<unsigned>(
        std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers == 0 ? 1 : workers, chunks)));
    if (pool == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (unsigned w = 0; w < pool; ++w) {
        threads.emplace_back([&, w] {
            for (std::uint64_t c = w; c < chunks; c += pool) fn(c);
        });
    }
    for (auto& t : threads) t.join();
}

std::uint64_t chunk_size(std::uint64_t c, std::uint64_t n_shots) {
    return std::min(kShotChunk, n_shots - c * kShotChunk);
}

void check_shots(std::uint64_t n_shots) {
    if (n_shots < 1) throw ArgumentError("shot count must be >= 1");
}

EstimateReport finish(std::uint64_t plus, std::uint64_t minus, const PolySpec& spec, CopyLedger ledger) {
    const std::uint64_t shots = plus + minus;
    if (shots == 0) throw ArgumentError("estimate: no shot records");
    EstimateReport r;
    r.shots = shots;
    r.mean_x = (static_cast<double>(plus) - static_cast<double>(minus)) / static_cast<double>(shots);
    const double scale = spec.estimator_scale();
    r.estimate = spec.const_term() + scale * r.mean_x;
    r.std_error = scale * std::sqrt(std::max(0.0, 1.0 - r.mean_x * r.mean_x)) /
                  std::sqrt(static_cast<double>(shots));
    r.copies = ledger;
    r.spec_degree = spec.degree();
    return r;
}

// Ledger from per-outcome shot counts.
CopyLedger ledger_from_counts(std::span<const std::uint64_t> per_j, const PolySpec& spec,
                              const CopyModel& model) {
    const int n = spec.register_size();
    CopyLedger ledger;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int j = 1; j <= static_cast<int>(per_j.size()); ++j) {
        const std::uint64_t count = per_j[static_cast<std::size_t>(j - 1)];
        const std::uint64_t charge = model.charge(j, n);
        ledger.shots += count;
        ledger.fresh_copies_total += count * charge;
        ledger.reclaimed_total += count * (static_cast<std::uint64_t>(n) * model.copies_per_power - charge);
        sum += static_cast<double>(count) * static_cast<double>(charge);
        sum_sq += static_cast<double>(count) * static_cast<double>(charge) * static_cast<double>(charge);
    }
    for (int j = 1; j <= n; ++j) {
        ledger.expected_per_shot += spec.branch_probability(j) * static_cast<double>(model.charge(j, n));
    }
    if (ledger.shots > 1) {
        const double shots = static_cast<double>(ledger.shots);
        const double mean = sum / shots;
        const double var = std::max(0.0, (sum_sq - shots * mean * mean) / (shots - 1.0));
        ledger.per_shot_std_error = std::sqrt(var / shots);
    }
    return ledger;
}

}  // namespace

std::string to_string(Accounting accounting) {
    return accounting == Accounting::reuse ? "reuse" : "pessimistic";
}

Accounting parse_accounting(const std::string& text) {
    if (text == "reuse") return Accounting::reuse;
    if (text == "pessimistic") return Accounting::pessimistic;
    throw ParseError("unknown accounting '" + text + "' (expected reuse|pessimistic)");
}

std::uint64_t CopyModel::charge(int j, int register_size) const {
    const int units = accounting == Accounting::reuse ? j : register_size;
    return static_cast<std::uint64_t>(units) * copies_per_power;
}

double CopyLedger::empirical_per_shot() const {
    return shots == 0 ? 0.0 : static_cast<double>(fresh_copies_total) / static_cast<double>(shots);
}

std::uint64_t ShotTally::shots() const {
    std::uint64_t total = 0;
    for (auto c : plus) total += c;
    for (auto c : minus) total += c;
    return total;
}

double expected_copies_per_shot(const JointDistribution& dist, const CopyModel& model) {
    double e = 0.0;
    for (int j = 1; j <= dist.register_size(); ++j) {
        e += dist.marginal(j) * static_cast<double>(model.charge(j, dist.register_size()));
    }
    return e;
}

std::vector<ShotRecord> sample_shots(const JointDistribution& dist, std::uint64_t n_shots,
                                     std::uint64_t seed, unsigned workers, const CopyModel& model) {
    check_shots(n_shots);
    const Sampler sampler(dist);
    const int n = dist.register_size();
    std::vector<ShotRecord> records(n_shots);
    for_each_chunk(n_shots, workers, [&](std::uint64_t c) {
        Rng rng(seed, c);
        const std::uint64_t begin = c * kShotChunk;
        const std::uint64_t count = chunk_size(c, n_shots);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto [j, x] = sampler.draw(rng);
            records[begin + i] = ShotRecord{j, x, model.charge(j, n)};
        }
    });
    return records;
}

ShotTally sample_tally(const JointDistribution& dist, std::uint64_t n_shots, std::uint64_t seed,
                       unsigned workers) {
    check_shots(n_shots);
    const Sampler sampler(dist);
    const auto n = static_cast<std::size_t>(dist.register_size());
    const std::uint64_t chunks = (n_shots + kShotChunk - 1) / kShotChunk;
    std::vector<ShotTally> partial(chunks, ShotTally{std::vector<std::uint64_t>(n, 0),
                                                     std::vector<std::uint64_t>(n, 0)});
    for_each_chunk(n_shots, workers, [&](std::uint64_t c) {
        Rng rng(seed, c);
        auto& t = partial[c];
        const std::uint64_t count = chunk_size(c, n_shots);
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto [j, x] = sampler.draw(rng);
            auto& table = x > 0 ? t.plus : t.minus;
            ++table[static_cast<std::size_t>(j - 1)];
        }
    });
    ShotTally total{std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0)};
    for (const auto& t : partial) {
        for (std::size_t i = 0; i < n; ++i) {
            total.plus[i] += t.plus[i];
            total.minus[i] += t.minus[i];
        }
    }
    return total;
}

EstimateReport estimate(std::span<const ShotRecord> records, const PolySpec& spec, const CopyModel& model) {
    if (records.empty()) throw ArgumentError("estimate: no shot records");
    const auto n = static_cast<std::size_t>(spec.register_size());
    ShotTally tally{std::vector<std::uint64_t>(n, 0), std::vector<std::uint64_t>(n, 0)};
    for (const auto& r : records) {
        if (r.j < 1 || static_cast<std::size_t>(r.j) > n || (r.x != 1 && r.x != -1)) {
            throw ArgumentError(fmt::format("estimate: invalid shot record (j={}, x={})", r.j, r.x));
        }
        auto& table = r.x > 0 ? tally.plus : tally.minus;
        ++table[static_cast<std::size_t>(r.j - 1)];
    }
    return estimate(tally, spec, model);
}

EstimateReport estimate(const ShotTally& tally, const PolySpec& spec, const CopyModel& model) {
    const auto n = static_cast<std::size_t>(spec.register_size());
    if (tally.plus.size() != n || tally.minus.size() != n) {
        throw ArgumentError("estimate: tally size does not match the spec register");
    }
    std::uint64_t plus = 0;
    std::uint64_t minus = 0;
    std::vector<std::uint64_t> per_j(n);
    for (std::size_t i = 0; i < n; ++i) {
        plus += tally.plus[i];
        minus += tally.minus[i];
        per_j[i] = tally.plus[i] + tally.minus[i];
    }
    return finish(plus, minus, spec, ledger_from_counts(per_j, spec, model));
}

EstimateReport estimate_poly(const PolySpec& spec, std::span<const double> atoms, std::uint64_t n_shots,
                             std::uint64_t seed, unsigned workers, const CopyModel& model) {
    const JointDistribution dist = joint_distribution(spec, atoms);
    EstimateReport r = estimate(sample_tally(dist, n_shots, seed, workers), spec, model);
    r.exact_value = spec.evaluate_atoms(atoms);
    return r;
}

std::uint64_t baseline_copies_per_round(const PolySpec& spec, std::size_t copies_per_power) {
    std::uint64_t total = 0;
    for (int j = 1; j <= spec.degree(); ++j) {
        if (spec.alpha(j) != 0.0) total += static_cast<std::uint64_t>(j) * copies_per_power;
    }
    return total;
}

EstimateReport baseline_generalized_swap(const PolySpec& spec, std::span<const double> atoms,
                                         std::uint64_t shots_per_term, std::uint64_t seed,
                                         std::size_t copies_per_power) {
    check_shots(shots_per_term);
    if (atoms.size() < static_cast<std::size_t>(spec.degree())) {
        throw ArgumentError("baseline_generalized_swap: atoms do not cover the spec degree");
    }
    EstimateReport r;
    r.estimate = spec.const_term();
    double variance = 0.0;
    for (int j = 1; j <= spec.degree(); ++j) {
        const double alpha = spec.alpha(j);
        if (alpha == 0.0) continue;
        const double p_plus = 0.5 * (1.0 + atoms[static_cast<std::size_t>(j - 1)]);
        const std::uint64_t chunks = (shots_per_term + kShotChunk - 1) / kShotChunk;
        std::uint64_t plus = 0;
        for (std::uint64_t c = 0; c < chunks; ++c) {
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)), c);
            const std::uint64_t count = chunk_size(c, shots_per_term);
            for (std::uint64_t i = 0; i < count; ++i) plus += rng.uniform() < p_plus ? 1 : 0;
        }
        const double m = static_cast<double>(shots_per_term);
        const double t_hat = (2.0 * static_cast<double>(plus) - m) / m;
        r.estimate += alpha * t_hat;
        variance += alpha * alpha * std::max(0.0, 1.0 - t_hat * t_hat) / m;
        r.shots += shots_per_term;
        r.copies.shots += shots_per_term;
        r.copies.fresh_copies_total += shots_per_term * static_cast<std::uint64_t>(j) * copies_per_power;
    }
    r.std_error = std::sqrt(variance);
    r.copies.expected_per_shot = r.copies.empirical_per_shot();
    r.exact_value = spec.evaluate_atoms(atoms);
    r.spec_degree = spec.degree();
    return r;
}

EstimateReport baseline_generalized_swap(const PolySpec& spec, const DensityMatrix& rho,
                                         std::uint64_t shots_per_term, std::uint64_t seed) {
    return baseline_generalized_swap(spec, trace_powers(rho, spec.degree()), shots_per_term, seed);
}

void write_shots(std::ostream& out, std::span<const ShotRecord> records) {
    for (const auto& r : records) out << r.j << ' ' << r.x << '\n';
}

}  // namespace qsf
