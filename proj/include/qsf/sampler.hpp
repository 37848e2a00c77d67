#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsf/circuit.hpp"
#include "qsf/coefficients.hpp"
#include "qsf/states.hpp"

namespace qsf {

// Shots are drawn in fixed chunks; chunk c always uses substream (seed, c).
inline constexpr std::uint64_t kShotChunk = 4096;

enum class Accounting { reuse, pessimistic };

std::string to_string(Accounting accounting);
Accounting parse_accounting(const std::string& text);

// copies_per_power: input copies per unit of power (2 for rho/sigma pairs).
// reuse charges j * copies_per_power per shot with outcome j; pessimistic
// charges the whole register n * copies_per_power.
struct CopyModel {
    std::size_t copies_per_power = 1;
    Accounting accounting = Accounting::reuse;

    std::uint64_t charge(int j, int register_size) const;
};

struct ShotRecord {
    int j = 1;   // control outcome, 1..n
    int x = 1;   // +1 or -1
    std::uint64_t copies = 0;
};

struct CopyLedger {
    std::uint64_t shots = 0;
    std::uint64_t fresh_copies_total = 0;
    std::uint64_t reclaimed_total = 0;
    double expected_per_shot = 0.0;
    // Standard error of the empirical copies-per-shot mean.
    double per_shot_std_error = 0.0;

    double empirical_per_shot() const;
};

struct EstimateReport {
    double estimate = 0.0;
    double std_error = 0.0;
    double mean_x = 0.0;  // (P+ - P-) / N
    std::uint64_t shots = 0;
    CopyLedger copies;
    std::optional<double> exact_value;      // noise-free value of the sampled polynomial
    std::optional<double> reference_value;  // target the polynomial approximates
    int spec_degree = 0;
};

// Outcome counts indexed by j - 1.
struct ShotTally {
    std::vector<std::uint64_t> plus;
    std::vector<std::uint64_t> minus;

    std::uint64_t shots() const;
};

// Sum_j P(j) * charge(j).
double expected_copies_per_shot(const JointDistribution& dist, const CopyModel& model);

// i.i.d. shots: j from the marginal, then x from P(x | j). The sequence depends
// only on (dist, n_shots, seed), never on the worker count.
std::vector<ShotRecord> sample_shots(const JointDistribution& dist, std::uint64_t n_shots,
                                     std::uint64_t seed, unsigned workers = 1,
                                     const CopyModel& model = {});

// Same draws as sample_shots, reduced to counts.
ShotTally sample_tally(const JointDistribution& dist, std::uint64_t n_shots, std::uint64_t seed,
                       unsigned workers = 1);

// const_term + scale * (P+ - P-) / N, scale = gamma (standard) or n * gamma (variant).
EstimateReport estimate(std::span<const ShotRecord> records, const PolySpec& spec,
                        const CopyModel& model = {});
EstimateReport estimate(const ShotTally& tally, const PolySpec& spec, const CopyModel& model = {});

// Draws n_shots from the analytic distribution for the given atoms and reduces them.
EstimateReport estimate_poly(const PolySpec& spec, std::span<const double> atoms,
                             std::uint64_t n_shots, std::uint64_t seed, unsigned workers = 1,
                             const CopyModel& model = {});

// Term-by-term SWAP-test baseline: shots_per_term +-1 outcomes with mean atoms[j-1]
// for every nonzero alpha_j, combined as const_term + sum_j alpha_j * t_j.
// Each shot of term j consumes j * copies_per_power copies; nothing is reused.
EstimateReport baseline_generalized_swap(const PolySpec& spec, std::span<const double> atoms,
                                         std::uint64_t shots_per_term, std::uint64_t seed,
                                         std::size_t copies_per_power = 1);
EstimateReport baseline_generalized_swap(const PolySpec& spec, const DensityMatrix& rho,
                                         std::uint64_t shots_per_term, std::uint64_t seed);

// Copies one baseline round (one shot per nonzero term) consumes.
std::uint64_t baseline_copies_per_round(const PolySpec& spec, std::size_t copies_per_power = 1);

// One "j x" line per shot.
void write_shots(std::ostream& out, std::span<const ShotRecord> records);

}  // namespace qsf
