#include "qsf/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qsf/applications.hpp"
#include "qsf/circuit.hpp"
#include "qsf/coefficients.hpp"
#include "qsf/errors.hpp"
#include "qsf/experiments.hpp"
#include "qsf/rng.hpp"
#include "qsf/sampler.hpp"
#include "qsf/stateprep.hpp"
#include "qsf/states.hpp"

namespace qsf::cli {

namespace {

constexpr std::uint64_t kRhoSeedKey = 0x7268;    // "rh"
constexpr std::uint64_t kSigmaSeedKey = 0x7367;  // "sg"

std::string g12(double v) { return fmt::format("{:.12g}", v); }

// One record of key=value lines.
class Summary {
public:
    void add(const std::string& key, const std::string& value) { lines_.emplace_back(key, value); }
    void add(const std::string& key, double value) { add(key, g12(value)); }
    void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

    void write(std::ostream& out) const {
        for (const auto& [k, v] : lines_) out << k << '=' << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> lines_;
};

struct StateSource {
    std::string kind = "random";  // random | mixed | pure | diag | file
    std::string file;
    std::vector<double> diag;
    std::size_t rank = 0;  // 0 = full rank
    std::optional<std::uint64_t> seed;

    DensityMatrix make(std::size_t d, std::uint64_t run_seed, std::uint64_t key) const {
        std::string k = kind;
        if (!file.empty()) k = "file";
        if (!diag.empty()) k = "diag";
        if (k == "file") return load_state_file(file);
        if (k == "diag") return DensityMatrix::from_diagonal(diag);
        if (k == "mixed") return DensityMatrix::maximally_mixed(d);
        if (k == "pure") {
            std::vector<Complex> psi(d, 0.0);
            psi[0] = 1.0;
            return DensityMatrix::pure(psi);
        }
        if (k == "random") return random_state(d, rank == 0 ? d : rank, seed.value_or(derive_seed(run_seed, key)));
        throw ParseError("unknown state source '" + kind + "' (expected random|mixed|pure|diag|file)");
    }
};

void add_state_options(CLI::App* cmd, StateSource& src, const std::string& prefix) {
    const std::string name = prefix.empty() ? "state" : prefix;
    cmd->add_option("--" + name, src.kind, "State source: random|mixed|pure|diag|file")->capture_default_str();
    cmd->add_option("--" + name + "-file", src.file, "State file (d, then d rows of re+imj entries)");
    cmd->add_option("--" + name + "-diag", src.diag, "Diagonal state, comma separated")->delimiter(',');
    cmd->add_option("--" + name + "-rank", src.rank, "Rank of the random state (default d)");
    cmd->add_option("--" + name + "-seed", src.seed, "Seed for the random state (default derived from --seed)");
}

std::vector<std::uint64_t> to_counts(const std::vector<double>& values, const char* what) {
    std::vector<std::uint64_t> out;
    for (double v : values) {
        if (!(v >= 1.0) || v != std::floor(v) || v > 1e15) {
            throw ArgumentError(fmt::format("{}: '{}' is not a positive integer", what, v));
        }
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

std::vector<Mode> parse_modes(const std::vector<std::string>& names) {
    std::vector<Mode> out;
    for (const auto& n : names) out.push_back(parse_mode(n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void add_report(Summary& s, const EstimateReport& r) {
    s.add("estimate", r.estimate);
    s.add("std_error", r.std_error);
    s.add("shots", r.shots);
    if (r.exact_value) s.add("exact_value", *r.exact_value);
    if (r.reference_value) s.add("reference_value", *r.reference_value);
    s.add("spec_degree", r.spec_degree);
    s.add("fresh_copies", r.copies.fresh_copies_total);
    s.add("reclaimed_copies", r.copies.reclaimed_total);
    s.add("copies_per_shot_expected", r.copies.expected_per_shot);
    s.add("copies_per_shot_empirical", r.copies.empirical_per_shot());
}

struct Common {
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::size_t d = 2;
    std::string out_path;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--seed", c.seed, "Run seed")->capture_default_str();
    cmd->add_option("--workers", c.workers, "Worker threads (results do not depend on it)")->capture_default_str();
    cmd->add_option("--d", c.d, "Local dimension for generated states")->capture_default_str();
    cmd->add_option("--out", c.out_path, "Write the output here instead of stdout");
}

// Chooses the control-register preparation; the mode fixes the default.
PrepCircuit resolve_prep(const PolySpec& spec, const std::string& prep_name, const std::string& params_file,
                         std::uint64_t seed) {
    const PrepKind kind = prep_name.empty()
                              ? (spec.mode() == Mode::variant ? PrepKind::hadamard : PrepKind::exact)
                              : parse_prep_kind(prep_name);
    if ((kind == PrepKind::hadamard) != (spec.mode() == Mode::variant)) {
        throw ArgumentError("--prep hadamard goes with --mode variant, exact|pqc with --mode standard");
    }
    if (kind == PrepKind::hadamard) return hadamard_prep(static_cast<std::size_t>(spec.control_qubits()));
    const auto target = spec.amplitudes();
    if (kind == PrepKind::exact) return exact_prep(target);
    if (!params_file.empty()) return pqc_prep(load_pqc_params(params_file), target);
    const TrainResult trained = train_pqc(target, 2, seed);
    return pqc_prep(trained.params, target);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Classical simulation lab for polynomial functions of quantum states", "qsf"};
    app.set_config("--config", "", "Config file (key = value; flags override it)");
    app.require_subcommand(1);

    Common common;
    StateSource rho_src;
    StateSource sigma_src;
    sigma_src.kind = "random";

    // estimate-poly
    auto* poly = app.add_subcommand("estimate-poly", "Estimate const + sum_j alpha_j tr(rho^j) by sampling");
    std::string spec_file;
    std::uint64_t shots = 100000;
    std::string mode_name;
    std::string prep_name;
    std::string prep_params;
    std::string accounting_name = "reuse";
    std::string dump_shots;
    add_common(poly, common);
    add_state_options(poly, rho_src, "");
    poly->add_option("--spec-file,--spec", spec_file, "Polynomial spec file")->required();
    poly->add_option("--shots", shots, "Number of shots")->capture_default_str();
    poly->add_option("--mode", mode_name, "standard|variant (overrides the spec file)");
    poly->add_option("--prep", prep_name, "exact|pqc|hadamard (default follows the mode)");
    poly->add_option("--prep-params", prep_params, "Trained circuit parameters for --prep pqc");
    poly->add_option("--accounting", accounting_name, "reuse|pessimistic")->capture_default_str();
    poly->add_option("--dump-shots", dump_shots, "Write one 'j x' line per shot to this file");

    // entropy
    auto* entropy = app.add_subcommand("entropy", "Estimate the von Neumann entropy");
    double epsilon = 0.1;
    double delta = 0.05;
    int degree = 0;
    add_common(entropy, common);
    add_state_options(entropy, rho_src, "");
    entropy->add_option("--epsilon", epsilon, "Target precision")->capture_default_str();
    entropy->add_option("--delta", delta, "Failure probability")->capture_default_str();
    entropy->add_option("--degree", degree, "Fixed polynomial degree (0 plans it from epsilon)");
    entropy->add_option("--shots", shots, "Shots when --degree is fixed")->capture_default_str();
    entropy->add_option("--mode", mode_name, "standard|variant");

    // fidelity
    auto* fidelity = app.add_subcommand("fidelity", "Estimate the fidelity of two states");
    add_common(fidelity, common);
    add_state_options(fidelity, rho_src, "");
    add_state_options(fidelity, sigma_src, "sigma");
    fidelity->add_option("--epsilon", epsilon, "Target precision")->capture_default_str();
    fidelity->add_option("--delta", delta, "Failure probability")->capture_default_str();
    fidelity->add_option("--degree", degree, "Fixed polynomial degree (0 plans it from epsilon)");
    fidelity->add_option("--shots", shots, "Shots when --degree is fixed")->capture_default_str();
    fidelity->add_option("--mode", mode_name, "standard|variant");

    // maxeig
    auto* maxeig = app.add_subcommand("maxeig", "Bisection search for the largest eigenvalue");
    MaxEigOptions me;
    std::string probes = "exact";
    add_common(maxeig, common);
    add_state_options(maxeig, rho_src, "");
    maxeig->add_option("--degree", me.degree, "Step polynomial degree")->capture_default_str();
    maxeig->add_option("--steepness", me.steepness, "Logistic steepness (default 4 * degree)");
    maxeig->add_option("--shots", me.shots, "Shots per probe")->capture_default_str();
    maxeig->add_option("--tol", me.tol, "Stop band [tol, 1 - tol]")->capture_default_str();
    maxeig->add_option("--width-cutoff", me.width_cutoff, "Bracket width that ends the search")->capture_default_str();
    maxeig->add_option("--probes", probes, "exact|sampled")->capture_default_str();

    // convergence
    auto* conv = app.add_subcommand("convergence", "Error versus shots sweep (CSV)");
    std::string app_name = "entropy";
    int conv_degree = 6;
    std::vector<double> shots_list;
    int repeats = 10;
    std::vector<std::string> mode_names{"standard", "variant"};
    add_common(conv, common);
    add_state_options(conv, rho_src, "");
    add_state_options(conv, sigma_src, "sigma");
    conv->add_option("--app", app_name, "entropy|fidelity")->capture_default_str();
    conv->add_option("--degree", conv_degree, "Polynomial degree")->capture_default_str();
    conv->add_option("--shots", shots_list, "Shot schedule, comma separated (default 1e2..1e6 decades)")
        ->delimiter(',');
    conv->add_option("--repeats", repeats, "Repeats per point")->capture_default_str();
    conv->add_option("--modes,--mode", mode_names, "Modes, comma separated")->delimiter(',')->capture_default_str();

    // compare-baselines
    auto* cmp = app.add_subcommand("compare-baselines", "MSE versus copies: QSF and term-wise SWAP tests (CSV)");
    std::vector<int> degrees{2, 4, 8};
    std::vector<double> budgets{1e4, 1e5, 1e6};
    int cmp_repeats = 10;
    add_common(cmp, common);
    add_state_options(cmp, rho_src, "");
    cmp->add_option("--degrees,--degree", degrees, "Degrees n, comma separated")->delimiter(',')->capture_default_str();
    cmp->add_option("--budgets", budgets, "Copy budgets, comma separated")->delimiter(',')->capture_default_str();
    cmp->add_option("--repeats", cmp_repeats, "Repeats per point")->capture_default_str();

    // train-prep
    auto* train = app.add_subcommand("train-prep", "Train the layered preparation circuit");
    std::size_t layers = 2;
    TrainOptions topt;
    int train_degree = 6;
    add_common(train, common);
    train->add_option("--spec-file,--spec", spec_file, "Spec whose amplitudes are the target");
    train->add_option("--degree", train_degree, "Entropy polynomial degree when no spec is given")->capture_default_str();
    train->add_option("--layers", layers, "Ansatz layers")->capture_default_str();
    train->add_option("--restarts", topt.restarts, "Random restarts")->capture_default_str();
    train->add_option("--iterations", topt.max_iterations, "Iterations per restart")->capture_default_str();
    train->add_option("--lr", topt.learning_rate, "Learning rate")->capture_default_str();
    train->add_option("--target", topt.target_infidelity, "Target infidelity")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "qsf: " << e.what() << '\n';
        for (auto* sub : app.get_subcommands()) err << sub->help();
        return 2;
    }

    std::ostringstream buffer;
    try {
        if (poly->parsed()) {
            PolySpec spec = load_spec_file(spec_file);
            if (!mode_name.empty()) spec = spec.with_mode(parse_mode(mode_name));
            const DensityMatrix rho = rho_src.make(common.d, common.seed, kRhoSeedKey);
            const PrepCircuit prep = resolve_prep(spec, prep_name, prep_params, common.seed);
            const auto atoms = trace_powers(rho, spec.degree());
            const JointDistribution dist = joint_distribution(spec, atoms, branch_weights(prep));
            const CopyModel model{1, parse_accounting(accounting_name)};
            EstimateReport r;
            if (!dump_shots.empty()) {
                const auto records = sample_shots(dist, shots, common.seed, common.workers, model);
                std::ofstream dump(dump_shots);
                if (!dump) throw ArgumentError("cannot write shot dump '" + dump_shots + "'");
                write_shots(dump, records);
                r = estimate(records, spec, model);
            } else {
                r = estimate(sample_tally(dist, shots, common.seed, common.workers), spec, model);
            }
            r.exact_value = spec.evaluate_atoms(atoms);
            Summary s;
            s.add("command", std::string("estimate-poly"));
            s.add("mode", to_string(spec.mode()));
            s.add("prep", to_string(prep.kind));
            s.add("prep_infidelity", prep.infidelity);
            s.add("register_size", spec.register_size());
            s.add("gamma", spec.gamma());
            s.add("accounting", to_string(model.accounting));
            add_report(s, r);
            s.write(buffer);
        } else if (entropy->parsed()) {
            SampleOptions so;
            if (!mode_name.empty()) so.mode = parse_mode(mode_name);
            so.workers = common.workers;
            const DensityMatrix rho = rho_src.make(common.d, common.seed, kRhoSeedKey);
            const EstimateReport r = degree > 0 ? estimate_entropy_fixed(rho, degree, shots, common.seed, so)
                                                : estimate_entropy(rho, epsilon, delta, common.seed, so);
            Summary s;
            s.add("command", std::string("entropy"));
            s.add("mode", to_string(so.mode));
            s.add("min_nonzero_eigenvalue", min_nonzero_eigenvalue(rho));
            add_report(s, r);
            s.add("truncation_gap", std::abs(*r.exact_value - *r.reference_value));
            s.write(buffer);
        } else if (fidelity->parsed()) {
            SampleOptions so;
            if (!mode_name.empty()) so.mode = parse_mode(mode_name);
            so.workers = common.workers;
            const DensityMatrix rho = rho_src.make(common.d, common.seed, kRhoSeedKey);
            const DensityMatrix sigma = sigma_src.make(common.d, common.seed, kSigmaSeedKey);
            const FidelityReport r =
                degree > 0 ? estimate_fidelity_fixed(FidelityProblem(rho, sigma), degree, shots, common.seed, so)
                           : estimate_fidelity(rho, sigma, epsilon, delta, common.seed, so);
            Summary s;
            s.add("command", std::string("fidelity"));
            s.add("mode", to_string(so.mode));
            s.add("degree", r.degree);
            s.add("fidelity_raw", r.fidelity_raw);
            s.add("fidelity_clamped", r.fidelity_clamped);
            s.add("exact_poly_fidelity", r.exact_poly_fidelity);
            s.add("exact_fidelity", r.exact_fidelity);
            s.add("root_estimate", r.root.estimate);
            s.add("root_std_error", r.root.std_error);
            s.add("shots", r.root.shots);
            s.add("fresh_copies", r.root.copies.fresh_copies_total);
            s.write(buffer);
        } else if (maxeig->parsed()) {
            me.probes = parse_probe_kind(probes);
            me.seed = common.seed;
            me.workers = common.workers;
            const DensityMatrix rho = rho_src.make(common.d, common.seed, kRhoSeedKey);
            try {
                const MaxEigResult r = max_eigenvalue(rho, me);
                Summary s;
                s.add("command", std::string("maxeig"));
                s.add("beta", r.beta);
                s.add("degenerate", r.degenerate);
                s.add("lambda_max_exact", rho.eigenvalues().back());
                s.add("probes", to_string(me.probes));
                s.add("total_shots", r.total_shots);
                s.write(buffer);
                buffer << "step,beta,o_beta,action\n" << format_trajectory(r.history);
            } catch (const SearchError& e) {
                err << "qsf: search failed: " << e.what() << '\n';
                return 3;
            }
        } else if (conv->parsed()) {
            ConvergenceConfig cfg;
            cfg.app = parse_application(app_name);
            cfg.degree = conv_degree;
            if (!shots_list.empty()) cfg.shots = to_counts(shots_list, "--shots");
            cfg.repeats = repeats;
            cfg.modes = parse_modes(mode_names);
            cfg.seed = common.seed;
            cfg.workers = common.workers;
            const DensityMatrix rho = rho_src.make(common.d, common.seed, kRhoSeedKey);
            std::optional<DensityMatrix> sigma;
            if (cfg.app == Application::fidelity) sigma = sigma_src.make(common.d, common.seed, kSigmaSeedKey);
            write_convergence_csv(buffer, run_convergence(cfg, rho, sigma));
        } else if (cmp->parsed()) {
            BaselineConfig cfg;
            cfg.degrees = degrees;
            cfg.budgets = to_counts(budgets, "--budgets");
            cfg.repeats = cmp_repeats;
            cfg.seed = common.seed;
            cfg.workers = common.workers;
            const DensityMatrix rho = rho_src.make(common.d, common.seed, kRhoSeedKey);
            write_baselines_csv(buffer, run_compare_baselines(cfg, rho));
        } else if (train->parsed()) {
            const PolySpec spec = spec_file.empty() ? entropy_taylor_spec(train_degree - 1) : load_spec_file(spec_file);
            const TrainResult r = train_pqc(spec.amplitudes(), layers, common.seed, topt);
            buffer << fmt::format("# infidelity {:.12g}\n# restarts_used {}\n", r.infidelity, r.restarts_used);
            write_pqc_params(buffer, r.params);
        }
    } catch (const qsf::Error& e) {
        err << "qsf: " << e.what() << '\n';
        return 1;
    }

    if (common.out_path.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(common.out_path);
        if (!file) {
            err << "qsf: cannot write '" << common.out_path << "'\n";
            return 1;
        }
        file << buffer.str();
    }
    return 0;
}

}  // namespace qsf::cli
