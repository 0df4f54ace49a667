#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phasesync/linops.hpp"
#include "phasesync/model.hpp"

namespace phasesync {

struct SweepConfig {
    std::vector<Eigen::Index> n_values;
    /// Noise levels given directly; merged with those derived from ratio_values.
    std::vector<double> sigma_values;
    /// Noise ratios n / sigma^2.
    std::vector<double> ratio_values;
    /// Burer-Monteiro ranks; 0 stands for m = n ("n" in config files).
    std::vector<int> m_values;
    int trials = 1;
    std::uint64_t master_seed = 0;
    /// Solver step tolerance; non-positive selects 1e-12 sqrt(n).
    double tol = 0.0;
    int max_iter = 10000;
    bool record_traces = false;
    std::string output_path = "sweep.csv";
    /// Extra seeded random starts for solver runs that did not converge.
    int restarts = 0;
    double tightness_tol = 1e-9;
    int threads = 0;
    /// Wall-clock timing in runtime_ms. Off by default so output is byte-stable.
    bool timing = false;
};

/// Parses "key = value" lines; '#' starts a comment, lists are comma separated.
/// Throws InputError on unknown keys or malformed values.
SweepConfig parse_sweep_config(const std::string& text);
/// Throws InputError("config not found: ...") when the file is missing.
SweepConfig load_sweep_config(const std::string& path);
/// Throws DomainError when an invariant fails.
void validate(const SweepConfig& cfg);

struct TrialRecord {
    int trial_id = 0;
    Eigen::Index n = 0;
    double sigma = 0.0;
    int m = 0;
    std::uint64_t seed = 0;
    double noise_ratio = 0.0;
    double ell1_mle_truth = 0.0;
    double ellm_bm_truth = 0.0;
    double ellm_bm_mle = 0.0;
    double frob_sq_normalized = 0.0;
    bool tight = false;
    Eigen::Index small_coord_count = 0;
    double delta_used = 0.0;
    double epsilon_used = 0.0;
    double opnorm_w = 0.0;
    int mle_iters = 0;
    double mle_residual = 0.0;
    bool mle_converged = false;
    int bm_iters = 0;
    double bm_residual = 0.0;
    bool bm_converged = false;
    double runtime_ms = 0.0;
};

struct TrialOptions {
    double tol = 0.0;
    int max_iter = 10000;
    double tightness_tol = 1e-9;
    int restarts = 0;
    bool timing = false;
    bool record_traces = false;
};

/// Truth, noise and ||W|| for one seed. Shared by every (sigma, m) cell of a trial.
struct TrialInstance {
    PhaseVector truth;
    NoiseMatrix noise;
    SpectralEstimate norm;
    std::uint64_t seed = 0;
};

TrialInstance make_trial_instance(Eigen::Index n, std::uint64_t seed);

struct TrialTraces {
    std::vector<double> mle;
    std::vector<double> bm;
};

TrialRecord run_trial(const TrialInstance& inst, double sigma, int m, const TrialOptions& opts = {},
                      TrialTraces* traces = nullptr);
TrialRecord run_trial(Eigen::Index n, double sigma, int m, std::uint64_t seed, const TrialOptions& opts = {});

/// Noise levels of the sweep for a given n, ascending and deduplicated.
std::vector<double> sweep_sigmas(const SweepConfig& cfg, Eigen::Index n);

/// All records of the sweep, sorted by (n, sigma, m, trial_id).
std::vector<TrialRecord> run_sweep_records(const SweepConfig& cfg);
/// Writes the CSV and its .meta.json sidecar, re-reads and validates the CSV,
/// and returns the CSV path.
std::string run_sweep(const SweepConfig& cfg);

const std::vector<std::string>& csv_columns();
std::string csv_header();
std::string to_csv_row(const TrialRecord& r);
std::string to_csv(const std::vector<TrialRecord>& rows);

/// Thrown when a CSV lacks expected columns.
class SchemaError : public InputError {
public:
    SchemaError(const std::string& what, std::vector<std::string> missing)
        : InputError(what), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const { return missing_; }

private:
    std::vector<std::string> missing_;
};

std::vector<TrialRecord> parse_trial_csv(const std::string& text);
std::vector<TrialRecord> read_trial_csv(const std::string& path);

/// Row invariants: tight iff ellm_bm_mle <= tightness_tol, frob <= 2 ellm + 1e-9.
/// Returns a description of the first violation, or an empty string.
std::string check_record(const TrialRecord& r, double tightness_tol = 1e-9);

struct CellSummary {
    Eigen::Index n = 0;
    double sigma = 0.0;
    int m = 0;
    double noise_ratio = 0.0;
    int trials = 0;
    /// Trials where both solvers converged; the statistics below use only these.
    int converged = 0;
    double mean_ellm = 0.0, median_ellm = 0.0, max_ellm = 0.0;
    double mean_frob = 0.0, median_frob = 0.0, max_frob = 0.0;
    double tight_fraction = 0.0;
    double converged_fraction = 0.0;
    std::optional<double> exp_bound;
};

std::vector<CellSummary> summarize_records(const std::vector<TrialRecord>& rows,
                                           std::optional<double> c_scale = std::nullopt);
std::vector<CellSummary> summarize(const std::string& csv_path, std::optional<double> c_scale = std::nullopt);
std::string format_summary(const std::vector<CellSummary>& cells);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace phasesync
