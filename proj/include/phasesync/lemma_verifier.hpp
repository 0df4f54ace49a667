#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "phasesync/types.hpp"

namespace phasesync {

struct VerifierConfig {
    int trials = 50;
    std::uint64_t seed = 42;
    std::vector<Eigen::Index> n_values{20, 100, 400};
    /// Burer-Monteiro ranks; 0 stands for m = n.
    std::vector<int> m_values{2, 5, 0};
    /// A trial fails when rhs - lhs < -violation_tol.
    double violation_tol = 1e-9;
    double tightness_tol = 1e-9;
    /// Leave-one-out indices sampled per trial when n exceeds loo_full_max_n.
    int loo_samples = 10;
    Eigen::Index loo_full_max_n = 100;
    /// Attempts at drawing inputs that meet a check's preconditions.
    int max_resample = 100;
    /// Relative residual target for the noise operator norm.
    double norm_tol = 1e-9;
    int threads = 0;
    /// Restrict to these check ids (empty: all).
    std::vector<std::string> only;
};

struct CheckResult {
    std::string check_id;
    /// Catalog key of the statement this check exercises.
    std::string covers;
    std::string statement;
    /// Trials in which the inequality was evaluated.
    int trials = 0;
    int failures = 0;
    /// Trials whose preconditions could not be met.
    int skipped = 0;
    /// Trials that threw; reported separately from violations.
    int errors = 0;
    /// Smallest rhs - lhs over evaluated trials.
    double worst_slack = std::numeric_limits<double>::infinity();
    std::string params_digest;
    std::string first_error;

    /// "pass", "fail", "error" or "skipped".
    std::string status() const;
};

struct CheckInfo {
    std::string id;
    std::string covers;
    std::string statement;
    /// Largest n this check runs at (0: no limit).
    Eigen::Index max_n = 0;
};

/// Keys of the deterministic statements the suite must cover.
const std::vector<std::string>& result_catalog();
const std::vector<CheckInfo>& check_registry();

std::vector<CheckResult> run_suite(const VerifierConfig& cfg);

std::string to_json_line(const CheckResult& r);
std::string format_table(const std::vector<CheckResult>& results);

}  // namespace phasesync
