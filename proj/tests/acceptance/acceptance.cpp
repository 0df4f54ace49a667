// Desk-scale acceptance runs. Prints one PASS/FAIL line per criterion and
// exits nonzero if any selected criterion fails.
//
//   acceptance            run all criteria
//   acceptance 3 5        run only criteria 3 and 5

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "phasesync/bounds.hpp"
#include "phasesync/estimators.hpp"
#include "phasesync/harness.hpp"
#include "phasesync/lemma_verifier.hpp"
#include "phasesync/linops.hpp"
#include "phasesync/losses.hpp"
#include "phasesync/model.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/surrogate.hpp"

using namespace phasesync;

namespace {

constexpr double kTightTol = 1e-9;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Trials of the tightness run, shared by criteria 2 and 5.
const std::vector<TrialRecord>& tightness_rows(double* elapsed = nullptr) {
    static double secs = 0.0;
    static const std::vector<TrialRecord> rows = [] {
        const auto t0 = std::chrono::steady_clock::now();
        SweepConfig cfg;
        cfg.n_values = {300};
        cfg.sigma_values = {2.4};
        cfg.m_values = {2, 0};
        cfg.trials = 40;
        cfg.master_seed = 1;
        auto r = run_sweep_records(cfg);
        secs = seconds_since(t0);
        return r;
    }();
    if (elapsed) *elapsed = secs;
    return rows;
}

Verdict lemma_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    VerifierConfig cfg;
    cfg.trials = 50;
    cfg.seed = 42;
    const auto results = run_suite(cfg);
    const double secs = seconds_since(t0);
    int failures = 0, errors = 0, evaluated = 0;
    std::string bad;
    for (const auto& r : results) {
        failures += r.failures;
        errors += r.errors;
        evaluated += r.trials;
        if (r.failures || r.errors) bad += " " + r.check_id;
    }
    return {failures == 0 && errors == 0 && secs < 600.0,
            fmt("%zu checks, %d evaluated trials, %d violations, %d errors, %.0f s (limit 600 s)%s", results.size(),
                evaluated, failures, errors, secs, bad.empty() ? "" : (" failing:" + bad).c_str())};
}

Verdict tightness() {
    double secs = 0.0;
    const auto& rows = tightness_rows(&secs);
    std::map<int, int> tight, total;
    bool levels_ok = true;
    for (const auto& r : rows) {
        total[r.m]++;
        if (r.tight) {
            tight[r.m]++;
            levels_ok = levels_ok && r.ellm_bm_mle <= kTightTol;
        }
    }
    bool ok = levels_ok && secs < 300.0 && total.size() == 2;
    std::string d;
    for (const auto& [m, cnt] : total) {
        ok = ok && tight[m] >= 38;
        d += fmt("m=%d tight %d/%d; ", m, tight[m], cnt);
    }
    return {ok, d + fmt("%.0f s (limit 300 s)", secs)};
}

Verdict decay() {
    const auto t0 = std::chrono::steady_clock::now();
    SweepConfig cfg;
    cfg.n_values = {600};
    cfg.ratio_values = {10, 15, 20, 25, 30, 40, 50, 60};
    cfg.m_values = {2};
    cfg.trials = 50;
    cfg.master_seed = 1;
    const auto cells = summarize_records(run_sweep_records(cfg));
    const double secs = seconds_since(t0);

    // Cells ordered by increasing noise ratio (decreasing sigma).
    std::vector<CellSummary> by_ratio(cells.rbegin(), cells.rend());
    // Means at or below the tightness tolerance are roundoff from exactly
    // tight trials; comparing them would rank floating-point noise.
    const double floor = 2.0 * kTightTol;
    auto level = [&](double x) { return x <= floor ? 0.0 : x; };
    int inversions = 0;
    std::string means;
    for (size_t i = 0; i < by_ratio.size(); ++i) {
        means += fmt("%s%g:%.2e", i ? " " : "", by_ratio[i].noise_ratio, by_ratio[i].mean_frob);
        if (i && level(by_ratio[i].mean_frob) > level(by_ratio[i - 1].mean_frob)) ++inversions;
    }
    const bool a = inversions <= 1;
    const double tight60 = by_ratio.back().tight_fraction;
    const bool b = tight60 == 1.0;
    const double m10 = by_ratio.front().mean_frob;
    const double m30 = by_ratio[4].mean_frob;
    const bool c = m10 > floor && m10 >= 5.0 * m30;
    return {a && b && c && secs < 1200.0,
            fmt("(a) %s, %d inversions; (b) %s, tight fraction at ratio 60 = %.3f; (c) %s, mean frob at ratio 10 = "
                "%.3e vs 5 x ratio 30 = %.3e, level floor %.0e; %.0f s (limit 1200 s); means [%s]",
                a ? "ok" : "FAIL", inversions, b ? "ok" : "FAIL", tight60, c ? "ok" : "FAIL", m10, 5.0 * m30, floor,
                secs, means.c_str())};
}

Verdict oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = 4, k = 72;
    const double slack = 2.0 * n * n * (2.0 * std::numbers::pi / k);
    int bad_grid = 0, bad_refined = 0, runs = 0;
    double worst = 0.0;
    for (double sigma : {0.3, 0.8}) {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto obs = assemble_observation(generate_truth(n, derive_seed(seed, 1)),
                                                  sample_noise(n, derive_seed(seed, 2)), sigma);
            const auto mle = solve_mle(obs.y);
            const auto grid = brute_force_mle(obs.y, k, false);
            const auto refined = brute_force_mle(obs.y, k, true);
            ++runs;
            if (mle.objective < grid.grid_objective - slack) ++bad_grid;
            const double gap = std::abs(mle.objective - refined.objective);
            worst = std::max(worst, gap);
            if (gap > 1e-8) ++bad_refined;
        }
    }
    const double secs = seconds_since(t0);
    return {bad_grid == 0 && bad_refined == 0 && secs < 120.0,
            fmt("%d instances; below grid - 2n^2(2pi/K): %d; refined disagreement > 1e-8: %d (worst %.2e); %.1f s",
                runs, bad_grid, bad_refined, worst, secs)};
}

Verdict crude_bound() {
    const auto& rows = tightness_rows();
    int checked = 0, violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        const double bound = crude_loss_bound(r.sigma, r.opnorm_w, r.n) + 1e-6;
        if (r.mle_converged) {
            ++checked;
            violations += r.ell1_mle_truth > bound;
            worst = std::min(worst, bound - r.ell1_mle_truth);
        }
        if (r.bm_converged) {
            ++checked;
            violations += r.ellm_bm_truth > bound;
            worst = std::min(worst, bound - r.ellm_bm_truth);
        }
    }
    return {checked > 0 && violations == 0,
            fmt("%d converged estimates, %d above 8 sigma ||W|| / n + 1e-6, smallest margin %.3e", checked, violations,
                worst)};
}

Verdict scaling() {
    const auto t0 = std::chrono::steady_clock::now();
    SweepConfig cfg;
    cfg.n_values = {500};
    cfg.sigma_values = {0.25, 0.5, 1.0, 2.0};
    cfg.m_values = {2};
    cfg.trials = 50;
    cfg.master_seed = 1;
    const auto rows = run_sweep_records(cfg);
    std::map<double, std::pair<double, int>> acc;
    for (const auto& r : rows) {
        acc[r.sigma].first += r.ell1_mle_truth;
        acc[r.sigma].second += 1;
    }
    std::vector<double> xs, ys;
    std::string pts;
    for (const auto& [s, v] : acc) {
        const double mean = v.first / v.second;
        xs.push_back(std::log(s));
        ys.push_back(std::log(mean));
        pts += fmt("%s%g:%.3e", pts.empty() ? "" : " ", s, mean);
    }
    const double k = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    const double secs = seconds_since(t0);
    return {slope >= 1.7 && slope <= 2.3 && secs < 600.0,
            fmt("slope %.4f (target [1.7, 2.3]); mean l1 [%s]; %.0f s", slope, pts.c_str(), secs)};
}

Verdict random_matrix() {
    const Eigen::Index n = 1000;
    int inside = 0;
    double lo = 1e300, hi = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto w = sample_noise(n, derive_seed(seed, 2));
        // The Rayleigh value converges quadratically in the residual, so a
        // loose residual target still pins ||W|| far below the window width.
        const double c = operator_norm(w.w, 1e-5, 100000, seed).value / std::sqrt(static_cast<double>(n));
        lo = std::min(lo, c);
        hi = std::max(hi, c);
        inside += c >= 1.9 && c <= 2.1;
    }
    return {inside >= 95, fmt("%d/100 seeds with ||W|| / sqrt(n) in [1.9, 2.1]; range [%.4f, %.4f]", inside, lo, hi)};
}

Verdict leave_one_out_gaps() {
    const Eigen::Index n = 200;
    const double sigma = 3.0;
    int bundles = 0, unconverged = 0;
    double worst = 0.0;
    for (std::uint64_t inst = 1; inst <= 10; ++inst) {
        const auto truth = generate_truth(n, derive_seed(inst, 1));
        const auto noise = sample_noise(n, derive_seed(inst, 2));
        const double w_norm = operator_norm(noise.w, 1e-12, 100000, derive_seed(inst, 3)).value;
        const ModelParts parts{&truth.values(), sigma, &noise.w};
        const SurrogateParams p{Complex(static_cast<double>(n), 0.0), 2.0 * sigma * kNormInflation * w_norm};
        Rng rng(derive_seed(inst, 4));
        std::set<Eigen::Index> picked;
        while (picked.size() < 10) picked.insert(static_cast<Eigen::Index>(rng.next_u64() % n));
        for (Eigen::Index j : picked) {
            const auto b = leave_one_out(p, parts, j, w_norm);
            ++bundles;
            unconverged += !b.converged;
            for (double g : b.gaps) worst = std::max(worst, g);
            worst = std::max(worst, b.final_gap);
        }
    }
    return {worst <= 3.0 + 1e-9 && unconverged == 0,
            fmt("%d (instance, j) pairs, largest gap %.4f (limit 3), unconverged %d", bundles, worst, unconverged)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"lemma suite", lemma_suite},       {"tightness at n = 300, sigma = 2.4", tightness},
        {"discrepancy decay", decay},       {"brute-force oracle", oracle},
        {"crude accuracy bound", crude_bound}, {"sigma^2 / n scaling", scaling},
        {"noise operator norm", random_matrix}, {"leave-one-out gaps", leave_one_out_gaps},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    bool all_ok = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d (%s): %s - %s\n", id, criteria[i].first, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        std::fflush(stdout);
        all_ok = all_ok && v.pass;
    }
    return all_ok ? 0 : 1;
}
