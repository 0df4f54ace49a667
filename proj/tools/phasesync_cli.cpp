// phasesync command-line front end.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phasesync/estimators.hpp"
#include "phasesync/harness.hpp"
#include "phasesync/instance_io.hpp"
#include "phasesync/lemma_verifier.hpp"
#include "phasesync/losses.hpp"
#include "phasesync/model.hpp"
#include "phasesync/rng.hpp"

namespace ps = phasesync;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitVerify = 3;

struct GenerateArgs {
    long long n = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    bool all_ones = false;
};

struct EstimateArgs {
    std::string in;
    std::string method = "mle";
    int m = 2;
    double tol = 0.0;
    int max_iter = 10000;
    std::uint64_t seed = 0;
};

struct SweepArgs {
    std::string config;
    int threads = 0;
};

struct VerifyArgs {
    int trials = 50;
    std::uint64_t seed = 42;
    std::string jsonl;
    std::vector<std::string> only;
    int threads = 0;
};

struct SummarizeArgs {
    std::string in;
    std::optional<double> overlay_c;
};

int run_generate(const GenerateArgs& a) {
    const ps::PhaseVector truth =
        a.all_ones ? ps::all_ones_truth(a.n) : ps::generate_truth(a.n, ps::derive_seed(a.seed, 1));
    const ps::NoiseMatrix noise = ps::sample_noise(a.n, ps::derive_seed(a.seed, 2));
    ps::write_instance(a.out, ps::assemble_observation(truth, noise, a.sigma), a.seed);
    std::printf("wrote %s (n=%lld sigma=%s seed=%llu)\n", a.out.c_str(), a.n, ps::format_double(a.sigma).c_str(),
                static_cast<unsigned long long>(a.seed));
    return 0;
}

template <class Result>
void print_result(const char* label, const Result& r) {
    std::printf("%s: iterations=%d residual=%s objective=%s converged=%d\n", label, r.iterations,
                ps::format_double(r.residual).c_str(), ps::format_double(r.objective).c_str(), r.converged ? 1 : 0);
}

int run_estimate(const EstimateArgs& a) {
    const auto file = ps::read_instance(a.in);
    const auto& obs = file.obs;
    const ps::SolverOptions opts{a.tol, a.max_iter, false};
    std::printf("instance: n=%lld sigma=%s truth=%d\n", static_cast<long long>(obs.n()),
                ps::format_double(obs.sigma).c_str(), obs.truth ? 1 : 0);

    if (a.method == "eig") {
        const auto z = ps::spectral_init(obs.y, a.seed);
        std::printf("eig: objective=%s\n", ps::format_double(ps::objective_mle(obs.y, z.values())).c_str());
        if (obs.truth) std::printf("ell1_eig_truth=%s\n", ps::format_double(ps::loss_ell1(z, *obs.truth)).c_str());
        return 0;
    }

    const auto mle = ps::solve_mle(obs.y, std::nullopt, opts);
    print_result("mle", mle);
    if (obs.truth) std::printf("ell1_mle_truth=%s\n", ps::format_double(ps::loss_ell1(mle.iterate, *obs.truth)).c_str());
    if (a.method == "mle") return 0;

    const int m = a.method == "sdp" ? static_cast<int>(obs.n()) : a.m;
    if (m < 1) throw ps::DomainError("--m must be >= 1");
    const auto bm = ps::solve_bm(obs.y, m, std::nullopt, opts, a.seed);
    std::printf("m=%d\n", m);
    print_result(a.method == "sdp" ? "sdp" : "bm", bm);
    if (obs.truth) std::printf("ellm_bm_truth=%s\n", ps::format_double(ps::loss_ellm(bm.iterate, *obs.truth)).c_str());
    const double disc = ps::loss_ellm(bm.iterate, mle.iterate);
    std::printf("ellm_bm_mle=%s\n", ps::format_double(disc).c_str());
    std::printf("frob_sq_normalized=%s\n", ps::format_double(ps::frob_discrepancy(bm.iterate, mle.iterate)).c_str());
    std::printf("tight=%d\n", disc <= 1e-9 ? 1 : 0);
    return 0;
}

int run_sweep_cmd(const SweepArgs& a) {
    ps::SweepConfig cfg = ps::load_sweep_config(a.config);
    if (a.threads > 0) cfg.threads = a.threads;
    const std::string path = ps::run_sweep(cfg);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int run_verify(const VerifyArgs& a) {
    ps::VerifierConfig cfg;
    cfg.trials = a.trials;
    cfg.seed = a.seed;
    cfg.only = a.only;
    cfg.threads = a.threads;
    const auto results = ps::run_suite(cfg);
    std::ofstream jf;
    if (!a.jsonl.empty()) {
        jf.open(a.jsonl, std::ios::binary);
        if (!jf) throw std::runtime_error("cannot write " + a.jsonl);
    }
    bool ok = true;
    for (const auto& r : results) {
        const std::string line = ps::to_json_line(r);
        std::printf("%s\n", line.c_str());
        if (jf) jf << line << '\n';
        ok = ok && r.failures == 0 && r.errors == 0;
    }
    std::printf("%s", ps::format_table(results).c_str());
    std::printf("%s\n", ok ? "verification passed" : "verification failed");
    return ok ? 0 : kExitVerify;
}

int run_summarize(const SummarizeArgs& a) {
    std::printf("%s", ps::format_summary(ps::summarize(a.in, a.overlay_c)).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase synchronization lab: estimators, lemma checks and Monte Carlo sweeps", "phasesync"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(PHASESYNC_CLI_VERSION));

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Sample an instance Y = z z^H + sigma W and write it to a file");
    g->add_option("--n", gen.n, "Dimension")->required()->check(CLI::PositiveNumber);
    g->add_option("--sigma", gen.sigma, "Noise level")->required()->check(CLI::NonNegativeNumber);
    g->add_option("--seed", gen.seed, "Seed for truth and noise")->required();
    g->add_option("--out", gen.out, "Output instance file")->required();
    g->add_flag("--all-ones", gen.all_ones, "Use z = (1, ..., 1) as the truth");

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Run an estimator on an instance file");
    e->add_option("--in", est.in, "Instance file")->required();
    e->add_option("--method", est.method, "mle, bm, sdp (bm with m = n) or eig")
        ->check(CLI::IsMember({"mle", "bm", "sdp", "eig"}))
        ->capture_default_str();
    e->add_option("--m", est.m, "Rank for --method bm")->capture_default_str();
    e->add_option("--tol", est.tol, "Step tolerance; 0 selects 1e-12 sqrt(n)")->capture_default_str();
    e->add_option("--max-iter", est.max_iter, "Iteration cap")->capture_default_str();
    e->add_option("--seed", est.seed, "Seed for initializations")->capture_default_str();

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "Run a Monte Carlo sweep described by a config file");
    s->add_option("--config", sw.config, "Sweep config (key = value lines)")->required();
    s->add_option("--threads", sw.threads, "Worker threads (overrides the config; capped by PHASESYNC_THREADS)");

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify-lemmas", "Run the randomized inequality suite");
    v->add_option("--trials", ver.trials, "Trials per check")->capture_default_str()->check(CLI::NonNegativeNumber);
    v->add_option("--seed", ver.seed, "Master seed")->capture_default_str();
    v->add_option("--jsonl", ver.jsonl, "Also write the JSON-lines report to this file");
    v->add_option("--only", ver.only, "Run only these check ids (repeatable)");
    v->add_option("--threads", ver.threads, "Worker threads (capped by PHASESYNC_THREADS)");

    SummarizeArgs sum;
    auto* u = app.add_subcommand("summarize", "Per-cell summary of a sweep CSV");
    u->add_option("--in", sum.in, "Sweep CSV")->required();
    u->add_option("--overlay-c", sum.overlay_c, "Add the column c exp(-n / (8 sigma^2)) + 2 n^-10");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForAllHelp& ex) {
        return app.exit(ex);
    } catch (const CLI::CallForVersion& ex) {
        return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
        std::fprintf(stderr, "usage error: %s\n", ex.what());
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::fprintf(stderr, "%s", sub->help().c_str());
        return kExitUsage;
    }

    try {
        if (g->parsed()) return run_generate(gen);
        if (e->parsed()) return run_estimate(est);
        if (s->parsed()) return run_sweep_cmd(sw);
        if (v->parsed()) return run_verify(ver);
        if (u->parsed()) return run_summarize(sum);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
