#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "phasesync/harness.hpp"
#include "phasesync/instance_io.hpp"
#include "test_util.hpp"

using namespace phasesync;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "phasesync_test_harness";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SweepConfig grid_config(const std::string& out) {
    SweepConfig cfg;
    cfg.n_values = {16, 24};
    cfg.sigma_values = {0.5, 2.0};
    cfg.m_values = {2};
    cfg.trials = 3;
    cfg.master_seed = 9;
    cfg.output_path = out;
    return cfg;
}

}  // namespace

TEST(Config, ParsesAllKeys) {
    const auto cfg = parse_sweep_config(
        "# comment\n"
        "n_values = 10, 20\n"
        "sigma_values = 0.5\n"
        "ratio_values = 10, 20   # trailing comment\n"
        "m_values = 2, n\n"
        "trials = 4\n"
        "master_seed = 18446744073709551615\n"
        "tol = 1e-10\n"
        "max_iter = 500\n"
        "record_traces = true\n"
        "output_path = out.csv\n"
        "restarts = 2\n"
        "tightness_tol = 1e-8\n"
        "threads = 2\n"
        "timing = false\n");
    EXPECT_EQ(cfg.n_values, (std::vector<Eigen::Index>{10, 20}));
    EXPECT_EQ(cfg.m_values, (std::vector<int>{2, 0}));
    EXPECT_EQ(cfg.master_seed, 18446744073709551615ULL);
    EXPECT_EQ(cfg.trials, 4);
    EXPECT_TRUE(cfg.record_traces);
    EXPECT_EQ(cfg.restarts, 2);
    EXPECT_EQ(cfg.output_path, "out.csv");
    // sigma from ratio: sqrt(20 / 10) and sqrt(20 / 20), merged with 0.5.
    const auto s = sweep_sigmas(cfg, 20);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_DOUBLE_EQ(s[0], 0.5);
    EXPECT_DOUBLE_EQ(s[1], 1.0);
    EXPECT_DOUBLE_EQ(s[2], std::sqrt(2.0));
}

TEST(Config, Errors) {
    const std::string ok = "n_values = 10\nsigma_values = 1\nm_values = 2\n";
    EXPECT_NO_THROW(parse_sweep_config(ok));
    EXPECT_THROW(parse_sweep_config(ok + "colour = red\n"), InputError);
    EXPECT_THROW(parse_sweep_config(ok + "trials = many\n"), InputError);
    EXPECT_THROW(parse_sweep_config(ok + "just words\n"), InputError);
    EXPECT_THROW(parse_sweep_config(ok + "trials = 0\n"), DomainError);
    EXPECT_THROW(parse_sweep_config("n_values = 1\nsigma_values = 1\nm_values = 2\n"), DomainError);
    EXPECT_THROW(parse_sweep_config("n_values = 10\nsigma_values = -1\nm_values = 2\n"), DomainError);
    EXPECT_THROW(parse_sweep_config("n_values = 10\nm_values = 2\n"), DomainError);
    EXPECT_THROW(parse_sweep_config("n_values = 10\nsigma_values = 1\nm_values = 0\n"), InputError);
    try {
        load_sweep_config(temp_path("missing.cfg"));
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("config not found"), std::string::npos);
    }
}

TEST(Trial, InsideTightRegion) {
    const auto r = run_trial(200, 1.5, 2, 1);
    EXPECT_TRUE(r.tight);
    EXPECT_TRUE(r.mle_converged);
    EXPECT_TRUE(r.bm_converged);
    EXPECT_EQ(check_record(r), "");
}

TEST(Trial, Noiseless) {
    const auto r = run_trial(200, 0.0, 5, 3);
    EXPECT_LT(r.ell1_mle_truth, 1e-12);
    EXPECT_TRUE(r.tight);
    EXPECT_TRUE(std::isinf(r.noise_ratio));
    EXPECT_EQ(r.small_coord_count, 0);
}

TEST(Trial, HighNoiseCompletes) {
    const auto r = run_trial(400, std::sqrt(400.0 / 10.0), 0, 7);
    EXPECT_EQ(r.m, 400);
    EXPECT_GE(r.ellm_bm_mle, 0.0);
    EXPECT_LE(r.ellm_bm_mle, 4.0);
    EXPECT_EQ(check_record(r), "");
}

TEST(Trial, RecordFieldsAreConsistent) {
    const auto inst = make_trial_instance(50, 11);
    const auto r = run_trial(inst, 2.0, 3);
    EXPECT_DOUBLE_EQ(r.noise_ratio, 50.0 / 4.0);
    EXPECT_DOUBLE_EQ(r.opnorm_w, inst.norm.value);
    EXPECT_NEAR(r.opnorm_w, fixtures::exact_norm(inst.noise.w), 1e-8 * r.opnorm_w);
    EXPECT_EQ(r.seed, 11u);
    EXPECT_EQ(r.runtime_ms, 0.0);
    const auto again = run_trial(inst, 2.0, 3);
    EXPECT_EQ(to_csv_row(r), to_csv_row(again));
}

TEST(Trial, RestartsOnlyWhenNeeded) {
    TrialOptions opts;
    opts.restarts = 3;
    // Converged runs never restart, so the record matches the default.
    EXPECT_EQ(to_csv_row(run_trial(40, 1.0, 2, 5, opts)), to_csv_row(run_trial(40, 1.0, 2, 5)));
    opts.max_iter = 1;
    const auto r = run_trial(40, 1.0, 2, 5, opts);
    EXPECT_FALSE(r.mle_converged);
    EXPECT_EQ(r.mle_iters, 1);
}

TEST(Sweep, CardinalityOrderAndSidecar) {
    const auto cfg = grid_config(temp_path("grid.csv"));
    const auto path = run_sweep(cfg);
    const auto rows = read_trial_csv(path);
    ASSERT_EQ(rows.size(), 12u);
    EXPECT_EQ(slurp(path).substr(0, csv_header().size()), csv_header());
    for (size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1];
        const auto& b = rows[i];
        EXPECT_TRUE(std::tie(a.n, a.sigma, a.m, a.trial_id) < std::tie(b.n, b.sigma, b.m, b.trial_id));
    }
    const auto meta = nlohmann::json::parse(slurp(temp_path("grid.meta.json")));
    EXPECT_EQ(meta["rows"], 12);
    EXPECT_EQ(meta["config"]["trials"], 3);
    EXPECT_TRUE(meta.contains("platform"));
    EXPECT_TRUE(meta.contains("code_version"));
}

TEST(Sweep, ByteIdenticalReruns) {
    auto cfg = grid_config(temp_path("a.csv"));
    cfg.threads = 1;
    const auto a = slurp(run_sweep(cfg));
    cfg.output_path = temp_path("b.csv");
    const auto b = slurp(run_sweep(cfg));
    cfg.output_path = temp_path("c.csv");
    cfg.threads = 4;
    const auto c = slurp(run_sweep(cfg));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
}

// Cells of one trial share z* and W across sigma and m.
TEST(Sweep, CommonRandomNumbersAcrossCells) {
    const auto rows = run_sweep_records(grid_config(temp_path("unused.csv")));
    for (const auto& r : rows)
        for (const auto& q : rows)
            if (r.n == q.n && r.trial_id == q.trial_id) {
                EXPECT_EQ(r.seed, q.seed);
                EXPECT_EQ(r.opnorm_w, q.opnorm_w);
            }
}

TEST(Sweep, Traces) {
    auto cfg = grid_config(temp_path("traced.csv"));
    cfg.record_traces = true;
    cfg.n_values = {16};
    cfg.trials = 1;
    run_sweep(cfg);
    std::istringstream in(slurp(temp_path("traced.traces.jsonl")));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        EXPECT_FALSE(j["mle"].empty());
        // GPM objectives never decrease.
        const auto t = j["mle"].get<std::vector<double>>();
        for (size_t i = 1; i < t.size(); ++i) EXPECT_GE(t[i], t[i - 1] - 1e-9 * std::abs(t[i]));
        ++lines;
    }
    EXPECT_EQ(lines, 2);
}

TEST(Csv, RoundTripsExactly) {
    TrialRecord r;
    r.trial_id = 7;
    r.n = 30;
    r.sigma = 0.1 + 0.2;
    r.m = 30;
    r.seed = 18446744073709551615ULL;
    r.noise_ratio = 30.0 / (r.sigma * r.sigma);
    r.ell1_mle_truth = 1.0 / 3.0;
    r.ellm_bm_mle = 5e-324;
    r.frob_sq_normalized = 0.0;
    r.tight = true;
    r.mle_converged = true;
    const auto back = parse_trial_csv(to_csv({r}));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(to_csv_row(back[0]), to_csv_row(r));
    EXPECT_EQ(back[0].sigma, r.sigma);
    EXPECT_EQ(back[0].ellm_bm_mle, r.ellm_bm_mle);
    EXPECT_EQ(format_double(0.3), "0.3");
    EXPECT_EQ(format_double(1e-9), "1e-09");
}

TEST(Csv, SchemaErrorListsMissingColumns) {
    try {
        parse_trial_csv("trial_id,n,sigma\n");
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_EQ(e.missing().size(), csv_columns().size() - 3);
        EXPECT_NE(std::string(e.what()).find("ellm_bm_mle"), std::string::npos);
        EXPECT_EQ(std::string(e.what()).find("sigma "), std::string::npos);
    }
    EXPECT_THROW(parse_trial_csv(csv_header() + "\n1,2,3\n"), InputError);
}

TEST(Csv, RowInvariants) {
    TrialRecord r;
    r.ellm_bm_mle = 1e-3;
    r.frob_sq_normalized = 1e-3;
    EXPECT_EQ(check_record(r), "");
    r.tight = true;
    EXPECT_NE(check_record(r), "");
    r.tight = false;
    r.frob_sq_normalized = 3e-3;
    EXPECT_NE(check_record(r), "");
}

TEST(Summary, HeaderOnlyIsEmpty) {
    const auto path = temp_path("empty.csv");
    std::ofstream(path) << csv_header() << "\n";
    const auto cells = summarize(path);
    EXPECT_TRUE(cells.empty());
    EXPECT_FALSE(format_summary(cells).empty());
}

TEST(Summary, CellStatistics) {
    std::vector<TrialRecord> rows(4);
    for (int i = 0; i < 4; ++i) {
        rows[i].trial_id = i;
        rows[i].n = 10;
        rows[i].sigma = 1.0;
        rows[i].m = 2;
        rows[i].noise_ratio = 10.0;
        rows[i].ellm_bm_mle = i;
        rows[i].frob_sq_normalized = 0.5 * i;
        rows[i].tight = i == 0;
        rows[i].mle_converged = true;
        rows[i].bm_converged = i != 3;
    }
    const auto cells = summarize_records(rows, 1.0);
    ASSERT_EQ(cells.size(), 1u);
    const auto& c = cells[0];
    EXPECT_EQ(c.trials, 4);
    EXPECT_EQ(c.converged, 3);
    EXPECT_DOUBLE_EQ(c.mean_ellm, 1.0);
    EXPECT_DOUBLE_EQ(c.median_ellm, 1.0);
    EXPECT_DOUBLE_EQ(c.max_ellm, 2.0);
    EXPECT_DOUBLE_EQ(c.max_frob, 1.0);
    EXPECT_DOUBLE_EQ(c.tight_fraction, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(c.converged_fraction, 0.75);
    ASSERT_TRUE(c.exp_bound.has_value());
    EXPECT_DOUBLE_EQ(*c.exp_bound, std::exp(-10.0 / 8.0) + 2.0 * std::pow(10.0, -10.0));
}

TEST(Summary, AllTightCell) {
    SweepConfig cfg = grid_config(temp_path("tight.csv"));
    cfg.n_values = {60};
    cfg.sigma_values = {0.3};
    const auto cells = summarize(run_sweep(cfg));
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].tight_fraction, 1.0);
    EXPECT_LT(cells[0].mean_ellm, 1e-9);
}

TEST(Instance, RoundTripIsBitExact) {
    const auto obs = fixtures::make_instance(7, 0.37, 4);
    const auto text = format_instance(obs, 4);
    const auto back = parse_instance(text);
    EXPECT_EQ(back.seed, 4u);
    EXPECT_EQ(back.obs.sigma, 0.37);
    EXPECT_TRUE(back.obs.y == obs.y);
    ASSERT_TRUE(back.obs.truth.has_value());
    EXPECT_TRUE(back.obs.truth->values() == obs.truth->values());
    EXPECT_EQ(format_instance(back.obs, back.seed), text);
}

TEST(Instance, WithoutTruth) {
    auto obs = fixtures::make_instance(3, 0.5, 1);
    obs.truth.reset();
    const auto back = parse_instance(format_instance(obs, 1));
    EXPECT_FALSE(back.obs.truth.has_value());
}

TEST(Instance, RejectsMalformedInput) {
    const auto good = format_instance(fixtures::make_instance(2, 0.5, 1), 1);
    EXPECT_THROW(parse_instance("nonsense"), InputError);
    EXPECT_THROW(parse_instance(good.substr(0, good.size() - 10)), InputError);
    EXPECT_THROW(parse_instance(good + "extra\n"), InputError);
    std::string bad = good;
    bad.replace(bad.find("sigma"), 5, "sigmx");
    EXPECT_THROW(parse_instance(bad), InputError);
    // A non-Hermitian Y is rejected by the observation constructor.
    auto obs = fixtures::make_instance(2, 0.5, 1);
    obs.y(0, 1) += Complex(0.1, 0.0);
    EXPECT_THROW(parse_instance(format_instance(obs, 1)), DomainError);
    EXPECT_THROW(read_instance(temp_path("absent.txt")), InputError);
}
