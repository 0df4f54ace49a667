#include "phasesync/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "phasesync/bounds.hpp"
#include "phasesync/estimators.hpp"
#include "phasesync/losses.hpp"
#include "phasesync/parallel.hpp"
#include "phasesync/rng.hpp"
#include "phasesync/surrogate.hpp"

#ifndef PHASESYNC_VERSION
#define PHASESYNC_VERSION "unknown"
#endif

namespace phasesync {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& what) {
    T v{};
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end) throw InputError("bad value for " + what + ": '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s, const std::string& what) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw InputError("bad value for " + what + ": '" + s + "'");
}

template <class T>
std::vector<T> parse_list(const std::string& s, const std::string& what) {
    std::vector<T> out;
    for (const auto& item : split(s, ',')) {
        if (item.empty()) throw InputError("empty entry in " + what);
        out.push_back(parse_number<T>(item, what));
    }
    return out;
}

std::string base_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    if (p.extension() == ".csv") p.replace_extension();
    return p.string();
}

int resolve_m(int m, Eigen::Index n) { return m <= 0 ? static_cast<int>(n) : std::min<int>(m, static_cast<int>(n)); }

template <class Result, class Solve, class RandomInit>
Result solve_with_restarts(Solve solve, RandomInit random_init, int restarts) {
    Result best = solve(std::nullopt);
    for (int r = 1; r <= restarts && !best.converged; ++r) {
        Result next = solve(random_init(r));
        if (next.converged || next.objective > best.objective) best = std::move(next);
    }
    return best;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const size_t k = v.size() / 2;
    return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

nlohmann::json config_json(const SweepConfig& cfg) {
    nlohmann::json j;
    j["n_values"] = cfg.n_values;
    j["sigma_values"] = cfg.sigma_values;
    j["ratio_values"] = cfg.ratio_values;
    nlohmann::json ms = nlohmann::json::array();
    for (int m : cfg.m_values) ms.push_back(m == 0 ? nlohmann::json("n") : nlohmann::json(m));
    j["m_values"] = ms;
    j["trials"] = cfg.trials;
    j["master_seed"] = cfg.master_seed;
    j["tol"] = cfg.tol;
    j["max_iter"] = cfg.max_iter;
    j["record_traces"] = cfg.record_traces;
    j["output_path"] = cfg.output_path;
    j["restarts"] = cfg.restarts;
    j["tightness_tol"] = cfg.tightness_tol;
    j["timing"] = cfg.timing;
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config.

SweepConfig parse_sweep_config(const std::string& text) {
    SweepConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "n_values") {
            cfg.n_values = parse_list<Eigen::Index>(val, key);
        } else if (key == "sigma_values") {
            cfg.sigma_values = parse_list<double>(val, key);
        } else if (key == "ratio_values") {
            cfg.ratio_values = parse_list<double>(val, key);
        } else if (key == "m_values") {
            cfg.m_values.clear();
            for (const auto& item : split(val, ',')) {
                if (item == "n") {
                    cfg.m_values.push_back(0);
                    continue;
                }
                const int m = parse_number<int>(item, key);
                if (m < 1) throw InputError("m_values: entries are positive integers or \"n\"");
                cfg.m_values.push_back(m);
            }
        } else if (key == "trials") {
            cfg.trials = parse_number<int>(val, key);
        } else if (key == "master_seed") {
            cfg.master_seed = parse_number<std::uint64_t>(val, key);
        } else if (key == "tol") {
            cfg.tol = parse_number<double>(val, key);
        } else if (key == "max_iter") {
            cfg.max_iter = parse_number<int>(val, key);
        } else if (key == "record_traces") {
            cfg.record_traces = parse_bool(val, key);
        } else if (key == "output_path") {
            cfg.output_path = val;
        } else if (key == "restarts") {
            cfg.restarts = parse_number<int>(val, key);
        } else if (key == "tightness_tol") {
            cfg.tightness_tol = parse_number<double>(val, key);
        } else if (key == "threads") {
            cfg.threads = parse_number<int>(val, key);
        } else if (key == "timing") {
            cfg.timing = parse_bool(val, key);
        } else {
            throw InputError("unknown config key: " + key);
        }
    }
    validate(cfg);
    return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config not found: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str());
}

void validate(const SweepConfig& cfg) {
    if (cfg.trials < 1) throw DomainError("trials must be >= 1");
    if (cfg.n_values.empty()) throw DomainError("n_values is empty");
    for (auto n : cfg.n_values)
        if (n < 2) throw DomainError("every n must be >= 2");
    if (cfg.sigma_values.empty() && cfg.ratio_values.empty())
        throw DomainError("give sigma_values or ratio_values");
    for (double s : cfg.sigma_values)
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("every sigma must be > 0");
    for (double r : cfg.ratio_values)
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("every ratio must be > 0");
    if (cfg.m_values.empty()) throw DomainError("m_values is empty");
    for (int m : cfg.m_values)
        if (m < 0) throw DomainError("every m must be >= 1 or \"n\"");
    if (cfg.max_iter < 1) throw DomainError("max_iter must be >= 1");
    if (cfg.restarts < 0) throw DomainError("restarts must be >= 0");
    if (!(cfg.tightness_tol >= 0.0)) throw DomainError("tightness_tol must be >= 0");
    if (cfg.output_path.empty()) throw DomainError("output_path is empty");
}

// ---------------------------------------------------------------------------
// Trials.

TrialInstance make_trial_instance(Eigen::Index n, std::uint64_t seed) {
    auto noise = sample_noise(n, derive_seed(seed, 2));
    auto norm = operator_norm(noise.w, 1e-10, 100000, derive_seed(seed, 3));
    return {generate_truth(n, derive_seed(seed, 1)), std::move(noise), std::move(norm), seed};
}

TrialRecord run_trial(const TrialInstance& inst, double sigma, int m, const TrialOptions& opts, TrialTraces* traces) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("run_trial: sigma must be >= 0");
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index n = inst.truth.size();
    m = resolve_m(m, n);
    const Observation obs = assemble_observation(inst.truth, inst.noise, sigma);
    const SolverOptions so{opts.tol, opts.max_iter, opts.record_traces};

    auto mle = solve_with_restarts<FixedPointResult<PhaseVector>>(
        [&](const std::optional<PhaseVector>& init) { return solve_mle(obs.y, init, so); },
        [&](int r) {
            Rng rng(derive_seed(inst.seed, 100 + static_cast<std::uint64_t>(r)));
            CVector z(n);
            for (Eigen::Index j = 0; j < n; ++j) z[j] = rng.unit_phase();
            return std::optional<PhaseVector>(PhaseVector::trusted(z));
        },
        opts.restarts);
    auto bm = solve_with_restarts<FixedPointResult<UnitColumnMatrix>>(
        [&](const std::optional<UnitColumnMatrix>& init) {
            return solve_bm(obs.y, m, init, so, derive_seed(inst.seed, 4));
        },
        [&](int r) {
            Rng rng(derive_seed(inst.seed, 200 + static_cast<std::uint64_t>(r)));
            CMatrix v(m, n);
            for (Eigen::Index j = 0; j < n; ++j) {
                for (int i = 0; i < m; ++i) v(i, j) = rng.complex_normal();
                v.col(j).normalize();
            }
            return std::optional<UnitColumnMatrix>(UnitColumnMatrix::trusted(v));
        },
        opts.restarts);

    TrialRecord r;
    r.n = n;
    r.sigma = sigma;
    r.m = m;
    r.seed = inst.seed;
    r.noise_ratio = sigma > 0.0 ? static_cast<double>(n) / (sigma * sigma) : std::numeric_limits<double>::infinity();
    r.ell1_mle_truth = loss_ell1(mle.iterate, inst.truth);
    r.ellm_bm_truth = loss_ellm(bm.iterate, inst.truth);
    r.ellm_bm_mle = loss_ellm(bm.iterate, mle.iterate);
    r.frob_sq_normalized = frob_discrepancy(bm.iterate, mle.iterate);
    r.tight = r.ellm_bm_mle <= opts.tightness_tol;
    r.opnorm_w = inst.norm.value;
    const BoundInputs b = tightness_recipe(n, sigma, inst.norm.value);
    r.delta_used = b.delta;
    r.epsilon_used = b.epsilon;
    r.small_coord_count =
        count_small_coordinates(obs.y * mle.iterate.values(), b.delta * static_cast<double>(n));
    r.mle_iters = mle.iterations;
    r.mle_residual = mle.residual;
    r.mle_converged = mle.converged;
    r.bm_iters = bm.iterations;
    r.bm_residual = bm.residual;
    r.bm_converged = bm.converged;
    if (opts.timing)
        r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (traces) {
        traces->mle = std::move(mle.trace);
        traces->bm = std::move(bm.trace);
    }
    return r;
}

TrialRecord run_trial(Eigen::Index n, double sigma, int m, std::uint64_t seed, const TrialOptions& opts) {
    return run_trial(make_trial_instance(n, seed), sigma, m, opts);
}

std::vector<double> sweep_sigmas(const SweepConfig& cfg, Eigen::Index n) {
    std::vector<double> s = cfg.sigma_values;
    for (double r : cfg.ratio_values) s.push_back(std::sqrt(static_cast<double>(n) / r));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

namespace {

struct SweepOutput {
    std::vector<TrialRecord> rows;
    std::vector<TrialTraces> traces;
};

SweepOutput sweep_impl(const SweepConfig& cfg) {
    validate(cfg);
    const TrialOptions opts{cfg.tol, cfg.max_iter, cfg.tightness_tol, cfg.restarts, cfg.timing, cfg.record_traces};
    const size_t trials = static_cast<size_t>(cfg.trials);
    const size_t tasks = cfg.n_values.size() * trials;
    std::vector<SweepOutput> parts(tasks);

    // One task per (n, trial): W and ||W|| are shared by that trial's cells.
    parallel_for(tasks, worker_count(cfg.threads), [&](size_t k) {
        const Eigen::Index n = cfg.n_values[k / trials];
        const int trial_id = static_cast<int>(k % trials);
        const TrialInstance inst = make_trial_instance(n, derive_seed(cfg.master_seed, static_cast<std::uint64_t>(trial_id)));
        std::vector<int> ms;
        for (int m : cfg.m_values) ms.push_back(resolve_m(m, n));
        std::sort(ms.begin(), ms.end());
        ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
        for (double sigma : sweep_sigmas(cfg, n)) {
            for (int m : ms) {
                TrialTraces tr;
                TrialRecord rec = run_trial(inst, sigma, m, opts, cfg.record_traces ? &tr : nullptr);
                rec.trial_id = trial_id;
                parts[k].rows.push_back(rec);
                if (cfg.record_traces) parts[k].traces.push_back(std::move(tr));
            }
        }
    });

    std::vector<std::pair<TrialRecord, TrialTraces>> all;
    for (auto& p : parts)
        for (size_t i = 0; i < p.rows.size(); ++i)
            all.emplace_back(p.rows[i], cfg.record_traces ? std::move(p.traces[i]) : TrialTraces{});
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.n, a.first.sigma, a.first.m, a.first.trial_id) <
               std::tie(b.first.n, b.first.sigma, b.first.m, b.first.trial_id);
    });
    SweepOutput out;
    for (auto& [r, t] : all) {
        out.rows.push_back(r);
        out.traces.push_back(std::move(t));
    }
    return out;
}

}  // namespace

std::vector<TrialRecord> run_sweep_records(const SweepConfig& cfg) { return sweep_impl(cfg).rows; }

std::string run_sweep(const SweepConfig& cfg) {
    SweepOutput out = sweep_impl(cfg);
    const std::string& path = cfg.output_path;
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + path);
        f << to_csv(out.rows);
        if (!f) throw std::runtime_error("write failed: " + path);
    }

    nlohmann::json meta;
    meta["config"] = config_json(cfg);
    meta["code_version"] = PHASESYNC_VERSION;
    meta["platform"] = {{"compiler", __VERSION__},
#if defined(__linux__)
                        {"os", "linux"},
#elif defined(__APPLE__)
                        {"os", "darwin"},
#else
                        {"os", "other"},
#endif
                        {"pointer_bits", sizeof(void*) * 8}};
    meta["rows"] = out.rows.size();
    meta["columns"] = csv_columns();
    {
        std::ofstream f(base_path(path) + ".meta.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write metadata for " + path);
        f << meta.dump(2) << '\n';
    }

    if (cfg.record_traces) {
        std::ofstream f(base_path(path) + ".traces.jsonl", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write traces for " + path);
        for (size_t i = 0; i < out.rows.size(); ++i) {
            const auto& r = out.rows[i];
            nlohmann::json j{{"trial_id", r.trial_id}, {"n", r.n},         {"sigma", r.sigma},
                             {"m", r.m},               {"mle", out.traces[i].mle}, {"bm", out.traces[i].bm}};
            f << j.dump() << '\n';
        }
    }

    // Re-read what was written and re-check every row.
    const auto back = read_trial_csv(path);
    if (back.size() != out.rows.size()) throw std::runtime_error("post-write validation: row count mismatch");
    for (const auto& r : back) {
        const std::string err = check_record(r, cfg.tightness_tol);
        if (!err.empty()) throw std::runtime_error("post-write validation: " + err);
    }
    return path;
}

// ---------------------------------------------------------------------------
// CSV.

std::string format_double(double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, p);
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "trial_id",     "n",           "sigma",         "m",           "seed",
        "noise_ratio",  "ell1_mle_truth", "ellm_bm_truth", "ellm_bm_mle", "frob_sq_normalized",
        "tight",        "small_coord_count", "delta_used", "epsilon_used", "opnorm_w",
        "mle_iters",    "mle_residual", "mle_converged", "bm_iters",   "bm_residual",
        "bm_converged", "runtime_ms"};
    return cols;
}

std::string csv_header() {
    std::string s;
    for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
    return s;
}

std::string to_csv_row(const TrialRecord& r) {
    std::ostringstream os;
    os << r.trial_id << ',' << r.n << ',' << format_double(r.sigma) << ',' << r.m << ',' << r.seed << ','
       << format_double(r.noise_ratio) << ',' << format_double(r.ell1_mle_truth) << ','
       << format_double(r.ellm_bm_truth) << ',' << format_double(r.ellm_bm_mle) << ','
       << format_double(r.frob_sq_normalized) << ',' << (r.tight ? 1 : 0) << ',' << r.small_coord_count << ','
       << format_double(r.delta_used) << ',' << format_double(r.epsilon_used) << ',' << format_double(r.opnorm_w)
       << ',' << r.mle_iters << ',' << format_double(r.mle_residual) << ',' << (r.mle_converged ? 1 : 0) << ','
       << r.bm_iters << ',' << format_double(r.bm_residual) << ',' << (r.bm_converged ? 1 : 0) << ','
       << format_double(r.runtime_ms);
    return os.str();
}

std::string to_csv(const std::vector<TrialRecord>& rows) {
    std::string s = csv_header() + "\n";
    for (const auto& r : rows) s += to_csv_row(r) + "\n";
    return s;
}

std::vector<TrialRecord> parse_trial_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw SchemaError("schema error: missing header", csv_columns());
    const auto header = split(trim(line), ',');
    std::map<std::string, size_t> pos;
    for (size_t i = 0; i < header.size(); ++i) pos[header[i]] = i;
    std::vector<std::string> missing;
    for (const auto& c : csv_columns())
        if (!pos.count(c)) missing.push_back(c);
    if (!missing.empty()) {
        std::string msg = "schema error: missing columns";
        for (const auto& c : missing) msg += " " + c;
        throw SchemaError(msg, missing);
    }

    std::vector<TrialRecord> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size())
            throw InputError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                             " fields");
        auto get = [&](const char* c) -> const std::string& { return f[pos.at(c)]; };
        auto dbl = [&](const char* c) { return parse_number<double>(get(c), c); };
        auto flag = [&](const char* c) { return parse_bool(get(c), c); };
        TrialRecord r;
        r.trial_id = parse_number<int>(get("trial_id"), "trial_id");
        r.n = parse_number<Eigen::Index>(get("n"), "n");
        r.sigma = dbl("sigma");
        r.m = parse_number<int>(get("m"), "m");
        r.seed = parse_number<std::uint64_t>(get("seed"), "seed");
        r.noise_ratio = dbl("noise_ratio");
        r.ell1_mle_truth = dbl("ell1_mle_truth");
        r.ellm_bm_truth = dbl("ellm_bm_truth");
        r.ellm_bm_mle = dbl("ellm_bm_mle");
        r.frob_sq_normalized = dbl("frob_sq_normalized");
        r.tight = flag("tight");
        r.small_coord_count = parse_number<Eigen::Index>(get("small_coord_count"), "small_coord_count");
        r.delta_used = dbl("delta_used");
        r.epsilon_used = dbl("epsilon_used");
        r.opnorm_w = dbl("opnorm_w");
        r.mle_iters = parse_number<int>(get("mle_iters"), "mle_iters");
        r.mle_residual = dbl("mle_residual");
        r.mle_converged = flag("mle_converged");
        r.bm_iters = parse_number<int>(get("bm_iters"), "bm_iters");
        r.bm_residual = dbl("bm_residual");
        r.bm_converged = flag("bm_converged");
        r.runtime_ms = dbl("runtime_ms");
        rows.push_back(r);
    }
    return rows;
}

std::vector<TrialRecord> read_trial_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_trial_csv(ss.str());
}

std::string check_record(const TrialRecord& r, double tightness_tol) {
    const std::string where = "trial " + std::to_string(r.trial_id) + " (n=" + std::to_string(r.n) +
                              ", sigma=" + format_double(r.sigma) + ", m=" + std::to_string(r.m) + ")";
    if (r.tight != (r.ellm_bm_mle <= tightness_tol)) return where + ": tight flag disagrees with ellm_bm_mle";
    if (!(r.frob_sq_normalized <= 2.0 * r.ellm_bm_mle + 1e-9)) return where + ": frob_sq_normalized > 2 ellm_bm_mle";
    return "";
}

// ---------------------------------------------------------------------------
// Summaries.

std::vector<CellSummary> summarize_records(const std::vector<TrialRecord>& rows, std::optional<double> c_scale) {
    std::map<std::tuple<Eigen::Index, double, int>, std::vector<const TrialRecord*>> cells;
    for (const auto& r : rows) cells[{r.n, r.sigma, r.m}].push_back(&r);
    std::vector<CellSummary> out;
    for (const auto& [key, recs] : cells) {
        CellSummary c;
        std::tie(c.n, c.sigma, c.m) = key;
        c.noise_ratio = recs.front()->noise_ratio;
        c.trials = static_cast<int>(recs.size());
        std::vector<double> ellm, frob;
        int tight = 0;
        for (const auto* r : recs) {
            if (!(r->mle_converged && r->bm_converged)) continue;
            ellm.push_back(r->ellm_bm_mle);
            frob.push_back(r->frob_sq_normalized);
            tight += r->tight ? 1 : 0;
        }
        c.converged = static_cast<int>(ellm.size());
        const double nan = std::nan("");
        auto mean = [](const std::vector<double>& v) {
            double s = 0.0;
            for (double x : v) s += x;
            return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
        };
        auto max = [&](const std::vector<double>& v) { return v.empty() ? nan : *std::max_element(v.begin(), v.end()); };
        c.mean_ellm = mean(ellm);
        c.median_ellm = median(ellm);
        c.max_ellm = max(ellm);
        c.mean_frob = mean(frob);
        c.median_frob = median(frob);
        c.max_frob = max(frob);
        c.tight_fraction = c.converged ? static_cast<double>(tight) / c.converged : nan;
        c.converged_fraction = static_cast<double>(c.converged) / c.trials;
        if (c_scale) c.exp_bound = exp_bound(c.n, c.sigma, *c_scale);
        out.push_back(c);
    }
    return out;
}

std::vector<CellSummary> summarize(const std::string& csv_path, std::optional<double> c_scale) {
    return summarize_records(read_trial_csv(csv_path), c_scale);
}

std::string format_summary(const std::vector<CellSummary>& cells) {
    const bool overlay = !cells.empty() && cells.front().exp_bound.has_value();
    std::ostringstream os;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%6s %10s %5s %11s %6s %5s %11s %11s %11s %11s %11s %11s %8s %8s", "n", "sigma", "m",
                  "noise_ratio", "trials", "conv", "mean_ellm", "median_ellm", "max_ellm", "mean_frob", "median_frob",
                  "max_frob", "tight", "conv_fr");
    os << buf << (overlay ? "   exp_bound" : "") << '\n';
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof buf,
                      "%6lld %10.4g %5d %11.4g %6d %5d %11.3e %11.3e %11.3e %11.3e %11.3e %11.3e %8.3f %8.3f",
                      static_cast<long long>(c.n), c.sigma, c.m, c.noise_ratio, c.trials, c.converged, c.mean_ellm,
                      c.median_ellm, c.max_ellm, c.mean_frob, c.median_frob, c.max_frob, c.tight_fraction,
                      c.converged_fraction);
        os << buf;
        if (overlay) {
            std::snprintf(buf, sizeof buf, " %11.3e", c.exp_bound.value_or(std::nan("")));
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace phasesync
