#include "nttkit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

#include "nttkit/completion.hpp"
#include "nttkit/eigen.hpp"
#include "nttkit/quantum.hpp"

namespace nttkit {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Row = std::vector<std::string>;

// %.17g round-trips every double, so equal bits give equal text
std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string num(Index v) { return std::to_string(v); }

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

void allow_keys(const json& o, const std::string& where, std::initializer_list<const char*> keys) {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : o.items())
        if (!ok.count(k)) bad(where + ": unknown key \"" + k + "\"");
}

const json& need(const json& o, const char* key) {
    if (!o.contains(key)) bad(std::string("missing required key \"") + key + "\"");
    return o.at(key);
}

Index as_int(const json& v, const std::string& what, Index lo) {
    if (!v.is_number_integer()) bad(what + " must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo) bad(what + " must be at least " + std::to_string(lo) + ", got " + std::to_string(x));
    return static_cast<Index>(x);
}

Index get_int(const json& o, const char* key, Index lo) { return as_int(need(o, key), key, lo); }
Index get_int(const json& o, const char* key, Index lo, Index dflt) {
    return o.contains(key) ? as_int(o.at(key), key, lo) : dflt;
}

double as_num(const json& v, const std::string& what) {
    if (!v.is_number()) bad(what + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad(what + " must be finite");
    return x;
}

double get_num(const json& o, const char* key, double dflt, double lo, bool open_lo = false) {
    if (!o.contains(key)) return dflt;
    const double x = as_num(o.at(key), key);
    if (x < lo || (open_lo && x == lo)) bad(std::string(key) + " is out of range");
    return x;
}

std::vector<Index> int_list(const json& v, const std::string& what, Index lo) {
    std::vector<Index> out;
    if (v.is_number_integer()) {
        out.push_back(as_int(v, what, lo));
        return out;
    }
    if (!v.is_array() || v.empty()) bad(what + " must be a non-empty array of integers");
    for (const auto& e : v) out.push_back(as_int(e, what + " entry", lo));
    return out;
}

std::vector<std::uint64_t> seed_list(const json& o, const char* key) {
    std::vector<std::uint64_t> out;
    for (Index s : int_list(need(o, key), key, 0)) out.push_back(static_cast<std::uint64_t>(s));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
    return s;
}

std::string trace_csv(const std::vector<TraceRow>& rows, const std::vector<double>* extra = nullptr,
                      const char* extra_name = nullptr) {
    std::string s = "iter,cost,grad_norm,step,beta";
    if (extra) s += std::string(",") + extra_name;
    s += "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        s += fmt::format("{},{},{},{},{}", r.iter, num(r.cost), num(r.grad_norm), num(r.step), num(r.beta));
        if (extra) s += "," + (i < extra->size() ? num((*extra)[i]) : std::string("nan"));
        s += "\n";
    }
    return s;
}

struct JobOutput {
    std::vector<Row> rows;
    std::vector<std::pair<std::string, std::string>> traces;
};

struct Job {
    std::string label;
    std::function<JobOutput()> run;
};

struct Plan {
    std::string experiment;
    Row header;
    std::vector<Job> jobs;
    json seeds = json::array();
    std::optional<fs::path> out;
};

RCGConfig optimizer_of(const json& cfg, RCGConfig base = {}) {
    return cfg.contains("optimizer") ? parse_optimizer(cfg.at("optimizer"), base) : base;
}

Shape shape_of(const json& v) {
    const auto dims = int_list(v, "shape", 1);
    return Shape(dims.begin(), dims.end());
}

void plan_complete(const json& c, Plan& p) {
    allow_keys(c, "complete", {"experiment", "output", "optimizer", "shape", "rank", "samples", "noise", "seeds",
                               "success_threshold"});
    const Shape shape = shape_of(need(c, "shape"));
    const auto rv = int_list(need(c, "rank"), "rank", 1);
    if (rv.size() != shape.size() + 1) bad("rank must have one more entry than shape");
    const TTRank rank(rv);
    if (rank[0] != 1 || rank[static_cast<Index>(shape.size())] != 1) bad("boundary ranks must be 1");
    if (!is_feasible(shape, rank)) bad("rank " + rank.to_string() + " is not feasible for the shape");
    const Index samples = get_int(c, "samples", 1);
    std::vector<double> noise{0.0};
    if (c.contains("noise")) {
        noise.clear();
        const json& nv = c.at("noise");
        for (const auto& e : nv.is_array() ? nv : json::array({nv})) {
            const double x = as_num(e, "noise");
            if (x < 0.0) bad("noise must be non-negative");
            noise.push_back(x);
        }
        if (noise.empty()) bad("noise list is empty");
    }
    const double thr = get_num(c, "success_threshold", 1e-4, 0.0, true);
    const auto seeds = seed_list(c, "seeds");
    const RCGConfig cfg = optimizer_of(c);
    p.header = {"seed", "noise", "samples", "iterations", "hit_iteration", "train_error", "test_error", "termination"};
    for (auto s : seeds) {
        p.seeds.push_back(s);
        for (std::size_t i = 0; i < noise.size(); ++i) {
            const double lam = noise[i];
            p.jobs.push_back({fmt::format("complete seed={} noise={}", s, num(lam)), [=] {
                                  const RecoveryReport rep = recovery_run({shape, rank, samples, lam, s, thr}, cfg);
                                  JobOutput o;
                                  o.rows.push_back({std::to_string(s), num(lam), num(samples), num(rep.iterations),
                                                    num(rep.hit_iteration), num(rep.train_error), num(rep.test_error),
                                                    to_string(rep.reason)});
                                  o.traces.emplace_back(fmt::format("complete_seed{}_noise{}.csv", s, i),
                                                        trace_csv(rep.trace.rows, &rep.test_errors, "test_error"));
                                  return o;
                              }});
        }
    }
}

void plan_phase(const json& c, Plan& p) {
    allow_keys(c, "phase", {"experiment", "output", "optimizer", "d", "ns", "ms", "rank", "trials", "seed"});
    const Index d = get_int(c, "d", 2);
    const auto ns = int_list(need(c, "ns"), "ns", 2);
    const auto ms = int_list(need(c, "ms"), "ms", 1);
    const Index rank = get_int(c, "rank", 1);
    const Index trials = get_int(c, "trials", 1);
    const auto seed = static_cast<std::uint64_t>(get_int(c, "seed", 0));
    const RCGConfig cfg = optimizer_of(c);
    p.seeds.push_back(seed);
    p.header = {"n", "m", "trials", "success_fraction", "median_test_error"};
    for (Index n : ns) {
        for (Index m : ms) {
            p.jobs.push_back({fmt::format("phase n={} m={}", n, m), [=] {
                                  const PhaseCell cell = phase_experiment(d, {n}, {m}, rank, trials, seed, cfg).front();
                                  std::vector<double> e = cell.test_errors;
                                  std::sort(e.begin(), e.end());
                                  const double med = e.size() % 2 ? e[e.size() / 2]
                                                                  : 0.5 * (e[e.size() / 2 - 1] + e[e.size() / 2]);
                                  JobOutput o;
                                  o.rows.push_back({num(n), num(cell.m), num(trials), num(cell.success_fraction), num(med)});
                                  std::string t = "trial,test_error\n";
                                  for (std::size_t i = 0; i < cell.test_errors.size(); ++i)
                                      t += fmt::format("{},{}\n", i, num(cell.test_errors[i]));
                                  o.traces.emplace_back(fmt::format("phase_n{}_m{}.csv", n, m), t);
                                  return o;
                              }});
        }
    }
}

void plan_laplace(const json& c, Plan& p) {
    allow_keys(c, "eigen-laplace",
               {"experiment", "output", "optimizer", "d", "n", "rank", "rank_start", "stage_iters", "extremum", "seeds"});
    const Index d = get_int(c, "d", 1);
    const Index n = get_int(c, "n", 2);
    const auto ranks = int_list(need(c, "rank"), "rank", 1);
    const Index start = get_int(c, "rank_start", 1, 0);
    const Index stage_iters = get_int(c, "stage_iters", 1, 50);
    std::string ext = "max";
    if (c.contains("extremum")) {
        if (!c.at("extremum").is_string()) bad("extremum must be \"min\" or \"max\"");
        ext = c.at("extremum").get<std::string>();
        if (ext != "min" && ext != "max") bad("extremum must be \"min\" or \"max\"");
    }
    const Extremum e = ext == "max" ? Extremum::Max : Extremum::Min;
    const auto seeds = seed_list(c, "seeds");
    const RCGConfig cfg = optimizer_of(c);
    const Shape shape(static_cast<std::size_t>(d), n);
    p.header = {"seed", "d", "n", "rank", "extremum", "lambda", "reference", "relerr", "subspace_distance",
                "iterations", "termination"};
    for (auto s : seeds) {
        p.seeds.push_back(s);
        for (Index r : ranks) {
            p.jobs.push_back({fmt::format("eigen-laplace seed={} rank={}", s, r), [=] {
                                  auto h = std::make_shared<const KroneckerSumOperator>(laplace_operator(d, n));
                                  const auto sched = rank_schedule(shape, start > 0 ? std::min(start, r) : r, r);
                                  const EigenResult res = eigen_solve(h, sched, e, cfg, s, stage_iters);
                                  const std::vector<Index> idx(static_cast<std::size_t>(d), e == Extremum::Max ? n : 1);
                                  const auto [ref, vec] = laplace_reference(d, n, idx);
                                  JobOutput o;
                                  o.rows.push_back({std::to_string(s), num(d), num(n), num(r), ext, num(res.lambda),
                                                    num(ref), num(std::abs(res.lambda - ref) / std::abs(ref)),
                                                    num(subspace_distance(*res.point, vec)),
                                                    num(res.trace.iterations()), to_string(res.trace.reason)});
                                  o.traces.emplace_back(fmt::format("eigen_laplace_seed{}_rank{}.csv", s, r),
                                                        trace_csv(res.trace.rows));
                                  return o;
                              }});
        }
    }
}

void plan_ising(const json& c, Plan& p) {
    allow_keys(c, "eigen-ising",
               {"experiment", "output", "optimizer", "d", "t", "rank", "rank_start", "stage_iters", "seeds", "als_sweeps"});
    const Index d = get_int(c, "d", 2);
    const double t = as_num(need(c, "t"), "t");
    const auto ranks = int_list(need(c, "rank"), "rank", 1);
    const Index start = get_int(c, "rank_start", 1, 1);
    const Index stage_iters = get_int(c, "stage_iters", 1, 50);
    const Index sweeps = get_int(c, "als_sweeps", 0, 0);
    const auto seeds = seed_list(c, "seeds");
    const RCGConfig cfg = optimizer_of(c);
    const Shape shape(static_cast<std::size_t>(d), 2);
    auto h = std::make_shared<const KroneckerSumOperator>(ising_operator(d, t));
    // dense reference up to 2^10, computed once for all jobs
    auto once = std::make_shared<std::once_flag>();
    auto ref = std::make_shared<double>(std::numeric_limits<double>::quiet_NaN());
    auto reference = [=] {
        std::call_once(*once, [&] {
            if (d <= 10) {
                Eigen::SelfAdjointEigenSolver<Matrix> es(h->dense(Index{1} << 10), Eigen::EigenvaluesOnly);
                *ref = es.eigenvalues()[0];
            }
        });
        return *ref;
    };
    p.header = {"seed", "d", "t", "rank", "lambda", "reference", "relerr", "stage_lambdas", "iterations",
                "termination", "als_lambda", "als_relerr"};
    for (auto s : seeds) {
        p.seeds.push_back(s);
        for (Index r : ranks) {
            p.jobs.push_back({fmt::format("eigen-ising seed={} rank={}", s, r), [=] {
                                  const auto sched = rank_schedule(shape, std::min(start, r), r);
                                  const EigenResult res = eigen_solve(h, sched, Extremum::Min, cfg, s, stage_iters);
                                  const double lam_ref = reference();
                                  auto rel = [&](double v) { return std::abs(v - lam_ref) / std::abs(lam_ref); };
                                  double als = std::numeric_limits<double>::quiet_NaN();
                                  if (sweeps > 0) als = als_baseline(*h, sched.back(), sweeps, s).lambda;
                                  JobOutput o;
                                  o.rows.push_back({std::to_string(s), num(d), num(t), num(r), num(res.lambda),
                                                    num(lam_ref), num(rel(res.lambda)), join(res.stage_lambdas),
                                                    num(res.trace.iterations()), to_string(res.trace.reason), num(als),
                                                    num(rel(als))});
                                  o.traces.emplace_back(fmt::format("eigen_ising_seed{}_rank{}.csv", s, r),
                                                        trace_csv(res.trace.rows));
                                  return o;
                              }});
        }
    }
}

void plan_stabrank(const json& c, Plan& p) {
    allow_keys(c, "stabrank",
               {"experiment", "output", "optimizer", "n", "R", "r", "lambda", "lambda_ramp", "fd_step", "seeds"});
    const Index n = get_int(c, "n", 1);
    if (n > 8) bad("stabrank supports n <= 8");
    const Index R = get_int(c, "R", 1);
    const Index r = get_int(c, "r", 1);
    const double lambda = get_num(c, "lambda", 1.0, 0.0);
    StabRankConfig scfg;
    scfg.fd_step = get_num(c, "fd_step", 0.0, 0.0);
    if (c.contains("lambda_ramp")) {
        const json& v = c.at("lambda_ramp");
        if (!v.is_array()) bad("lambda_ramp must be an array");
        scfg.lambda_ramp.clear();
        for (const auto& e : v) {
            const double x = as_num(e, "lambda_ramp entry");
            if (!(x > 0.0)) bad("lambda_ramp entries must be positive");
            scfg.lambda_ramp.push_back(x);
        }
    }
    scfg.rcg = optimizer_of(c, scfg.rcg);
    const auto seeds = seed_list(c, "seeds");
    p.header = {"seed", "n", "R", "r", "lambda", "infidelity", "max_sre", "sre_values", "cost", "ridge_used"};
    for (auto s : seeds) {
        p.seeds.push_back(s);
        p.jobs.push_back({fmt::format("stabrank seed={}", s), [=] {
                              const StabRankResult res = stab_rank_solve(magic_state(n), R, lambda, r, scfg, s);
                              JobOutput o;
                              o.rows.push_back({std::to_string(s), num(n), num(R), num(r), num(lambda),
                                                num(res.infidelity), num(*std::max_element(res.sre.begin(), res.sre.end())),
                                                join(res.sre), num(res.cost), res.ridge_used ? "1" : "0"});
                              o.traces.emplace_back(fmt::format("stabrank_seed{}.csv", s), trace_csv(res.trace));
                              return o;
                          }});
    }
}

Matrix matrix_of(const json& m, const std::string& what) {
    if (!m.is_array() || m.empty() || !m.front().is_array() || m.front().empty()) bad(what + " must be a matrix");
    const Index rows = static_cast<Index>(m.size()), cols = static_cast<Index>(m.front().size());
    Matrix out(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const json& row = m.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) bad(what + " rows differ in length");
        for (Index j = 0; j < cols; ++j) {
            const json& e = row.at(static_cast<std::size_t>(j));
            if (e.is_number()) {
                out(i, j) = as_num(e, what);
            } else if (e.is_array() && e.size() == 2) {
                out(i, j) = cplx(as_num(e[0], what), as_num(e[1], what));
            } else {
                bad(what + " entries must be numbers or [re, im] pairs");
            }
        }
    }
    return out;
}

QuantumChannel channel_of(const json& v) {
    if (!v.is_object()) bad("channel must be an object");
    allow_keys(v, "channel", {"type", "params", "kraus"});
    const json& type = need(v, "type");
    if (!type.is_string()) bad("channel type must be a string");
    const auto t = type.get<std::string>();
    try {
        if (t == "antisymmetric") return antisymmetric_channel();
        if (t == "gadc") {
            const json& pr = need(v, "params");
            if (!pr.is_object()) bad("gadc params must be an object");
            allow_keys(pr, "gadc params", {"gamma", "noise"});
            return gadc(as_num(need(pr, "gamma"), "gamma"), as_num(need(pr, "noise"), "noise"));
        }
        if (t == "custom") {
            const json& k = need(v, "kraus");
            if (!k.is_array() || k.empty()) bad("kraus must be a non-empty array of matrices");
            std::vector<Matrix> ks;
            for (const auto& m : k) ks.push_back(matrix_of(m, "kraus operator"));
            return QuantumChannel(std::move(ks));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        bad(std::string("channel: ") + e.what());
    }
    bad("channel type must be antisymmetric, gadc or custom");
}

void plan_renyi(const json& c, Plan& p) {
    allow_keys(c, "renyi", {"experiment", "output", "optimizer", "channel", "ns", "r", "restarts", "seed", "log_base"});
    auto ch = std::make_shared<const QuantumChannel>(channel_of(need(c, "channel")));
    if (ch->dim_in() != ch->dim_out()) bad("channel must map a space to itself");
    const auto ns = int_list(need(c, "ns"), "ns", 1);
    const Index r = get_int(c, "r", 1);
    const Index restarts = get_int(c, "restarts", 1, 5);
    const auto seed = static_cast<std::uint64_t>(get_int(c, "seed", 0));
    const double base = get_num(c, "log_base", 2.0, 1.0, true);
    const RCGConfig cfg = optimizer_of(c);
    p.seeds.push_back(seed);
    p.header = {"n", "r", "restarts", "s2", "s2_per_use", "restart_values"};
    for (Index n : ns) {
        p.jobs.push_back({fmt::format("renyi n={}", n), [=] {
                              const EntropyResult res = min_output_entropy(ch, n, r, cfg, restarts, seed, base);
                              JobOutput o;
                              o.rows.push_back({num(n), num(r), num(restarts), num(res.s2),
                                                num(res.s2 / static_cast<double>(n)), join(res.per_restart)});
                              for (std::size_t i = 0; i < res.traces.size(); ++i)
                                  o.traces.emplace_back(fmt::format("renyi_n{}_restart{}.csv", n, i),
                                                        trace_csv(res.traces[i].rows));
                              return o;
                          }});
    }
}

Plan make_plan(const json& cfg) {
    if (!cfg.is_object()) bad("config must be a JSON object");
    const json& e = need(cfg, "experiment");
    if (!e.is_string()) bad("experiment must be a string");
    Plan p;
    p.experiment = e.get<std::string>();
    if (cfg.contains("output")) {
        if (!cfg.at("output").is_string() || cfg.at("output").get<std::string>().empty())
            bad("output must be a non-empty string");
        p.out = fs::path(cfg.at("output").get<std::string>());
    }
    try {
        if (p.experiment == "complete") plan_complete(cfg, p);
        else if (p.experiment == "phase") plan_phase(cfg, p);
        else if (p.experiment == "eigen-laplace") plan_laplace(cfg, p);
        else if (p.experiment == "eigen-ising") plan_ising(cfg, p);
        else if (p.experiment == "stabrank") plan_stabrank(cfg, p);
        else if (p.experiment == "renyi") plan_renyi(cfg, p);
        else bad("unknown experiment \"" + p.experiment + "\"");
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& err) {
        // library validation (e.g. rank feasibility) surfacing during planning
        bad(err.what());
    }
    return p;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::string csv_line(const Row& r) {
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    return s + "\n";
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

} // namespace

void configure_logging() {
    const char* env = std::getenv("NTTKIT_LOG");
    const std::string v = env ? env : "info";
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else {
        spdlog::set_level(spdlog::level::info);
        if (v != "info") spdlog::warn("NTTKIT_LOG={} is not one of error, info, debug; using info", v);
    }
}

RCGConfig parse_optimizer(const json& block, RCGConfig base) {
    if (!block.is_object()) bad("optimizer must be an object");
    allow_keys(block, "optimizer", {"max_iters", "grad_tol", "cost_tol", "cost_window", "beta", "c1", "backtrack",
                                    "max_backtracks", "model_step", "time_limit"});
    base.max_iters = get_int(block, "max_iters", 0, base.max_iters);
    base.grad_tol = get_num(block, "grad_tol", base.grad_tol, 0.0);
    base.cost_tol = get_num(block, "cost_tol", base.cost_tol, 0.0);
    base.cost_window = get_int(block, "cost_window", 1, base.cost_window);
    if (block.contains("beta")) {
        const json& b = block.at("beta");
        const std::string s = b.is_string() ? b.get<std::string>() : "";
        if (s == "pr+") base.beta = BetaRule::PolakRibierePlus;
        else if (s == "fr") base.beta = BetaRule::FletcherReeves;
        else if (s == "none") base.beta = BetaRule::None;
        else bad("beta must be \"pr+\", \"fr\" or \"none\"");
    }
    base.line_search.c1 = get_num(block, "c1", base.line_search.c1, 0.0, true);
    base.line_search.backtrack = get_num(block, "backtrack", base.line_search.backtrack, 0.0, true);
    if (base.line_search.c1 >= 1.0 || base.line_search.backtrack >= 1.0) bad("c1 and backtrack must lie in (0, 1)");
    base.line_search.max_backtracks =
        static_cast<int>(get_int(block, "max_backtracks", 0, base.line_search.max_backtracks));
    if (block.contains("model_step")) {
        if (!block.at("model_step").is_boolean()) bad("model_step must be a boolean");
        base.line_search.model_initial_step = block.at("model_step").get<bool>();
    }
    base.time_limit = get_num(block, "time_limit", base.time_limit, 0.0);
    return base;
}

void validate_config(const json& cfg) { (void)make_plan(cfg); }

int run_config(const json& cfg, const RunOptions& opts) {
    Plan plan;
    try {
        plan = make_plan(cfg);
    } catch (const ConfigError& e) {
        spdlog::error("invalid config: {}", e.what());
        return 2;
    }
    const fs::path out = opts.out ? *opts.out : plan.out ? *plan.out : fs::path("results") / plan.experiment;
    const std::size_t n = plan.jobs.size();
    const int jobs = std::max(1, std::min(opts.jobs, static_cast<int>(n)));
    spdlog::info("{}: {} run(s) on {} job slot(s), output {}", plan.experiment, n, jobs, out.string());

    std::vector<JobOutput> outputs(n);
    std::vector<std::string> errors(n);
    std::vector<double> wall(n, 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                outputs[i] = plan.jobs[i].run();
            } catch (const std::exception& e) {
                errors[i] = e.what();
                spdlog::error("{} failed: {}", plan.jobs[i].label, e.what());
            }
            wall[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    json manifest;
    manifest["tool"] = "nttkit";
    manifest["version"] = kVersion;
    manifest["experiment"] = plan.experiment;
    manifest["config"] = cfg;
    manifest["seeds"] = plan.seeds;
    manifest["runs"] = n;
    manifest["results_header"] = plan.header;
    json failed = json::array();
    std::string first_error;
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i].empty()) continue;
        failed.push_back({{"run", plan.jobs[i].label}, {"error", errors[i]}});
        if (first_error.empty()) first_error = errors[i];
    }
    manifest["status"] = failed.empty() ? "complete" : "failed";
    manifest["partial"] = !failed.empty();
    manifest["failed_runs"] = failed;

    try {
        fs::create_directories(out / "traces");
        std::string results = csv_line(plan.header), timings = "run,label,wall_ms\n";
        json artifacts = json::array({"results.csv", "timings.csv"});
        for (std::size_t i = 0; i < n; ++i) {
            timings += fmt::format("{},\"{}\",{:.3f}\n", i, plan.jobs[i].label, wall[i]);
            if (!errors[i].empty()) continue;
            for (const auto& r : outputs[i].rows) results += csv_line(r);
            for (const auto& [name, text] : outputs[i].traces) {
                write_file(out / "traces" / name, text);
                artifacts.push_back("traces/" + name);
            }
        }
        write_file(out / "results.csv", results);
        write_file(out / "timings.csv", timings);
        manifest["artifacts"] = artifacts;
        write_file(out / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        spdlog::error("writing artifacts failed: {}", e.what());
        return 1;
    }
    if (!failed.empty()) {
        spdlog::error("{} of {} run(s) failed; first error: {}", failed.size(), n, first_error);
        return 1;
    }
    return 0;
}

int run_config_file(const fs::path& path, const RunOptions& opts) {
    std::ifstream f(path);
    if (!f) {
        spdlog::error("cannot open config {}", path.string());
        return 2;
    }
    json cfg;
    try {
        cfg = json::parse(f);
    } catch (const json::parse_error& e) {
        spdlog::error("config {} is not valid JSON: {}", path.string(), e.what());
        return 2;
    }
    return run_config(cfg, opts);
}

int report(const fs::path& dir, std::ostream& out) {
    std::vector<fs::path> manifests;
    std::error_code ec;
    if (fs::is_directory(dir, ec)) {
        for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
             it.increment(ec)) {
            if (it->is_regular_file() && it->path().filename() == "manifest.json") manifests.push_back(it->path());
        }
    }
    if (manifests.empty()) {
        std::cerr << "error: no manifest.json under " << dir.string() << "\n";
        return 1;
    }
    std::sort(manifests.begin(), manifests.end());

    // columns worth showing per experiment; anything else shows everything
    const std::map<std::string, std::vector<std::string>> headline{
        {"complete", {"seed", "noise", "samples", "iterations", "test_error", "termination"}},
        {"phase", {"n", "m", "trials", "success_fraction", "median_test_error"}},
        {"eigen-laplace", {"seed", "d", "n", "rank", "lambda", "relerr", "subspace_distance"}},
        {"eigen-ising", {"seed", "d", "t", "rank", "lambda", "relerr", "als_relerr"}},
        {"stabrank", {"seed", "n", "R", "r", "infidelity", "max_sre"}},
        {"renyi", {"n", "r", "restarts", "s2", "s2_per_use"}},
    };

    for (const auto& mpath : manifests) {
        json m;
        try {
            std::ifstream f(mpath);
            m = json::parse(f);
        } catch (const std::exception& e) {
            std::cerr << "error: unreadable manifest " << mpath.string() << ": " << e.what() << "\n";
            return 1;
        }
        const std::string exp = m.value("experiment", "?");
        out << "== " << mpath.parent_path().string() << " ==\n";
        out << "experiment " << exp << "  status " << m.value("status", "?") << "  runs " << m.value("runs", 0)
            << "  version " << m.value("version", "?") << "\n";

        std::ifstream rf(mpath.parent_path() / "results.csv");
        std::string line;
        if (!rf || !std::getline(rf, line)) {
            out << "(no results.csv)\n\n";
            continue;
        }
        const auto header = split(line, ',');
        std::vector<std::vector<std::string>> rows;
        while (std::getline(rf, line))
            if (!line.empty()) rows.push_back(split(line, ','));

        std::vector<std::size_t> cols;
        if (auto it = headline.find(exp); it != headline.end()) {
            for (const auto& name : it->second) {
                auto pos = std::find(header.begin(), header.end(), name);
                if (pos != header.end()) cols.push_back(static_cast<std::size_t>(pos - header.begin()));
            }
        }
        if (cols.empty())
            for (std::size_t i = 0; i < header.size(); ++i) cols.push_back(i);

        auto shown = [](const std::string& cell) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            const bool numeric = !cell.empty() && end && *end == '\0';
            if (!numeric || cell.find_first_of(".eE") == std::string::npos) return cell;
            return fmt::format("{:.6g}", v);
        };
        std::vector<std::vector<std::string>> table{{}};
        for (auto c : cols) table[0].push_back(header[c]);
        for (const auto& r : rows) {
            std::vector<std::string> t;
            for (auto c : cols) t.push_back(c < r.size() ? shown(r[c]) : "");
            table.push_back(std::move(t));
        }
        std::vector<std::size_t> width(cols.size(), 0);
        for (const auto& r : table)
            for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
        for (const auto& r : table) {
            for (std::size_t i = 0; i < r.size(); ++i)
                out << (i ? "  " : "") << std::string(width[i] - r[i].size(), ' ') << r[i];
            out << "\n";
        }
        out << "\n";
    }
    return 0;
}

} // namespace nttkit
