// posetmc command-line front end. See README.md for usage.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "posetmc/posetmc.hpp"
#include "posetmc/simulate.hpp"

namespace fs = std::filesystem;
using namespace posetmc;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadConfig:
    case ErrorCode::BadHyper:
    case ErrorCode::BadP:
    case ErrorCode::BadTheta:
    case ErrorCode::BadRho: return kUsage;
    case ErrorCode::DegenerateColumn:
    case ErrorCode::ZeroPriorMass:
    case ErrorCode::TooManyExtensions: return kNumeric;
    default: return kData;
  }
}

void report(std::string_view kind, std::string_view message) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  io::detail::write_file(p, text);
}

std::vector<int> parse_lengths(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      fail(ErrorCode::BadConfig, "bad list length '" + tok + "'");
    }
  }
  return out;
}

// simulate ------------------------------------------------------------------------

struct SimulateArgs {
  std::string truth, templ, model = "noisefree", out;
  double theta = 2.7, p = 0.05;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  const TiedPartialOrder truth = io::read_poset(a.truth);
  std::mt19937_64 rng(a.seed);
  const SimModel model = parse_sim_model(a.model);
  ObservationSet templ;
  if (fs::exists(a.templ)) {
    templ = io::parse_lists(a.templ);
  } else {
    if (model == SimModel::RandomError) fail(ErrorCode::BadConfig, "random-error needs a list file as template");
    templ = random_template(truth.size(), parse_lengths(a.templ), rng);
  }
  const double param = model == SimModel::Mallows ? a.theta : a.p;
  const ObservationSet sim = simulate_lists(truth, templ, model, param, rng);
  const std::string text = "# simulated: model=" + a.model + " seed=" + std::to_string(a.seed) + "\n" + io::format_lists(sim);
  if (a.out.empty() || a.out == "-")
    std::cout << text;
  else
    write_text(a.out, text);
  return kOk;
}

// fit -------------------------------------------------------------------------------

struct FitArgs {
  std::string data, model, config, out_dir;
  std::optional<long long> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<int> thin, burn_in;
};

int run_fit(const FitArgs& a) {
  io::RunConfig cfg;
  if (!a.config.empty()) cfg = io::read_run_config(a.config);
  if (!a.data.empty()) cfg.data = a.data;
  if (!a.out_dir.empty()) cfg.out_dir = a.out_dir;
  if (!a.model.empty()) cfg.mcmc.model = io::parse_model(a.model);
  if (a.iterations) cfg.mcmc.iterations = *a.iterations;
  if (a.seed) cfg.mcmc.seed = *a.seed;
  if (a.thin) cfg.mcmc.thin = *a.thin;
  if (a.burn_in) cfg.mcmc.burn_in = *a.burn_in;
  if (cfg.data.empty()) fail(ErrorCode::BadConfig, "no data file given (--data or \"data\" in the config)");
  if (cfg.out_dir.empty()) fail(ErrorCode::BadConfig, "no output directory given (--out-dir or \"out_dir\")");
  cfg.mcmc.check();

  const ObservationSet data = io::parse_lists(cfg.data);
  const auto start = std::chrono::steady_clock::now();
  const McmcTrace trace = run_chain(data, cfg.mcmc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_trace_dir(cfg.out_dir, trace, cfg, data.size());

  json rates = json::object();
  for (int m = 0; m < kMoveCount; ++m) rates[std::string(kMoveNames[m])] = trace.moves[m].rate();
  std::cout << json{{"out_dir", cfg.out_dir}, {"records", trace.records.size()}, {"seconds", secs}, {"acceptance", rates}}.dump()
            << "\n";
  return kOk;
}

// summarize ---------------------------------------------------------------------------

struct SummarizeArgs {
  std::string trace_dir, truth, out_dir;
  double epsilon = 0.2;
  std::optional<int> burn_in;
};

json ess_json(const McmcTrace& tr, std::size_t burn) {
  json out = json::object();
  auto add = [&](const char* name, auto field) {
    const auto s = trace_series(tr, burn, field);
    out[name] = s.size() >= 10 ? ess(s) : 0.0;
  };
  add("K", [](const TraceRecord& r) { return r.K; });
  add("C", [](const TraceRecord& r) { return r.C; });
  add("rho", [](const TraceRecord& r) { return r.rho; });
  add("depth", [](const TraceRecord& r) { return r.depth; });
  add("loglik", [](const TraceRecord& r) { return r.loglik; });
  if (tr.model != NoiseModel::NoiseFree) add(tr.model == NoiseModel::Mallows ? "theta" : "p", [](const TraceRecord& r) { return r.noise; });
  return out;
}

int run_summarize(const SummarizeArgs& a) {
  const io::TraceDir td = io::read_trace_dir(a.trace_dir);
  const McmcTrace& tr = td.trace;
  const std::size_t burn = static_cast<std::size_t>(a.burn_in ? *a.burn_in : td.config.mcmc.burn_in);
  const fs::path out = a.out_dir.empty() ? fs::path(a.trace_dir) : fs::path(a.out_dir);
  fs::create_directories(out);

  const EdgeProbMatrix p = edge_probabilities(tr, burn);
  io::detail::write_file(out / "edge_probs.csv", io::matrix_csv(p.strict));
  io::detail::write_file(out / "ties.csv", io::matrix_csv(p.tie));
  const Consensus con = consensus(p, a.epsilon);
  io::detail::write_file(out / "consensus.dot", io::to_dot(con, p));
  const auto hist = depth_histogram(tr, burn);
  std::string h = "depth,mass\n";
  for (std::size_t d = 0; d < hist.size(); ++d) h += std::to_string(d + 1) + "," + io::detail::num(hist[d]) + "\n";
  io::detail::write_file(out / "depth_hist.csv", h);
  io::detail::write_file(out / "cocluster.csv", io::matrix_csv(cocluster_matrix(tr, burn)));

  json summary{{"records", tr.records.size() - burn},
               {"burn_in", burn},
               {"epsilon", a.epsilon},
               {"consensus_edges", con.edges.size()},
               {"transitivity_gaps", con.transitivity_gaps.size()},
               {"mean_depth", mean(trace_series(tr, burn, [](const TraceRecord& r) { return r.depth; }))},
               {"mean_K", mean(trace_series(tr, burn, [](const TraceRecord& r) { return r.K; }))},
               {"mean_C", mean(trace_series(tr, burn, [](const TraceRecord& r) { return r.C; }))},
               {"mean_rho", mean(trace_series(tr, burn, [](const TraceRecord& r) { return r.rho; }))},
               {"ess", ess_json(tr, burn)}};
  if (tr.model != NoiseModel::NoiseFree)
    summary[tr.model == NoiseModel::Mallows ? "mean_theta" : "mean_p"] =
        mean(trace_series(tr, burn, [](const TraceRecord& r) { return r.noise; }));

  if (!a.truth.empty()) {
    const PartialOrder truth = io::read_poset(a.truth).as_unordered();
    const auto roc = roc_curve(p, truth, epsilon_grid(100));
    std::string r = "epsilon,tpr,fpr\n";
    double best = 1e9;
    json elbow;
    for (const auto& pt : roc) {
      r += io::detail::num(pt.epsilon) + "," + io::detail::num(pt.tpr) + "," + io::detail::num(pt.fpr) + "\n";
      const double d = std::hypot(pt.fpr, 1.0 - pt.tpr);
      if (d < best) {
        best = d;
        elbow = {{"epsilon", pt.epsilon}, {"tpr", pt.tpr}, {"fpr", pt.fpr}};
      }
    }
    io::detail::write_file(out / "roc.csv", r);
    summary["roc_elbow"] = elbow;
  }
  io::detail::write_file(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump() << "\n";
  return kOk;
}

// compare -----------------------------------------------------------------------------

int run_compare_waic(const std::vector<std::string>& dirs, std::optional<int> burn_in) {
  if (dirs.size() < 2) fail(ErrorCode::BadConfig, "compare waic needs at least two --trace-dir");
  std::cout << "trace_dir,model,elpd_waic,se\n";
  for (const auto& d : dirs) {
    const io::TraceDir td = io::read_trace_dir(d);
    const Waic w = elpd_waic(td.trace, static_cast<std::size_t>(burn_in ? *burn_in : td.config.mcmc.burn_in));
    std::cout << d << "," << io::model_name(td.trace.model) << "," << io::detail::num(w.elpd) << ","
              << io::detail::num(w.se) << "\n";
  }
  return kOk;
}

int run_compare_bf(const std::string& dir, long draws, std::uint64_t seed, std::optional<int> burn_in) {
  const io::TraceDir td = io::read_trace_dir(dir);
  const int n = td.trace.n;
  const int k0 = (n + 1) / 2;
  std::mt19937_64 rng(seed);
  std::vector<ModelPoint> prior;
  prior.reserve(static_cast<std::size_t>(draws));
  const PriorConfig& pc = td.config.mcmc.prior;
  for (long s = 0; s < draws; ++s) {
    const int K = pc.fixed_K ? *pc.fixed_K : sample_k(pc.eta_K, rng);
    const int C = pc.no_ties ? n : sample_pdp_partition(n, pc.eta_a, pc.eta_b, rng).num_blocks();
    prior.push_back({C, K});
  }
  const auto post = model_points(td.trace, static_cast<std::size_t>(burn_in ? *burn_in : td.config.mcmc.burn_in));
  const BayesFactor bf = savage_dickey_bf(prior, post, n, k0);
  std::cout << json{{"trace_dir", dir},
                    {"model", io::model_name(td.trace.model)},
                    {"C", n},
                    {"K", k0},
                    {"prior_freq", bf.prior_freq},
                    {"posterior_freq", bf.posterior_freq},
                    {"B10", bf.infinite ? json("inf") : json(bf.bf)},
                    {"se", bf.infinite ? json("inf") : json(bf.se)}}
                   .dump()
            << "\n";
  return kOk;
}

// utilities ---------------------------------------------------------------------------

int run_count(const std::string& file) {
  const TiedPartialOrder h = io::read_poset(file);
  std::cout << count_linear_extensions(h.as_unordered()).total << "\n";
  return kOk;
}

int run_prior_predictive(int n, const std::string& config, long samples, std::uint64_t seed) {
  io::RunConfig cfg;
  if (!config.empty()) cfg = io::read_run_config(config);
  std::mt19937_64 rng(seed);
  std::vector<long> hist(n, 0);
  long vsp = 0, bucket = 0;
  for (long s = 0; s < samples; ++s) {
    const PriorDraw d = sample_prior_poset(n, cfg.mcmc.prior, rng);
    const PartialOrder q = collapse_ties(d.order).quotient;
    ++hist[depth(q) - 1];
    vsp += is_vsp(q);
    bucket += is_bucket_order(q);
  }
  std::cout << "depth,mass\n";
  for (int d = 0; d < n; ++d) std::cout << d + 1 << "," << io::detail::num(static_cast<double>(hist[d]) / samples) << "\n";
  std::cerr << json{{"samples", samples},
                    {"vsp_fraction", static_cast<double>(vsp) / samples},
                    {"bucket_fraction", static_cast<double>(bucket) / samples}}
                   .dump()
            << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian partial orders from ranked lists"};
  app.require_subcommand(1);
  int rc = kOk;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "synthetic lists from a reference order");
  simulate->add_option("--truth", sim.truth, "poset file")->required();
  simulate->add_option("--template", sim.templ, "list file to copy membership from, or comma-separated lengths")
      ->required();
  simulate->add_option("--model", sim.model, "noisefree | random-error | mallows | qj")
      ->check(CLI::IsMember({"noisefree", "random-error", "mallows", "qj"}));
  simulate->add_option("--theta", sim.theta, "Mallows dispersion");
  simulate->add_option("--p", sim.p, "queue-jump probability");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--out", sim.out, "output list file (stdout if omitted)");
  simulate->callback([&] { rc = run_simulate(sim); });

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "run the sampler and write a trace directory");
  fitc->add_option("--data", fit.data, "list file");
  fitc->add_option("--model", fit.model, "mallows | qj | noisefree")->check(CLI::IsMember({"mallows", "qj", "noisefree"}));
  fitc->add_option("--config", fit.config, "JSON run configuration");
  fitc->add_option("--out-dir", fit.out_dir);
  fitc->add_option("--iterations", fit.iterations);
  fitc->add_option("--seed", fit.seed);
  fitc->add_option("--thin", fit.thin);
  fitc->add_option("--burn-in", fit.burn_in);
  fitc->callback([&] { rc = run_fit(fit); });

  SummarizeArgs sum;
  auto* summarize = app.add_subcommand("summarize", "posterior summaries of a trace directory");
  summarize->add_option("--trace-dir", sum.trace_dir)->required();
  summarize->add_option("--epsilon", sum.epsilon, "consensus threshold")->check(CLI::Range(0.0, 1.0));
  summarize->add_option("--truth", sum.truth, "reference poset for ROC output");
  summarize->add_option("--burn-in", sum.burn_in, "records to drop (default: from the run config)");
  summarize->add_option("--out-dir", sum.out_dir, "defaults to the trace directory");
  summarize->callback([&] { rc = run_summarize(sum); });

  auto* compare = app.add_subcommand("compare", "model comparison");
  compare->require_subcommand(1);
  std::vector<std::string> waic_dirs;
  std::optional<int> cmp_burn;
  auto* waic = compare->add_subcommand("waic", "elpd_waic per trace directory");
  waic->add_option("--trace-dir", waic_dirs)->required();
  waic->add_option("--burn-in", cmp_burn);
  waic->callback([&] { rc = run_compare_waic(waic_dirs, cmp_burn); });
  std::string bf_dir;
  long bf_draws = 1'000'000;
  std::uint64_t bf_seed = 1;
  auto* bf = compare->add_subcommand("bf", "Savage-Dickey ratio for C = n, K = ceil(n/2)");
  bf->add_option("--trace-dir", bf_dir)->required();
  bf->add_option("--prior-draws", bf_draws)->check(CLI::PositiveNumber);
  bf->add_option("--seed", bf_seed);
  bf->add_option("--burn-in", cmp_burn);
  bf->callback([&] { rc = run_compare_bf(bf_dir, bf_draws, bf_seed, cmp_burn); });

  std::string poset_file;
  auto* count = app.add_subcommand("count-le", "number of linear extensions (ties unordered)");
  count->add_option("--poset", poset_file)->required();
  count->callback([&] { rc = run_count(poset_file); });

  int pp_n = 15;
  long pp_samples = 100000;
  std::string pp_config;
  std::uint64_t pp_seed = 1;
  auto* pp = app.add_subcommand("prior-predictive", "prior depth distribution");
  pp->add_option("--n", pp_n)->check(CLI::Range(1, kMaxActors));
  pp->add_option("--config", pp_config);
  pp->add_option("--samples", pp_samples)->check(CLI::PositiveNumber);
  pp->add_option("--seed", pp_seed);
  pp->callback([&] { rc = run_prior_predictive(pp_n, pp_config, pp_samples, pp_seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("UsageError", e.what());
    return kUsage;
  } catch (const Error& e) {
    report(to_string(e.code()), e.what());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    report("InternalError", e.what());
    return kData;
  }
  return rc;
}
