// Unified command-line front end: policy evaluation, degradation-factor
// curves, instance generators, offline oracles, and grid-learning runs.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "compols/adapters.hpp"
#include "compols/eac.hpp"
#include "compols/learning.hpp"
#include "compols/okp.hpp"
#include "compols/oracles.hpp"
#include "compols/osc.hpp"
#include "compols/otp.hpp"
#include "compols/ski.hpp"

namespace {

using namespace compols;

struct GlobalOpts {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string format = "csv";  // csv | json
};

// Thrown for conditions that should exit with code 2 (infeasible instance
// or unwritable output), as opposed to invalid input (exit 1).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_sig(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Write header + rows as CSV ('.' decimal, 12 significant digits) or as a
// JSON array of objects keyed by the header names.
void emit_curve(const std::vector<std::string>& header,
                const std::vector<std::vector<double>>& rows, const std::string& path,
                const std::string& format) {
  if (rows.empty()) throw std::invalid_argument("emit_curve: empty series");
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw InfeasibleError("emit_curve: cannot write " + path);
    out = &file;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      arr.push_back(obj);
    }
    *out << arr.dump(2) << "\n";
    return;
  }
  for (std::size_t i = 0; i < header.size(); ++i)
    *out << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      *out << format_sig(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
}

void print_result(const RunResult& result, const std::string& format) {
  int admits = 0, threshold_rejects = 0, capacity_rejects = 0;
  for (const auto& d : result.decisions) {
    if (d.decision == Decision::kAdmit) ++admits;
    if (d.decision == Decision::kReject) ++threshold_rejects;
    if (d.decision == Decision::kCapacityReject) ++capacity_rejects;
  }
  nlohmann::json j = {{"alg_value", result.alg_value},
                      {"opt_value", result.opt_value},
                      {"ratio", result.ratio},
                      {"admits", admits},
                      {"threshold_rejects", threshold_rejects},
                      {"capacity_rejects", capacity_rejects},
                      {"final_state", result.final_state}};
  if (format == "json") {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "alg_value," << format_sig(result.alg_value) << "\n"
              << "opt_value," << format_sig(result.opt_value) << "\n"
              << "ratio," << format_sig(result.ratio) << "\n"
              << "admits," << admits << "\n"
              << "threshold_rejects," << threshold_rejects << "\n"
              << "capacity_rejects," << capacity_rejects << "\n";
  }
}

// Deterministic fan-out: results land in index order regardless of thread
// completion order.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < jobs; ++t)
    threads.emplace_back([&, t] {
      for (int i = t; i < count; i += jobs) fn(i);
    });
  for (auto& th : threads) th.join();
}

std::vector<double> parse_sweep(const std::string& spec) {
  // "lo:hi:n" -> n log-uniform values.
  double lo, hi;
  int n;
  char c1, c2;
  std::istringstream is(spec);
  if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 ||
      !(lo > 0.0) || hi < lo)
    throw std::invalid_argument("sweep spec must be lo:hi:n with 0 < lo <= hi, n >= 1");
  return ParameterGrid::log_uniform(lo, hi, n).points;
}

void register_ski(CLI::App& app, GlobalOpts& g) {
  auto* ski = app.add_subcommand("ski", "ski-rental policy class");

  {
    auto* cmd = ski->add_subcommand("df", "degradation factor of A(b)");
    auto p = std::make_shared<int>(10);
    auto b = std::make_shared<int>(10);
    cmd->add_option("--p", *p, "purchase price")->required();
    cmd->add_option("--b", *b, "rent-days parameter")->required();
    cmd->callback([p, b] { std::cout << format_sig(ski_df(*p, *b)) << "\n"; });
  }
  {
    auto* cmd = ski->add_subcommand("class", "integer interval B(phi)");
    auto p = std::make_shared<int>(10);
    auto phi = std::make_shared<double>(1.0);
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--phi", *phi)->required();
    cmd->callback([p, phi] {
      const auto interval = ski_phi_class(*p, *phi);
      std::cout << interval.lo << " " << interval.hi << "\n";
    });
  }
  {
    auto* cmd = ski->add_subcommand("curve", "(b/p, DF) pairs");
    auto p = std::make_shared<int>(10);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--p", *p)->required();
    cmd->add_option("--out", *out, "output path");
    cmd->callback([p, out, &g] {
      std::vector<std::vector<double>> rows;
      for (int b = 1; b <= 4 * *p; ++b)
        rows.push_back({static_cast<double>(b) / *p, ski_df(*p, b)});
      emit_curve({"b_over_p", "df"}, rows, *out, g.format);
    });
  }
}

void register_okp(CLI::App& app, GlobalOpts& g) {
  auto* okp = app.add_subcommand("okp", "online knapsack threshold policy");

  {
    auto* cmd = okp->add_subcommand("run", "run OKP-Alg(alpha) on an instance file");
    auto alpha = std::make_shared<double>(1.0);
    auto path = std::make_shared<std::string>();
    cmd->add_option("--alpha", *alpha)->required();
    cmd->add_option("--instance", *path)->required();
    cmd->callback([alpha, path, &g] {
      const auto inst = okp_from_json(load_json_file(*path));
      const auto report = validate_instance(inst);
      if (!report.ok()) {
        for (const auto& v : report.violations) std::cerr << v << "\n";
        throw std::invalid_argument("instance validation failed");
      }
      print_result(okp_run(ThresholdCurve(inst.bounds, *alpha), inst), g.format);
    });
  }
  {
    auto* cmd = okp->add_subcommand("df", "degradation factor DF(alpha)");
    auto gamma = std::make_shared<double>(20.0);
    auto alpha = std::make_shared<double>(1.0);
    cmd->add_option("--gamma", *gamma)->required();
    cmd->add_option("--alpha", *alpha)->required();
    cmd->callback([gamma, alpha] { std::cout << format_sig(okp_df(*gamma, *alpha)) << "\n"; });
  }
  {
    auto* cmd = okp->add_subcommand("class", "phi-degraded alpha interval");
    auto gamma = std::make_shared<double>(20.0);
    auto phi = std::make_shared<double>(1.0);
    cmd->add_option("--gamma", *gamma)->required();
    cmd->add_option("--phi", *phi)->required();
    cmd->callback([gamma, phi] {
      const auto cls = okp_phi_class(*gamma, *phi);
      std::cout << format_sig(cls.alpha_low) << " " << format_sig(cls.alpha_high)
                << " lambert=" << format_sig(cls.alpha_low_lambert) << " ("
                << cls.lambert_branch
                << ", discrepancy=" << format_sig(cls.lambert_discrepancy) << ")\n";
    });
  }
  {
    auto* cmd = okp->add_subcommand("worstcase", "two-batch adversarial instance");
    auto gamma = std::make_shared<double>(20.0);
    auto alpha = std::make_shared<double>(1.0);
    auto cap = std::make_shared<double>(1e-4);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--gamma", *gamma)->required();
    cmd->add_option("--alpha", *alpha)->required();
    cmd->add_option("--cap", *cap, "per-item weight cap");
    cmd->add_option("--out", *out)->required();
    cmd->callback([gamma, alpha, cap, out] {
      const DensityBounds bounds(1.0, *gamma);
      const auto inst = okp_worst_case(bounds, *alpha, *cap, (*gamma - 1.0) * 1e-3);
      save_json_file(*out, to_json(inst));
    });
  }
  {
    auto* cmd = okp->add_subcommand("curve", "(alpha, DF, CR) sweep");
    auto gamma = std::make_shared<double>(20.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--gamma", *gamma)->required();
    cmd->add_option("--out", *out);
    cmd->callback([gamma, out, &g] {
      const double cr_base = std::log(*gamma) + 1.0;
      std::vector<std::vector<double>> rows;
      for (double alpha : ParameterGrid::log_uniform(0.05, 10.0, 200).points)
        rows.push_back({alpha, okp_df(*gamma, alpha), okp_df(*gamma, alpha) * cr_base});
      emit_curve({"alpha", "df", "cr"}, rows, *out, g.format);
    });
  }
}

void register_otp(CLI::App& app, GlobalOpts& g) {
  auto* otp = app.add_subcommand("otp", "one-way trading policy");

  {
    auto* cmd = otp->add_subcommand("reward", "closed-form reward at alpha");
    auto alpha = std::make_shared<double>(1.0);
    auto path = std::make_shared<std::string>();
    cmd->add_option("--alpha", *alpha)->required();
    cmd->add_option("--instance", *path)->required();
    cmd->callback([alpha, path] {
      const auto inst = rate_from_json(load_json_file(*path));
      std::cout << format_sig(otp_reward_closed_form(inst, *alpha)) << "\n";
    });
  }
  {
    auto* cmd = otp->add_subcommand("segments", "piecewise reward coefficients");
    auto path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--instance", *path)->required();
    cmd->add_option("--out", *out);
    cmd->callback([path, out, &g] {
      const auto inst = rate_from_json(load_json_file(*path));
      const auto segs = otp_reward_segments(inst);
      std::vector<std::vector<double>> rows;
      for (const auto& s : segs.segments)
        rows.push_back({s.alpha_lo, s.alpha_hi, static_cast<double>(s.form), s.c0, s.c1});
      emit_curve({"alpha_lo", "alpha_hi", "form", "c0", "c1"}, rows, *out, g.format);
    });
  }
}

void register_osc(CLI::App& app, GlobalOpts& g) {
  auto* osc = app.add_subcommand("osc", "online set cover policy");

  {
    auto* cmd = osc->add_subcommand("run", "run OSC-Alg(theta) on an instance file");
    auto theta = std::make_shared<double>(2.0);
    auto path = std::make_shared<std::string>();
    cmd->add_option("--theta", *theta)->required();
    cmd->add_option("--instance", *path)->required();
    cmd->callback([theta, path, &g] {
      const auto inst = osc_from_json(load_json_file(*path));
      try {
        print_result(osc_run(inst.system, inst.arrivals, *theta, g.seed), g.format);
      } catch (const std::runtime_error& e) {
        throw InfeasibleError(e.what());
      }
    });
  }
  {
    auto* cmd = osc->add_subcommand("df", "degradation factor DF(theta)");
    auto m = std::make_shared<int>(2);
    auto theta = std::make_shared<double>(2.0);
    cmd->add_option("--m", *m)->required();
    cmd->add_option("--theta", *theta)->required();
    cmd->callback([m, theta] { std::cout << format_sig(osc_df(*m, *theta)) << "\n"; });
  }
  {
    auto* cmd = osc->add_subcommand("curve", "(theta, DF) sweep");
    auto m = std::make_shared<int>(2);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--m", *m)->required();
    cmd->add_option("--out", *out);
    cmd->callback([m, out, &g] {
      std::vector<std::vector<double>> rows;
      for (double theta : ParameterGrid::log_uniform(1.05, 16.0, 200).points)
        rows.push_back({theta, osc_df(*m, theta)});
      emit_curve({"theta", "df"}, rows, *out, g.format);
    });
  }
  {
    auto* cmd = osc->add_subcommand("scenarios", "normalized cost of both generators");
    auto out = std::make_shared<std::string>();
    auto n = std::make_shared<int>(120);
    auto m = std::make_shared<int>(3200);
    auto arrivals = std::make_shared<int>(80);
    auto seeds = std::make_shared<int>(20);
    cmd->add_option("--out", *out, "output directory")->required();
    cmd->add_option("--n", *n);
    cmd->add_option("--m", *m);
    cmd->add_option("--arrivals", *arrivals);
    cmd->add_option("--seeds", *seeds);
    cmd->callback([out, n, m, arrivals, seeds, &g] {
      std::filesystem::create_directories(*out);
      const std::vector<double> thetas = {2.0, 3.0, 4.0};
      for (auto kind : {ScenarioKind::kHighOverlap, ScenarioKind::kLowOverlap}) {
        std::vector<std::vector<double>> rows(thetas.size());
        parallel_for(static_cast<int>(thetas.size()), g.jobs, [&](int ti) {
          double total_cost = 0.0, total_norm = 0.0;
          for (int s = 0; s < *seeds; ++s) {
            const auto scenario =
                osc_scenario_generator(kind, *n, *m, *arrivals, g.seed + s);
            const auto run = osc_run(scenario.system, scenario.arrivals, thetas[ti],
                                     g.seed + 1000 + s);
            total_cost += run.alg_value;
            total_norm += run.opt_value > 0.0 ? run.alg_value / run.opt_value : 0.0;
          }
          rows[ti] = {thetas[ti], total_cost / *seeds, total_norm / *seeds};
        });
        const std::string name =
            kind == ScenarioKind::kHighOverlap ? "high_overlap" : "low_overlap";
        emit_curve({"theta", "mean_cost", "mean_cost_over_opt"}, rows,
                   (std::filesystem::path(*out) / (name + ".csv")).string(), g.format);
      }
    });
  }
}

EacInstance load_eac_source(const std::string& trace, const std::string& instance,
                            int slots, double capacity_kwh) {
  if (trace.empty() == instance.empty())
    throw std::invalid_argument("provide exactly one of --trace / --instance");
  if (!instance.empty()) return eac_from_json(load_json_file(instance));
  EacInstance inst;
  inst.bounds = DensityBounds(1.0, 20.0);
  inst.horizon = slots;
  const auto ingest = ingest_ev_csv(trace, ValueModel{}, inst.bounds, 1.0, capacity_kwh, slots);
  inst.requests = ingest.requests;
  if (ingest.warnings > 0)
    std::cerr << "warning: skipped " << ingest.warnings << " invalid rows\n";
  if (ingest.clipped_values > 0)
    std::cerr << "note: clipped " << ingest.clipped_values << " values into the density band\n";
  return inst;
}

void register_eac(CLI::App& app, GlobalOpts& g) {
  auto* eac = app.add_subcommand("eac", "EV admission control");

  {
    auto* cmd = eac->add_subcommand("run", "run the admission policy over a day");
    auto alpha = std::make_shared<double>(1.0);
    auto trace = std::make_shared<std::string>();
    auto instance = std::make_shared<std::string>();
    auto slots = std::make_shared<int>(24);
    auto chunk = std::make_shared<double>(0.0);
    auto capacity = std::make_shared<double>(100.0);
    cmd->add_option("--alpha", *alpha)->required();
    cmd->add_option("--trace", *trace, "CSV trace (arrival_ts, departure_ts, energy_kwh)");
    cmd->add_option("--instance", *instance, "JSON instance file");
    cmd->add_option("--slots", *slots);
    cmd->add_option("--chunk", *chunk, "water-fill chunk size (0 = default)");
    cmd->add_option("--capacity", *capacity, "station kWh per slot (trace mode)");
    cmd->callback([alpha, trace, instance, slots, chunk, capacity, &g] {
      const auto inst = load_eac_source(*trace, *instance, *slots, *capacity);
      print_result(eac_run(ThresholdCurve(inst.bounds, *alpha), inst.requests,
                           inst.horizon, *chunk, inst.weight_cap),
                   g.format);
    });
  }
  {
    auto* cmd = eac->add_subcommand("sweep", "profit ratio across an alpha grid");
    auto alphas = std::make_shared<std::string>("0.5:4:15");
    auto trace = std::make_shared<std::string>();
    auto instance = std::make_shared<std::string>();
    auto slots = std::make_shared<int>(24);
    auto capacity = std::make_shared<double>(100.0);
    auto out = std::make_shared<std::string>();
    cmd->add_option("--alphas", *alphas, "lo:hi:n log grid");
    cmd->add_option("--trace", *trace);
    cmd->add_option("--instance", *instance);
    cmd->add_option("--slots", *slots);
    cmd->add_option("--capacity", *capacity);
    cmd->add_option("--out", *out);
    cmd->callback([alphas, trace, instance, slots, capacity, out, &g] {
      const auto inst = load_eac_source(*trace, *instance, *slots, *capacity);
      const auto grid = parse_sweep(*alphas);
      std::vector<std::vector<double>> rows(grid.size());
      parallel_for(static_cast<int>(grid.size()), g.jobs, [&](int i) {
        const auto run = eac_run(ThresholdCurve(inst.bounds, grid[i]), inst.requests,
                                 inst.horizon, 0.0, inst.weight_cap);
        rows[i] = {grid[i], run.alg_value, run.opt_value, run.ratio};
      });
      emit_curve({"alpha", "alg_value", "opt_value", "ratio"}, rows, *out, g.format);
    });
  }
  {
    auto* cmd = eac->add_subcommand("synth", "generate a synthetic CSV trace");
    auto days = std::make_shared<int>(1);
    auto out = std::make_shared<std::string>();
    auto requests = std::make_shared<int>(300);
    auto capacity = std::make_shared<double>(100.0);
    cmd->add_option("--days", *days)->required();
    cmd->add_option("--out", *out)->required();
    cmd->add_option("--requests", *requests, "requests per day");
    cmd->add_option("--capacity", *capacity, "station kWh per slot");
    cmd->callback([days, out, requests, capacity, &g] {
      std::ofstream file(*out);
      if (!file) throw InfeasibleError("cannot write " + *out);
      file << "arrival_ts,departure_ts,energy_kwh\n";
      Rng rng = seeded_rng(g.seed);
      const DensityBounds bounds(1.0, 20.0);
      for (int d = 0; d < *days; ++d) {
        const auto day = eac_synth_day(bounds, 24, *requests, kDefaultWeightCap, rng);
        for (const auto& r : day) {
          char a_ts[32], d_ts[32];
          std::snprintf(a_ts, sizeof a_ts, "2026-01-%02dT%02d:00:00", d + 1, r.arrival);
          std::snprintf(d_ts, sizeof d_ts, "2026-01-%02dT%02d:59:00", d + 1, r.departure);
          file << a_ts << "," << d_ts << "," << format_sig(r.energy * *capacity) << "\n";
        }
      }
    });
  }
}

void register_learn(CLI::App& app, GlobalOpts& g) {
  auto* cmd = app.add_subcommand("learn", "grid learning over a phi-degraded class");
  auto problem = std::make_shared<std::string>("okp");
  auto phi = std::make_shared<double>(2.0);
  auto learner = std::make_shared<std::string>("hedge");
  auto rounds = std::make_shared<int>(100);
  auto out = std::make_shared<std::string>();
  auto eta = std::make_shared<double>(0.0);
  cmd->add_option("--problem", *problem)
      ->check(CLI::IsMember({"okp", "otp", "osc", "eac", "ski"}))
      ->required();
  cmd->add_option("--phi", *phi)->required();
  cmd->add_option("--learner", *learner)->check(CLI::IsMember({"hedge", "exp3", "prevbest"}));
  cmd->add_option("--rounds", *rounds)->required();
  cmd->add_option("--eta", *eta, "learning rate (0 = theory default)");
  cmd->add_option("--out", *out);
  cmd->callback([problem, phi, learner, rounds, out, eta, &g] {
    const auto adapter = make_adapter(*problem, *phi, g.seed);
    const LearnerKind kind = *learner == "hedge"   ? LearnerKind::kHedge
                             : *learner == "exp3"  ? LearnerKind::kExp3
                                                   : LearnerKind::kPreviousBest;
    const auto run = run_learning(adapter.grid, adapter.reward_fn, *rounds, kind,
                                  g.seed + 7777, *eta, adapter.baseline_index);
    std::vector<std::vector<double>> rows;
    double best_fixed_sum = 0.0;
    for (int t = 0; t < *rounds; ++t) {
      best_fixed_sum += run.rewards[t][run.best_fixed_arm];
      rows.push_back({static_cast<double>(t), adapter.grid.points[run.chosen[t]],
                      run.rewards[t][run.chosen[t]], best_fixed_sum / (t + 1),
                      run.regret[t]});
    }
    emit_curve({"round", "chosen_param", "reward", "best_fixed_avg", "regret"}, rows,
               *out, g.format);
  });
}

void register_oracle(CLI::App& app, GlobalOpts& g) {
  auto* cmd = app.add_subcommand("oracle", "offline reference solvers");
  auto problem = std::make_shared<std::string>();
  auto path = std::make_shared<std::string>();
  cmd->add_option("problem", *problem, "okp | okp-dp | osc | osc-greedy | eac")
      ->check(CLI::IsMember({"okp", "okp-dp", "osc", "osc-greedy", "eac"}))
      ->required();
  cmd->add_option("--instance", *path)->required();
  cmd->callback([problem, path, &g] {
    const auto j = load_json_file(*path);
    OracleResult res;
    if (*problem == "okp") {
      res = fractional_knapsack(okp_from_json(j));
    } else if (*problem == "okp-dp") {
      res = knapsack_dp(okp_from_json(j));
    } else if (*problem == "osc" || *problem == "osc-greedy") {
      const auto inst = osc_from_json(j);
      try {
        res = *problem == "osc" ? set_cover_exact(inst.system, inst.arrivals)
                                : set_cover_greedy(inst.system, inst.arrivals);
      } catch (const std::runtime_error& e) {
        throw InfeasibleError(e.what());
      }
    } else {
      const auto inst = eac_from_json(j);
      res = eac_fractional_opt(inst.requests, inst.horizon);
    }
    const char* kind = res.kind == OracleKind::kExact ? "exact"
                       : res.kind == OracleKind::kFractionalUpperBound
                           ? "fractional_upper_bound"
                           : "greedy_lower_bound";
    if (g.format == "json") {
      std::cout << nlohmann::json{{"value", res.value}, {"kind", kind}, {"witness", res.witness}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << format_sig(res.value) << " " << kind << "\n";
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"competitive online policies: evaluation, curves, and learning"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "global RNG seed");
  app.add_option("--jobs", g.jobs, "parallel workers for sweeps");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}));

  register_ski(app, g);
  register_okp(app, g);
  register_otp(app, g);
  register_osc(app, g);
  register_eac(app, g);
  register_learn(app, g);
  register_oracle(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleScheduleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
