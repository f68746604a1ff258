#include "qtele/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtele/estimation.hpp"
#include "qtele/fidelity.hpp"
#include "qtele/haar.hpp"
#include "qtele/protocol.hpp"
#include "qtele/protocol_io.hpp"
#include "qtele/search.hpp"

namespace qtele::cli {

namespace {

using Json = nlohmann::ordered_json;

// Bad flags or inputs; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  int d = 2;
  std::vector<double> lambdas_in;
  std::optional<double> theta;
  std::int64_t n = 100000;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string format = "json";
  std::string out_path;
  // command specific
  int steps = 50;
  std::int64_t iterations = 500;
  int outcomes = 0;
  std::string source;
  std::string save_protocol;

  // resolved
  std::vector<double> lambdas;
  std::vector<std::string> notices;
};

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void resolve_lambdas(RunConfig& cfg, bool required) {
  if (cfg.d < 2) throw UsageError("d: must be >= 2");
  if (cfg.theta && !cfg.lambdas_in.empty()) {
    throw UsageError("lambdas: give either --lambdas or --theta, not both");
  }
  std::vector<double> l;
  if (cfg.theta) {
    if (cfg.d != 2) throw UsageError("theta: shorthand is only defined for d = 2");
    if (*cfg.theta < 0.0 || *cfg.theta > std::numbers::pi / 2 + 1e-12) {
      throw UsageError("theta: must lie in [0, pi/2]");
    }
    l = {std::abs(std::cos(*cfg.theta)), std::abs(std::sin(*cfg.theta))};
  } else if (!cfg.lambdas_in.empty()) {
    l = cfg.lambdas_in;
  } else if (required) {
    throw UsageError("lambdas: one of --lambdas or --theta is required");
  } else {
    l.assign(static_cast<std::size_t>(cfg.d), 1.0 / std::sqrt(static_cast<double>(cfg.d)));
  }
  if (static_cast<int>(l.size()) != cfg.d) {
    throw UsageError("lambdas: expected " + std::to_string(cfg.d) + " values for d = " +
                     std::to_string(cfg.d) + ", got " + std::to_string(l.size()));
  }
  double total = 0.0;
  for (double x : l) {
    if (!std::isfinite(x) || x < 0.0) throw UsageError("lambdas: values must be finite and >= 0");
    total += x * x;
  }
  if (total == 0.0) throw UsageError("lambdas: at least one value must be positive");
  if (!std::is_sorted(l.begin(), l.end(), std::greater<>())) {
    std::sort(l.begin(), l.end(), std::greater<>());
    cfg.notices.push_back("lambdas sorted descending");
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    const double scale = 1.0 / std::sqrt(total);
    for (double& x : l) x *= scale;
    cfg.notices.push_back("lambdas normalized (sum of squares was " + fmt17(total) + ")");
  }
  cfg.lambdas = std::move(l);
}

void require_samples(const RunConfig& cfg) {
  if (cfg.n < kMinMcSamples) throw UsageError("n: must be >= 1000");
  if (cfg.threads < 1) throw UsageError("threads: must be >= 1");
}

Json config_json(const RunConfig& cfg) {
  Json c;
  c["command"] = cfg.command;
  c["d"] = cfg.d;
  if (!cfg.lambdas.empty()) c["lambdas"] = cfg.lambdas;
  if (cfg.theta) c["theta"] = *cfg.theta;
  if (cfg.command == "simulate" || cfg.command == "estimate" || cfg.command == "verify-mkl") {
    c["n"] = cfg.n;
  }
  if (cfg.command == "sweep") c["steps"] = cfg.steps;
  if (cfg.command == "search") {
    c["iterations"] = cfg.iterations;
    c["outcomes"] = cfg.outcomes;
  }
  if (cfg.command == "check-protocol") c["source"] = cfg.source;
  c["seed"] = cfg.seed;
  c["threads"] = cfg.threads;
  c["format"] = cfg.format;
  return c;
}

// A report is either one JSON result or a CSV table; both render from it.
struct Report {
  Json result = Json::object();
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  int exit_code = kExitOk;
};

void emit(const RunConfig& cfg, const Report& rep, std::ostream& out) {
  if (cfg.format == "csv") {
    out << "# " << config_json(cfg).dump() << '\n';
    for (const auto& n : cfg.notices) out << "# notice: " << n << '\n';
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(rep.csv_header);
    for (const auto& row : rep.csv_rows) line(row);
    return;
  }
  Json doc;
  doc["schema"] = 1;
  doc["command"] = cfg.command;
  doc["config"] = config_json(cfg);
  doc["notices"] = cfg.notices;
  doc["result"] = rep.result;
  out << doc.dump(2) << '\n';
}

std::string str(std::int64_t v) { return std::to_string(v); }
std::string str(bool b) { return b ? "true" : "false"; }

Report cmd_bound(RunConfig& cfg) {
  resolve_lambdas(cfg, true);
  Report rep;
  const double f = fidelity_bound(cfg.lambdas);
  const double e = estimation_fidelity_bound(cfg.lambdas);
  const double s = max_singlet_fraction(cfg.lambdas);
  rep.result = {{"fidelity_bound", f}, {"estimation_bound", e}, {"max_singlet_fraction", s}};
  rep.csv_header = {"fidelity_bound", "estimation_bound", "max_singlet_fraction"};
  rep.csv_rows = {{fmt17(f), fmt17(e), fmt17(s)}};
  return rep;
}

Report cmd_simulate(RunConfig& cfg) {
  resolve_lambdas(cfg, true);
  require_samples(cfg);
  const Protocol proto = standard_protocol(SchmidtDecomposition::canonical(cfg.lambdas));
  SeededRng rng(cfg.seed);
  const double exact = mean_fidelity_exact(proto);
  const auto mc = mean_fidelity_monte_carlo(proto, cfg.n, rng, cfg.threads);
  Report rep;
  rep.result = {{"exact", exact},
                {"mc_estimate", mc.value},
                {"mc_std_error", mc.std_error},
                {"n", mc.n_samples},
                {"seed", cfg.seed},
                {"bound", fidelity_bound(cfg.lambdas)}};
  rep.csv_header = {"exact", "mc_estimate", "mc_std_error", "n", "seed", "bound"};
  rep.csv_rows = {{fmt17(exact), fmt17(mc.value), fmt17(mc.std_error), str(mc.n_samples),
                   std::to_string(cfg.seed), fmt17(fidelity_bound(cfg.lambdas))}};
  return rep;
}

Report cmd_estimate(RunConfig& cfg) {
  resolve_lambdas(cfg, true);
  require_samples(cfg);
  const auto schmidt = SchmidtDecomposition::canonical(cfg.lambdas);
  const AliceMeasurement meas = standard_measurement(cfg.d);
  const EstimationStrategy strategy = optimal_estimates(meas);
  const EstimationComparison cmp = compare_to_bound(meas, schmidt, strategy);
  SeededRng rng(cfg.seed);
  const auto mc = estimation_fidelity_mc(meas, cfg.lambdas, strategy, cfg.n, rng, cfg.threads);
  Report rep;
  rep.result = {{"exact", cmp.exact},
                {"bound", cmp.bound},
                {"tight_guaranteed", cmp.tight_guaranteed},
                {"mc_estimate", mc.value},
                {"mc_std_error", mc.std_error},
                {"n", mc.n_samples},
                {"seed", cfg.seed}};
  rep.csv_header = {"exact", "bound", "tight_guaranteed", "mc_estimate", "mc_std_error",
                    "n", "seed"};
  rep.csv_rows = {{fmt17(cmp.exact), fmt17(cmp.bound), str(cmp.tight_guaranteed),
                   fmt17(mc.value), fmt17(mc.std_error), str(mc.n_samples),
                   std::to_string(cfg.seed)}};
  return rep;
}

Report cmd_sweep(RunConfig& cfg) {
  if (cfg.d != 2) throw UsageError("sweep: only d = 2 is supported");
  if (cfg.steps < 1) throw UsageError("steps: must be >= 1");
  Report rep;
  rep.csv_header = {"theta", "bound", "exact", "estimation_bound"};
  Json rows = Json::array();
  for (int i = 0; i <= cfg.steps; ++i) {
    const double theta = (std::numbers::pi / 2) * i / cfg.steps;
    std::vector<double> l = {std::abs(std::cos(theta)), std::abs(std::sin(theta))};
    std::sort(l.begin(), l.end(), std::greater<>());
    const double norm = std::sqrt(l[0] * l[0] + l[1] * l[1]);
    for (double& x : l) x /= norm;
    const double bound = fidelity_bound(l);
    const double exact = mean_fidelity_exact(standard_protocol(SchmidtDecomposition::canonical(l)));
    const double est = estimation_fidelity_bound(l);
    rep.csv_rows.push_back({fmt17(theta), fmt17(bound), fmt17(exact), fmt17(est)});
    rows.push_back({{"theta", theta}, {"bound", bound}, {"exact", exact}, {"estimation_bound", est}});
  }
  rep.result = {{"rows", rows}};
  return rep;
}

Report cmd_verify_mkl(RunConfig& cfg) {
  if (cfg.d < 2) throw UsageError("d: must be >= 2");
  require_samples(cfg);
  SeededRng rng(cfg.seed);
  Report rep;
  rep.csv_header = {"k", "l", "row", "col", "exact_re", "exact_im", "mc_re", "mc_im",
                    "std_error", "pass"};
  Json entries = Json::array();
  bool all_pass = true;
  double worst_z = 0.0;
  for (int k = 0; k < cfg.d; ++k) {
    for (int l = 0; l < cfg.d; ++l) {
      const Operator exact = m_kl_exact(cfg.d, k, l);
      const MatrixEstimate mc = m_kl_monte_carlo(cfg.d, k, l, cfg.n, rng, cfg.threads);
      for (int i = 0; i < cfg.d; ++i) {
        for (int j = 0; j < cfg.d; ++j) {
          const auto& e = mc.at(i, j);
          const double diff = std::abs(e.value - exact(i, j));
          const bool pass = diff <= 4.0 * e.std_error;
          all_pass = all_pass && pass;
          if (e.std_error > 0.0) worst_z = std::max(worst_z, diff / e.std_error);
          entries.push_back({{"k", k}, {"l", l}, {"row", i}, {"col", j},
                             {"exact", {exact(i, j).real(), exact(i, j).imag()}},
                             {"mc", {e.value.real(), e.value.imag()}},
                             {"std_error", e.std_error}, {"pass", pass}});
          rep.csv_rows.push_back({std::to_string(k), std::to_string(l), std::to_string(i),
                                  std::to_string(j), fmt17(exact(i, j).real()),
                                  fmt17(exact(i, j).imag()), fmt17(e.value.real()),
                                  fmt17(e.value.imag()), fmt17(e.std_error), str(pass)});
        }
      }
    }
  }
  rep.result = {{"pass", all_pass}, {"sigma_band", 4.0}, {"worst_z", worst_z},
                {"entries", entries}};
  rep.exit_code = all_pass ? kExitOk : kExitCheckFailed;
  return rep;
}

Json completeness_json(const CompletenessReport& c) {
  return {{"pass", c.pass}, {"max_error", c.max_error}, {"worst_k", c.worst_k},
          {"worst_l", c.worst_l}};
}

Report cmd_check_protocol(RunConfig& cfg) {
  std::optional<ProtocolDocument> doc;
  if (cfg.source == "standard") {
    resolve_lambdas(cfg, false);
    const Protocol proto = standard_protocol(SchmidtDecomposition::canonical(cfg.lambdas));
    doc = to_document(proto);
    if (!cfg.save_protocol.empty()) {
      try {
        write_protocol_file(cfg.save_protocol, *doc);
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }
  } else {
    try {
      doc = read_protocol_file(cfg.source);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    cfg.d = doc->d;
    cfg.lambdas_in = doc->lambdas;
    resolve_lambdas(cfg, true);
    if (cfg.lambdas != doc->lambdas) {
      throw UsageError("lambdas: protocol file must store normalized, descending lambdas");
    }
  }
  const AliceMeasurement meas = doc->measurement();
  const auto schmidt = SchmidtDecomposition::canonical(cfg.lambdas);
  const OptimalityReport opt = check_optimality(meas, schmidt);

  Report rep;
  Json violations = Json::array();
  for (const auto& v : opt.violations) {
    violations.push_back({{"kind", to_string(v.kind)}, {"outcome", v.outcome}, {"k", v.k},
                          {"l", v.l}, {"error", v.error}});
    rep.csv_rows.push_back({to_string(v.kind), std::to_string(v.outcome), std::to_string(v.k),
                            std::to_string(v.l), fmt17(v.error)});
  }
  rep.csv_header = {"kind", "outcome", "k", "l", "error"};
  rep.result["completeness"] = completeness_json(opt.completeness);
  rep.result["optimality"] = {{"pass", opt.pass}, {"violations", violations}};
  rep.result["outcomes"] = meas.outcomes();
  rep.result["fidelity_bound"] = fidelity_bound(cfg.lambdas);
  if (opt.completeness.pass) {
    rep.result["optimal_fidelity_given_measurement"] =
        optimal_fidelity_given_measurement(meas, cfg.lambdas);
    try {
      rep.result["mean_fidelity_exact"] = mean_fidelity_exact(doc->to_protocol());
    } catch (const std::invalid_argument& e) {
      rep.result["protocol_error"] = e.what();
    }
  }
  rep.exit_code = opt.pass && !rep.result.contains("protocol_error") ? kExitOk
                                                                     : kExitCheckFailed;
  return rep;
}

Report cmd_search(RunConfig& cfg) {
  resolve_lambdas(cfg, true);
  if (cfg.iterations < 1) throw UsageError("iters: must be >= 1");
  if (cfg.outcomes == 0) cfg.outcomes = cfg.d * cfg.d;
  if (cfg.outcomes < cfg.d * cfg.d) {
    throw UsageError("outcomes: a rank-one POVM needs at least d^2 = " +
                     std::to_string(cfg.d * cfg.d) + " outcomes");
  }
  SeededRng rng(cfg.seed);
  const SearchResult res = search_best_protocol(cfg.lambdas, cfg.outcomes, cfg.iterations, rng);
  Report rep;
  const bool pass = res.gap >= -kBoundSlack && res.n_violations == 0;
  rep.result = {{"best_fidelity", res.best_fidelity}, {"bound", res.bound},
                {"gap", res.gap}, {"n_evaluated", res.n_evaluated},
                {"n_violations", res.n_violations}, {"pass", pass}};
  rep.csv_header = {"best_fidelity", "bound", "gap", "n_evaluated", "n_violations", "pass"};
  rep.csv_rows = {{fmt17(res.best_fidelity), fmt17(res.bound), fmt17(res.gap),
                   str(res.n_evaluated), str(res.n_violations), str(pass)}};
  rep.exit_code = pass ? kExitOk : kExitCheckFailed;
  return rep;
}

void add_lambda_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--d", cfg.d, "qudit dimension")->capture_default_str();
  sub->add_option("--lambdas", cfg.lambdas_in, "Schmidt coefficients, comma separated")
      ->delimiter(',');
  sub->add_option("--theta", cfg.theta, "d = 2 shorthand: lambdas = (cos t, sin t)");
}

void add_common_flags(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  sub->add_option("--threads", cfg.threads, "Monte-Carlo worker threads")->capture_default_str();
  sub->add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_option("--out", cfg.out_path, "output file (default stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qtele: qudit teleportation fidelity with an arbitrary pure shared state"};
  app.require_subcommand(1);
  RunConfig cfg;

  using Handler = Report (*)(RunConfig&);
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common_flags(sub, cfg);
    commands.emplace_back(sub, h);
    return sub;
  };

  auto* bound = add("bound", "closed-form fidelity, estimation and singlet-fraction bounds", cmd_bound);
  add_lambda_flags(bound, cfg);

  auto* simulate = add("simulate", "exact and Monte-Carlo fidelity of the standard protocol", cmd_simulate);
  add_lambda_flags(simulate, cfg);
  simulate->add_option("--n", cfg.n, "Monte-Carlo samples")->capture_default_str();

  auto* estimate = add("estimate", "state-estimation fidelity of the optimal guesses", cmd_estimate);
  add_lambda_flags(estimate, cfg);
  estimate->add_option("--n", cfg.n, "Monte-Carlo samples")->capture_default_str();

  auto* sweep = add("sweep", "d = 2 fidelity curve over theta in [0, pi/2]", cmd_sweep);
  sweep->add_option("--d", cfg.d, "qudit dimension (must be 2)")->capture_default_str();
  sweep->add_option("--steps", cfg.steps, "grid intervals")->capture_default_str();

  auto* mkl = add("verify-mkl", "Monte-Carlo check of the M_kl integrals", cmd_verify_mkl);
  mkl->add_option("--d", cfg.d, "qudit dimension")->capture_default_str();
  mkl->add_option("--n", cfg.n, "Monte-Carlo samples per (k, l)")->capture_default_str();

  auto* check = add("check-protocol", "completeness and optimality of a protocol", cmd_check_protocol);
  check->add_option("source", cfg.source, "'standard' or a protocol JSON file")->required();
  add_lambda_flags(check, cfg);
  check->add_option("--save-protocol", cfg.save_protocol,
                    "write the standard protocol to this JSON file");

  auto* search = add("search", "random search over measurements against the bound", cmd_search);
  add_lambda_flags(search, cfg);
  search->add_option("--iters", cfg.iterations, "random measurements")->capture_default_str();
  search->add_option("--outcomes", cfg.outcomes, "outcomes per measurement (default d^2)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  for (const auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    cfg.command = sub->get_name();
    try {
      const Report rep = handler(cfg);
      if (cfg.out_path.empty()) {
        emit(cfg, rep, out);
      } else {
        std::ofstream file(cfg.out_path);
        if (!file) throw UsageError("out: cannot open " + cfg.out_path);
        emit(cfg, rep, file);
      }
      return rep.exit_code;
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::invalid_argument& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace qtele::cli
