#include "relaylearn/cli.hpp"

#include <CLI11.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json_detail.hpp"
#include "relaylearn/errors.hpp"
#include "relaylearn/exponent.hpp"
#include "relaylearn/harness.hpp"
#include "relaylearn/json_io.hpp"

namespace relay {

namespace {

using detail::json;

struct CliOptions {
  std::string config_path;
  std::string out_path;
  std::string format;  // "", "csv", or "json"
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + out_path);
  out << text;
  if (!out) throw std::invalid_argument("write failed: " + out_path);
}

std::string pick_format(const CliOptions& opt, const char* fallback,
                        bool csv_allowed) {
  std::string fmt = opt.format.empty() ? fallback : opt.format;
  if (fmt != "csv" && fmt != "json") {
    throw std::invalid_argument("format must be csv or json");
  }
  if (fmt == "csv" && !csv_allowed) {
    throw std::invalid_argument(
        "csv output only applies to simulate and sweep");
  }
  return fmt;
}

std::uint64_t parse_seed_env(const char* text) {
  if (*text == '\0') throw std::invalid_argument("RELAY_EXP_SEED is empty");
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text, &end, 10);
  if (errno != 0 || end == text || *end != '\0') {
    throw std::invalid_argument(std::string("RELAY_EXP_SEED is not a ") +
                                "non-negative integer: " + text);
  }
  return static_cast<std::uint64_t>(v);
}

// Config seed < RELAY_EXP_SEED env < --seed flag; same shape for threads
// minus the env step.
void apply_overrides(ExperimentConfig* config, const CliOptions& opt) {
  if (const char* env = std::getenv("RELAY_EXP_SEED")) {
    config->seed = parse_seed_env(env);
  }
  if (opt.seed) config->seed = *opt.seed;
  if (opt.threads) config->threads = *opt.threads;
}

std::vector<double> gamma_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw std::invalid_argument("gamma_grid_step must lie in (0, 1]");
  }
  std::vector<double> grid;
  for (double g = 0.0; g < 1.0 - 1e-12; g += step) grid.push_back(g);
  grid.push_back(1.0);
  return grid;
}

json point_to_node(const ErrorEstimate& e) {
  json node;
  node["n"] = e.n;
  node["trials"] = e.trials;
  node["errors"] = e.errors;
  node["p_hat"] = e.p_hat;
  node["ci95_lo"] = e.ci95_lo;
  node["ci95_hi"] = e.ci95_hi;
  node["point_rate"] = e.point_rate;
  return node;
}

json report_or_null(const std::optional<ExponentReport>& report) {
  if (!report) return nullptr;
  return detail::exponent_report_to_node(*report);
}

// Per-block analytic error bound for the block protocols: polynomial factor
// times exp(-k D) with D the bound exponent. Baselines get nulls.
void add_block_bound(json* node, const ProtocolSpec& spec) {
  json& out = *node;
  if (spec.kind == ProtocolKind::BscBlock) {
    double p = 0.0, q = 0.0;
    is_bsc(spec.P.dmc, &p);
    is_bsc(spec.Q.dmc, &q);
    const double d = binary_kl(0.5, std::max(p, q));
    out["block_bound_exponent"] = d;
    out["block_bound_per_block"] =
        (spec.k + 1.0) * (spec.k + 1.0) * std::exp(-spec.k * d);
  } else if (spec.kind == ProtocolKind::DmcBlock) {
    const double d = -spec.mu_max;
    out["block_bound_exponent"] = d;
    out["block_bound_per_block"] =
        std::pow(spec.k + 1.0, 2.0 * spec.P.dmc.alphabet_size()) *
        std::exp(-spec.k * d);
  } else {
    out["block_bound_exponent"] = nullptr;
    out["block_bound_per_block"] = nullptr;
  }
}

int cmd_simulate(const CliOptions& opt) {
  const std::string fmt = pick_format(opt, "csv", true);
  ExperimentConfig config =
      experiment_config_from_json(read_file(opt.config_path));
  apply_overrides(&config, opt);
  if (config.n_grid.size() != 1) {
    throw std::invalid_argument(
        "simulate needs exactly one n_grid entry; use sweep for grids");
  }
  const ErrorEstimate point = run_point(config, config.n_grid[0]);
  if (fmt == "csv") {
    std::ostringstream ss;
    write_points_csv(ss, config, {point});
    write_output(ss.str(), opt.out_path);
  } else {
    json out;
    out["config"] = detail::experiment_config_to_node(config);
    out["point"] = point_to_node(point);
    write_output(out.dump(2) + "\n", opt.out_path);
  }
  return 0;
}

int cmd_sweep(const CliOptions& opt) {
  const std::string fmt = pick_format(opt, "csv", true);
  ExperimentConfig config =
      experiment_config_from_json(read_file(opt.config_path));
  apply_overrides(&config, opt);
  const std::vector<ErrorEstimate> points = run_sweep(config);
  if (fmt == "csv") {
    std::ostringstream ss;
    write_points_csv(ss, config, points);
    write_output(ss.str(), opt.out_path);
    return 0;
  }
  json out;
  out["config"] = detail::experiment_config_to_node(config);
  out["points"] = json::array();
  for (const ErrorEstimate& e : points) out["points"].push_back(point_to_node(e));
  try {
    const ExponentFit fit = fit_exponent(points, config.min_errors);
    json f;
    f["slope"] = fit.slope;
    f["slope_se"] = fit.slope_se;
    f["intercept"] = fit.intercept;
    f["points_used"] = fit.points_used;
    out["fit"] = f;
  } catch (const std::exception& e) {
    out["fit"] = nullptr;
    out["fit_error"] = e.what();
  }
  json analytic;
  analytic["two_hop_rate"] =
      two_hop_rate(config.protocol.P.dmc, config.protocol.Q.dmc).rate;
  analytic["trivial_converse_rate"] =
      trivial_converse(config.protocol.P.dmc, config.protocol.Q.dmc).rate;
  add_block_bound(&analytic, config.protocol);
  out["analytic"] = analytic;
  write_output(out.dump(2) + "\n", opt.out_path);
  return 0;
}

int cmd_exponent(const CliOptions& opt) {
  pick_format(opt, "json", false);
  const json cfg = detail::parse_document(read_file(opt.config_path));
  detail::check_fields(cfg, "exponent config", {"P", "Q"},
                       {"gamma_grid_step"});
  const ChannelSpec P = detail::channel_spec_from_node(cfg.at("P"), "P");
  const ChannelSpec Q = detail::channel_spec_from_node(cfg.at("Q"), "Q");
  double step = 0.05;
  if (cfg.contains("gamma_grid_step")) {
    step = detail::get_double(cfg, "exponent config", "gamma_grid_step");
  }

  json out;
  out["P"] = detail::channel_spec_to_node(P);
  out["Q"] = detail::channel_spec_to_node(Q);
  out["one_hop_P"] = detail::exponent_report_to_node(one_hop_rate(P.dmc));
  out["one_hop_Q"] = detail::exponent_report_to_node(one_hop_rate(Q.dmc));
  out["two_hop"] = detail::exponent_report_to_node(two_hop_rate(P.dmc, Q.dmc));
  out["two_hop_flipped"] =
      detail::exponent_report_to_node(two_hop_rate_flipped(P.dmc, Q.dmc));
  out["trivial_converse"] =
      detail::exponent_report_to_node(trivial_converse(P.dmc, Q.dmc));
  out["assumption1_P"] = assumption1_holds(P.dmc);
  out["assumption1_Q"] = assumption1_holds(Q.dmc);
  out["block_converse"] = report_or_null(block_converse(P.dmc, Q.dmc));

  const GammaSplit split = gamma_balanced(P.dmc, Q.dmc);
  json split_node;
  switch (split.kind) {
    case GammaSplit::Case::DominantP: split_node["case"] = "dominant_p"; break;
    case GammaSplit::Case::DominantQ: split_node["case"] = "dominant_q"; break;
    case GammaSplit::Case::Balanced: split_node["case"] = "balanced"; break;
  }
  split_node["gamma"] = split.gamma;
  out["gamma_balanced"] = split_node;

  json curve = json::array();
  double best_rate = std::numeric_limits<double>::infinity();
  double best_gamma = 0.0;
  bool have_two_round = true;
  json two_round = json::array();
  for (double g : gamma_grid(step)) {
    const ExponentReport r = e1_exponent(P.dmc, Q.dmc, g);
    json row;
    row["gamma"] = g;
    row["rate"] = r.rate;
    curve.push_back(row);
    if (r.rate < best_rate) {
      best_rate = r.rate;
      best_gamma = g;
    }
    if (have_two_round) {
      const std::optional<double> tr = two_round_exponent(P.dmc, Q.dmc, g);
      if (tr) {
        json trow;
        trow["gamma"] = g;
        trow["rate"] = *tr;
        two_round.push_back(trow);
      } else {
        have_two_round = false;
      }
    }
  }
  out["e1_curve"] = curve;
  out["e1_min"] = json{{"gamma", best_gamma}, {"rate", best_rate}};
  out["two_round_curve"] = have_two_round ? two_round : json(nullptr);

  write_output(out.dump(2) + "\n", opt.out_path);
  return 0;
}

int cmd_converse(const CliOptions& opt) {
  pick_format(opt, "json", false);
  const json cfg = detail::parse_document(read_file(opt.config_path));
  detail::check_fields(cfg, "converse config", {"P", "Q"},
                       {"gamma_grid_step"});
  const ChannelSpec P = detail::channel_spec_from_node(cfg.at("P"), "P");
  const ChannelSpec Q = detail::channel_spec_from_node(cfg.at("Q"), "Q");
  double step = 1e-3;
  if (cfg.contains("gamma_grid_step")) {
    step = detail::get_double(cfg, "converse config", "gamma_grid_step");
  }

  double best_rate = std::numeric_limits<double>::infinity();
  double best_gamma = 0.0;
  for (double g : gamma_grid(step)) {
    const double r = e1_exponent(P.dmc, Q.dmc, g).rate;
    if (r < best_rate) {
      best_rate = r;
      best_gamma = g;
    }
  }
  const ExponentReport two_hop = two_hop_rate(P.dmc, Q.dmc);
  const ExponentReport trivial = trivial_converse(P.dmc, Q.dmc);

  json out;
  out["P"] = detail::channel_spec_to_node(P);
  out["Q"] = detail::channel_spec_to_node(Q);
  out["e1_min"] = json{{"gamma", best_gamma}, {"rate", best_rate}};
  out["two_hop"] = detail::exponent_report_to_node(two_hop);
  out["trivial_converse"] = detail::exponent_report_to_node(trivial);
  out["block_converse"] = report_or_null(block_converse(P.dmc, Q.dmc));
  out["gap_to_two_hop"] = best_rate - two_hop.rate;
  out["gap_to_trivial"] = trivial.rate - best_rate;
  write_output(out.dump(2) + "\n", opt.out_path);
  return 0;
}

int cmd_verify(const CliOptions& opt) {
  pick_format(opt, "json", false);
  const json cfg = detail::parse_document(read_file(opt.config_path));
  detail::check_fields(cfg, "verify config", {"kind", "P", "Q", "k_values"},
                       {"s_bar"});
  const ProtocolKind kind =
      protocol_kind_from_string(detail::get_string(cfg, "verify config", "kind"));
  if (kind != ProtocolKind::BscBlock && kind != ProtocolKind::DmcBlock) {
    throw std::invalid_argument("verify needs a block protocol kind");
  }
  const ChannelSpec P = detail::channel_spec_from_node(cfg.at("P"), "P");
  const ChannelSpec Q = detail::channel_spec_from_node(cfg.at("Q"), "Q");
  std::optional<double> s_bar;
  if (cfg.contains("s_bar")) {
    s_bar = detail::get_double(cfg, "verify config", "s_bar");
  }
  const json& kv = cfg.at("k_values");
  if (!kv.is_array() || kv.empty()) {
    throw std::invalid_argument(
        "field \"k_values\" in verify config must be a non-empty array");
  }

  json results = json::array();
  bool all_pass = true;
  for (const auto& e : kv) {
    if (!e.is_number_integer() || e.get<long>() < 1) {
      throw std::invalid_argument(
          "field \"k_values\" in verify config must hold positive integers");
    }
    const int k = static_cast<int>(e.get<long>());
    const ProtocolSpec spec = make_protocol_spec(kind, k, P, Q, s_bar);
    const BlockVerification v = exact_block_verification(spec);
    json row;
    row["k"] = v.k;
    row["rho_bhatt"] = v.rho_bhatt;
    row["rho_tilted"] = v.rho_tilted;
    row["ml_error"] = v.ml_error;
    row["analytic_bound"] = v.analytic_bound;
    row["margin"] = v.margin;
    row["mu2_half"] = v.mu2_half;
    row["pass"] = v.pass;
    results.push_back(row);
    all_pass = all_pass && v.pass;
  }
  json out;
  out["results"] = results;
  out["all_pass"] = all_pass;
  write_output(out.dump(2) + "\n", opt.out_path);
  return all_pass ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CliOptions opt;
  CLI::App app{"relay teaching and learning: exponents and simulation"};
  app.require_subcommand(1);

  const char* names[] = {"exponent", "simulate", "sweep", "verify", "converse"};
  const char* blurbs[] = {
      "achievable and converse exponent reports for a channel pair",
      "Monte Carlo error estimate at a single stream length",
      "Monte Carlo error estimates across an n grid plus an exponent fit",
      "exhaustive single-block checks against the analytic bound",
      "minimum single-round converse over the time-split grid",
  };
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], blurbs[i]);
    sub->add_option("--config", opt.config_path, "JSON config file")
        ->required();
    sub->add_option("--out", opt.out_path, "output file (default stdout)");
    sub->add_option("--format", opt.format, "csv or json");
    sub->add_option("--seed", opt.seed, "override the config RNG seed");
    sub->add_option("--threads", opt.threads, "override worker thread count");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand("exponent")) return cmd_exponent(opt);
    if (app.got_subcommand("simulate")) return cmd_simulate(opt);
    if (app.got_subcommand("sweep")) return cmd_sweep(opt);
    if (app.got_subcommand("verify")) return cmd_verify(opt);
    return cmd_converse(opt);
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace relay
