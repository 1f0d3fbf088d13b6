// treemax: batch front end for the k-ary tree maximal-operator laboratory.
// One subcommand per checker or experiment; all numeric output is in
// log-base-k domain unless --linear is passed. Exit codes: 0 report-mode
// success, 1 assert-mode violation, 2 configuration error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "treemax/conditions.hpp"
#include "treemax/config.hpp"
#include "treemax/experiments.hpp"
#include "treemax/selftest.hpp"
#include "treemax/serialize.hpp"

namespace {

using namespace treemax;

struct CliState {
  RunConfig cfg;  // values bound to command-line options
  std::string config_path;
  bool selftest = false;
  bool linear_flag = false;
};

void add_common_options(CLI::App* cmd, CliState& state) {
  cmd->add_option("--k", state.cfg.k, "branching factor, at least 2");
  cmd->add_option("--p", state.cfg.p, "exponent p (decimal, parsed exactly)");
  cmd->add_option("--q", state.cfg.q, "secondary exponent q");
  cmd->add_option("--delta", state.cfg.delta, "level-wise condition exponent delta");
  cmd->add_option("--s", state.cfg.s, "maximal-bound exponent s");
  cmd->add_option("--beta", state.cfg.beta, "pair-condition exponent beta");
  cmd->add_option("--alpha", state.cfg.alpha, "pair-condition exponent alpha");
  cmd->add_option("--weight", state.cfg.weight,
                  "weight descriptor: power:a=<v> or table:[v0,v1,...]");
  cmd->add_option("--u", state.cfg.u, "two-weight descriptor for the measure side");
  cmd->add_option("--v", state.cfg.v, "two-weight descriptor for the E-factor side");
  cmd->add_option("--jmax", state.cfg.jmax, "level grid bound");
  cmd->add_option("--rmax", state.cfg.rmax, "radius grid bound");
  cmd->add_option("--depth", state.cfg.depth, "truncation depth for materialized scans");
  cmd->add_option("--horizon", state.cfg.horizon, "level horizon for tail scans");
  cmd->add_option("--budget", state.cfg.budget, "evaluation budget for searches");
  cmd->add_option("--seed", state.cfg.seed, "random seed for searches");
  cmd->add_option("--out", state.cfg.out, "output path (default: name from config hash)");
  cmd->add_option("--format", state.cfg.format, "output format: csv or json");
  cmd->add_option("--mode", state.cfg.mode, "report or assert:<linear constant>");
  cmd->add_flag("--linear", state.linear_flag, "print summary values in linear scale");
  cmd->add_flag("--selftest", state.selftest,
                "run this module's oracle-equivalence suite and exit");
  cmd->add_option("--config", state.config_path, "flat key=value configuration file");
}

// Precedence: explicit flags over config-file values over defaults.
RunConfig effective_config(const CLI::App* cmd, CliState& state) {
  RunConfig effective;
  if (!state.config_path.empty()) {
    std::ifstream is(state.config_path);
    if (!is) throw std::invalid_argument("cannot read config file: " + state.config_path);
    std::ostringstream text;
    text << is.rdbuf();
    effective = RunConfig::from_kv(text.str());
  }
  auto out_fields = effective.fields();
  auto flag_fields = state.cfg.fields();
  for (std::size_t i = 0; i < out_fields.size(); ++i) {
    std::string option_name = "--" + out_fields[i].first;
    if (out_fields[i].first == "we") option_name = "--wE";
    if (out_fields[i].first == "wf") option_name = "--wF";
    const CLI::Option* opt = cmd->get_option_no_throw(option_name);
    if (opt != nullptr && opt->count() > 0) *out_fields[i].second = *flag_fields[i].second;
  }
  return effective;
}

std::string display_value(const RunConfig& cfg, double logk_value) {
  if (cfg.linear == "true")
    return format_double(linear_from_logk(cfg.k_int(), logk_value));
  return format_double(logk_value);
}

std::string resolve_out(const RunConfig& cfg, const std::string& name,
                        const std::string& canonical) {
  if (!cfg.out.empty()) return cfg.out;
  const std::string ext = cfg.format == "json" ? "json" : "csv";
  return default_filename(name, cfg.k_int(), cfg.p, canonical, ext);
}

void write_table_file(const ResultTable& table, const RunConfig& cfg,
                      const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  if (cfg.format == "json")
    os << to_json(table).dump(2) << "\n";
  else
    write_csv(table, os);
}

void write_report_file(const ConditionReport& report, const RunConfig& cfg,
                       const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  if (cfg.format == "json") {
    os << report_to_json(report).dump(2) << "\n";
  } else {
    ResultTable table;
    table.experiment = report.condition;
    table.columns = {"condition", "empirical_sup_logk", "verdict"};
    table.add_row({report.condition, format_double(report.empirical_sup_logk),
                   report.verdict});
    write_csv(table, os);
  }
}

// Returns 1 (violation) or 0, honoring mode=assert:<linear constant>.
int finish_report(const ConditionReport& report, RunConfig& cfg, const std::string& name) {
  const std::string path = resolve_out(cfg, name, cfg.to_kv());
  write_report_file(report, cfg, path);
  std::cout << report.condition << " sup=" << display_value(cfg, report.empirical_sup_logk)
            << (cfg.linear == "true" ? " (linear)" : " (logk)")
            << " verdict=" << report.verdict << "\n";
  std::cout << "wrote " << path << "\n";
  if (cfg.mode.rfind("assert:", 0) == 0) {
    const double limit = cfg.num_field(cfg.mode.substr(7), "assert constant");
    const double sup_linear = linear_from_logk(cfg.k_int(), report.empirical_sup_logk);
    if (!(sup_linear <= limit)) {
      std::cout << "assert violated: sup " << format_double(sup_linear) << " > "
                << format_double(limit) << "\n";
      std::cout << "witness: " << witness_to_json(report.witness).dump() << "\n";
      return 1;
    }
  }
  return 0;
}

int finish_table(const ResultTable& table, RunConfig& cfg, const std::string& name) {
  if (cfg.mode != "report")
    throw std::invalid_argument("experiment subcommands run in report mode only");
  const std::string path = resolve_out(cfg, name, cfg.to_kv());
  write_table_file(table, cfg, path);
  for (const auto& [key, value] : table.summary)
    std::cout << key << "=" << format_double(value) << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

LevelWeight weight_from(const RunConfig& cfg) { return parse_level_weight(cfg.weight); }

// Two-weight checkers accept --u/--v; either both or neither.
std::pair<LevelWeight, LevelWeight> weight_pair_from(const RunConfig& cfg) {
  if (cfg.u.empty() != cfg.v.empty())
    throw std::invalid_argument("two-weight runs need both --u and --v");
  if (!cfg.u.empty()) return {parse_level_weight(cfg.u), parse_level_weight(cfg.v)};
  const LevelWeight w = weight_from(cfg);
  return {w, w};
}

int dispatch(const CLI::App* cmd, CliState& state) {
  const std::string name = cmd->get_name();
  RunConfig cfg = effective_config(cmd, state);
  cfg.linear = state.linear_flag ? "true" : "false";
  for (const std::string& problem : cfg.validate_enums())
    throw std::invalid_argument(problem);
  const TreeParams t(cfg.k_int());

  if (state.selftest) {
    if (name == "geometry-selftest") return selftest::geometry(std::cout);
    if (name.rfind("check-", 0) == 0 || name == "search-extremal" ||
        name == "rho-optimize")
      return selftest::conditions(std::cout) | selftest::weights(std::cout);
    if (name.rfind("exp-", 0) == 0) return selftest::experiments(std::cout);
    return selftest::all(std::cout);
  }

  if (name == "geometry-selftest") {
    const int rc = selftest::geometry(std::cout) | selftest::operators(std::cout);
    std::cout << (rc == 0 ? "geometry selftest passed\n" : "geometry selftest FAILED\n");
    return rc;
  }

  if (name == "check-suffcond") {
    ConditionParams cp;
    cp.p = cfg.num_field(cfg.p, "p");
    cp.beta = cfg.num_field(cfg.beta, "beta");
    cp.alpha = cfg.num_field(cfg.alpha, "alpha");
    cp.require_pair_condition(/*strict_admissible=*/true);
    const auto [u, v] = weight_pair_from(cfg);
    const ConditionReport report = suffcond_slice_report(
        t, u, v, cp, cfg.int_field(cfg.jmax, "jmax"), cfg.int_field(cfg.rmax, "rmax"));
    return finish_report(report, cfg, "check_suffcond");
  }

  if (name == "check-levelwise") {
    const auto [u, v] = weight_pair_from(cfg);
    const ConditionReport report = levelwise_condition_sup(
        t, u, v, cfg.num_field(cfg.p, "p"), cfg.num_field(cfg.delta, "delta"),
        cfg.int_field(cfg.jmax, "jmax"), cfg.int_field(cfg.rmax, "rmax"));
    return finish_report(report, cfg, "check_levelwise");
  }

  if (name == "check-ap") {
    const ConditionReport report = ap_constant(
        t, weight_from(cfg), cfg.p_rational(),
        cfg.geometry == "ball" ? Geometry::kBall : Geometry::kSphere,
        cfg.int_field(cfg.jmax, "jmax"), cfg.int_field(cfg.rmax, "rmax"));
    return finish_report(report, cfg, "check_ap");
  }

  if (name == "check-ms") {
    const ConditionReport report = ms_bound(t, weight_from(cfg), cfg.num_field(cfg.s, "s"),
                                            cfg.int_field(cfg.jmax, "jmax"));
    return finish_report(report, cfg, "check_ms");
  }

  if (name == "check-sawyer") {
    const ConditionReport report = sawyer_testing_constant(
        t, weight_from(cfg), cfg.p_rational(), cfg.int_field(cfg.jmax, "jmax"),
        cfg.int_field(cfg.rmax, "rmax"), cfg.int_field(cfg.depth, "depth"));
    return finish_report(report, cfg, "check_sawyer");
  }

  if (name == "search-extremal") {
    ConditionParams cp;
    cp.p = cfg.num_field(cfg.p, "p");
    cp.beta = cfg.num_field(cfg.beta, "beta");
    cp.alpha = cfg.num_field(cfg.alpha, "alpha");
    cp.require_pair_condition(/*strict_admissible=*/true);
    const auto [u, v] = weight_pair_from(cfg);
    SearchBudget budget;
    budget.max_evaluations = cfg.int_field(cfg.budget, "budget");
    budget.depth_limit = static_cast<int>(cfg.int_field(cfg.depth, "depth"));
    const ConditionReport report =
        extremal_search(t, Weight(u), Weight(v), cp, budget,
                        static_cast<std::uint64_t>(cfg.int_field(cfg.seed, "seed")));
    return finish_report(report, cfg, "search_extremal");
  }

  if (name == "rho-optimize") {
    const double p = cfg.num_field(cfg.p, "p");
    const double delta = cfg.num_field(cfg.delta.empty() ? "0" : cfg.delta, "delta");
    const RhoOptimum opt =
        rho_optimize(t, p, delta, cfg.int_field(cfg.r, "r"), cfg.num_field(cfg.we, "wE"),
                     cfg.num_field(cfg.wf, "wF"));
    ResultTable table;
    table.experiment = "rho_optimize";
    table.columns = {"rho_star", "value_logk", "c_pd", "bound_logk"};
    table.add_row({format_double(opt.rho_star), format_double(opt.value_logk),
                   format_double(opt.c_pd), format_double(opt.bound_logk)});
    table.meta["k"] = t.k;
    table.meta["p"] = p;
    table.meta["delta"] = delta;
    const std::string path = resolve_out(cfg, "rho_optimize", cfg.to_kv());
    write_table_file(table, cfg, path);
    std::cout << "rho_star=" << format_double(opt.rho_star) << "\n";
    std::cout << "value=" << display_value(cfg, opt.value_logk) << "\n";
    std::cout << "c=" << format_double(opt.c_pd) << "\n";
    std::cout << "wrote " << path << "\n";
    return 0;
  }

  if (name == "exp-thmneg1") {
    const double s =
        cfg.s.empty() ? std::numeric_limits<double>::quiet_NaN() : cfg.num_field(cfg.s, "s");
    const ResultTable table =
        run_thmneg1(t, Rational::parse(cfg.delta), cfg.int_field(cfg.jmax, "jmax"), s);
    return finish_table(table, cfg, "thmneg1");
  }

  if (name == "exp-neg2") {
    const ResultTable table = run_neg2(t, cfg.p_rational(), cfg.int_field(cfg.j, "j"),
                                       cfg.windows_list(),
                                       cfg.int_field(cfg.horizon, "horizon"));
    return finish_table(table, cfg, "neg2");
  }

  if (name == "exp-kalpha") {
    const ResultTable table = run_kalpha(t, cfg.p_rational(), cfg.int_field(cfg.jmax, "jmax"),
                                         cfg.int_field(cfg.rmax, "rmax"));
    return finish_table(table, cfg, "kalpha");
  }

  if (name == "exp-a1ap") {
    const std::string weight = cfg.weight == "power:a=0" ? "power:a=-0.75" : cfg.weight;
    const double s = cfg.s.empty() ? 1.2 : cfg.num_field(cfg.s, "s");
    const ResultTable table = run_a1ap(t, parse_level_weight(weight), s, cfg.p_rational(),
                                       cfg.int_field(cfg.jmax, "jmax"),
                                       cfg.int_field(cfg.rmax, "rmax"));
    return finish_table(table, cfg, "a1ap");
  }

  if (name == "exp-sawyer") {
    const ResultTable table = run_sawyer_vs_strong(
        t, cfg.p_rational(), cfg.int_field(cfg.depth, "depth"),
        cfg.int_field(cfg.jmax, "jmax"), cfg.int_field(cfg.rmax, "rmax"));
    return finish_table(table, cfg, "sawyer");
  }

  throw std::invalid_argument("unknown subcommand: " + name);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaging and maximal operators on the rooted k-ary tree: weight-condition "
               "checkers and counterexample experiments"};
  app.require_subcommand(1);

  CliState state;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"geometry-selftest", "closed-form sphere/ball counts against brute-force enumeration"},
      {"check-suffcond", "pair-measure condition ratio over full level-slice pairs"},
      {"check-levelwise", "level-wise sphere-slice condition supremum"},
      {"check-ap", "A_p product over spheres or balls"},
      {"check-ms", "M_s w against w via certified level scans"},
      {"check-sawyer", "testing constant over a family of balls"},
      {"search-extremal", "extremal-set search for the pair-condition constant"},
      {"rho-optimize", "closed-form minimizer of the level-pairing objective"},
      {"exp-thmneg1", "diagonal sphere-A_p growth with the M_s bound holding"},
      {"exp-neg2", "weak-type functional stable while strong-type sums diverge"},
      {"exp-kalpha", "level-wise condition for the k^{j(p-1)} weight, strong tables above p"},
      {"exp-a1ap", "M_s-bounded weight: condition samples, series, dual estimates"},
      {"exp-sawyer", "testing constant bounded beside the strong-type divergence"},
  };
  for (const auto& [name, description] : commands)
    add_common_options(app.add_subcommand(name, description), state);

  // Per-subcommand extras.
  CLI::App* neg2 = app.get_subcommand("exp-neg2");
  neg2->add_option("--j", state.cfg.j, "support level of the indicator test function");
  neg2->add_option("--windows", state.cfg.windows, "comma-separated window lengths");
  CLI::App* rho = app.get_subcommand("rho-optimize");
  rho->add_option("--r", state.cfg.r, "radius parameter");
  rho->add_option("--wE", state.cfg.we, "E-side mass (linear)");
  rho->add_option("--wF", state.cfg.wf, "F-side mass (linear)");
  CLI::App* ap = app.get_subcommand("check-ap");
  ap->add_option("--geometry", state.cfg.geometry, "sphere or ball");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    return dispatch(app.get_subcommands().front(), state);
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
