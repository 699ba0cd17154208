// Command-line front end: transform / solve / verify / scan / chain / catalog.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
// 3 numerical failure (quadrature budget, no path, route disagreement).
// Data goes to stdout (JSON or CSV); diagnostics go to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moutard/catalog.hpp"
#include "moutard/errors.hpp"
#include "moutard/eval.hpp"
#include "moutard/fields.hpp"
#include "moutard/json_io.hpp"
#include "moutard/moutard.hpp"
#include "moutard/parallel.hpp"
#include "moutard/parse.hpp"
#include "moutard/schrodinger.hpp"

namespace {

using namespace moutard;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

ParameterSet parse_params(const std::vector<std::string>& items) {
  ParameterSet params;
  for (const std::string& item : items) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("--param expects name=value, got '" + item +
                                  "'");
    std::string name = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("--param " + name + ": bad number '" +
                                  value + "'");
    }
    if (used != value.size())
      throw std::invalid_argument("--param " + name + ": bad number '" +
                                  value + "'");
    params[name] = v;
  }
  return params;
}

std::pair<double, double> parse_point(const std::string& text,
                                      const char* flag) {
  std::size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument(std::string(flag) + " expects r,z, got '" +
                                text + "'");
  try {
    std::size_t used = 0;
    double r = std::stod(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument("");
    std::string rest = text.substr(comma + 1);
    double z = std::stod(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("");
    return {r, z};
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(flag) + " expects r,z, got '" +
                                text + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot read file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  // Trim surrounding whitespace so a trailing newline is harmless.
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  std::size_t last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

void print_csv_header() { std::printf("r,z,value\n"); }

void print_csv_row(double r, double z, double v) {
  std::printf("%.17g,%.17g,%.17g\n", r, z, v);
}

// ---------------------------------------------------------------- transform

struct TransformArgs {
  std::string potential;
  std::string seed;
  std::string seed_file;
  std::vector<std::string> params;
  std::string grid_text;
  double residual_tol = 1e-7;
  std::string out = "json";
};

int run_transform(const TransformArgs& args) {
  std::string seed_text = args.seed;
  if (!args.seed_file.empty()) {
    if (!seed_text.empty())
      throw std::invalid_argument("give either --seed or --seed-file");
    seed_text = read_text_file(args.seed_file);
  }
  if (seed_text.empty())
    throw std::invalid_argument("missing --seed (or --seed-file)");

  ParameterSet params = parse_params(args.params);
  GridSpec grid =
      args.grid_text.empty() ? standard_grid() : GridSpec::parse(args.grid_text);
  Potential u{parse(args.potential), {}, 1e-8};
  SeedSolution y_h{parse(seed_text), {}, 1e-8};

  TransformStep step = make_step(u, y_h, params, grid, args.residual_tol);
  std::fprintf(stderr,
               "seed verified: max_rel_residual=%.3e over %ld points\n",
               step.verified.max_rel_residual, step.verified.n_evaluated);
  if (args.out == "text") {
    std::printf("%s\n", to_text(step.u_tilde.expr).c_str());
  } else {
    json j = step;
    std::printf("%s\n", j.dump(2).c_str());
  }
  return kExitOk;
}

// -------------------------------------------------------------------- solve

struct SolveArgs {
  std::string potential;
  std::string seed;
  std::string seed_file;
  std::string solution;
  std::vector<std::string> params;
  std::string base_text = "1,0";
  std::vector<std::string> at_texts;
  std::string grid_text;
  std::string verify_grid_text;
  double residual_tol = 1e-7;
  double quad_tol = 1e-9;
  double constant = 0.0;
};

int run_solve(const SolveArgs& args) {
  std::string seed_text = args.seed;
  if (!args.seed_file.empty()) {
    if (!seed_text.empty())
      throw std::invalid_argument("give either --seed or --seed-file");
    seed_text = read_text_file(args.seed_file);
  }
  if (seed_text.empty())
    throw std::invalid_argument("missing --seed (or --seed-file)");
  if (args.at_texts.empty() && args.grid_text.empty())
    throw std::invalid_argument("need --at r,z or --grid spec");

  ParameterSet params = parse_params(args.params);
  GridSpec verify_grid = args.verify_grid_text.empty()
                             ? standard_grid()
                             : GridSpec::parse(args.verify_grid_text);
  auto [base_r, base_z] = parse_point(args.base_text, "--base");

  Potential u{parse(args.potential), {}, 1e-8};
  SeedSolution y_h{parse(seed_text), {}, 1e-8};
  SeedSolution y{parse(args.solution), {}, 1e-8};

  // Both inputs must actually solve the potential before we transport.
  ResidualReport seed_report = residual_report(u, y_h, verify_grid, params);
  if (!(seed_report.max_rel_residual <= args.residual_tol))
    throw VerificationError(
        "seed is not a solution of the given potential: max relative "
        "residual " +
        std::to_string(seed_report.max_rel_residual));
  ResidualReport sol_report = residual_report(u, y, verify_grid, params);
  if (!(sol_report.max_rel_residual <= args.residual_tol))
    throw VerificationError(
        "--solution is not a solution of the given potential: max relative "
        "residual " +
        std::to_string(sol_report.max_rel_residual));
  std::fprintf(stderr,
               "verified: seed max_rel=%.3e, solution max_rel=%.3e\n",
               seed_report.max_rel_residual, sol_report.max_rel_residual);

  auto y_field = std::make_shared<ClosedFormField>(y.expr, params);
  auto yh_field = std::make_shared<ClosedFormField>(y_h.expr, params);
  TransportOptions transport;
  transport.quad_tol = args.quad_tol;
  TransformedSolutionField field(y_field, yh_field, base_r, base_z,
                                 args.constant, transport);

  std::vector<std::pair<double, double>> targets;
  for (const std::string& text : args.at_texts)
    targets.push_back(parse_point(text, "--at"));
  if (!args.grid_text.empty()) {
    GridSpec out_grid = GridSpec::parse(args.grid_text);
    for (int i = 0; i < out_grid.n_r; ++i)
      for (int j = 0; j < out_grid.n_z; ++j)
        targets.emplace_back(out_grid.r_at(i), out_grid.z_at(j));
  }

  struct Sample {
    double value = 0.0;
    bool numerical_error = false;
    bool eval_error = false;
    std::string message;
  };
  std::vector<Sample> samples =
      parallel_map<Sample>(targets.size(), [&](std::size_t idx) {
        Sample s;
        try {
          s.value = field.value(targets[idx].first, targets[idx].second);
        } catch (const NumericalError& err) {
          s.numerical_error = true;
          s.message = err.what();
        } catch (const EvalError& err) {
          s.eval_error = true;
          s.message = err.what();
        }
        return s;
      });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].numerical_error)
      throw NumericalError("target (" + std::to_string(targets[i].first) +
                           ", " + std::to_string(targets[i].second) +
                           "): " + samples[i].message);
    if (samples[i].eval_error)
      throw NumericalError("target (" + std::to_string(targets[i].first) +
                           ", " + std::to_string(targets[i].second) +
                           "): " + samples[i].message);
  }

  print_csv_header();
  for (std::size_t i = 0; i < samples.size(); ++i)
    print_csv_row(targets[i].first, targets[i].second, samples[i].value);
  return kExitOk;
}

// ------------------------------------------------------------------- verify

struct VerifyArgs {
  std::string potential;
  std::string solution;
  std::vector<std::string> params;
  std::string grid_text;
  double residual_tol = 1e-7;
};

int run_verify(const VerifyArgs& args) {
  ParameterSet params = parse_params(args.params);
  GridSpec grid =
      args.grid_text.empty() ? standard_grid() : GridSpec::parse(args.grid_text);
  Potential u{parse(args.potential), {}, 1e-8};
  SeedSolution y{parse(args.solution), {}, 1e-8};
  ResidualReport report = residual_report(u, y, grid, params);
  json j = report;
  j["tolerance"] = args.residual_tol;
  j["passed"] = report.max_rel_residual <= args.residual_tol;
  std::printf("%s\n", j.dump(2).c_str());
  return report.max_rel_residual <= args.residual_tol ? kExitOk
                                                      : kExitVerification;
}

// --------------------------------------------------------------------- scan

struct ScanArgs {
  std::string expr_text;
  std::vector<std::string> params;
  std::string grid_text;
};

int run_scan(const ScanArgs& args) {
  ParameterSet params = parse_params(args.params);
  GridSpec grid = GridSpec::parse(args.grid_text);
  ScanReport report = scan_expression(parse(args.expr_text), grid, params);
  json j = report;
  std::printf("%s\n", j.dump(2).c_str());
  return kExitOk;
}

// -------------------------------------------------------------------- chain

struct ChainArgs {
  std::string config_path;
};

double number_field(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw std::invalid_argument(std::string("chain config: '") + key +
                                "' must be a number");
  return j.at(key).get<double>();
}

int run_chain(const ChainArgs& args) {
  std::ifstream in(args.config_path);
  if (!in)
    throw std::invalid_argument("cannot read config '" + args.config_path +
                                "'");
  json config = json::parse(in);

  static const char* known_keys[] = {"u0",     "steps",     "seeds",
                                     "params", "grid",      "basepoint",
                                     "tolerances", "carried_grid"};
  for (auto it = config.begin(); it != config.end(); ++it) {
    bool known = false;
    for (const char* key : known_keys)
      if (it.key() == key) known = true;
    if (!known)
      throw std::invalid_argument("chain config: unknown key '" + it.key() +
                                  "'");
  }
  if (!config.contains("u0") || !config.at("u0").is_string())
    throw std::invalid_argument("chain config: 'u0' (string) is required");
  if (!config.contains("steps") || !config.at("steps").is_array() ||
      config.at("steps").empty())
    throw std::invalid_argument(
        "chain config: 'steps' must be a non-empty array");

  ParameterSet params;
  if (config.contains("params")) {
    for (auto it = config.at("params").begin(); it != config.at("params").end();
         ++it) {
      if (!it.value().is_number())
        throw std::invalid_argument("chain config: params." + it.key() +
                                    " must be a number");
      params[it.key()] = it.value().get<double>();
    }
  }

  std::map<std::string, std::string> named_seeds;
  if (config.contains("seeds")) {
    for (auto it = config.at("seeds").begin(); it != config.at("seeds").end();
         ++it) {
      if (!it.value().is_string())
        throw std::invalid_argument("chain config: seeds." + it.key() +
                                    " must be an expression string");
      named_seeds[it.key()] = it.value().get<std::string>();
    }
  }

  std::vector<SeedSolution> stage_seeds;
  std::vector<CarriedSpec> carried;
  for (const json& step : config.at("steps")) {
    if (!step.is_object() || step.size() != 1)
      throw std::invalid_argument(
          "chain config: each step must be {\"y_h\": expr} or "
          "{\"carry\": name}");
    if (step.contains("y_h")) {
      if (!step.at("y_h").is_string())
        throw std::invalid_argument("chain config: step y_h must be a string");
      stage_seeds.push_back(
          SeedSolution{parse(step.at("y_h").get<std::string>()), {}, 1e-8});
    } else if (step.contains("carry")) {
      if (!step.at("carry").is_string())
        throw std::invalid_argument(
            "chain config: step carry must be a seed name");
      std::string name = step.at("carry").get<std::string>();
      auto found = named_seeds.find(name);
      if (found == named_seeds.end())
        throw std::invalid_argument("chain config: carry '" + name +
                                    "' is not in seeds");
      carried.push_back(CarriedSpec{name, parse(found->second)});
    } else {
      throw std::invalid_argument(
          "chain config: each step must be {\"y_h\": expr} or "
          "{\"carry\": name}");
    }
  }
  if (stage_seeds.empty())
    throw std::invalid_argument(
        "chain config: need at least one {\"y_h\": expr} step");

  ChainOptions options;
  if (config.contains("grid"))
    options.grid = GridSpec::parse(config.at("grid").get<std::string>());
  if (config.contains("carried_grid"))
    options.carried_grid =
        GridSpec::parse(config.at("carried_grid").get<std::string>());
  if (config.contains("basepoint")) {
    const json& base = config.at("basepoint");
    if (!base.is_array() || base.size() != 2)
      throw std::invalid_argument(
          "chain config: 'basepoint' must be [r, z]");
    options.base_r = base.at(0).get<double>();
    options.base_z = base.at(1).get<double>();
  }
  if (config.contains("tolerances")) {
    const json& tols = config.at("tolerances");
    options.residual_tol = number_field(tols, "residual", options.residual_tol);
    options.transport.quad_tol =
        number_field(tols, "quadrature", options.transport.quad_tol);
    options.equality_tol = number_field(tols, "equality", options.equality_tol);
    options.carried_residual_tol = number_field(
        tols, "carried_residual", options.carried_residual_tol);
  }

  Potential u0{parse(config.at("u0").get<std::string>()), {}, 1e-8};
  ChainResult result = chain(u0, stage_seeds, carried, params, options);

  json out;
  out["u0"] = to_text(u0.expr);
  out["steps"] = result.steps;
  json carried_out = json::array();
  for (const CarriedState& state : result.carried) {
    json c;
    c["name"] = state.name;
    c["stage_reports"] = state.stage_reports;
    c["final_value_at_base"] =
        state.field->value(options.base_r, options.base_z);
    carried_out.push_back(c);
  }
  out["carried"] = carried_out;
  std::printf("%s\n", out.dump(2).c_str());
  return kExitOk;
}

// ------------------------------------------------------------------ catalog

int run_catalog_list() {
  json j = json::array();
  for (const std::string& name : list_entries()) j.push_back(get_entry(name));
  std::printf("%s\n", j.dump(2).c_str());
  return kExitOk;
}

int run_catalog_show(const std::string& name) {
  json j = get_entry(name);
  std::printf("%s\n", j.dump(2).c_str());
  return kExitOk;
}

int run_catalog_verify(const std::vector<std::string>& names, bool all) {
  std::vector<std::string> targets = names;
  if (all) targets = list_entries();
  if (targets.empty())
    throw std::invalid_argument("catalog verify: give entry names or --all");
  json reports = json::array();
  bool passed = true;
  for (const std::string& name : targets) {
    EntryReport report = verify_entry(name);
    if (!report.passed) passed = false;
    std::fprintf(stderr, "%-14s %s\n", name.c_str(),
                 report.passed ? "pass" : "FAIL");
    reports.push_back(report);
  }
  std::printf("%s\n", reports.dump(2).c_str());
  return passed ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Axially symmetric Schrodinger transformation tool: builds new "
      "exactly solvable potentials from seed solutions and transports "
      "further solutions to the transformed equation"};
  app.require_subcommand(1);

  TransformArgs transform_args;
  CLI::App* transform =
      app.add_subcommand("transform",
                         "Transform a potential with a seed solution and "
                         "print the new potential");
  transform->add_option("--potential", transform_args.potential,
                        "potential u as an expression in r, z")
      ->required();
  transform->add_option("--seed", transform_args.seed,
                        "seed solution y_h as an expression");
  transform->add_option("--seed-file", transform_args.seed_file,
                        "file containing the seed expression");
  transform->add_option("--param", transform_args.params,
                        "parameter value name=v (repeatable)");
  transform->add_option("--grid", transform_args.grid_text,
                        "verification grid rmin:rmax:nr,zmin:zmax:nz");
  transform->add_option("--tol", transform_args.residual_tol,
                        "seed residual tolerance (default 1e-7)");
  transform->add_option("--out", transform_args.out, "json|text")
      ->check(CLI::IsMember({"json", "text"}));

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve",
      "Transport a known solution to the transformed equation and print "
      "its values");
  solve->add_option("--potential", solve_args.potential,
                    "potential u as an expression in r, z")
      ->required();
  solve->add_option("--seed", solve_args.seed, "seed solution y_h");
  solve->add_option("--seed-file", solve_args.seed_file,
                    "file containing the seed expression");
  solve->add_option("--solution", solve_args.solution,
                    "solution Y of the input potential to transport")
      ->required();
  solve->add_option("--param", solve_args.params,
                    "parameter value name=v (repeatable)");
  solve->add_option("--base", solve_args.base_text,
                    "integration basepoint r,z (default 1,0)");
  solve->add_option("--at", solve_args.at_texts,
                    "target point r,z (repeatable)");
  solve->add_option("--grid", solve_args.grid_text,
                    "output grid rmin:rmax:nr,zmin:zmax:nz");
  solve->add_option("--verify-grid", solve_args.verify_grid_text,
                    "residual verification grid (default standard)");
  solve->add_option("--tol", solve_args.residual_tol,
                    "residual tolerance (default 1e-7)");
  solve->add_option("--quad-tol", solve_args.quad_tol,
                    "quadrature tolerance (default 1e-9)");
  solve->add_option("--constant", solve_args.constant,
                    "additive constant c in (P + c)/(r y_h) (default 0)");

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand(
      "verify", "Check that an expression solves a potential's equation");
  verify->add_option("--potential", verify_args.potential,
                     "potential u as an expression in r, z")
      ->required();
  verify->add_option("--solution", verify_args.solution,
                     "candidate solution expression")
      ->required();
  verify->add_option("--param", verify_args.params,
                     "parameter value name=v (repeatable)");
  verify->add_option("--grid", verify_args.grid_text,
                     "verification grid rmin:rmax:nr,zmin:zmax:nz");
  verify->add_option("--tol", verify_args.residual_tol,
                     "residual tolerance (default 1e-7)");

  ScanArgs scan_args;
  CLI::App* scan = app.add_subcommand(
      "scan", "Report min/max/sign structure of an expression over a grid");
  scan->add_option("--expr", scan_args.expr_text, "expression in r, z")
      ->required();
  scan->add_option("--param", scan_args.params,
                   "parameter value name=v (repeatable)");
  scan->add_option("--grid", scan_args.grid_text,
                   "grid rmin:rmax:nr,zmin:zmax:nz")
      ->required();

  ChainArgs chain_args;
  CLI::App* chain_cmd = app.add_subcommand(
      "chain", "Run a multi-stage pipeline described by a JSON config");
  chain_cmd
      ->add_option("--config", chain_args.config_path, "path to config JSON")
      ->required();

  CLI::App* catalog =
      app.add_subcommand("catalog", "Built-in verified example entries");
  catalog->require_subcommand(1);
  CLI::App* catalog_list =
      catalog->add_subcommand("list", "Print all entries as JSON");
  CLI::App* catalog_show =
      catalog->add_subcommand("show", "Print one entry as JSON");
  std::string show_name;
  catalog_show->add_option("name", show_name, "entry name")->required();
  CLI::App* catalog_verify = catalog->add_subcommand(
      "verify", "Re-run an entry's checks and print the report");
  std::vector<std::string> verify_names;
  bool verify_all = false;
  catalog_verify->add_option("names", verify_names, "entry names");
  catalog_verify->add_flag("--all", verify_all, "verify every entry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (transform->parsed()) return run_transform(transform_args);
    if (solve->parsed()) return run_solve(solve_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (scan->parsed()) return run_scan(scan_args);
    if (chain_cmd->parsed()) return run_chain(chain_args);
    if (catalog->parsed()) {
      if (catalog_list->parsed()) return run_catalog_list();
      if (catalog_show->parsed()) return run_catalog_show(show_name);
      if (catalog_verify->parsed())
        return run_catalog_verify(verify_names, verify_all);
    }
    std::fprintf(stderr, "no command given\n");
    return kExitUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const VerificationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerification;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const EvalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind == EvalError::Kind::UnboundParameter ? kExitUsage
                                                       : kExitNumerical;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitNumerical;
  }
}
