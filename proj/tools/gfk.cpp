#include <iostream>

#include "CLI11.hpp"

#include "gfk/scenario.hpp"

namespace sc = gfk::scenario;

namespace {

// "eps0,ratio,length"
gfk::EpsilonLadder parse_ladder(const std::string& s) {
  std::vector<std::string> f;
  std::stringstream in(s);
  for (std::string t; std::getline(in, t, ',');) f.push_back(t);
  if (f.size() != 3) throw sc::ConfigError("", "--ladder expects eps0,ratio,length");
  try {
    return gfk::EpsilonLadder(std::stod(f[0]), std::stod(f[1]), std::stoi(f[2]));
  } catch (const gfk::DomainError& e) {
    throw sc::ConfigError("", std::string("--ladder: ") + e.what());
  } catch (const std::logic_error&) {
    throw sc::ConfigError("", "--ladder expects eps0,ratio,length");
  }
}

int run(const std::string& config, const sc::Options& opt, bool quiet) {
  auto path = sc::resolve_config(config);
  auto cfg = sc::validate_config(sc::read_file(path), sc::schema_text());
  auto res = sc::run_scenario(cfg, opt);
  sc::write_outputs(res, opt.out_dir);
  if (!quiet)
    for (const auto& c : res.claims)
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << "  [" << c.type << ", " << gfk::format_double(c.seconds)
                << " s]\n";
  std::size_t passed = 0;
  for (const auto& c : res.claims) passed += c.pass;
  std::cout << res.name << ": " << passed << "/" << res.claims.size() << " claims pass; report in "
            << (opt.out_dir / (res.name + ".report.json")).string() << "\n";
  return res.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gfk: numerical checks for generalized functions on the interval, circle and torus"};
  app.require_subcommand(0, 1);
  bool list_flag = false;
  app.add_flag("--list", list_flag, "list built-in scenarios");

  auto* run_cmd = app.add_subcommand("run", "run a scenario config (a path or a built-in name)");
  std::string config, ladder, out = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool quiet = false;
  run_cmd->add_option("config", config, "scenario JSON file or built-in name")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the scenario seed");
  auto* ladder_opt = run_cmd->add_option("--ladder", ladder, "default eps ladder as eps0,ratio,length");
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_option("--jobs", jobs, "claims evaluated in parallel")->check(CLI::PositiveNumber);
  run_cmd->add_flag("-q,--quiet", quiet, "only print the summary line");

  auto* list_cmd = app.add_subcommand("list", "list built-in scenarios");
  auto* schema_cmd = app.add_subcommand("schema", "print the config JSON schema");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list_cmd || list_flag) {
      for (const auto& b : sc::builtin_scenarios()) std::cout << b.name << "\t" << b.description << "\n";
      return 0;
    }
    if (*schema_cmd) {
      std::cout << sc::schema_text();
      return 0;
    }
    if (!*run_cmd) {
      std::cerr << app.help();
      return 2;
    }
    sc::Options opt;
    if (*seed_opt) opt.seed = seed;
    if (*ladder_opt) opt.ladder = parse_ladder(ladder);
    opt.out_dir = out;
    opt.jobs = jobs;
    return run(config, opt, quiet);
  } catch (const sc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const gfk::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const gfk::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
