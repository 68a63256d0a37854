// carnot: command-line front end. Prints or writes a JSON report and exits
// 0 iff every asserted check passed, 1 on a failed check, 2 on bad usage.

#include "carnot/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

extern "C" void openblas_set_num_threads(int);

int main(int argc, char** argv) {
  // Fixed thread count keeps BLAS reductions, and so the report, reproducible.
  openblas_set_num_threads(1);

  carnot::RunConfig cfg;
  CLI::App app{"Numerical checks on stratified groups, G-atlases and quasi-Riesz transforms"};
  app.require_subcommand(1);

  auto common = [&](CLI::App* s, bool positional) {
    s->add_option("--group", cfg.group, "group file (bundled name or path)");
    s->add_option("--grid", cfg.grid, "lattice points per axis")->check(CLI::PositiveNumber);
    s->add_option("--extent", cfg.extent, "half-width of the lattice box")->check(CLI::PositiveNumber);
    s->add_option("--eps", cfg.eps, "covering or approximation scale")->check(CLI::PositiveNumber);
    s->add_option("--seed", cfg.seed, "random seed");
    s->add_option("--tol", cfg.tol, "override the primary tolerance")->check(CLI::PositiveNumber);
    s->add_option("--out", cfg.out, "write the report here instead of stdout");
    s->add_option("--cap", cfg.cap, "largest lattice size")->check(CLI::PositiveNumber);
    if (positional) s->add_option("inputs", cfg.args, "input files");
  };

  const std::vector<std::pair<std::string, std::string>> help = {
      {"verify-group", "validate a group file and its group law"},
      {"fields", "derive left-invariant fields and check their identities"},
      {"check-diffeo", "G-diffeomorphism criteria for a map (--map) or the built-in corpus"},
      {"check-atlas", "transition and cocycle audit of an atlas file"},
      {"covering", "partition of unity and multiplicity of a dilated covering"},
      {"riesz", "sub-Laplacian comparison bounds and quasi-Riesz transforms"},
      {"heat", "heat semigroup comparisons"},
      {"approx", "local constant approximations and patched quasi-Riesz sums"},
      {"symbol", "principal symbols of a symbol file"},
      {"report", "several subcommands in one report"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* s = app.add_subcommand(name, text);
    common(s, name != "report");
    if (name == "check-diffeo") s->add_option("--map", cfg.map, "map specification, e.g. \"dilation 2\"");
    if (name == "report") {
      s->add_flag("--all", cfg.all, "run every section on the bundled fixtures");
      s->add_option("sections", cfg.args, "subcommands to include");
    }
    s->callback([&cfg, name = name] { cfg.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const carnot::RunResult r = carnot::run(cfg);
    const carnot::Json j = r.report.to_json();
    std::cerr << cfg.command << ": " << j["status"].get<std::string>() << " (" << j["summary"]["pass"] << " pass, "
              << j["summary"]["fail"] << " fail, " << j["summary"]["info"] << " info)\n";
    return r.exit_code;
  } catch (const carnot::Error& e) {
    std::cerr << "carnot: " << e.what() << "\n";
    return e.kind() == "BadConfig" ? 2 : 1;
  }
}
