// Command-line front end: check | norm | example | fuzz.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fell/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fell bundles over finite groupoids: axiom checks, norms, examples, fuzzing"};
  app.require_subcommand(1);

  fell::CommandOptions opt;
  std::string section;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--tol", opt.tol, "numerical tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--samples", opt.samples, "random samples per sampled check")->capture_default_str();
    cmd->add_option("--seed", opt.seed, "random seed")->capture_default_str();
  };

  std::string path;
  auto* check = app.add_subcommand("check", "validate the groupoid, the bundle axioms and saturation");
  add_common(check);
  check->add_option("file", path, "bundle document ('-' for stdin)")->required();

  auto* norm = app.add_subcommand("norm", "sup, I and full norms of stored sections");
  add_common(norm);
  norm->add_option("file", path, "bundle document ('-' for stdin)")->required();
  norm->add_option("--section", section, "section name (default: all sections)");

  std::string example_name;
  std::vector<std::string> example_args;
  auto* example = app.add_subcommand("example", "emit a named example bundle");
  example->add_option("name", example_name, "trivial | pair | unitbundle | linking | partial")->required();
  example->add_option("params", example_args, "words and key=value parameters");

  std::size_t count = 50;
  fell::FuzzLimits limits;
  std::string repro_dir = "fuzz-failures";
  auto* fuzz = app.add_subcommand("fuzz", "run the invariant suite on seeded random bundles");
  add_common(fuzz);
  fuzz->add_option("--count", count, "number of cases")->capture_default_str();
  fuzz->add_option("--max-elements", limits.max_elements, "groupoid size bound")->capture_default_str();
  fuzz->add_option("--max-fiber-dim", limits.max_fiber_dim, "fiber size bound")->capture_default_str();
  fuzz->add_option("--repro-dir", repro_dir, "where failing cases are written")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : fell::exit_input;
  }
  if (norm->parsed() && !section.empty()) opt.section = section;

  try {
    if (check->parsed()) return fell::cmd_check(path, opt, std::cout, std::cerr);
    if (norm->parsed()) return fell::cmd_norm(path, opt, std::cout, std::cerr);
    if (example->parsed()) return fell::cmd_example(example_name, example_args, std::cout, std::cerr);
    if (fuzz->parsed()) return fell::cmd_fuzz(opt, count, limits, repro_dir, std::cout, std::cerr);
  } catch (const fell::InvalidArgument& e) {
    std::cerr << "error=input " << e.what() << "\n";
    return fell::exit_input;
  } catch (const std::exception& e) {
    std::cerr << "error=internal " << e.what() << "\n";
    return fell::exit_violation;
  }
  return fell::exit_input;
}
