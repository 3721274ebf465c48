#include <CLI11.hpp>

#include <iostream>

#include "fractspec/run.hpp"

int main(int argc, char** argv) {
  using fractspec::CliOverrides;

  CLI::App app{"Dimensions and multifractal spectra of self-similar sets"};
  std::string subcommand;
  std::string config_path;
  CliOverrides o;
  std::string out_dir, schedule, lambda_range, omega_range, q_range;
  int depth = 0, grid = 0;
  double target_c = 0.0, epsilon = 0.0;

  app.add_option("command", subcommand, "dims | spectrum | renyi | curve | expand | census | estimate | hessian")
      ->required()
      ->check(CLI::IsMember(fractspec::subcommands()));
  app.add_option("--config", config_path, "JSON job description")->required();
  auto* out_opt = app.add_option("--out", out_dir, "directory for output files");
  auto* depth_opt = app.add_option("--depth", depth, "iteration depth k");
  auto* sched_opt = app.add_option("--schedule", schedule, "expansor indices, 1-based: \"i,j,...\"");
  auto* target_opt = app.add_option("--target-c", target_c, "target contractor for a two-expansor schedule");
  sched_opt->excludes(target_opt);
  auto* eps_opt = app.add_option("--epsilon", epsilon, "sausage radius");
  auto* grid_opt = app.add_option("--grid", grid, "number of grid points");
  auto* lr_opt = app.add_option("--lambda-range", lambda_range, "multiplier range LO:HI");
  auto* or_opt = app.add_option("--omega-range", omega_range, "equal-weight Omega range LO:HI");
  lr_opt->excludes(or_opt);
  auto* q_opt = app.add_option("--q-range", q_range, "Renyi grid LO:HI:STEP");
  app.add_flag("--svg", o.svg, "also write an SVG");
  app.add_flag("--shrink", o.shrink, "also write the shrunk spectrum");
  app.add_flag("--invert", o.invert, "also write the inverted spectrum");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fractspec::kExitValidation;
  }

  if (*out_opt) o.out_dir = out_dir;
  if (*depth_opt) o.depth = depth;
  if (*sched_opt) o.schedule = schedule;
  if (*target_opt) o.target_c = target_c;
  if (*eps_opt) o.epsilon = epsilon;
  if (*grid_opt) o.grid = grid;
  if (*lr_opt) o.lambda_range = lambda_range;
  if (*or_opt) o.omega_range = omega_range;
  if (*q_opt) o.q_range = q_range;

  return fractspec::run_with_config_file(subcommand, config_path, o, std::cout, std::cerr);
}
