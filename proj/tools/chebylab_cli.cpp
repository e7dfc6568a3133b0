// Command line front end.
//
//   chebylab analyze        --config s.json --out dir [--seed N] [--tol X]
//   chebylab norm-info      --p 2 --dim 3 [--weights ...] [--max] [--point ...]
//   chebylab chebyshev-scan --config s.json --out dir [--seed N] [--tol X]
//   chebylab plot-data      --config s.json --out dir [--seed N] [--tol X]
//
// Exit codes: 0 consistent / report written, 1 hypothesis failure or
// non-Čebyšev finding, 2 violation, 3 input error.  CHEBYLAB_THREADS caps
// the worker count.

#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chebylab/config.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "scenario config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--tol", args.tol, "override the limit tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "numerical laboratory for metric projections, distance derivatives and "
      "convexity criteria in finite-dimensional normed spaces"};
  app.require_subcommand(1);

  CommonArgs analyze_args;
  CLI::App* analyze = app.add_subcommand(
      "analyze", "run the full condition suite on a scenario");
  add_common(analyze, analyze_args);

  CommonArgs scan_args;
  CLI::App* scan = app.add_subcommand(
      "chebyshev-scan", "check nearest-point uniqueness over the scenario grid");
  add_common(scan, scan_args);

  CommonArgs plot_args;
  CLI::App* plot = app.add_subcommand(
      "plot-data", "write the distance field and grid overlay as CSV (2-D only)");
  add_common(plot, plot_args);

  std::string p_text = "2";
  int dim = 2;
  std::vector<double> weights;
  bool max_flag = false;
  std::vector<double> point;
  CLI::App* info = app.add_subcommand(
      "norm-info", "print norm, dual and support-functional facts");
  info->add_option("--p", p_text, "exponent (number or \"inf\")")
      ->capture_default_str();
  info->add_option("--dim", dim, "dimension")->capture_default_str();
  info->add_option("--weights", weights,
                   "positive weights (selects the weighted norm; sets the dim)");
  info->add_flag("--max", max_flag, "use the max norm (ignores --p)");
  info->add_option("--point", point, "evaluation point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;  // --help exits 0, bad flags are input errors
  }

  if (analyze->parsed())
    return chebylab::cmd_analyze(analyze_args.config, analyze_args.out,
                                 analyze_args.seed, analyze_args.tol);
  if (scan->parsed())
    return chebylab::cmd_chebyshev_scan(scan_args.config, scan_args.out,
                                        scan_args.seed, scan_args.tol);
  if (plot->parsed())
    return chebylab::cmd_plot_data(plot_args.config, plot_args.out, plot_args.seed,
                                   plot_args.tol);

  // norm-info
  try {
    double p = 0.0;
    if (p_text == "inf") {
      p = std::numeric_limits<double>::infinity();
    } else {
      std::size_t pos = 0;
      p = std::stod(p_text, &pos);
      if (pos != p_text.size())
        throw std::invalid_argument("--p expects a number or \"inf\"");
    }
    if (max_flag) p = std::numeric_limits<double>::infinity();
    chebylab::NormSpec spec;
    if (!weights.empty())
      spec = chebylab::NormSpec::weighted_lp(p, weights);
    else if (max_flag)
      spec = chebylab::NormSpec::max_norm(dim);
    else
      spec = chebylab::NormSpec::lp(p, dim);
    std::optional<chebylab::Vec> x;
    if (!point.empty()) x = point;
    return chebylab::cmd_norm_info(spec, x);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
