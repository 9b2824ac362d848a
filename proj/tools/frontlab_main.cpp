#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "frontlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"frontlab: free-boundary reaction-diffusion laboratory for "
               "space-time periodic media"};
  app.require_subcommand(1);

  frontlab::RunOptions opt;
  const char* subs[] = {"solve",   "eigen",    "rstar", "lambda-inf",
                        "steady",  "classify", "mu-star", "speed",
                        "semiwave", "approx-check", "sweep"};
  const char* descs[] = {
      "time-step the free boundary problem and emit the trajectory",
      "principal eigenvalue of the periodic Dirichlet linearization",
      "critical radius R*(y)",
      "large-R approximation of the whole-line principal eigenvalue",
      "positive periodic states (cell / dirichlet / half-line)",
      "spreading-vanishing dichotomy verdict",
      "bisection for the critical expansion coefficient",
      "asymptotic front speed estimate from a spreading run",
      "homogeneous semi-wave speed oracle",
      "monotone approximating-sequence study",
      "classify over a mu grid with a combined verdict table"};
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    CLI::App* sub = app.add_subcommand(subs[i], descs[i]);
    sub->add_option("--config", opt.config_path, "run configuration (TOML)")
        ->required();
    sub->add_option("--out", opt.out_dir, "output directory")->required();
    sub->add_option("--threads", opt.threads, "worker threads for sweeps");
    sub->add_flag("--seedless", opt.seedless, "assert the run uses no randomness");
    sub->add_flag("--verbose", opt.verbose, "chatty progress output");
    sub->callback([&opt, name = std::string(subs[i])] { opt.subcommand = name; });
  }

  CLI11_PARSE(app, argc, argv);

  frontlab::RunRecord rec = frontlab::run(opt);
  if (opt.verbose || rec.exit_code != 0) {
    std::ostream& os = rec.exit_code == 0 ? std::cout : std::cerr;
    os << "status: " << rec.status;
    if (!rec.message.empty()) os << " (" << rec.message << ")";
    os << "\n";
    for (const auto& f : rec.files) os << "wrote " << opt.out_dir << "/" << f << "\n";
  }
  return rec.exit_code;
}
