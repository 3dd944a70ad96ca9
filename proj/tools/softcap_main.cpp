// softcap: command-line front end for the soft-budget cache controller simulator.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "softcap/harness.hpp"
#include "softcap/kernels.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Soft-budget feature-cache controller simulator"};
  app.require_subcommand(1);

  softcap::CommonOptions opts;
  std::string out_dir = ".";
  std::int64_t seed = 0;
  std::string kernels;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--jobs", opts.jobs, "Parallel runs")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", seed, "Override the seed (run) or the seed list (sweep/ablate/profile-build)");
    sub->add_option("--kernels", kernels, "Force a kernel ISA")->check(CLI::IsMember({"scalar", "avx2"}));
  };

  std::string path;
  auto* run = app.add_subcommand("run", "Run one closed-loop simulation");
  run->add_option("config", path, "Run config (JSON)")->required();
  add_common(run);
  auto* sweep = app.add_subcommand("sweep", "Sweep the soft ceiling over caps and seeds");
  sweep->add_option("spec", path, "Sweep spec (JSON)")->required();
  add_common(sweep);
  auto* ablate = app.add_subcommand("ablate", "Controller and observer ablations");
  ablate->add_option("spec", path, "Ablation spec (JSON)")->required();
  add_common(ablate);
  auto* build = app.add_subcommand("profile-build", "Build a frozen reference profile");
  build->add_option("spec", path, "Profile build spec (JSON)")->required();
  add_common(build);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : softcap::kExitConfigError;
  }

  opts.out_dir = out_dir;
  for (auto* sub : {run, sweep, ablate, build}) {
    if (sub->parsed() && sub->count("--seed") > 0) opts.seed = static_cast<std::uint64_t>(seed);
  }
  if (!kernels.empty()) {
    try {
      softcap::kernels::set_active_isa(kernels == "avx2" ? softcap::kernels::Isa::avx2 : softcap::kernels::Isa::scalar);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return softcap::kExitConfigError;
    }
  }

  if (run->parsed()) return softcap::cmd_run(path, opts, std::cerr);
  if (sweep->parsed()) return softcap::cmd_sweep(path, opts, std::cerr);
  if (ablate->parsed()) return softcap::cmd_ablate(path, opts, std::cerr);
  return softcap::cmd_profile_build(path, opts, std::cerr);
}
