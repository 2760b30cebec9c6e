#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cbsq/config.hpp"
#include "cbsq/errors.hpp"
#include "cbsq/harness.hpp"
#include "cbsq/io.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool override_index_check = false;
  std::string resume;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "run configuration (key = value document)");
  sub->add_option("--out", f.out_dir, "output directory (overrides output_dir)");
  sub->add_option("--seed", f.seed, "random seed (overrides seed)");
  sub->add_option("--jobs", f.jobs, "parallel sweep cells")->check(CLI::PositiveNumber);
  sub->add_flag("--override-index-check", f.override_index_check,
                "run even if the index conditions are violated");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Couette-Boussinesq spectral simulator and verification toolkit"};
  app.set_version_flag("--version", cbsq::version_string);
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, const char*> modes[] = {
      {"linear", "exact linear evolution, per-mode series and norms"},
      {"simulate", "nonlinear simulation with energy reports and checkpoints"},
      {"sweep", "threshold sweep over (nu, beta) cells"},
      {"verify-multiplier", "exhaustive multiplier bound check"},
      {"fit-decay", "e-fold times and scaling regression"},
  };
  for (const auto& [name, help] : modes) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (std::string(name) == "simulate") sub->add_option("--resume", flags.resume, "checkpoint to continue from");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cbsq::exit_code(cbsq::ErrorKind::usage);
  }

  try {
    const std::string mode_name = app.get_subcommands().front()->get_name();
    const std::string text = flags.config_path.empty() ? std::string() : cbsq::io::read_text(flags.config_path);
    const cbsq::RunConfig cfg = cbsq::parse_config(text, [&](cbsq::RunConfig& c) {
      c.mode = cbsq::parse_mode(mode_name);
      if (!flags.out_dir.empty()) c.output_dir = flags.out_dir;
      if (flags.seed) c.seed = *flags.seed;
      if (flags.override_index_check) c.override_index_check = true;
    });
    cbsq::RunOptions opts;
    opts.jobs = flags.jobs;
    if (!flags.resume.empty()) opts.resume_from = flags.resume;
    return cbsq::run(cfg, opts);
  } catch (const cbsq::Error& e) {
    std::cerr << "cbsq: " << cbsq::to_string(e.kind()) << " error: " << e.what() << "\n";
    return cbsq::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "cbsq: unexpected error: " << e.what() << "\n";
    return 1;
  }
}
