#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ergomax/harness/config.hpp"
#include "ergomax/harness/run.hpp"

namespace h = ergomax::harness;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> orbits;
  std::optional<std::uint64_t> n_max;
  std::optional<std::string> out;
  unsigned workers = 0;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Base seed; orbit i uses seed + i");
  cmd->add_option("--orbits", o.orbits, "Number of orbits")->check(CLI::PositiveNumber);
  cmd->add_option("--n-max", o.n_max, "Orbit length")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--workers", o.workers,
                  "Worker threads (default: ERGOMAX_WORKERS, else all cores)");
}

int run_kind(h::RunKind kind, const Overrides& o) {
  h::ExperimentConfig cfg = o.config.empty() ? h::ExperimentConfig{} : h::load_config(o.config);
  cfg.kind = kind;
  if (o.seed) cfg.seed = *o.seed;
  if (o.orbits) cfg.n_orbits = *o.orbits;
  if (o.n_max) cfg.n_max = *o.n_max;
  if (o.out) cfg.output_dir = *o.out;
  const auto s = h::run(cfg, o.workers);
  std::cout << s.json << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergomax: extreme-value and shrinking-target experiments on chaotic maps"};
  app.require_subcommand(1);

  const std::pair<h::RunKind, const char*> kinds[] = {
      {h::RunKind::Simulate, "maximum processes of an observable along orbits"},
      {h::RunKind::Bc, "shrinking-target hit counts and error exponent fit"},
      {h::RunKind::Dim, "local dimension and annulus regularity"},
      {h::RunKind::Decay, "correlation decay and its class"},
      {h::RunKind::Iid, "i.i.d. baseline maxima"},
      {h::RunKind::Classify, "upper/lower/intermediate sequence classification"},
  };
  Overrides o;
  for (const auto& [kind, help] : kinds) {
    auto* cmd = app.add_subcommand(std::string(h::to_string(kind)), help);
    add_common(cmd, o);
    cmd->callback([kind = kind, &o] { std::exit(run_kind(kind, o)); });
  }

  std::string summary;
  unsigned replay_workers = 0;
  auto* rep = app.add_subcommand("replay", "re-run a finished experiment and verify its outputs");
  rep->add_option("summary", summary, "Path to summary.json")->required()->check(CLI::ExistingFile);
  rep->add_option("--workers", replay_workers, "Worker threads");
  rep->callback([&] {
    const auto s = h::replay(summary, replay_workers);
    std::cout << "replay ok: " << s.artifacts.size() << " artifact(s) identical, config "
              << s.config_hash << "\n";
    std::exit(0);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ergomax::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
