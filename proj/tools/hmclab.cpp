// Command-line runner: hmclab <experiment> [--config path] [--seed u64]
// [--replicas k] [--workers k] [--out dir] [--profile quick|full]

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hmclab/errors.hpp"
#include "hmclab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Holomorphic multiplicative chaos experiments"};
  app.set_version_flag("--version", std::string(hmclab::version()));

  std::string experiment;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  unsigned workers = 0;
  std::string out_dir;
  std::string profile;

  app.add_option("experiment,--experiment", experiment,
                 "coeffs|split|gmc|cue|dickman|limit|parseval|convergence|verify-all");
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Root seed");
  app.add_option("--replicas", replicas, "Replica count override");
  app.add_option("--workers", workers, "Worker threads");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--profile", profile, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  CLI11_PARSE(app, argc, argv);

  try {
    hmclab::ExperimentConfig cfg;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::parse_error& e) {
        throw hmclab::SchemaError(config_path + ": " + e.what());
      }
      cfg = hmclab::ExperimentConfig::from_json(j);
    }
    if (!experiment.empty()) cfg.experiment = experiment;
    if (*seed_opt) cfg.seed = seed;
    if (replicas > 0) cfg.replicas = replicas;
    if (workers > 0) cfg.workers = workers;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!profile.empty()) cfg.profile = profile;

    const hmclab::RunManifest m = hmclab::run(cfg);
    for (const auto& c : m.criteria) {
      std::printf("%-4s criterion %2d  %-52s %8.2fs\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), c.seconds);
      for (const auto& r : c.reports) {
        if (!r.pass) {
          std::printf("       failed: %s (value %.6g, reference %.6g, se/p %.3g)\n", r.name.c_str(), r.value,
                      r.reference, r.se_or_p);
        }
      }
    }
    std::printf("%s  manifest: %s/manifest.json\n", m.pass ? "ALL PASS" : "FAILURES", cfg.output_dir.c_str());
    return m.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hmclab: %s\n", e.what());
    return 2;
  }
}
