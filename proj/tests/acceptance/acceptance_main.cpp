// Runs every acceptance criterion at full size and prints one line each.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "hmclab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hmclab acceptance checks"};
  std::string out;
  std::string profile = "full";
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::uint64_t seed = 20240917;
  app.add_option("--out", out, "directory for CSV output");
  app.add_option("--profile", profile)->check(CLI::IsMember({"quick", "full"}));
  app.add_option("--workers", workers)->check(CLI::PositiveNumber);
  app.add_option("--seed", seed);
  CLI11_PARSE(app, argc, argv);

  hmclab::RunContext ctx;
  ctx.seed = hmclab::Seed(seed);
  ctx.workers = workers;
  ctx.profile = hmclab::parse_profile(profile);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    ctx.output_dir = out;
  }

  int failures = 0;
  for (int id = 1; id <= 11; ++id) {
    hmclab::CriterionResult r;
    try {
      r = hmclab::run_criterion(id, ctx);
    } catch (const std::exception& e) {
      std::printf("FAIL [%2d] error: %s\n", id, e.what());
      ++failures;
      continue;
    }
    std::printf("%s [%2d] %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", id, r.title.c_str(), r.seconds);
    if (!r.pass) {
      ++failures;
      for (const auto& t : r.reports) {
        if (!t.pass) {
          std::printf("       %s: value %.6g reference %.6g se/p %.3g (n=%zu)\n", t.name.c_str(), t.value,
                      t.reference, t.se_or_p, t.sample_size);
        }
      }
    }
    std::fflush(stdout);
  }
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
