#include "hmclab/experiments.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "hmclab/cue.hpp"
#include "hmclab/dickman.hpp"
#include "hmclab/errors.hpp"
#include "hmclab/gmc.hpp"
#include "hmclab/hmc.hpp"
#include "hmclab/parallel.hpp"
#include "hmclab/series.hpp"

#ifndef HMCLAB_VERSION
#define HMCLAB_VERSION "v0.0.0"
#endif

namespace hmclab {
namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

const double kSqrtPi = std::sqrt(std::numbers::pi);

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TestReport report(std::string name, std::size_t size, double value, double reference, double se_or_p, bool pass) {
  return TestReport{std::move(name), size, value, reference, se_or_p, pass};
}

// |value - reference| <= k se, reported with the SE.
TestReport within_se(std::string name, std::size_t size, const MeanSe& est, double reference, double k) {
  return report(std::move(name), size, est.mean, reference, est.se, std::abs(est.mean - reference) <= k * est.se);
}

CriterionResult finish(int id, std::string title, std::vector<TestReport> reports, Clock::time_point t0,
                       double budget_seconds) {
  CriterionResult out;
  out.id = id;
  out.title = std::move(title);
  out.seconds = seconds_since(t0);
  reports.push_back(report("runtime_seconds", 0, out.seconds, budget_seconds, 0.0, out.seconds < budget_seconds));
  out.pass = std::all_of(reports.begin(), reports.end(), [](const TestReport& r) { return r.pass; });
  out.reports = std::move(reports);
  return out;
}

std::size_t pick(const RunContext& ctx, std::size_t full, std::size_t quick) {
  if (ctx.replicas > 0) return ctx.replicas;
  return ctx.profile == Profile::kFull ? full : quick;
}

std::vector<std::size_t> grid_or(const RunContext& ctx, std::vector<std::size_t> fallback) {
  return ctx.n_grid.empty() ? fallback : ctx.n_grid;
}

// fn(i, row) fills row i of a count x width table; rows depend on i only.
template <class Fn>
std::vector<double> replicate(std::size_t count, std::size_t width, unsigned workers, Fn&& fn) {
  std::vector<double> out(count * width);
  parallel_map(count, workers, [&](std::size_t i) {
    fn(i, std::span<double>(out.data() + i * width, width));
    return char{0};
  });
  return out;
}

std::vector<double> column(const std::vector<double>& table, std::size_t width, std::size_t j) {
  std::vector<double> col(table.size() / width);
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = table[i * width + j];
  return col;
}

std::string output_path(const RunContext& ctx, const std::string& name) {
  return (std::filesystem::path(ctx.output_dir) / name).string();
}

void write_table_csv(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << header << '\n' << std::setprecision(17);
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

std::string fmt_n(std::size_t n) { return "n=" + std::to_string(n); }

std::vector<cplx> draw_gaussians(std::size_t n, GaussianStream& stream) {
  std::vector<cplx> g(n + 1);
  stream.fill_complex_gaussian(g.data() + 1, n);
  return g;
}

}  // namespace

const char* version() { return HMCLAB_VERSION; }

Profile parse_profile(const std::string& name) {
  if (name == "quick") return Profile::kQuick;
  if (name == "full") return Profile::kFull;
  throw SchemaError("profile: expected 'quick' or 'full', got '" + name + "'");
}

std::string profile_name(Profile p) { return p == Profile::kFull ? "full" : "quick"; }

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"coeffs", "split",       "gmc",        "cue",       "dickman",
                                              "limit",  "parseval",    "convergence", "verify-all"};
  return names;
}

// ---------------------------------------------------------------------------
// Criterion 1: series expansion against the composition sum.

CriterionResult check_series_oracle(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(1);
  constexpr std::size_t kInputs = 200;
  constexpr std::size_t kDegree = 10;
  // Per input: worst relative error of the quadratic and the FFT path.
  const auto errs = replicate(kInputs, 2, ctx.workers, [&](std::size_t i, std::span<double> row) {
    GaussianStream stream(base.child(i));
    const auto gauss = draw_gaussians(kDegree, stream);
    const auto g = GeneratorVec::from_gaussians(gauss);
    const CoeffVec quad = exp_series(g, 1.0, kDegree, ExpMethod::kQuadratic);
    const CoeffVec fast = exp_series(g, 1.0, kDegree, ExpMethod::kRelaxedFft);
    row[0] = row[1] = 0.0;
    for (std::size_t n = 0; n <= kDegree; ++n) {
      const cplx ref = brute_force_coeff(g, 1.0, n);
      row[0] = std::max(row[0], std::abs(quad[n] - ref) / std::abs(ref));
      row[1] = std::max(row[1], std::abs(fast[n] - ref) / std::abs(ref));
    }
  });
  const auto quad = column(errs, 2, 0);
  const auto fast = column(errs, 2, 1);
  const double wq = *std::max_element(quad.begin(), quad.end());
  const double wf = *std::max_element(fast.begin(), fast.end());
  std::vector<TestReport> reports{
      report("exp_series quadratic vs composition sum, max relative error", kInputs, wq, 0.0, 0.0, wq <= 1e-10),
      report("exp_series relaxed fft vs composition sum, max relative error", kInputs, wf, 0.0, 0.0, wf <= 1e-10)};
  return finish(1, "series expansion matches composition sum", std::move(reports), t0, 10.0);
}

// ---------------------------------------------------------------------------
// Criterion 2: E|c_n|^2 = 1 and E|c_n|^4 = n + 1.

CriterionResult check_exact_moments(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(2);
  std::vector<TestReport> reports;
  std::vector<std::vector<double>> rows;

  // At n = 512 the fourth moment of |c_n|^2 is dominated by rare draws, so
  // the quick profile's replica count cannot resolve it.
  const auto second = grid_or(ctx, ctx.profile == Profile::kFull ? std::vector<std::size_t>{8, 64, 512}
                                                                  : std::vector<std::size_t>{8, 64});
  const std::size_t r2 = pick(ctx, 100000, 10000);
  const std::size_t top2 = *std::max_element(second.begin(), second.end());
  const auto sq = replicate(r2, second.size(), ctx.workers, [&](std::size_t i, std::span<double> row) {
    const HmcSample s = sample_coeffs(top2, 0, 1.0, base.child({0, i}));
    for (std::size_t k = 0; k < second.size(); ++k) row[k] = std::norm(s.c(second[k]));
  });
  for (std::size_t k = 0; k < second.size(); ++k) {
    const auto est = mean_se(column(sq, second.size(), k));
    reports.push_back(within_se("E|c_n|^2 = 1 at " + fmt_n(second[k]), r2, est, 1.0, 3.0));
    rows.push_back({static_cast<double>(second[k]), 2.0, est.mean, est.se, 1.0});
  }

  const std::vector<std::size_t> fourth{4, 16};
  const std::size_t r4 = ctx.replicas > 0 ? 10 * ctx.replicas : (ctx.profile == Profile::kFull ? 1000000 : 100000);
  const auto quad = replicate(r4, fourth.size(), ctx.workers, [&](std::size_t i, std::span<double> row) {
    const HmcSample s = sample_coeffs(fourth.back(), 0, 1.0, base.child({1, i}));
    for (std::size_t k = 0; k < fourth.size(); ++k) {
      const double a = std::norm(s.c(fourth[k]));
      row[k] = a * a;
    }
  });
  for (std::size_t k = 0; k < fourth.size(); ++k) {
    const auto est = mean_se(column(quad, fourth.size(), k));
    const double ref = static_cast<double>(fourth[k] + 1);
    reports.push_back(within_se("E|c_n|^4 = n+1 at " + fmt_n(fourth[k]), r4, est, ref, 4.0));
    rows.push_back({static_cast<double>(fourth[k]), 4.0, est.mean, est.se, ref});
  }
  if (!ctx.output_dir.empty()) write_table_csv(output_path(ctx, "moments.csv"), "n,power,mean,se,reference", rows);
  return finish(2, "exact second and fourth moments", std::move(reports), t0, 180.0);
}

// ---------------------------------------------------------------------------
// Criterion 3: E|c_{s,q}|^2 = P(all cycles <= q) three ways.

CriterionResult check_restricted_triangle(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(3);
  const std::size_t reps = pick(ctx, 100000, 20000);
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{3, 2}, {8, 3}, {20, 5}};
  std::vector<TestReport> reports;
  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    const auto [s, q] = pairs[j];
    const std::string tag = "(s,q)=(" + std::to_string(s) + "," + std::to_string(q) + ")";
    const double dp = expected_sq_norm_dp(s, q);
    const McEstimate perm = cycle_probability_mc(s, q, CycleEvent::kAllCyclesAtMostQ, reps, base.child({j, 0}),
                                                 ctx.workers);
    const auto sq = replicate(reps, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
      GaussianStream stream(base.child({j, 1, i}));
      const auto g = GeneratorVec::from_gaussians(draw_gaussians(q, stream));
      row[0] = std::norm(restricted_exp(g, 1.0, q, s)[s]);
    });
    const auto coeff = mean_se(sq);
    reports.push_back(within_se("permutation MC vs recursion " + tag, reps, {perm.mean, perm.std_error}, dp, 3.0));
    reports.push_back(within_se("mean |c_{s,q}|^2 vs recursion " + tag, reps, coeff, dp, 3.0));
    const double joint = std::hypot(perm.std_error, coeff.se);
    reports.push_back(report("permutation MC vs mean |c_{s,q}|^2 " + tag, reps, coeff.mean, perm.mean, joint,
                             std::abs(coeff.mean - perm.mean) <= 3.0 * joint));
    rows.push_back({static_cast<double>(s), static_cast<double>(q), dp, perm.mean, perm.std_error, coeff.mean, coeff.se});
  }
  const double exact = expected_sq_norm_dp(3, 2);
  reports.push_back(report("recursion value at (s,q)=(3,2) equals 2/3", 0, exact, 2.0 / 3.0, 0.0,
                           std::abs(exact - 2.0 / 3.0) <= 1e-15));
  if (!ctx.output_dir.empty()) {
    write_table_csv(output_path(ctx, "restricted_triangle.csv"), "s,q,recursion,perm_mean,perm_se,coeff_mean,coeff_se",
                    rows);
  }
  return finish(3, "restricted coefficient second moments", std::move(reports), t0, 60.0);
}

// ---------------------------------------------------------------------------
// Criterion 4: Parseval identity for the truncated series.

CriterionResult check_parseval(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(4);
  constexpr std::size_t kSamples = 50;
  const Poly p{{1.0, 1.0}};
  std::vector<TestReport> reports;
  const auto cutoffs = grid_or(ctx, {32, 128});
  for (std::size_t u : cutoffs) {
    const std::size_t s_max = 8 * u;
    const std::size_t m_points = ctx.m_points > 0 ? ctx.m_points : std::bit_ceil(2 * (s_max + p.degree()) + 1);
    const auto errs = replicate(kSamples, 3, ctx.workers, [&](std::size_t i, std::span<double> row) {
      const HmcSample s = sample_coeffs(u, 0, 1.0, base.child({u, i}));
      for (std::size_t m = 0; m < 3; ++m) row[m] = parseval_check(s, u, m, p, s_max, m_points).relative_error;
    });
    for (std::size_t m = 0; m < 3; ++m) {
      const auto col = column(errs, 3, m);
      const double worst = *std::max_element(col.begin(), col.end());
      reports.push_back(report("parseval max relative error u=" + std::to_string(u) + " m=" + std::to_string(m),
                               kSamples, worst, 0.0, 0.0, worst <= 1e-8));
    }
  }
  return finish(4, "parseval identity on truncated series", std::move(reports), t0, 60.0);
}

// ---------------------------------------------------------------------------
// Criterion 5: Dickman function and distribution.

CriterionResult check_dickman(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(5);
  const DickmanTable table = solve_rho(1e-4, 20.0);
  std::vector<TestReport> reports;

  const double rho2 = table.rho(2.0);
  const double exact2 = 1.0 - std::numbers::ln2;
  reports.push_back(report("rho(2) = 1 - ln 2", 0, rho2, exact2, 0.0, std::abs(rho2 - exact2) <= 1e-8));
  const double recip = rho_reciprocal_integral(table);
  reports.push_back(report("integral of rho((1-v)/v)/v over [0,1] = 1", 0, recip, 1.0, 0.0, std::abs(recip - 1.0) <= 1e-6));

  const double target = std::exp(-DickmanTable::gamma_e);
  const double gap10 = std::abs(limit_dickman_sum(10, table) - target);
  const double gap100 = std::abs(limit_dickman_sum(100, table) - target);
  reports.push_back(report("|limit_dickman_sum(100) - e^-gamma| <= 0.05", 0, gap100, 0.0, 0.0, gap100 <= 0.05));
  reports.push_back(report("limit_dickman_sum gap shrinks from L=10 to L=100", 0, gap100, gap10, 0.0, gap100 < gap10));

  const std::size_t u = 1000;
  const std::size_t draws = pick(ctx, 100000, 20000);
  const auto xs = replicate(draws, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
    row[0] = sample_x_poisson(u, base.child(i));
  });
  const KsResult ks = ks_statistic(xs, [&](double x) { return table.cdf(x); });
  reports.push_back(report("poisson sampler u=1000 KS distance to tabulated cdf", draws, ks.d, 0.0, ks.p_value, ks.d <= 0.02));

  if (!ctx.output_dir.empty()) {
    write_rho_csv(table, output_path(ctx, "rho.csv"), 100);
    emit_distribution_csv(xs, output_path(ctx, "dickman_poisson.csv"));
  }
  return finish(5, "dickman function and distribution", std::move(reports), t0, 120.0);
}

// ---------------------------------------------------------------------------
// Criterion 6: closed forms of the limit law.

CriterionResult check_limit_law(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(6);
  std::vector<TestReport> reports;

  const std::size_t draws = pick(ctx, 1000000, 100000);
  const auto w = replicate(draws, 2, ctx.workers, [&](std::size_t i, std::span<double> row) {
    const LimitSample s = sample_limit(base.child({0, i}));
    row[0] = std::abs(s.w);
    row[1] = row[0] >= 1.0 ? 1.0 : 0.0;
  });
  reports.push_back(within_se("E|sqrt(M1) Z| = pi^(3/4)/2", draws, mean_se(column(w, 2, 0)),
                              std::pow(std::numbers::pi, 0.75) / 2.0, 3.0));
  reports.push_back(within_se("P(|sqrt(M1) Z| >= 1) = 1/(1+sqrt(pi))", draws, mean_se(column(w, 2, 1)),
                              tail_formula(1.0), 3.0));

  const std::size_t ks_draws = ctx.replicas > 0 ? ctx.replicas : (ctx.profile == Profile::kFull ? 100000 : 20000);
  const auto ratio = replicate(ks_draws, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
    row[0] = kSqrtPi * std::norm(sample_limit(base.child({1, i})).w);
  });
  const KsResult ks = ks_statistic(ratio, ratio_cdf);
  reports.push_back(report("KS of sqrt(pi)|w|^2 against x/(1+x)", ks_draws, ks.d, 0.0, ks.p_value, ks.p_value > 0.01));

  for (double q : {0.5, 1.0, 1.5}) {
    const double closed = moment_formula(q);
    const double quad = moment_from_tail(q);
    std::ostringstream name;
    name << "moment formula vs tail quadrature q=" << q;
    reports.push_back(report(name.str(), 0, closed, quad, 0.0, std::abs(closed - quad) <= 1e-6));
  }
  if (!ctx.output_dir.empty()) emit_distribution_csv(ratio, output_path(ctx, "limit_ratio.csv"));
  return finish(6, "limit law closed forms", std::move(reports), t0, 120.0);
}

// ---------------------------------------------------------------------------
// Criterion 7: KS distance to x/(1+x) decreases with n.

CriterionResult check_convergence(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(7);
  auto ns = grid_or(ctx, ctx.profile == Profile::kFull ? std::vector<std::size_t>{256, 4096, 65536}
                                                        : std::vector<std::size_t>{64, 512, 4096});
  std::sort(ns.begin(), ns.end());
  const std::size_t reps = pick(ctx, 10000, 1000);
  // Every replica expands one series to the largest n and reads all c_n from it.
  const auto stats = replicate(reps, ns.size(), ctx.workers, [&](std::size_t i, std::span<double> row) {
    const HmcSample s = sample_coeffs(ns.back(), 0, 1.0, base.child(i));
    for (std::size_t k = 0; k < ns.size(); ++k) row[k] = scaled_modulus_sq(s, ns[k]);
  });
  std::vector<KsResult> ks;
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const auto col = column(stats, ns.size(), k);
    ks.push_back(ks_statistic(col, ratio_cdf));
    rows.push_back({static_cast<double>(ns[k]), ks.back().d, ks.back().p_value});
    if (!ctx.output_dir.empty()) emit_distribution_csv(col, output_path(ctx, "scaled_n" + std::to_string(ns[k]) + ".csv"));
  }
  std::vector<TestReport> reports;
  for (std::size_t k = 1; k < ns.size(); ++k) {
    reports.push_back(report("KS distance at " + fmt_n(ns[k]) + " below " + fmt_n(ns[k - 1]), reps, ks[k].d,
                             ks[k - 1].d, ks[k].p_value, ks[k].d < ks[k - 1].d));
  }
  if (!ctx.output_dir.empty()) write_table_csv(output_path(ctx, "convergence.csv"), "n,ks_distance,p_value", rows);
  return finish(7, "convergence trend of sqrt(pi)|c_n|^2 sqrt(log n)", std::move(reports), t0, 900.0);
}

// ---------------------------------------------------------------------------
// Criterion 8: good/bad split.

CriterionResult check_split(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(8);
  std::vector<TestReport> reports;

  // Identity over a spread of configurations.
  const std::vector<SplitConfig> configs{{12, 0, 2}, {12, 2, 3}, {100, 1, 8}, {1000, 2, 16}, {4096, 0, 64}};
  double worst_identity = 0.0;
  std::size_t identity_samples = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto errs = replicate(5, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
      const HmcSample s = sample_coeffs(configs[c].n, configs[c].r, 1.0, base.child({0, c, i}));
      const SplitResult sp = split(s, configs[c]);
      const cplx target = s.c(configs[c].n + configs[c].r);
      row[0] = std::abs(sp.good + sp.bad - target) / std::abs(target);
    });
    worst_identity = std::max(worst_identity, *std::max_element(errs.begin(), errs.end()));
    identity_samples += errs.size();
  }
  reports.push_back(report("good + bad = c_{n+r}, max relative error", identity_samples, worst_identity, 0.0, 0.0,
                           worst_identity <= 1e-10));

  // Martingale representation against composition classification.
  double worst_enum = 0.0;
  std::size_t enum_cases = 0;
  for (std::size_t L : {2, 3}) {
    for (std::size_t n = L; n <= 12; ++n) {
      for (std::size_t r = 0; r <= 2; ++r) {
        const SplitConfig cfg{n, r, L};
        for (std::size_t i = 0; i < 4; ++i) {
          const HmcSample s = sample_coeffs(n, r, 1.0, base.child({1, L, n, r, i}));
          const SplitResult fast = split(s, cfg);
          const SplitResult lit = split_enumerated(s, cfg);
          worst_enum = std::max({worst_enum, std::abs(fast.good - lit.good) / std::max(1.0, std::abs(lit.good)),
                                 std::abs(fast.bad - lit.bad) / std::max(1.0, std::abs(lit.bad))});
          ++enum_cases;
        }
      }
    }
  }
  reports.push_back(report("split matches composition classification for n <= 12", enum_cases, worst_enum, 0.0, 0.0,
                           worst_enum <= 1e-10));

  // Bad part shrinks as L grows.
  const std::size_t n = ctx.n_grid.empty() ? (ctx.profile == Profile::kFull ? 4096 : 1024) : ctx.n_grid.front();
  const std::size_t big_l = ctx.L > 0 ? ctx.L : 64;
  const std::size_t small_l = 8;
  const std::size_t reps = pick(ctx, 2000, 300);
  const double scale = std::pow(std::log(static_cast<double>(n)), 0.25);
  const auto bad = replicate(reps, 2, ctx.workers, [&](std::size_t i, std::span<double> row) {
    const HmcSample s = sample_coeffs(n, 0, 1.0, base.child({2, i}));
    row[0] = std::abs(bad_part(s, {n, 0, small_l})) * scale;
    row[1] = std::abs(bad_part(s, {n, 0, big_l})) * scale;
  });
  const double med_small = median(column(bad, 2, 0));
  const double med_big = median(column(bad, 2, 1));
  reports.push_back(report("median |bad| (log n)^(1/4) at L=" + std::to_string(big_l) + " below L=" +
                               std::to_string(small_l) + ", " + fmt_n(n),
                           reps, med_big, med_small, 0.0, med_big < med_small));
  if (!ctx.output_dir.empty()) {
    write_table_csv(output_path(ctx, "split.csv"), "n,L,median_scaled_bad",
                    {{static_cast<double>(n), static_cast<double>(small_l), med_small},
                     {static_cast<double>(n), static_cast<double>(big_l), med_big}});
  }
  return finish(8, "good/bad split", std::move(reports), t0, 300.0);
}

// ---------------------------------------------------------------------------
// Criterion 9: CUE secular coefficients.

CriterionResult check_cue(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(9);
  std::vector<TestReport> reports;
  double worst_defect = 0.0;
  std::size_t checked = 0;

  // Two samplers at N = 32: Re c_1, Im c_1, |c_2|, |c_16| and the invariant defect.
  constexpr std::size_t kSmall = 32;
  const std::size_t small_reps = pick(ctx, 10000, 2000);
  auto stats_of = [&](bool qr) {
    return replicate(small_reps, 5, ctx.workers, [&](std::size_t i, std::span<double> row) {
      const SecularSet s = qr ? sample_secular_qr(kSmall, base.child({1, i})) : sample_secular_szego(kSmall, base.child({0, i}));
      row[0] = s.coeffs[1].real();
      row[1] = s.coeffs[1].imag();
      row[2] = std::abs(s.coeffs[2]);
      row[3] = std::abs(s.coeffs[kSmall / 2]);
      row[4] = s.invariant_defect();
    });
  };
  const auto szego = stats_of(false);
  const auto qr = stats_of(true);
  const char* labels[] = {"Re c_1", "Im c_1", "|c_2|", "|c_16|"};
  for (std::size_t k = 0; k < 4; ++k) {
    const KsResult ks = ks_two_sample(column(szego, 5, k), column(qr, 5, k));
    reports.push_back(report(std::string("szego vs qr two-sample KS on ") + labels[k] + " at N=32", small_reps, ks.d, 0.0,
                             ks.p_value, ks.p_value > 0.01));
  }
  for (const auto* t : {&szego, &qr}) {
    const auto d = column(*t, 5, 4);
    worst_defect = std::max(worst_defect, *std::max_element(d.begin(), d.end()));
    checked += d.size();
  }

  // Second moments at N = 256.
  constexpr std::size_t kMid = 256;
  const std::vector<std::size_t> idx{4, 16, 64};
  const std::size_t mid_reps = pick(ctx, 100000, 10000);
  const auto mid = replicate(mid_reps, idx.size() + 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
    const SecularSet s = sample_secular_szego(kMid, base.child({2, i}));
    for (std::size_t k = 0; k < idx.size(); ++k) row[k] = std::norm(s.coeffs[idx[k]]);
    row[idx.size()] = s.invariant_defect();
  });
  for (std::size_t k = 0; k < idx.size(); ++k) {
    reports.push_back(within_se("E|c_n|^2 = 1 at N=256, " + fmt_n(idx[k]), mid_reps, mean_se(column(mid, idx.size() + 1, k)),
                                1.0, 3.0));
  }
  {
    const auto d = column(mid, idx.size() + 1, idx.size());
    worst_defect = std::max(worst_defect, *std::max_element(d.begin(), d.end()));
    checked += d.size();
  }
  reports.push_back(report("secular invariants c_0=1, |c_N|=1, |c_{N-k}|=|c_k|", checked, worst_defect, 0.0, 0.0,
                           worst_defect <= 1e-10));

  // Trend along N = 128 n.
  const std::vector<std::size_t> ns{16, 64};
  const std::size_t trend_reps = pick(ctx, 5000, 1000);
  std::vector<KsResult> ks;
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const std::size_t n_dim = 128 * ns[k];
    const auto stat = replicate(trend_reps, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
      GaussianStream stream(base.child({3, k, i}));
      const auto c = secular_prefix_szego(n_dim, ns[k], stream);
      row[0] = scaled_modulus_sq_value(c[ns[k]], ns[k]);
    });
    ks.push_back(ks_statistic(stat, ratio_cdf));
    rows.push_back({static_cast<double>(ns[k]), static_cast<double>(n_dim), ks.back().d, ks.back().p_value});
  }
  reports.push_back(report("CUE KS distance at (n,N)=(64,8192) below (16,2048)", trend_reps, ks[1].d, ks[0].d,
                           ks[1].p_value, ks[1].d < ks[0].d));
  if (!ctx.output_dir.empty()) write_table_csv(output_path(ctx, "cue_trend.csv"), "n,N,ks_distance,p_value", rows);
  return finish(9, "CUE secular coefficients", std::move(reports), t0, 600.0);
}

// ---------------------------------------------------------------------------
// Criterion 10: covariance structure and the critical chaos measure.

CriterionResult check_gmc(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(10);
  std::vector<TestReport> reports;

  double worst_diag = 0.0;
  std::size_t diag_cases = 0;
  for (double r : {0.1, 0.5, 0.9, 0.99, 1.0}) {
    for (std::size_t n : {1, 2, 3, 16, 256, 4096}) {
      const double v = v_n(Cutoff::finite(n), r);
      worst_diag = std::max(worst_diag, std::abs(covariance(Cutoff::finite(n), r, 0.0) - v) / v);
      ++diag_cases;
    }
    if (r < 1.0) {
      const double v = v_n(Cutoff::infinite(), r);
      worst_diag = std::max(worst_diag, std::abs(covariance(Cutoff::infinite(), r, 0.0) - v) / v);
      ++diag_cases;
    }
  }
  reports.push_back(report("C_n(r,0) = V_n(r)", diag_cases, worst_diag, 0.0, 0.0, worst_diag <= 1e-12));

  constexpr int kDeltas = 200;
  double worst_residual = 0.0;
  double worst_log = 0.0;
  for (std::size_t n : {256, 1024, 4096}) {
    const double dn = static_cast<double>(n);
    for (int k = 0; k < kDeltas; ++k) {
      const double delta = 1e-3 * std::pow(std::numbers::pi / 1e-3, static_cast<double>(k) / (kDeltas - 1));
      const double c = covariance(Cutoff::finite(n), 1.0, delta);
      const double log_gap = std::log(std::abs(std::polar(1.0, delta) - 1.0));
      worst_residual = std::max(worst_residual, std::abs(c + 2.0 * log_gap) * delta * dn);
      worst_log = std::max(worst_log, std::abs(c - 2.0 * std::min(std::log(dn), std::log(1.0 / delta))));
    }
  }
  reports.push_back(report("|C_n(1,d) + 2 log|e^{id}-1|| d n bounded by 50", 3 * kDeltas, worst_residual, 50.0, 0.0,
                           worst_residual <= 50.0));
  reports.push_back(report("|C_n(1,d) - 2 min(log n, log 1/d)| bounded by 10", 3 * kDeltas, worst_log, 10.0, 0.0,
                           worst_log <= 10.0));

  const std::size_t n = ctx.n_grid.empty() ? 4096 : ctx.n_grid.front();
  const std::size_t m_points = ctx.m_points > 0 ? ctx.m_points : 8 * n;
  const std::size_t stable_reps = ctx.profile == Profile::kFull ? 20 : 10;
  const auto change = replicate(stable_reps, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
    GaussianStream stream(base.child({0, i}));
    const auto g = draw_gaussians(n, stream);
    const double coarse = mu_grid(g, n, 1.0, m_points).total_mass();
    const double fine = mu_grid(g, n, 1.0, 2 * m_points).total_mass();
    row[0] = std::abs(fine - coarse) / fine;
  });
  const double worst_change = *std::max_element(change.begin(), change.end());
  reports.push_back(report("total mass change when M doubles", stable_reps, worst_change, 0.01, 0.0, worst_change < 0.01));

  const std::size_t reps = pick(ctx, 2000, 500);
  const auto mass = replicate(reps, 1, ctx.workers, [&](std::size_t i, std::span<double> row) {
    GaussianStream stream(base.child({1, i}));
    row[0] = mu_grid(draw_gaussians(n, stream), n, 1.0, m_points).total_mass();
  });
  const double med = median(mass);
  const double ref = 1.0 / (kSqrtPi * std::numbers::ln2);
  reports.push_back(report("median total mass vs 1/(sqrt(pi) ln 2), " + fmt_n(n), reps, med, ref, 0.0,
                           std::abs(med - ref) <= 0.08));
  if (!ctx.output_dir.empty()) emit_distribution_csv(mass, output_path(ctx, "gmc_mass.csv"));
  return finish(10, "covariance estimates and chaos measure", std::move(reports), t0, 300.0);
}

// ---------------------------------------------------------------------------
// Criterion 11: Toeplitz moment matrix and its Gaussian sampler.

CriterionResult check_toeplitz(const RunContext& ctx) {
  const auto t0 = Clock::now();
  const Seed base = ctx.seed.child(11);
  std::vector<TestReport> reports;
  const std::size_t n = 1024;
  const std::size_t m_points = 4 * n;
  constexpr std::size_t kEll = 4;
  const std::size_t samples = ctx.profile == Profile::kFull ? 200 : 50;

  // Per sample: PSD flag (1/0) and relative Frobenius error of the root.
  const auto checks = replicate(samples, 2, ctx.workers, [&](std::size_t i, std::span<double> row) {
    GaussianStream stream(base.child({0, i}));
    const GridMeasure mu = mu_grid(draw_gaussians(n, stream), n, 1.0, m_points);
    const HermitianMatrix h = toeplitz_h(mu, kEll);
    row[0] = h.numerically_psd() ? 1.0 : 0.0;
    const HermitianMatrix root = herm_sqrt(h);
    row[1] = (root.matrix() * root.matrix() - h.matrix()).norm() / h.matrix().norm();
  });
  const auto psd = column(checks, 2, 0);
  const auto root_err = column(checks, 2, 1);
  const double psd_count = std::accumulate(psd.begin(), psd.end(), 0.0);
  reports.push_back(report("toeplitz matrix Hermitian and numerically PSD", samples, psd_count,
                           static_cast<double>(samples), 0.0, psd_count == static_cast<double>(samples)));
  const double worst_root = *std::max_element(root_err.begin(), root_err.end());
  reports.push_back(report("(sqrt H)^2 = H, max relative Frobenius error", samples, worst_root, 0.0, 0.0,
                           worst_root <= 1e-9));

  // Covariance of the limit sampler for one realized H (ell = 2).
  GaussianStream stream(base.child({1}));
  const GridMeasure mu = mu_grid(draw_gaussians(n, stream), n, 1.0, m_points);
  const HermitianMatrix h = toeplitz_h(mu, 2);
  const HermitianMatrix root = herm_sqrt(h);
  const auto dim = static_cast<std::size_t>(h.dim());
  const std::size_t draws = pick(ctx, 100000, 20000);
  // Row: Re and Im of v_j conj(v_k) for j <= k.
  std::vector<std::pair<std::size_t, std::size_t>> entries;
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j; k < dim; ++k) entries.emplace_back(j, k);
  }
  const auto prods = replicate(draws, 2 * entries.size(), ctx.workers, [&](std::size_t i, std::span<double> row) {
    GaussianStream s(base.child({2, i}));
    const Eigen::VectorXcd v = sample_with_root(root, s);
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const cplx p = v(static_cast<Eigen::Index>(entries[e].first)) * std::conj(v(static_cast<Eigen::Index>(entries[e].second)));
      row[2 * e] = p.real();
      row[2 * e + 1] = p.imag();
    }
  });
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto [j, k] = entries[e];
    const cplx target = h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    const std::string tag = "(" + std::to_string(j) + "," + std::to_string(k) + ")";
    reports.push_back(within_se("sampler covariance Re " + tag, draws, mean_se(column(prods, 2 * entries.size(), 2 * e)),
                                target.real(), 3.0));
    if (j != k) {
      reports.push_back(within_se("sampler covariance Im " + tag, draws,
                                  mean_se(column(prods, 2 * entries.size(), 2 * e + 1)), target.imag(), 3.0));
    }
  }
  return finish(11, "toeplitz moment matrix and limit sampler", std::move(reports), t0, 120.0);
}

// ---------------------------------------------------------------------------

std::vector<int> criteria_for(const std::string& experiment) {
  if (experiment == "coeffs") return {1, 2, 3};
  if (experiment == "parseval") return {4};
  if (experiment == "dickman") return {5};
  if (experiment == "limit") return {6};
  if (experiment == "convergence") return {7};
  if (experiment == "split") return {8};
  if (experiment == "cue") return {9};
  if (experiment == "gmc") return {10, 11};
  if (experiment == "verify-all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  throw SchemaError("experiment: unknown experiment '" + experiment + "'");
}

CriterionResult run_criterion(int id, const RunContext& ctx) {
  switch (id) {
    case 1: return check_series_oracle(ctx);
    case 2: return check_exact_moments(ctx);
    case 3: return check_restricted_triangle(ctx);
    case 4: return check_parseval(ctx);
    case 5: return check_dickman(ctx);
    case 6: return check_limit_law(ctx);
    case 7: return check_convergence(ctx);
    case 8: return check_split(ctx);
    case 9: return check_cue(ctx);
    case 10: return check_gmc(ctx);
    case 11: return check_toeplitz(ctx);
    default: throw DomainError("run_criterion: id must lie in 1..11");
  }
}

// ---------------------------------------------------------------------------
// Configuration.

namespace {

template <class T>
T typed(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw SchemaError(key + ": value has the wrong type");
  }
}

std::size_t non_negative(const json& j, const std::string& key) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw SchemaError(key + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("config: top level must be an object");
  static const std::set<std::string> known{"experiment", "n_grid", "replicas", "seed", "L",
                                           "m_points",   "output_dir", "workers", "profile"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw SchemaError("unknown configuration key '" + item.key() + "'");
  }
  ExperimentConfig c;
  if (j.contains("experiment")) c.experiment = typed<std::string>(j["experiment"], "experiment");
  if (j.contains("n_grid")) {
    if (!j["n_grid"].is_array()) throw SchemaError("n_grid: expected an array of integers");
    c.n_grid.clear();
    for (const auto& v : j["n_grid"]) c.n_grid.push_back(non_negative(v, "n_grid"));
  }
  if (j.contains("replicas")) c.replicas = non_negative(j["replicas"], "replicas");
  if (j.contains("seed")) c.seed = non_negative(j["seed"], "seed");
  if (j.contains("L")) c.L = non_negative(j["L"], "L");
  if (j.contains("m_points")) c.m_points = non_negative(j["m_points"], "m_points");
  if (j.contains("output_dir")) c.output_dir = typed<std::string>(j["output_dir"], "output_dir");
  if (j.contains("workers")) c.workers = static_cast<unsigned>(non_negative(j["workers"], "workers"));
  if (j.contains("profile")) c.profile = typed<std::string>(j["profile"], "profile");
  return c;
}

json ExperimentConfig::to_json() const {
  return json{{"experiment", experiment}, {"n_grid", n_grid},         {"replicas", replicas},
              {"seed", seed},             {"L", L},                   {"m_points", m_points},
              {"output_dir", output_dir}, {"workers", workers},       {"profile", profile}};
}

ExperimentConfig ExperimentConfig::resolve() const {
  ExperimentConfig c = *this;
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    throw SchemaError("experiment: unknown experiment '" + c.experiment + "'");
  }
  const Profile prof = parse_profile(c.profile);
  const bool full = prof == Profile::kFull;
  if (c.workers < 1) throw SchemaError("workers: must be at least 1");
  if (c.replicas == 0) {
    static const std::map<std::string, std::pair<std::size_t, std::size_t>> defaults{
        {"coeffs", {100000, 10000}}, {"split", {2000, 300}},    {"gmc", {2000, 500}},
        {"cue", {5000, 1000}},       {"dickman", {100000, 20000}}, {"limit", {1000000, 100000}},
        {"parseval", {50, 50}},      {"convergence", {10000, 1000}}, {"verify-all", {0, 0}}};
    const auto d = defaults.at(c.experiment);
    c.replicas = full ? d.first : d.second;
  }
  if (c.n_grid.empty()) {
    if (c.experiment == "coeffs") c.n_grid = full ? std::vector<std::size_t>{8, 64, 512} : std::vector<std::size_t>{8, 64};
    else if (c.experiment == "convergence") c.n_grid = full ? std::vector<std::size_t>{256, 4096, 65536}
                                                            : std::vector<std::size_t>{64, 512, 4096};
    else if (c.experiment == "split") c.n_grid = {full ? std::size_t{4096} : std::size_t{1024}};
    else if (c.experiment == "gmc") c.n_grid = {4096};
    else if (c.experiment == "parseval") c.n_grid = {32, 128};
  }
  for (std::size_t n : c.n_grid) {
    if (n < 2) throw SchemaError("n_grid: every index must be at least 2");
  }
  if (c.L == 0 && c.experiment == "split") c.L = 64;
  if (c.L != 0 && c.L < 2) throw SchemaError("L: must be at least 2");
  if (c.experiment == "gmc" && c.m_points == 0) c.m_points = 8 * c.n_grid.front();
  if (c.experiment == "gmc" && c.m_points < 2 * c.n_grid.front() + 2) {
    throw SchemaError("m_points: must be at least 2n + 2");
  }
  if (c.experiment != "verify-all" && c.replicas < 1) throw SchemaError("replicas: must be at least 1");
  return c;
}

// ---------------------------------------------------------------------------
// Manifest and run.

void to_json(json& j, const CriterionResult& c) {
  j = json{{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"seconds", c.seconds}, {"reports", c.reports}};
}

std::vector<TestReport> RunManifest::reports() const {
  std::vector<TestReport> out;
  for (const auto& c : criteria) out.insert(out.end(), c.reports.begin(), c.reports.end());
  return out;
}

json RunManifest::to_json() const {
  return json{{"config", config},
              {"version", version},
              {"wall_seconds", wall_seconds},
              {"criteria", criteria},
              {"reports", reports()},
              {"pass", pass}};
}

RunManifest run(const ExperimentConfig& config) {
  const auto t0 = Clock::now();
  const ExperimentConfig c = config.resolve();
  std::error_code ec;
  std::filesystem::create_directories(c.output_dir, ec);
  if (ec || !std::filesystem::is_directory(c.output_dir)) {
    throw IoError("cannot create output directory " + c.output_dir);
  }

  RunContext ctx;
  ctx.seed = Seed(c.seed);
  ctx.workers = c.workers;
  ctx.profile = parse_profile(c.profile);
  // verify-all runs each criterion at its own defaults; single experiments
  // honor the overrides.
  if (c.experiment != "verify-all") {
    ctx.replicas = c.replicas;
    ctx.n_grid = c.n_grid;
    ctx.L = c.L;
    ctx.m_points = c.m_points;
  }
  ctx.output_dir = c.output_dir;

  RunManifest m;
  m.config = c.to_json();
  m.version = version();
  for (int id : criteria_for(c.experiment)) m.criteria.push_back(run_criterion(id, ctx));
  m.pass = std::all_of(m.criteria.begin(), m.criteria.end(), [](const CriterionResult& r) { return r.pass; });
  m.wall_seconds = seconds_since(t0);

  const std::string path = (std::filesystem::path(c.output_dir) / "manifest.json").string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << std::setw(2) << m.to_json() << '\n';
  if (!out) throw IoError("write failed for " + path);
  return m;
}

void emit_distribution_csv(const std::vector<double>& samples, const std::string& path) {
  if (samples.empty()) throw DomainError("emit_distribution_csv: no samples");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "value\n" << std::setprecision(17);
  for (double x : samples) out << x << '\n';
  if (!out) throw IoError("write failed for " + path);
}

std::vector<double> read_distribution_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  std::string line;
  if (!std::getline(in, line) || line != "value") throw IoError("missing `value` header in " + path);
  std::vector<double> out;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(std::stod(line));
  }
  return out;
}

}  // namespace hmclab
