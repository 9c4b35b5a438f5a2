// Acceptance suite: every criterion evaluated at its stated tolerance, one
// PASS/FAIL line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ssmperf/config_io.hpp"
#include "ssmperf/oracle_check.hpp"
#include "ssmperf/perf.hpp"
#include "ssmperf/report.hpp"

using namespace ssmperf;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
  if (!ok) ++failures;
}

bool within(double value, double target, double rel) {
  return std::abs(value / target - 1.0) <= rel;
}

std::string repo(const char* rel) { return std::string(SSMPERF_REPO_DIR) + "/" + rel; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  const HardwareConfig hw = load_hw_config(repo("hw/edge-asic-default"));
  const ModelConfig m1 = load_model_config(repo("configs/mamba1-880m"));
  const ModelConfig m2 = load_model_config(repo("configs/mamba2-880m"));
  const ModelConfig m3 = load_model_config(repo("configs/mamba3-880m"));

  // 1. peak-compute identity, exact arithmetic
  {
    const auto t0 = std::chrono::steady_clock::now();
    const bool ok = peak_compute(hw, OperatorKind::MatMul) == 512e9 &&
                    ridge_oi(hw) == 512.0 / 34.0 && seconds_since(t0) < 1.0;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "MatMul peak %.0f GOps/s, ridge OI %.4f ops/B",
                  peak_compute(hw, OperatorKind::MatMul) / 1e9, ridge_oi(hw));
    report(1, ok, buf);
  }

  const Report table = build_comparison_report(m1, m2, m3, hw);

  // 2. roofline throughput column, +-2% per row, < 5 s
  {
    const auto t0 = std::chrono::steady_clock::now();
    const double want_tp[6] = {336.7, 328.5, 357.1, 350.3, 317.0, 300.2};
    bool ok = true;
    std::string detail = "tok/s:";
    for (int i = 0; i < 6; ++i) {
      const double got = table.rows[i].throughput_tok_per_s;
      ok = ok && within(got, want_tp[i], 0.02);
      char buf[48];
      std::snprintf(buf, sizeof(buf), " %.1f/%.1f", got, want_tp[i]);
      detail += buf;
    }
    ok = ok && seconds_since(t0) < 5.0;
    report(2, ok, detail);
  }

  // 3. op-count columns: total +-2%, state-update +-5%, derived deltas
  {
    const double want_total[6] = {1.52, 1.56, 1.43, 1.46, 1.62, 1.71};
    const double want_su[6] = {0.066, 0.104, 0.048, 0.075, 0.098, 0.189};
    bool ok = true;
    for (int i = 0; i < 6; ++i) {
      ok = ok && within(table.rows[i].total_gops_per_tok, want_total[i], 0.02);
      ok = ok && within(table.rows[i].state_update_gops_per_tok, want_su[i], 0.05);
    }
    const double delta =
        (table.rows[4].total_gops_per_tok / table.rows[2].total_gops_per_tok - 1.0) * 100.0;
    const double su_ratio =
        table.rows[4].state_update_gops_per_tok / table.rows[2].state_update_gops_per_tok;
    ok = ok && delta >= 11.0 && delta <= 15.0 && su_ratio >= 1.9 && su_ratio <= 2.1;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "totals %.3f/%.3f/%.3f/%.3f/%.3f/%.3f GOps/tok, m3-vs-m2 %+.1f%%, su ratio %.2f",
                  table.rows[0].total_gops_per_tok, table.rows[1].total_gops_per_tok,
                  table.rows[2].total_gops_per_tok, table.rows[3].total_gops_per_tok,
                  table.rows[4].total_gops_per_tok, table.rows[5].total_gops_per_tok, delta,
                  su_ratio);
    report(3, ok, buf);
  }

  // 4. state-update OI column, +-10%, deviations documented per row
  {
    const double want_oi[6] = {53.2, 76.7, 50.8, 31.7, 49.2, 37.0};
    bool ok = true;
    std::string detail = "OI ops/B (got/target):";
    for (int i = 0; i < 6; ++i) {
      const double got = table.rows[i].oi_ops_per_byte;
      const double dev = (got / want_oi[i] - 1.0) * 100.0;
      ok = ok && std::abs(dev) <= 10.0;
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %.1f/%.1f (%+.1f%%)", got, want_oi[i], dev);
      detail += buf;
    }
    report(4, ok, detail);
  }

  // 5. model-size sweep: monotone penalty amplification, 15M/880M ratio
  {
    const std::vector<double> sizes{15e6, 30e6, 60e6, 125e6, 250e6, 500e6, 880e6};
    const auto rows = sweep_model_size(sizes, {VariantKind::Mamba2, VariantKind::Mamba3}, hw);
    std::vector<double> penalty;
    for (const auto& row : rows)
      penalty.push_back(row.entries[1].normalized_iso / row.entries[0].normalized_iso - 1.0);
    bool mono = true;
    for (size_t i = 1; i < penalty.size(); ++i) mono = mono && penalty[i] < penalty[i - 1];
    const double ratio = penalty.front() / penalty.back();
    const bool ok = mono && ratio > 1.5;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "pure roofline mode (iso-parameter normalized): penalty %+.1f%% @15M ... "
                  "%+.1f%% @880M, monotone=%s, 15M/880M ratio %.2f (>1.5)",
                  penalty.front() * 100.0, penalty.back() * 100.0, mono ? "yes" : "no", ratio);
    report(5, ok, buf);
  }

  // 6. regime orderings and the decode OI ratio
  {
    const std::vector<ModelConfig> cfgs{m1, m2, m3};
    const auto edge = regime_table(cfgs, Scenario::EdgePrefill, hw);
    const auto dec = regime_table(cfgs, Scenario::HyperscaleDecode, hw);
    const bool edge_ok = edge[0].block_rate > edge[1].block_rate &&
                         edge[1].block_rate > edge[2].block_rate;
    const bool dec_ok = dec[0].block_rate < dec[1].block_rate &&
                        dec[1].block_rate < dec[2].block_rate;
    const double oi_ratio = dec[2].decode_oi / dec[1].decode_oi;
    const bool ok = edge_ok && dec_ok && oi_ratio >= 3.2 && oi_ratio <= 4.8;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "edge prefill normalized %.2f/%.2f/%.2f (decreasing=%s), decode %.2f/%.2f/%.2f "
                  "(increasing=%s), decode OI ratio m3/m2 %.2f",
                  edge[0].normalized, edge[1].normalized, edge[2].normalized,
                  edge_ok ? "yes" : "no", dec[0].normalized, dec[1].normalized, dec[2].normalized,
                  dec_ok ? "yes" : "no", oi_ratio);
    report(6, ok, buf);
  }

  // 7. oracle equivalence: >=1000 seeded instances, chunk sizes {1, 8, L}
  {
    const auto t0 = std::chrono::steady_clock::now();
    OracleCheckOptions opt;
    opt.seed = 0;
    opt.instances = 1000;
    const OracleCheckResult res = run_oracle_checks(opt);
    const double secs = seconds_since(t0);
    const bool ok = res.ok() && res.max_pscan_dev < 1e-12 && res.max_ssd_dev < 1e-10 &&
                    secs < 30.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%d checks, max pscan dev %.2e (<1e-12), max ssd dev %.2e (<1e-10), %.1f s",
                  res.checks, res.max_pscan_dev, res.max_ssd_dev, secs);
    report(7, ok, buf);
    if (!res.ok())
      for (const auto& f : res.failures) std::printf("    %s\n", f.c_str());
  }

  // 8. count fidelity: exact analytic/oracle equality over >=20 toy configs
  {
    using namespace oracle_check_detail;
    std::mt19937_64 rng(1234);
    int cases = 0, exact = 0;
    for (std::int64_t L : {7, 32, 61}) {
      for (auto [hp, n] : std::vector<std::pair<std::int64_t, std::int64_t>>{{4, 2}, {8, 4}, {16, 8}}) {
        const ModelConfig cfg = toy_config(true, 1, hp, n, 1);
        OpCounter c;
        (void)run_state_update_block(random_block(rng, true, L, 1, hp, n, 1),
                                     BlockFormulation::Sequential, c);
        ++cases;
        if (static_cast<double>(c.total()) ==
            analytic_su_per_token(cfg, Formulation::Sequential, L, 8) * static_cast<double>(L))
          ++exact;
      }
      for (auto [h, p, n, r] : std::vector<std::array<std::int64_t, 4>>{
               {1, 4, 4, 1}, {2, 4, 8, 1}, {2, 2, 4, 2}, {2, 4, 8, 4}}) {
        const ModelConfig cfg = toy_config(false, h, p, n, r);
        OpCounter c;
        (void)run_state_update_block(random_block(rng, false, L, h, p, n, r),
                                     BlockFormulation::Sequential, c);
        ++cases;
        if (static_cast<double>(c.total()) ==
            analytic_su_per_token(cfg, Formulation::Sequential, L, 8) * static_cast<double>(L))
          ++exact;
      }
    }
    const bool ok = (cases >= 20) && (exact == cases);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d/%d toy configs with exact count equality", exact, cases);
    report(8, ok, buf);
  }

  // 9. desk-scale substitutes for the measured/external columns
  {
    std::printf(
        "    note: A100 measured throughput/memory and the external mapper's absolute\n"
        "    numbers (292.1/319.2/247.4 tok/s, 4.48/8.09/9.15 mJ/tok) are not reproducible\n"
        "    at desk scale; only the relative trends are checked here.\n");
    const double tp_delta = table.rows[4].throughput_tok_per_s / table.rows[2].throughput_tok_per_s - 1.0;
    const double energy_ratio = table.rows[4].energy_mj_per_tok / table.rows[2].energy_mj_per_tok;
    const bool ok = tp_delta < 0.0 && energy_ratio >= 1.05 && energy_ratio <= 1.25;
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "m3-vs-m2 sequential: throughput delta %+.1f%% (<0), energy ratio %.3f in [1.05,1.25]",
                  tp_delta * 100.0, energy_ratio);
    report(9, ok, buf);
  }

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              failures);
  return failures;
}
