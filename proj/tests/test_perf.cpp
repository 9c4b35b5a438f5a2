#include <catch2/catch_amalgamated.hpp>

#include "ssmperf/config_io.hpp"
#include "ssmperf/perf.hpp"

using namespace ssmperf;

namespace {

std::string repo(const char* rel) { return std::string(SSMPERF_REPO_DIR) + "/" + rel; }

ModelConfig cfg(const char* name) { return load_model_config(repo(name)); }

const HardwareConfig kHw;  // defaults match hw/edge-asic-default

}  // namespace

TEST_CASE("peak compute rates") {
  CHECK(peak_compute(kHw, OperatorKind::MatMul) == 512e9);
  CHECK(peak_compute(kHw, OperatorKind::Conv) == 512e9);
  CHECK(peak_compute(kHw, OperatorKind::Elementwise) == 8e9);
  CHECK(peak_compute(kHw, OperatorKind::Nonlinearity) == 8e9);
  CHECK(peak_compute(kHw, OperatorKind::ScanCombine) == 8e9);
  CHECK(ridge_oi(kHw) == 512.0 / 34.0);

  HardwareConfig bad = kHw;
  bad.mac_units = 0;
  CHECK_THROWS_AS(peak_compute(bad, OperatorKind::MatMul), ConfigError);
}

TEST_CASE("decode traffic approaches state-only as batch grows") {
  const ModelConfig c = cfg("configs/mamba2-880m");
  const WorkloadSpec w{Phase::Decode, 1, 1, Formulation::Sequential, 64};
  const OpTotals t = count_ops(build_layer_graph(c, w, OpConvention{}, data_widths(kHw)));

  WorkloadSpec huge = w;
  huge.batch = 1 << 30;
  const double traffic = traffic_per_token(t, huge, kHw);
  CHECK(traffic == Catch::Approx(static_cast<double>(t.state_bytes_per_token)).epsilon(1e-3));
}

TEST_CASE("prefill at L=1 pays the full weight traffic") {
  const ModelConfig c = cfg("configs/mamba2-15m");
  const WorkloadSpec w{Phase::Prefill, 1, 1, Formulation::Sequential, 64};
  const OpTotals t = count_ops(build_layer_graph(c, w, OpConvention{}, data_widths(kHw)));
  const double traffic = traffic_per_token(t, w, kHw);
  // single-token working set fits SRAM: no activation spill
  CHECK(traffic == static_cast<double>(t.weight_bytes_total));
}

TEST_CASE("zero-op workloads are reported as a condition, not a number") {
  OpTotals empty;
  const WorkloadSpec w{Phase::Prefill, 1, 2048, Formulation::Sequential, 64};
  CHECK_THROWS_AS(roofline_estimate(empty, w, kHw), EmptyWorkloadError);
}

TEST_CASE("roofline dominance and bound classification") {
  const ModelConfig c = cfg("configs/mamba2-880m");
  const WorkloadSpec w{Phase::Prefill, 1, 2048, Formulation::Sequential, 64};
  const LayerGraph g = build_layer_graph(c, w, OpConvention{}, data_widths(kHw));
  const OpTotals t = count_ops(g);
  const PerfEstimate e = roofline_estimate(t, w, kHw);

  const double compute_bound_s = t.total_ops_per_token / mac_peak(kHw);
  const double memory_bound_s = traffic_per_token(t, w, kHw) / kHw.dram_bw_bytes_per_s;
  CHECK(e.latency_s_per_token >= compute_bound_s - 1e-15);
  CHECK(e.latency_s_per_token >= memory_bound_s - 1e-15);
  CHECK(e.latency_s_per_token == std::max(compute_bound_s, memory_bound_s));
  CHECK(e.throughput_tok_per_s == 1.0 / e.latency_s_per_token);
  CHECK(e.bound == (e.oi_ops_per_byte >= ridge_oi(kHw) ? Bound::ComputeBound
                                                       : Bound::MemoryBound));
  CHECK(e.bound == Bound::ComputeBound);  // prefill is compute-bound here
}

TEST_CASE("bound flips exactly at the ridge point") {
  // decode workload with weights only: OI = ops/weights
  WorkloadSpec w{Phase::Decode, 1, 1, Formulation::Sequential, 64};
  OpTotals t;
  t.layers = 1;
  t.total_ops_per_token = 512.0;  // ops
  t.state_bytes_per_token = 0;
  t.weight_bytes_total = 34;      // bytes -> OI exactly at ridge
  PerfEstimate at = roofline_estimate(t, w, kHw);
  CHECK(at.bound == Bound::ComputeBound);
  t.weight_bytes_total = 35;      // just past the ridge
  PerfEstimate past = roofline_estimate(t, w, kHw);
  CHECK(past.bound == Bound::MemoryBound);
}

TEST_CASE("energy is additive in compute and memory terms") {
  const ModelConfig c = cfg("configs/mamba2-880m");
  const WorkloadSpec w{Phase::Prefill, 1, 2048, Formulation::Sequential, 64};
  const OpTotals t = count_ops(build_layer_graph(c, w, OpConvention{}, data_widths(kHw)));
  const double traffic = traffic_per_token(t, w, kHw);

  const PerfEstimate base = roofline_estimate(t, w, kHw);
  HardwareConfig hot = kHw;
  hot.e_mem_pj_per_bit *= 2.0;
  const PerfEstimate doubled = roofline_estimate(t, w, hot);

  const double mem_term_mj = traffic * 8.0 * kHw.e_mem_pj_per_bit * 1e-12 * 1e3;
  const double op_term_mj = t.total_ops_per_token * kHw.e_op_pj * 1e-12 * 1e3;
  CHECK(base.energy_mj_per_token == Catch::Approx(op_term_mj + mem_term_mj).epsilon(1e-12));
  CHECK(doubled.energy_mj_per_token ==
        Catch::Approx(op_term_mj + 2.0 * mem_term_mj).epsilon(1e-12));
}

TEST_CASE("split-array composition serializes SIMD work") {
  const WorkloadSpec w{Phase::Prefill, 1, 2048, Formulation::Sequential, 64};
  for (const char* name : {"configs/mamba1-880m", "configs/mamba2-880m"}) {
    const ModelConfig c = cfg(name);
    const PerfEstimate fused = evaluate(c, w, kHw, CompositionMode::FusedMacDatapath);
    const PerfEstimate split = evaluate(c, w, kHw, CompositionMode::SplitArrays);
    CAPTURE(name);
    CHECK(split.latency_s_per_token >= fused.latency_s_per_token);
    CHECK(split.ops_per_token_gops == fused.ops_per_token_gops);
  }
  // the elementwise scan makes the gap dramatic for mamba1
  const PerfEstimate f1 = evaluate(cfg("configs/mamba1-880m"), w, kHw,
                                   CompositionMode::FusedMacDatapath);
  const PerfEstimate s1 = evaluate(cfg("configs/mamba1-880m"), w, kHw,
                                   CompositionMode::SplitArrays);
  CHECK(s1.throughput_tok_per_s < 0.5 * f1.throughput_tok_per_s);
}

TEST_CASE("hardware validation rejects non-positive fields") {
  for (auto mutate : std::vector<void (*)(HardwareConfig&)>{
           [](HardwareConfig& h) { h.simd_lanes = 0; },
           [](HardwareConfig& h) { h.clock_hz = 0.0; },
           [](HardwareConfig& h) { h.dram_bw_bytes_per_s = -1.0; },
           [](HardwareConfig& h) { h.e_op_pj = 0.0; },
           [](HardwareConfig& h) { h.act_bits = 0; }}) {
    HardwareConfig h = kHw;
    mutate(h);
    CHECK_THROWS_AS(validate(h), ConfigError);
  }
}

TEST_CASE("throughput is monotone in hardware resources") {
  const ModelConfig c = cfg("configs/mamba3-880m");
  const WorkloadSpec w{Phase::Prefill, 1, 2048, Formulation::Sequential, 64};
  auto tp = [&](const HardwareConfig& h) {
    return evaluate(c, w, h).throughput_tok_per_s;
  };
  HardwareConfig more_mac = kHw; more_mac.mac_units *= 2;
  HardwareConfig more_simd = kHw; more_simd.simd_lanes *= 2;
  HardwareConfig faster = kHw; faster.clock_hz *= 2;
  HardwareConfig wider = kHw; wider.dram_bw_bytes_per_s *= 2;
  CHECK(tp(more_mac) >= tp(kHw));
  CHECK(tp(more_simd) >= tp(kHw));
  CHECK(tp(faster) >= tp(kHw));
  CHECK(tp(wider) >= tp(kHw));
}

TEST_CASE("state-update fraction grows as models shrink") {
  auto su_fraction = [&](double size) {
    const ModelConfig ref = build_reference_config(static_cast<std::int64_t>(size));
    const WorkloadSpec w{Phase::Prefill, 1, 2048, Formulation::Sequential, 64};
    const OpTotals t = count_ops(build_layer_graph(ref, w));
    return t.state_update_ops_per_token / t.total_ops_per_token;
  };
  const double f15 = su_fraction(15e6), f125 = su_fraction(125e6), f880 = su_fraction(880e6);
  CHECK(f15 > f125);
  CHECK(f125 > f880);
}

TEST_CASE("regime comparison orders the variants per deployment target") {
  const std::vector<ModelConfig> cfgs{cfg("configs/mamba1-880m"), cfg("configs/mamba2-880m"),
                                      cfg("configs/mamba3-880m")};
  const auto edge = regime_table(cfgs, Scenario::EdgePrefill, kHw);
  REQUIRE(edge.size() == 3);
  CHECK(edge[0].normalized == 1.0);
  CHECK(edge[0].block_rate > edge[1].block_rate);
  CHECK(edge[1].block_rate > edge[2].block_rate);

  const auto decode = regime_table(cfgs, Scenario::HyperscaleDecode, kHw);
  CHECK(decode[0].block_rate < decode[1].block_rate);
  CHECK(decode[1].block_rate < decode[2].block_rate);
  const double oi_ratio = decode[2].decode_oi / decode[1].decode_oi;
  CHECK(oi_ratio > 3.2);
  CHECK(oi_ratio < 4.8);
}

TEST_CASE("single size, single variant normalizes to exactly 1") {
  const auto rows = sweep_model_size({125e6}, {VariantKind::Mamba2}, kHw);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].entries.size() == 1);
  CHECK(rows[0].entries[0].normalized == 1.0);
  CHECK(rows[0].entries[0].normalized_iso == 1.0);
}

TEST_CASE("batch sweep throughput is non-decreasing and approaches the limit") {
  const ModelConfig c = cfg("configs/mamba3-880m");
  const auto rows = sweep_batch(c, {1, 4, 16, 64, 256, 1024, 1 << 20}, kHw);
  for (size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i].estimate.throughput_tok_per_s >=
          rows[i - 1].estimate.throughput_tok_per_s - 1e-9);
  // asymptote: state-traffic (or compute) limited
  const WorkloadSpec w{Phase::Decode, 1, 1, Formulation::Sequential, 64};
  const OpTotals t = count_ops(build_layer_graph(c, w, OpConvention{}, data_widths(kHw)));
  const double limit = std::min(mac_peak(kHw) / t.total_ops_per_token,
                                kHw.dram_bw_bytes_per_s / static_cast<double>(t.state_bytes_per_token));
  CHECK(rows.back().estimate.throughput_tok_per_s == Catch::Approx(limit).epsilon(1e-3));
}

TEST_CASE("decode state traffic favors mamba3 at large batch") {
  // once weights amortize, the per-token memory floor is the state stream;
  // mamba3's matched config carries the smaller state
  const WorkloadSpec w{Phase::Decode, 1, 1, Formulation::Sequential, 64};
  const OpTotals t2 = count_ops(build_layer_graph(cfg("configs/mamba2-880m"), w,
                                                  OpConvention{}, data_widths(kHw)));
  const OpTotals t3 = count_ops(build_layer_graph(cfg("configs/mamba3-880m"), w,
                                                  OpConvention{}, data_widths(kHw)));
  CHECK(t3.state_bytes_per_token < t2.state_bytes_per_token);
  const double mem_limit2 = kHw.dram_bw_bytes_per_s / static_cast<double>(t2.state_bytes_per_token);
  const double mem_limit3 = kHw.dram_bw_bytes_per_s / static_cast<double>(t3.state_bytes_per_token);
  CHECK(mem_limit3 > mem_limit2);
}
