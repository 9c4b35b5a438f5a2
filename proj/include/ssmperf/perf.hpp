#pragma once

// Roofline/energy evaluation of operator graphs against a parameterized edge
// accelerator, plus the state-update regime comparison and the parameter
// sweeps.
//
// Composition modes:
//   FusedMacDatapath (default): the whole layer streams through the MAC
//     array's datapath at its peak; pointwise nonlinearities run in the
//     datapath's LUT stage at line rate. This is the model behind the
//     reference throughput tables.
//   SplitArrays: MatMul/Conv ops run on the MAC array, everything else on
//     the SIMD array, serialized (the MAC array idles during SIMD work).
//
// Traffic model (DRAM bytes per token):
//   Prefill: weights stream once per pass (amortized over seq_len);
//     inter-operator activation tensors spill when their L-deep working set
//     exceeds SRAM; the recurrent state stays on-chip.
//   Decode: weights amortize over the batch; the recurrent state is read and
//     written once per token per sequence; boundary activations are
//     negligible and not counted.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "archspec.hpp"
#include "opgraph.hpp"

namespace ssmperf {

struct EmptyWorkloadError : std::runtime_error {
  explicit EmptyWorkloadError(const std::string& what) : std::runtime_error(what) {}
};

struct HardwareConfig {
  std::int64_t mac_units = 1024;
  std::int64_t simd_lanes = 32;
  double clock_hz = 250e6;
  std::int64_t sram_bytes = 2 * 1024 * 1024;
  double dram_bw_bytes_per_s = 34e9;
  double e_mem_pj_per_bit = 15.0;
  double e_op_pj = 2.0;
  std::int64_t weight_bits = 16;
  std::int64_t act_bits = 16;
  std::int64_t state_bits = 16;
};

inline void validate(const HardwareConfig& h) {
  auto fail = [](const std::string& m) { throw ConfigError("hardware config: " + m); };
  if (h.mac_units < 1) fail("mac_units must be positive");
  if (h.simd_lanes < 1) fail("simd_lanes must be positive");
  if (h.clock_hz <= 0) fail("clock_hz must be positive");
  if (h.sram_bytes < 1) fail("sram_bytes must be positive");
  if (h.dram_bw_bytes_per_s <= 0) fail("dram_bw_bytes_per_s must be positive");
  if (h.e_mem_pj_per_bit <= 0) fail("e_mem_pj_per_bit must be positive");
  if (h.e_op_pj <= 0) fail("e_op_pj must be positive");
  if (h.weight_bits < 1 || h.act_bits < 1 || h.state_bits < 1) fail("datatype bits must be positive");
}

inline DataWidths data_widths(const HardwareConfig& h) {
  return DataWidths{h.weight_bits / 8, h.act_bits / 8, h.state_bits / 8};
}

// Peak rate of one engine for a given operator kind, ops/s.
inline double peak_compute(const HardwareConfig& h, OperatorKind kind) {
  validate(h);
  if (kind == OperatorKind::MatMul || kind == OperatorKind::Conv)
    return static_cast<double>(h.mac_units) * 2.0 * h.clock_hz;
  return static_cast<double>(h.simd_lanes) * h.clock_hz;  // 1 op per lane-cycle
}

inline double mac_peak(const HardwareConfig& h) { return peak_compute(h, OperatorKind::MatMul); }
inline double simd_peak(const HardwareConfig& h) { return peak_compute(h, OperatorKind::Elementwise); }

// OI at which compute time equals memory time on the MAC roof.
inline double ridge_oi(const HardwareConfig& h) { return mac_peak(h) / h.dram_bw_bytes_per_s; }

enum class Bound { ComputeBound, MemoryBound };

enum class CompositionMode { FusedMacDatapath, SplitArrays };

struct PerfEstimate {
  double ops_per_token_gops = 0.0;
  double state_update_ops_gops = 0.0;
  double oi_ops_per_byte = 0.0;
  double throughput_tok_per_s = 0.0;
  double latency_s_per_token = 0.0;
  double energy_mj_per_token = 0.0;
  Bound bound = Bound::ComputeBound;
};

// DRAM bytes per token under the documented traffic model.
inline double traffic_per_token(const OpTotals& t, const WorkloadSpec& w,
                                const HardwareConfig& hw) {
  validate(hw);
  double bytes = 0.0;
  if (w.phase == Phase::Prefill) {
    bytes += static_cast<double>(t.weight_bytes_total) / static_cast<double>(w.seq_len);
    if (t.layers > 0) {
      // live working set proxy: mean inter-operator tensor, L tokens deep
      const double mean_tensor =
          static_cast<double>(t.act_bytes_per_token) / (2.0 * static_cast<double>(t.layers));
      if (static_cast<double>(w.seq_len) * mean_tensor > static_cast<double>(hw.sram_bytes))
        bytes += static_cast<double>(t.act_bytes_per_token);
    }
    // recurrent state stays resident on-chip during the pass
  } else {
    bytes += static_cast<double>(t.weight_bytes_total) / static_cast<double>(w.batch);
    bytes += static_cast<double>(t.state_bytes_per_token);
  }
  return bytes;
}

inline PerfEstimate roofline_estimate(const OpTotals& t, const WorkloadSpec& w,
                                      const HardwareConfig& hw,
                                      CompositionMode mode = CompositionMode::FusedMacDatapath) {
  validate(hw);
  if (t.total_ops_per_token <= 0.0)
    throw EmptyWorkloadError("roofline_estimate: workload has no operations");
  double compute_s = 0.0;
  if (mode == CompositionMode::FusedMacDatapath) {
    compute_s = t.total_ops_per_token / mac_peak(hw);
  } else {
    compute_s = t.mac_array_ops_per_token / mac_peak(hw) +
                t.simd_ops_per_token / simd_peak(hw);
  }
  const double traffic = traffic_per_token(t, w, hw);
  const double memory_s = traffic / hw.dram_bw_bytes_per_s;

  PerfEstimate e;
  e.ops_per_token_gops = t.total_ops_per_token / 1e9;
  e.state_update_ops_gops = t.state_update_ops_per_token / 1e9;
  e.latency_s_per_token = std::max(compute_s, memory_s);
  e.throughput_tok_per_s = 1.0 / e.latency_s_per_token;
  e.oi_ops_per_byte = traffic > 0 ? t.total_ops_per_token / traffic
                                  : std::numeric_limits<double>::infinity();
  e.energy_mj_per_token =
      (t.total_ops_per_token * hw.e_op_pj * 1e-12 + traffic * 8.0 * hw.e_mem_pj_per_bit * 1e-12) *
      1e3;
  e.bound = (e.oi_ops_per_byte >= ridge_oi(hw)) ? Bound::ComputeBound : Bound::MemoryBound;
  return e;
}

// State-update block OI per the table's footnote: block ops over the fused
// kernel's boundary traffic.
inline double su_block_oi(const OpTotals& t) {
  if (t.su_block_act_bytes_per_token <= 0) return 0.0;
  return t.state_update_ops_per_token / static_cast<double>(t.su_block_act_bytes_per_token);
}

// Convenience: full evaluation of one (config, workload) pair.
inline PerfEstimate evaluate(const ModelConfig& c, const WorkloadSpec& w,
                             const HardwareConfig& hw,
                             CompositionMode mode = CompositionMode::FusedMacDatapath) {
  const LayerGraph g = build_layer_graph(c, w, OpConvention{}, data_widths(hw));
  return roofline_estimate(count_ops(g), w, hw, mode);
}

// ---------------------------------------------------------------------------
// State-update block regime comparison (the two deployment regimes).

enum class Scenario { EdgePrefill, HyperscaleDecode };

struct RegimeEntry {
  VariantKind variant;
  double block_rate = 0.0;   // state-update blocks (layer-tokens) per second
  double normalized = 0.0;   // relative to the Mamba-1 entry
  double decode_oi = 0.0;    // ops per state byte (HyperscaleDecode only)
};

// Raw per-layer state-update block throughput for one variant.
//   EdgePrefill: B=1, parallel formulation on the MAC array, state on-chip.
//   HyperscaleDecode: B >> 1, sequential step; the per-channel (diagonal)
//   scan of Mamba-1 is elementwise SIMD-class work, the outer-product and
//   MIMO updates of Mamba-2/3 are MAC-class; state streams from DRAM.
inline RegimeEntry state_update_regime_throughput(const ModelConfig& c, Scenario sc,
                                                  const HardwareConfig& hw,
                                                  std::int64_t seq_len = 2048) {
  validate(hw);
  RegimeEntry r;
  r.variant = c.variant;
  if (sc == Scenario::EdgePrefill) {
    WorkloadSpec w{Phase::Prefill, 1, seq_len,
                   c.variant == VariantKind::Mamba1 ? Formulation::PScan : Formulation::SSD,
                   calibrated_chunk_size(c.variant)};
    const OpTotals t = count_ops(build_layer_graph(c, w, OpConvention{}, data_widths(hw)));
    if (t.layers == 0 || t.state_update_ops_per_token <= 0)
      throw EmptyWorkloadError("regime throughput: empty state-update block");
    const double su_layer = t.state_update_ops_per_token / static_cast<double>(t.layers);
    r.block_rate = mac_peak(hw) / su_layer;
    return r;
  }
  WorkloadSpec w{Phase::Decode, 1, 1, Formulation::Sequential, 64};
  const OpTotals t = count_ops(build_layer_graph(c, w, OpConvention{}, data_widths(hw)));
  if (t.layers == 0 || t.state_update_ops_per_token <= 0)
    throw EmptyWorkloadError("regime throughput: empty state-update block");
  const double su_layer = t.state_update_ops_per_token / static_cast<double>(t.layers);
  const double state_layer = static_cast<double>(t.state_bytes_per_token) / static_cast<double>(t.layers);
  const double engine = (c.variant == VariantKind::Mamba1) ? simd_peak(hw) : mac_peak(hw);
  const double latency = std::max(su_layer / engine, state_layer / hw.dram_bw_bytes_per_s);
  r.block_rate = 1.0 / latency;
  r.decode_oi = su_layer / state_layer;
  return r;
}

// Normalized comparison across variants; the first Mamba-1 entry is the
// normalization reference.
inline std::vector<RegimeEntry> regime_table(const std::vector<ModelConfig>& configs, Scenario sc,
                                             const HardwareConfig& hw) {
  std::vector<RegimeEntry> rows;
  rows.reserve(configs.size());
  for (const auto& c : configs) rows.push_back(state_update_regime_throughput(c, sc, hw));
  double base = rows.empty() ? 1.0 : rows.front().block_rate;
  for (const auto& r : rows)
    if (r.variant == VariantKind::Mamba1) { base = r.block_rate; break; }
  for (auto& r : rows) r.normalized = r.block_rate / base;
  return rows;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct SizeSweepEntry {
  double target_params = 0.0;
  ModelConfig config;
  std::int64_t achieved_params = 0;
  double latency_s = 0.0;
  double normalized = 0.0;      // latency / Mamba-2 latency at the same size
  double normalized_iso = 0.0;  // additionally corrected to iso-parameter count
};

struct SizeSweepRow {
  double target_params = 0.0;
  std::vector<SizeSweepEntry> entries;  // one per requested variant
};

// Parameter-matched model-size sweep (prefill, B=1). Latency per token from
// the roofline; each size row is normalized to the Mamba-2 entry. The
// iso-parameter column divides out the +-2% matching granularity so the
// normalized series reflects structure, not match rounding.
inline std::vector<SizeSweepRow> sweep_model_size(const std::vector<double>& sizes,
                                                  const std::vector<VariantKind>& variants,
                                                  const HardwareConfig& hw,
                                                  std::int64_t seq_len = 2048) {
  std::vector<SizeSweepRow> out;
  for (double size : sizes) {
    if (size < 1e6) throw MatchingError("sweep_model_size: sizes must be >= 1M parameters");
    SizeSweepRow row;
    row.target_params = size;
    const ModelConfig ref = build_reference_config(static_cast<std::int64_t>(size));
    const WorkloadSpec w{Phase::Prefill, 1, seq_len, Formulation::Sequential, 64};
    double m2_lat = 0.0, m2_params = 0.0;
    {
      const PerfEstimate e = evaluate(ref, w, hw);
      m2_lat = e.latency_s_per_token;
      m2_params = static_cast<double>(param_count(ref));
    }
    for (VariantKind v : variants) {
      SizeSweepEntry entry;
      entry.target_params = size;
      entry.config = (v == VariantKind::Mamba2) ? ref : match_param_count(v, ref);
      entry.achieved_params = param_count(entry.config);
      entry.latency_s = evaluate(entry.config, w, hw).latency_s_per_token;
      entry.normalized = entry.latency_s / m2_lat;
      entry.normalized_iso = (entry.latency_s / static_cast<double>(entry.achieved_params)) /
                             (m2_lat / m2_params);
      row.entries.push_back(std::move(entry));
    }
    out.push_back(std::move(row));
  }
  return out;
}

struct BatchSweepEntry {
  std::int64_t batch = 0;
  PerfEstimate estimate;
};

// Decode-phase batch sweep; throughput is aggregate tokens/s across the
// batch and is non-decreasing in B by weight amortization.
inline std::vector<BatchSweepEntry> sweep_batch(const ModelConfig& c,
                                                const std::vector<std::int64_t>& batches,
                                                const HardwareConfig& hw) {
  std::vector<BatchSweepEntry> out;
  for (std::int64_t b : batches) {
    WorkloadSpec w{Phase::Decode, b, 1, Formulation::Sequential, 64};
    const LayerGraph g = build_layer_graph(c, w, OpConvention{}, data_widths(hw));
    const OpTotals t = count_ops(g);
    PerfEstimate e = roofline_estimate(t, w, hw);
    // per-step latency covers the whole batch; aggregate throughput scales by B
    const double step_compute = t.total_ops_per_token * static_cast<double>(b) / mac_peak(hw);
    const double step_traffic = static_cast<double>(t.weight_bytes_total) +
                                static_cast<double>(t.state_bytes_per_token) * static_cast<double>(b);
    const double step_latency = std::max(step_compute, step_traffic / hw.dram_bw_bytes_per_s);
    e.latency_s_per_token = step_latency / static_cast<double>(b);
    e.throughput_tok_per_s = 1.0 / e.latency_s_per_token;
    e.oi_ops_per_byte = t.total_ops_per_token * static_cast<double>(b) / step_traffic;
    e.bound = (e.oi_ops_per_byte >= ridge_oi(hw)) ? Bound::ComputeBound : Bound::MemoryBound;
    e.energy_mj_per_token = (t.total_ops_per_token * hw.e_op_pj * 1e-12 +
                             step_traffic / static_cast<double>(b) * 8.0 * hw.e_mem_pj_per_bit * 1e-12) * 1e3;
    out.push_back({b, e});
  }
  return out;
}

}  // namespace ssmperf
