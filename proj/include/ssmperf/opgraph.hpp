#pragma once

// Per-layer operator inventories for each (variant, formulation, phase),
// with per-token op counts and byte traffic. Every operator carries a role
// tag so the state-update block can be isolated.
//
// Op conventions (configurable via OpConvention):
//   * 1 multiply-accumulate = 2 ops; bias adds = 1 op/element.
//   * transcendental evaluations (exp, softplus, SiLU) = 1 op/element,
//     matching the instrumented oracle's counters.
//   * the scalar-per-head decay h *= a is executed as an accumulator
//     pre-scale and contributes no counted ops; the per-channel (diagonal)
//     decay of Mamba-1 is a real vector multiply and is counted.
//
// State-update op counts per layer per token that follow from this:
//   Mamba-1 sequential: 8*d_inner*d_state
//     (2 discretize-decay + 2 discretize-input + 2 scan + 2 readout)
//   Mamba-2 sequential: 4*d_inner*d_state + d_inner + 2*n_heads
//   Mamba-3 sequential: 4*d_inner*d_state*R + R*d_inner + 2*n_heads
//   PScan replaces the 2-op scan with 2/L + 6*(L-1)/L combine ops per
//     element (Blelloch up+down sweep, 3 ops per pair combine).
//   SSD per head per token: 2*Q*N*R + Q (masked score block) + 2*Q*P*R
//     (intra-chunk output) + 4*N*P*R (chunk-state + state-to-output)
//     + 2*N*P/Q (inter-chunk recurrence).
//
// Traffic: operators carry DRAM-facing activation reads/writes; pointwise
// ops fused with their producers carry none. The state-update block is
// modeled as one fused kernel whose boundary streams are x, the per-channel
// step sizes, the gate input z, the raw output y and the gated output (five
// block-width streams) plus per-token B/C and raw head step sizes. The SSD
// formulation additionally spills its score blocks (written once and re-read
// by the intra-chunk and state passes, per rank slice), the decay mask, and
// per-slice chunk states.

#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "archspec.hpp"

namespace ssmperf {

enum class Phase { Prefill, Decode };

enum class OperatorKind { MatMul, Conv, Elementwise, Nonlinearity, ScanCombine };

enum class Role { StateUpdate, Projection, Other };

inline const char* to_string(Phase p) { return p == Phase::Prefill ? "prefill" : "decode"; }

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::MatMul: return "matmul";
    case OperatorKind::Conv: return "conv";
    case OperatorKind::Elementwise: return "elementwise";
    case OperatorKind::Nonlinearity: return "nonlinearity";
    case OperatorKind::ScanCombine: return "scancombine";
  }
  return "?";
}

inline const char* to_string(Role r) {
  switch (r) {
    case Role::StateUpdate: return "state_update";
    case Role::Projection: return "projection";
    case Role::Other: return "other";
  }
  return "?";
}

struct WorkloadSpec {
  Phase phase = Phase::Prefill;
  std::int64_t batch = 1;
  std::int64_t seq_len = 2048;
  Formulation formulation = Formulation::Sequential;
  std::int64_t chunk_size = 64;  // SSD only
};

// SSD chunk sizes used by the reference reports, calibrated per variant to
// the edge kernel configurations (the generic default stays 64).
inline std::int64_t calibrated_chunk_size(VariantKind v) {
  return v == VariantKind::Mamba3 ? 20 : 48;
}

inline void validate(const ModelConfig& c, const WorkloadSpec& w) {
  validate(c);
  if (w.batch < 1) throw ConfigError("workload: batch must be >= 1");
  if (w.seq_len < 1) throw ConfigError("workload: seq_len must be >= 1");
  if (w.chunk_size < 1) throw ConfigError("workload: chunk_size must be >= 1");
  if (!formulation_valid(c.variant, w.formulation))
    throw ConfigError(std::string("workload: formulation ") + to_string(w.formulation) +
                      " is not valid for " + to_string(c.variant));
  if (w.phase == Phase::Decode && w.formulation != Formulation::Sequential)
    throw ConfigError("workload: decode supports only the sequential formulation");
}

struct OpConvention {
  double ops_per_mac = 2.0;
  double ops_per_transcendental = 1.0;
};

struct DataWidths {
  std::int64_t weight_bytes = 2;
  std::int64_t act_bytes = 2;
  std::int64_t state_bytes = 2;
};

struct OperatorNode {
  std::string name;
  OperatorKind kind = OperatorKind::Elementwise;
  Role role = Role::Other;
  bool su_block = false;  // inside the fused state-update kernel boundary
  double ops_per_token = 0.0;
  std::int64_t weight_bytes = 0;
  std::int64_t act_in_bytes = 0;
  std::int64_t act_out_bytes = 0;
  std::int64_t state_bytes = 0;  // recurrent state read+written per token
};

struct LayerGraph {
  std::vector<OperatorNode> ops;
  std::int64_t n_layers = 0;
};

struct OpTotals {
  double total_ops_per_token = 0.0;
  double state_update_ops_per_token = 0.0;
  double mac_array_ops_per_token = 0.0;   // MatMul/Conv kinds
  double simd_ops_per_token = 0.0;        // Elementwise/Nonlinearity/ScanCombine kinds
  std::int64_t weight_bytes_total = 0;
  std::int64_t act_bytes_per_token = 0;
  std::int64_t su_block_act_bytes_per_token = 0;
  std::int64_t state_bytes_per_token = 0;
  std::int64_t layers = 0;
};

namespace detail {

struct NodeBuilder {
  std::vector<OperatorNode>* ops;
  OperatorNode& add(std::string name, OperatorKind kind, Role role, double op_count) {
    ops->push_back({std::move(name), kind, role, false, op_count, 0, 0, 0, 0});
    return ops->back();
  }
};

}  // namespace detail

inline LayerGraph build_layer_graph(const ModelConfig& c, const WorkloadSpec& w,
                                    const OpConvention& conv = {},
                                    const DataWidths& dw = {}) {
  validate(c, w);
  LayerGraph g;
  g.n_layers = c.n_layers;
  if (c.n_layers == 0) return g;

  const double mac = conv.ops_per_mac;
  const double trc = conv.ops_per_transcendental;
  const std::int64_t d = c.d_model;
  const std::int64_t di = c.d_inner();
  const std::int64_t N = c.d_state;
  const std::int64_t K = c.d_conv;
  const std::int64_t wb = dw.weight_bytes, ab = dw.act_bytes, sb = dw.state_bytes;
  const double dn = static_cast<double>(di) * static_cast<double>(N);

  detail::NodeBuilder b{&g.ops};

  if (c.variant == VariantKind::Mamba1) {
    const std::int64_t dtr = c.dt_rank_effective();
    {
      auto& n = b.add("in_proj", OperatorKind::MatMul, Role::Projection, mac * d * 2 * di);
      n.weight_bytes = d * 2 * di * wb;
      n.act_in_bytes = d * ab;
      n.act_out_bytes = 2 * di * ab;
    }
    {
      auto& n = b.add("conv1d", OperatorKind::Conv, Role::Other,
                      mac * K * di + static_cast<double>(di));
      n.weight_bytes = (di * K + di) * wb;
      n.act_in_bytes = di * ab;
      n.act_out_bytes = di * ab;
    }
    b.add("silu_x", OperatorKind::Nonlinearity, Role::Other, trc * di);
    {
      auto& n = b.add("x_proj", OperatorKind::MatMul, Role::Projection,
                      mac * di * (dtr + 2 * N));
      n.weight_bytes = di * (dtr + 2 * N) * wb;
      n.act_in_bytes = di * ab;
      n.act_out_bytes = (dtr + 2 * N) * ab;
    }
    {
      auto& n = b.add("dt_proj", OperatorKind::MatMul, Role::Projection,
                      mac * dtr * di + static_cast<double>(di));
      n.weight_bytes = (dtr * di + di) * wb;
      n.act_in_bytes = dtr * ab;
      n.act_out_bytes = di * ab;
    }
    b.add("softplus_dt", OperatorKind::Nonlinearity, Role::Other, trc * di);
    {
      // A_bar = exp(dt (x) A): one multiply + one exp per state element
      auto& n = b.add("discretize_decay", OperatorKind::Elementwise, Role::StateUpdate,
                      (1.0 + trc) * dn);
      n.su_block = true;
      n.weight_bytes = di * N * wb;  // A_log
      n.act_in_bytes = di * ab;      // per-channel step sizes
    }
    {
      // B_bar x = dt * (B x^T): two multiplies per state element
      auto& n = b.add("discretize_input", OperatorKind::Elementwise, Role::StateUpdate, 2.0 * dn);
      n.su_block = true;
      n.act_in_bytes = (di + N) * ab;  // x stream + per-token B
    }
    {
      const bool pscan = (w.formulation == Formulation::PScan);
      const double L = static_cast<double>(w.seq_len);
      // sequential: h = a (.) h + b, 2 ops/element; pscan: Blelloch combines
      const double scan_ops = pscan ? (2.0 / L + 6.0 * (L - 1.0) / L) * dn : 2.0 * dn;
      auto& n = b.add(pscan ? "pscan_combine" : "scan",
                      pscan ? OperatorKind::ScanCombine : OperatorKind::Elementwise,
                      Role::StateUpdate, scan_ops);
      n.su_block = true;
      n.state_bytes = 2 * di * N * sb;
    }
    {
      auto& n = b.add("readout", OperatorKind::MatMul, Role::StateUpdate, 2.0 * dn);
      n.su_block = true;
      n.act_in_bytes = N * ab;   // per-token C
      n.act_out_bytes = di * ab; // y
    }
    {
      auto& n = b.add("skip", OperatorKind::Elementwise, Role::Other, 2.0 * di);
      n.weight_bytes = di * wb;  // D
    }
    {
      auto& n = b.add("gate", OperatorKind::Elementwise, Role::Other, (trc + 1.0) * di);
      n.su_block = true;  // fused into the state-update kernel
      n.act_in_bytes = di * ab;   // z
      n.act_out_bytes = di * ab;  // gated output
    }
    {
      auto& n = b.add("out_proj", OperatorKind::MatMul, Role::Projection, mac * di * d);
      n.weight_bytes = di * d * wb;
      n.act_in_bytes = di * ab;
      n.act_out_bytes = d * ab;
    }
    b.add("residual", OperatorKind::Elementwise, Role::Other, static_cast<double>(d));
    {
      auto& n = b.add("norm", OperatorKind::Elementwise, Role::Other, static_cast<double>(d));
      n.weight_bytes = d * wb;
    }
    return g;
  }

  // Mamba-2 / Mamba-3
  const std::int64_t R = c.mimo_rank;
  const std::int64_t H = c.n_heads;
  const std::int64_t bwd = c.block_width();       // x/z/y width, R*d_inner
  const std::int64_t cw = bwd + 2 * R * N;        // conv channels (x, B, C)
  const double dnr = dn * static_cast<double>(R);

  {
    auto& n = b.add("in_proj", OperatorKind::MatMul, Role::Projection,
                    mac * d * (2 * bwd + 2 * R * N + H));
    n.weight_bytes = d * (2 * bwd + 2 * R * N + H) * wb;
    n.act_in_bytes = d * ab;
    n.act_out_bytes = (2 * bwd + 2 * R * N + H) * ab;
  }
  {
    auto& n = b.add("conv1d", OperatorKind::Conv, Role::Other,
                    mac * K * cw + static_cast<double>(cw));
    n.weight_bytes = (cw * K + cw) * wb;
    n.act_in_bytes = cw * ab;
    n.act_out_bytes = cw * ab;
  }
  b.add("silu_xbc", OperatorKind::Nonlinearity, Role::Other, trc * cw);
  {
    auto& n = b.add("dt_prep", OperatorKind::Nonlinearity, Role::Other, (1.0 + trc) * H);
    n.weight_bytes = H * wb;  // dt_bias
  }
  {
    // a = exp(-dt * A) per head
    auto& n = b.add("decay", OperatorKind::Elementwise, Role::StateUpdate, (1.0 + trc) * H);
    n.su_block = true;
    n.weight_bytes = H * wb;  // A_log
    n.act_in_bytes = H * ab;  // raw per-head step sizes
  }
  {
    auto& n = b.add("dt_scale", OperatorKind::Elementwise, Role::StateUpdate,
                    static_cast<double>(bwd));
    n.su_block = true;
    n.act_in_bytes = 2 * bwd * ab;  // x stream + broadcast step sizes
  }

  if (w.formulation == Formulation::SSD) {
    const double Q = static_cast<double>(w.chunk_size);
    const double P = static_cast<double>(c.head_dim);
    const double R2 = static_cast<double>(R) * static_cast<double>(R);
    {
      // rank-structured score blocks G[i,j][r,r'] = <C_i[:,r], B_j[:,r']>
      // with the causal decay mask, per chunk, amortized per token
      auto& n = b.add("ssd_score", OperatorKind::MatMul, Role::StateUpdate,
                      H * (mac * Q * static_cast<double>(N) * R2 + Q * R2));
      n.su_block = true;
      n.act_in_bytes = 2 * R * N * ab;  // B, C
      // G written once plus the mask materialized at the score layout
      n.act_out_bytes = static_cast<std::int64_t>(2.0 * Q * R2 * H) * ab;
    }
    {
      auto& n = b.add("ssd_intra", OperatorKind::MatMul, Role::StateUpdate,
                      H * mac * Q * P * R2);
      n.su_block = true;
      n.act_in_bytes = static_cast<std::int64_t>(Q * R2 * H) * ab;  // G re-read
    }
    {
      auto& n = b.add("ssd_chunk_state", OperatorKind::MatMul, Role::StateUpdate,
                      H * (mac * static_cast<double>(N) * P * R + mac * static_cast<double>(N) * P / Q));
      n.su_block = true;
      n.act_out_bytes = static_cast<std::int64_t>(2.0 * N * P * H / Q) * ab;  // chunk states r+w
      n.state_bytes = 2 * di * N * sb;
    }
    {
      auto& n = b.add("ssd_state_out", OperatorKind::MatMul, Role::StateUpdate,
                      H * mac * static_cast<double>(N) * P * R);
      n.su_block = true;
      n.act_in_bytes = 2 * (R - 1) * di * ab;  // rank-slice partial-output merges
      n.act_out_bytes = bwd * ab;              // y
    }
  } else {
    {
      // h <- a*h + B x^T (rank R); the scalar decay is an accumulator pre-scale
      auto& n = b.add("update", OperatorKind::MatMul, Role::StateUpdate, mac * dnr);
      n.su_block = true;
      n.act_in_bytes = R * N * ab;  // B
      n.state_bytes = 2 * di * N * sb;
    }
    {
      auto& n = b.add("readout", OperatorKind::MatMul, Role::StateUpdate, mac * dnr);
      n.su_block = true;
      n.act_in_bytes = R * N * ab;   // C
      n.act_out_bytes = bwd * ab;    // y
    }
  }

  {
    auto& n = b.add("skip", OperatorKind::Elementwise, Role::Other, 2.0 * bwd);
    n.weight_bytes = H * wb;  // D
  }
  {
    auto& n = b.add("gate", OperatorKind::Elementwise, Role::Other, (trc + 1.0) * bwd);
    n.su_block = true;
    n.act_in_bytes = bwd * ab;
    n.act_out_bytes = bwd * ab;
  }
  {
    auto& n = b.add("gated_norm", OperatorKind::Elementwise, Role::Other, static_cast<double>(bwd));
    n.weight_bytes = bwd * wb;
  }
  {
    auto& n = b.add("out_proj", OperatorKind::MatMul, Role::Projection, mac * bwd * d);
    n.weight_bytes = bwd * d * wb;
    n.act_in_bytes = bwd * ab;
    n.act_out_bytes = d * ab;
  }
  b.add("residual", OperatorKind::Elementwise, Role::Other, static_cast<double>(d));
  {
    auto& n = b.add("norm", OperatorKind::Elementwise, Role::Other, static_cast<double>(d));
    n.weight_bytes = d * wb;
  }
  return g;
}

inline OpTotals count_ops(const LayerGraph& g) {
  OpTotals t;
  t.layers = g.n_layers;
  double ops = 0, su = 0, mac_ops = 0, simd = 0;
  std::int64_t wbytes = 0, abytes = 0, su_abytes = 0, sbytes = 0;
  for (const auto& op : g.ops) {
    ops += op.ops_per_token;
    if (op.role == Role::StateUpdate) su += op.ops_per_token;
    if (op.kind == OperatorKind::MatMul || op.kind == OperatorKind::Conv)
      mac_ops += op.ops_per_token;
    else
      simd += op.ops_per_token;
    wbytes += op.weight_bytes;
    abytes += op.act_in_bytes + op.act_out_bytes;
    if (op.su_block) su_abytes += op.act_in_bytes + op.act_out_bytes;
    sbytes += op.state_bytes;
  }
  const double n = static_cast<double>(g.n_layers);
  t.total_ops_per_token = ops * n;
  t.state_update_ops_per_token = su * n;
  t.mac_array_ops_per_token = mac_ops * n;
  t.simd_ops_per_token = simd * n;
  t.weight_bytes_total = wbytes * g.n_layers;
  t.act_bytes_per_token = abytes * g.n_layers;
  t.su_block_act_bytes_per_token = su_abytes * g.n_layers;
  t.state_bytes_per_token = sbytes * g.n_layers;
  return t;
}

// state_update_ops(parallel formulation) / state_update_ops(sequential).
inline double formulation_overhead(const ModelConfig& c, std::int64_t L, std::int64_t Q) {
  if (L < 1) throw ConfigError("formulation_overhead: L must be >= 1");
  WorkloadSpec seq{Phase::Prefill, 1, L, Formulation::Sequential, Q};
  WorkloadSpec par = seq;
  par.formulation = (c.variant == VariantKind::Mamba1) ? Formulation::PScan : Formulation::SSD;
  const OpTotals a = count_ops(build_layer_graph(c, par));
  const OpTotals s = count_ops(build_layer_graph(c, seq));
  if (s.state_update_ops_per_token == 0) throw ConfigError("formulation_overhead: empty model");
  return a.state_update_ops_per_token / s.state_update_ops_per_token;
}

// Line-oriented dump for golden-file tests.
inline std::string dump_graph(const LayerGraph& g) {
  std::ostringstream os;
  os << "layers " << g.n_layers << "\n";
  for (const auto& op : g.ops) {
    os << op.name << " kind=" << to_string(op.kind) << " role=" << to_string(op.role)
       << " ops=" << static_cast<std::int64_t>(op.ops_per_token + 0.5)
       << " w=" << op.weight_bytes << " ain=" << op.act_in_bytes
       << " aout=" << op.act_out_bytes << " state=" << op.state_bytes;
    if (op.su_block) os << " su_block";
    os << "\n";
  }
  return os.str();
}

}  // namespace ssmperf
