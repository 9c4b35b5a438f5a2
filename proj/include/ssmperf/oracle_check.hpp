#pragma once

// The oracle verification corpus: formulation equivalence over seeded random
// toy instances, count fidelity against the analytic inventories, and the
// scan linearity property. Shared by `ssmperf oracle-check` and the
// acceptance suite.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "opgraph.hpp"
#include "oracle.hpp"

namespace ssmperf {

struct OracleCheckOptions {
  std::uint64_t seed = 0;
  int instances = 1000;
  std::vector<std::int64_t> sizes;  // L values; empty = uniform 1..256
  bool inject_fault = false;        // test hook: corrupt one pscan output
};

struct OracleCheckResult {
  int checks = 0;
  double max_pscan_dev = 0.0;
  double max_ssd_dev = 0.0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

namespace oracle_check_detail {

inline ModelConfig toy_config(bool elementwise, std::int64_t H, std::int64_t P, std::int64_t N,
                              std::int64_t R) {
  ModelConfig c;
  c.variant = elementwise ? VariantKind::Mamba1
                          : (R > 1 ? VariantKind::Mamba3 : VariantKind::Mamba2);
  c.d_model = H * P;
  c.expand = 1.0;
  c.n_layers = 1;
  c.d_state = N;
  c.d_conv = 4;
  if (!elementwise) {
    c.n_heads = H;
    c.head_dim = P;
    c.mimo_rank = R;
  }
  return c;
}

inline double analytic_su_per_token(const ModelConfig& c, Formulation f, std::int64_t L,
                                    std::int64_t Q) {
  WorkloadSpec w{Phase::Prefill, 1, L, f, Q};
  return count_ops(build_layer_graph(c, w)).state_update_ops_per_token;
}

inline ToyBlock random_block(std::mt19937_64& rng, bool elementwise, std::int64_t L,
                             std::int64_t H, std::int64_t P, std::int64_t N, std::int64_t R) {
  std::uniform_real_distribution<double> dt_dist(0.05, 0.5);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_real_distribution<double> apos(0.1, 2.0);
  ToyBlock b;
  b.L = L; b.H = H; b.P = P; b.N = N; b.R = R;
  b.elementwise_decay = elementwise;
  const std::int64_t channels = H * P;
  b.dt.resize(elementwise ? L * channels : L * H);
  for (auto& v : b.dt) v = dt_dist(rng);
  b.A.resize(elementwise ? channels * N : H);
  for (auto& v : b.A) v = -apos(rng);  // stable decay
  if (!elementwise)
    for (auto& v : b.A) v = apos(rng);  // a = exp(-dt*A)
  b.X.resize(L * H * P * R);
  b.B.resize(L * H * N * R);
  b.C.resize(L * H * N * R);
  for (auto& v : b.X) v = val(rng);
  for (auto& v : b.B) v = val(rng);
  for (auto& v : b.C) v = val(rng);
  b.h0.assign(H * P * N, 0.0);
  for (auto& v : b.h0) v = val(rng);
  return b;
}

}  // namespace oracle_check_detail

inline OracleCheckResult run_oracle_checks(const OracleCheckOptions& opt) {
  using namespace oracle_check_detail;
  OracleCheckResult res;
  std::mt19937_64 rng(opt.seed);
  auto fail = [&](const std::string& m) { res.failures.push_back(m); };

  // -- formulation equivalence over the random corpus --------------------
  std::uniform_int_distribution<std::int64_t> l_dist(1, 256);
  std::uniform_int_distribution<int> h_dist(1, 2), p_dist(0, 2), n_dist(0, 2), r_dist(1, 4);
  const std::int64_t p_vals[] = {1, 2, 4};
  const std::int64_t n_vals[] = {2, 4, 8};
  for (int i = 0; i < opt.instances; ++i) {
    const std::int64_t L = opt.sizes.empty()
                               ? l_dist(rng)
                               : opt.sizes[static_cast<size_t>(i) % opt.sizes.size()];
    const std::int64_t H = h_dist(rng), P = p_vals[p_dist(rng)], N = n_vals[n_dist(rng)];
    const bool elementwise = (i % 2 == 0);
    const std::int64_t R = elementwise ? 1 : r_dist(rng);

    ScanInput in = make_random_scan_input(rng, L, H, P, N, R, elementwise);
    OpCounter c_seq, c_par;
    const std::vector<double> h_seq = sequential_scan(in, c_seq);
    std::vector<double> h_par = blelloch_pscan(in, c_par);
    if (opt.inject_fault && i == 0 && !h_par.empty()) h_par[0] = -h_par[0] + 1.0;
    const double dev = max_rel_deviation(h_par, h_seq);
    res.max_pscan_dev = std::max(res.max_pscan_dev, dev);
    ++res.checks;
    if (dev > 1e-12) {
      std::ostringstream os;
      os << "pscan deviation " << dev << " > 1e-12 (L=" << L << " H=" << H << " P=" << P
         << " N=" << N << " R=" << R << (elementwise ? " elementwise" : " scalar") << ")";
      fail(os.str());
      if (res.failures.size() > 8) return res;
    }

    if (!elementwise) {
      const std::vector<double> y_ref = readout_sequence(in, h_seq, nullptr);
      for (std::int64_t Q : std::vector<std::int64_t>{1, 8, L}) {
        OpCounter c_ssd;
        const std::vector<double> y_ssd = chunked_ssd(in, Q, c_ssd);
        const double sdev = max_rel_deviation(y_ssd, y_ref);
        res.max_ssd_dev = std::max(res.max_ssd_dev, sdev);
        ++res.checks;
        if (sdev > 1e-10) {
          std::ostringstream os;
          os << "ssd deviation " << sdev << " > 1e-10 (L=" << L << " Q=" << Q << " H=" << H
             << " P=" << P << " N=" << N << " R=" << R << ")";
          fail(os.str());
          if (res.failures.size() > 8) return res;
        }
      }
    }
  }

  // -- linearity: scan output is linear in b and h0 -----------------------
  for (int i = 0; i < 8; ++i) {
    ScanInput in = make_random_scan_input(rng, 32, 2, 2, 4, 1, i % 2 == 0);
    ScanInput scaled = in;
    const double alpha = 2.5, beta = -1.25;
    for (auto& v : scaled.b) v *= alpha;
    for (auto& v : scaled.h0) v *= beta;
    ScanInput b_only = in, h_only = in;
    for (auto& v : h_only.b) v = 0.0;
    for (auto& v : b_only.h0) v = 0.0;
    OpCounter c1, c2, c3;
    const auto full = sequential_scan(scaled, c1);
    const auto part_b = sequential_scan(b_only, c2);
    const auto part_h = sequential_scan(h_only, c3);
    std::vector<double> combo(full.size());
    for (size_t k = 0; k < combo.size(); ++k) combo[k] = alpha * part_b[k] + beta * part_h[k];
    const double dev = max_rel_deviation(combo, full);
    ++res.checks;
    if (dev > 1e-12) fail("scan linearity violated, deviation " + std::to_string(dev));
  }

  // -- count fidelity: analytic inventory vs instrumented block ----------
  struct FidelityCase {
    bool elementwise;
    std::int64_t L, H, P, N, R;
  };
  std::vector<FidelityCase> cases;
  for (std::int64_t L : {17, 64})                       // Mamba-1, any L
    for (auto [hp, n] : std::vector<std::pair<std::int64_t, std::int64_t>>{
             {4, 2}, {8, 4}, {4, 8}, {16, 8}})
      cases.push_back({true, L, 1, hp, n, 1});
  for (std::int64_t L : {16, 48})                       // Mamba-2
    for (auto [h, p, n] : std::vector<std::array<std::int64_t, 3>>{
             {1, 4, 4}, {2, 4, 8}, {2, 2, 4}})
      cases.push_back({false, L, h, p, n, 1});
  for (std::int64_t L : {16, 48})                       // Mamba-3
    for (auto [h, p, n, r] : std::vector<std::array<std::int64_t, 4>>{
             {1, 4, 4, 2}, {2, 4, 8, 4}, {2, 2, 4, 3}})
      cases.push_back({false, L, h, p, n, r});

  for (const auto& fc : cases) {
    const ModelConfig cfg = toy_config(fc.elementwise, fc.H, fc.P, fc.N, fc.R);
    const ToyBlock blk = random_block(rng, fc.elementwise, fc.L, fc.H, fc.P, fc.N, fc.R);
    OpCounter counter;
    (void)run_state_update_block(blk, BlockFormulation::Sequential, counter);
    const double analytic =
        analytic_su_per_token(cfg, Formulation::Sequential, fc.L, 8) * static_cast<double>(fc.L);
    ++res.checks;
    if (static_cast<double>(counter.total()) != analytic) {
      std::ostringstream os;
      os << "sequential count mismatch: oracle " << counter.total() << " vs analytic "
         << analytic << " (" << to_string(cfg.variant) << " L=" << fc.L << " H=" << fc.H
         << " P=" << fc.P << " N=" << fc.N << " R=" << fc.R << ")";
      fail(os.str());
    }
  }

  // pscan fidelity at power-of-two L (padding effects vanish there)
  for (std::int64_t L : {64, 128}) {
    const ModelConfig cfg = toy_config(true, 1, 8, 4, 1);
    const ToyBlock blk = random_block(rng, true, L, 1, 8, 4, 1);
    OpCounter counter;
    (void)run_state_update_block(blk, BlockFormulation::PScan, counter);
    const double analytic =
        analytic_su_per_token(cfg, Formulation::PScan, L, 8) * static_cast<double>(L);
    const double rel = std::abs(static_cast<double>(counter.total()) / analytic - 1.0);
    ++res.checks;
    if (rel > 0.01)
      fail("pscan count off by " + std::to_string(rel * 100) + "% at L=" + std::to_string(L));
  }

  // ssd fidelity on dense-friendly dims
  for (auto [Q, L] : std::vector<std::pair<std::int64_t, std::int64_t>>{{32, 64}, {64, 128}}) {
    const ModelConfig cfg = toy_config(false, 2, 4, 32, 4);
    const ToyBlock blk = random_block(rng, false, L, 2, 4, 32, 4);
    OpCounter counter;
    (void)run_state_update_block(blk, BlockFormulation::SSD, counter, Q);
    const double analytic =
        analytic_su_per_token(cfg, Formulation::SSD, L, Q) * static_cast<double>(L);
    const double rel = std::abs(static_cast<double>(counter.total()) / analytic - 1.0);
    ++res.checks;
    if (rel > 0.01)
      fail("ssd count off by " + std::to_string(rel * 100) + "% at Q=" + std::to_string(Q));
  }

  return res;
}

}  // namespace ssmperf
