#pragma once

// Executable toy-scale references for the three state-update formulations,
// with instrumented operation counters. Double precision throughout,
// independent of the modeled datatype.
//
// Shapes follow the unified (H, P, N, R) layout:
//   state h       : H x P x N
//   decay a[t]    : H            (scalar per head, Mamba-2/3)
//                   H x P x N    (per element, Mamba-1 diagonal)
//   input X[t]    : H x P x R
//   factors B/C[t]: H x N x R
//   scan input b[t] = X_t B_t^T  : H x P x N
//
// Counter conventions match the analytic operator inventory: multiplies,
// adds and transcendentals count 1 each; the scalar-per-head decay applied
// to the state is an accumulator pre-scale and is tracked separately,
// outside the op total. Mamba-1's per-element decay is a counted multiply.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssmperf {

struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

struct OpCounter {
  std::int64_t multiplies = 0;
  std::int64_t adds = 0;
  std::int64_t transcendentals = 0;
  std::int64_t prescales = 0;  // scalar decay pre-scales, not part of total
  std::int64_t total() const { return multiplies + adds + transcendentals; }
  void reset() { *this = OpCounter{}; }
};

struct ScanInput {
  std::int64_t L = 0, H = 1, P = 1, N = 1, R = 1;
  bool elementwise_decay = false;  // true: Mamba-1 diagonal; false: scalar per head
  std::vector<double> a;           // L*H or L*H*P*N
  std::vector<double> b;           // L*H*P*N, materialized scan input
  std::vector<double> X;           // L*H*P*R (factored form)
  std::vector<double> B;           // L*H*N*R
  std::vector<double> C;           // L*H*N*R
  std::vector<double> h0;          // H*P*N, empty = zeros

  std::int64_t state_size() const { return H * P * N; }
};

namespace oracle_detail {

inline void check(bool ok, const char* what) {
  if (!ok) throw InputError(std::string("oracle input: ") + what);
}

inline void validate_scan(const ScanInput& in, bool need_b, bool need_factors) {
  check(in.L >= 1 && in.H >= 1 && in.P >= 1 && in.N >= 1 && in.R >= 1, "bad dims");
  const std::int64_t s = in.state_size();
  const std::int64_t alen = in.elementwise_decay ? in.L * s : in.L * in.H;
  check(static_cast<std::int64_t>(in.a.size()) == alen, "decay length mismatch");
  if (need_b) check(static_cast<std::int64_t>(in.b.size()) == in.L * s, "b length mismatch");
  if (need_factors) {
    check(static_cast<std::int64_t>(in.X.size()) == in.L * in.H * in.P * in.R, "X length mismatch");
    check(static_cast<std::int64_t>(in.B.size()) == in.L * in.H * in.N * in.R, "B length mismatch");
    check(static_cast<std::int64_t>(in.C.size()) == in.L * in.H * in.N * in.R, "C length mismatch");
  }
  check(in.h0.empty() || static_cast<std::int64_t>(in.h0.size()) == s, "h0 length mismatch");
}

}  // namespace oracle_detail

// b[t] = X_t B_t^T per head, counted as one multiply + one accumulate add
// per (p, n, r) term.
inline std::vector<double> materialize_b(const ScanInput& in, OpCounter* counter = nullptr) {
  oracle_detail::validate_scan(in, false, true);
  std::vector<double> b(in.L * in.state_size(), 0.0);
  for (std::int64_t t = 0; t < in.L; ++t)
    for (std::int64_t h = 0; h < in.H; ++h)
      for (std::int64_t p = 0; p < in.P; ++p)
        for (std::int64_t n = 0; n < in.N; ++n) {
          double acc = 0.0;
          const std::int64_t xb = ((t * in.H + h) * in.P + p) * in.R;
          const std::int64_t bb = ((t * in.H + h) * in.N + n) * in.R;
          for (std::int64_t r = 0; r < in.R; ++r) acc += in.X[xb + r] * in.B[bb + r];
          if (counter) { counter->multiplies += in.R; counter->adds += in.R; }
          b[(t * in.H + h) * in.P * in.N + p * in.N + n] = acc;
        }
  return b;
}

// h[t] = a[t] (.) h[t-1] + b[t], every timestep in order.
// Returns the full state sequence h[1..L], flattened L x (H*P*N).
inline std::vector<double> sequential_scan(const ScanInput& in, OpCounter& counter) {
  oracle_detail::validate_scan(in, true, false);
  const std::int64_t s = in.state_size();
  std::vector<double> h(in.h0.empty() ? std::vector<double>(s, 0.0) : in.h0);
  std::vector<double> out(in.L * s);
  for (std::int64_t t = 0; t < in.L; ++t) {
    for (std::int64_t hh = 0; hh < in.H; ++hh) {
      const std::int64_t base = hh * in.P * in.N;
      if (in.elementwise_decay) {
        for (std::int64_t i = 0; i < in.P * in.N; ++i) {
          h[base + i] = in.a[t * s + base + i] * h[base + i] + in.b[t * s + base + i];
          ++counter.multiplies;
          ++counter.adds;
        }
      } else {
        const double ah = in.a[t * in.H + hh];
        for (std::int64_t i = 0; i < in.P * in.N; ++i) {
          h[base + i] = ah * h[base + i] + in.b[t * s + base + i];
          ++counter.prescales;
          ++counter.adds;
        }
      }
    }
    std::copy(h.begin(), h.end(), out.begin() + t * s);
  }
  return out;
}

namespace oracle_detail {

// One (decay, offset) pair per element block; combine
// (a1,b1) (x) (a2,b2) -> (a1*a2, a2*b1 + b2).
struct ScanPair {
  std::vector<double> a;  // per element, or per head for scalar decay
  std::vector<double> b;  // per element
};

inline void combine(const ScanPair& x, const ScanPair& y, ScanPair& out, bool scalar,
                    std::int64_t H, std::int64_t pn, OpCounter& c) {
  if (scalar) {
    for (std::int64_t h = 0; h < H; ++h) {
      out.a[h] = x.a[h] * y.a[h];
      ++c.multiplies;
      const double ya = y.a[h];
      for (std::int64_t i = 0; i < pn; ++i) {
        out.b[h * pn + i] = ya * x.b[h * pn + i] + y.b[h * pn + i];
        ++c.multiplies;
        ++c.adds;
      }
    }
  } else {
    const std::int64_t s = H * pn;
    for (std::int64_t i = 0; i < s; ++i) {
      out.a[i] = x.a[i] * y.a[i];
      out.b[i] = y.a[i] * x.b[i] + y.b[i];
      c.multiplies += 2;
      ++c.adds;
    }
  }
}

}  // namespace oracle_detail

// Blelloch work-efficient scan over (a, b) pairs: up-sweep then down-sweep
// on a power-of-two padded tree (identity pads, a=1, b=0), inclusive result
// recovered from the exclusive prefixes plus the up-sweep total. Matches
// sequential_scan to rounding error.
inline std::vector<double> blelloch_pscan(const ScanInput& in, OpCounter& counter) {
  oracle_detail::validate_scan(in, true, false);
  const std::int64_t s = in.state_size();
  const std::int64_t pn = in.P * in.N;
  const bool scalar = !in.elementwise_decay;
  const std::int64_t alen = scalar ? in.H : s;

  std::int64_t p2 = 1;
  while (p2 < in.L) p2 <<= 1;

  using oracle_detail::ScanPair;
  std::vector<ScanPair> tree(p2);
  for (std::int64_t t = 0; t < p2; ++t) {
    tree[t].a.assign(alen, 1.0);
    tree[t].b.assign(s, 0.0);
    if (t < in.L) {
      for (std::int64_t i = 0; i < alen; ++i) tree[t].a[i] = in.a[t * alen + i];
      for (std::int64_t i = 0; i < s; ++i) tree[t].b[i] = in.b[t * s + i];
    }
  }
  // fold h0 into the first element: b'[0] = a[0]*h0 + b[0]
  if (!in.h0.empty()) {
    for (std::int64_t h = 0; h < in.H; ++h)
      for (std::int64_t i = 0; i < pn; ++i) {
        const double a0 = scalar ? in.a[h] : in.a[h * pn + i];
        tree[0].b[h * pn + i] = a0 * in.h0[h * pn + i] + tree[0].b[h * pn + i];
        ++counter.multiplies;
        ++counter.adds;
      }
  }

  ScanPair tmp, tmp2;
  tmp.a.assign(alen, 1.0);
  tmp.b.assign(s, 0.0);
  tmp2 = tmp;

  // up-sweep: node <- combine(left subtotal, right subtotal)
  for (std::int64_t stride = 1; stride < p2; stride <<= 1)
    for (std::int64_t i = 2 * stride - 1; i < p2; i += 2 * stride) {
      oracle_detail::combine(tree[i - stride], tree[i], tmp, scalar, in.H, pn, counter);
      std::swap(tree[i], tmp);
    }

  ScanPair total = tree[p2 - 1];  // prefix of the whole (padded) sequence

  // down-sweep (exclusive): left <- parent, right <- combine(parent, old left)
  tree[p2 - 1].a.assign(alen, 1.0);
  tree[p2 - 1].b.assign(s, 0.0);
  for (std::int64_t stride = p2 >> 1; stride >= 1; stride >>= 1)
    for (std::int64_t i = 2 * stride - 1; i < p2; i += 2 * stride) {
      std::swap(tree[i - stride], tmp);             // tmp = old left subtotal
      tree[i - stride] = tree[i];                   // left = parent prefix
      oracle_detail::combine(tree[i], tmp, tmp2, scalar, in.H, pn, counter);
      std::swap(tree[i], tmp2);
    }

  // inclusive[t] = exclusive[t+1]; inclusive[L-1] from the up-sweep total
  std::vector<double> out(in.L * s);
  for (std::int64_t t = 0; t + 1 < in.L; ++t)
    std::copy(tree[t + 1].b.begin(), tree[t + 1].b.end(), out.begin() + t * s);
  std::copy(total.b.begin(), total.b.end(), out.begin() + (in.L - 1) * s);
  return out;
}

// y[t] = C_t^T h[t] per head: output shape L x (H*P*R).
inline std::vector<double> readout_sequence(const ScanInput& in, const std::vector<double>& states,
                                            OpCounter* counter = nullptr) {
  oracle_detail::validate_scan(in, false, true);
  const std::int64_t s = in.state_size();
  oracle_detail::check(static_cast<std::int64_t>(states.size()) == in.L * s, "state sequence size");
  std::vector<double> y(in.L * in.H * in.P * in.R, 0.0);
  for (std::int64_t t = 0; t < in.L; ++t)
    for (std::int64_t h = 0; h < in.H; ++h)
      for (std::int64_t p = 0; p < in.P; ++p)
        for (std::int64_t r = 0; r < in.R; ++r) {
          double acc = 0.0;
          for (std::int64_t n = 0; n < in.N; ++n) {
            acc += in.C[((t * in.H + h) * in.N + n) * in.R + r] *
                   states[t * s + (h * in.P + p) * in.N + n];
          }
          if (counter) { counter->multiplies += in.N; counter->adds += in.N; }
          y[((t * in.H + h) * in.P + p) * in.R + r] = acc;
        }
  return y;
}

// Chunked SSD: intra-chunk masked score blocks plus an inter-chunk state
// recurrence, computed via dense per-chunk products the way a matmul engine
// would. With MIMO rank R the score block carries an R x R rank structure
// per position pair: G[i,j][r,r'] = <C_i[:,r], B_j[:,r']>, since the output
// rank r draws on state fed by every input rank r'. Scalar-per-head decay
// required. L is zero-padded (a=1, X=0) to a multiple of Q and outputs
// truncated. Returns y, shape L x (H*P*R).
inline std::vector<double> chunked_ssd(const ScanInput& in, std::int64_t Q, OpCounter& counter) {
  oracle_detail::validate_scan(in, false, true);
  if (in.elementwise_decay) throw InputError("chunked_ssd requires scalar-per-head decay");
  if (Q < 1) throw InputError("chunked_ssd: chunk size must be >= 1");

  const std::int64_t H = in.H, P = in.P, N = in.N, R = in.R;
  const std::int64_t Lp = ((in.L + Q - 1) / Q) * Q;
  std::vector<double> y(in.L * H * P * R, 0.0);

  auto a_at = [&](std::int64_t t, std::int64_t h) { return t < in.L ? in.a[t * H + h] : 1.0; };
  auto x_at = [&](std::int64_t t, std::int64_t h, std::int64_t p, std::int64_t r) {
    return t < in.L ? in.X[((t * H + h) * P + p) * R + r] : 0.0;
  };
  auto b_at = [&](std::int64_t t, std::int64_t h, std::int64_t n, std::int64_t r) {
    return t < in.L ? in.B[((t * H + h) * N + n) * R + r] : 0.0;
  };
  auto c_at = [&](std::int64_t t, std::int64_t h, std::int64_t n, std::int64_t r) {
    return t < in.L ? in.C[((t * H + h) * N + n) * R + r] : 0.0;
  };

  std::vector<double> h_state(H * P * N, 0.0);
  if (!in.h0.empty()) h_state = in.h0;

  std::vector<double> s(Q), inv_s(Q), G(Q * Q * R * R), hacc(P * N);
  for (std::int64_t c0 = 0; c0 < Lp; c0 += Q) {
    for (std::int64_t h = 0; h < H; ++h) {
      // within-chunk decay prefixes s_i = prod_{k<=i} a_k
      double run = 1.0;
      for (std::int64_t i = 0; i < Q; ++i) {
        run *= a_at(c0 + i, h);
        ++counter.multiplies;
        s[i] = run;
        inv_s[i] = 1.0 / run;
      }
      // dense rank-structured score blocks, then the causal decay mask
      for (std::int64_t i = 0; i < Q; ++i)
        for (std::int64_t j = 0; j < Q; ++j)
          for (std::int64_t r = 0; r < R; ++r)
            for (std::int64_t rp = 0; rp < R; ++rp) {
              double acc = 0.0;
              for (std::int64_t n = 0; n < N; ++n)
                acc += c_at(c0 + i, h, n, r) * b_at(c0 + j, h, n, rp);
              counter.multiplies += N;
              counter.adds += N;
              G[((i * Q + j) * R + r) * R + rp] = acc;
            }
      for (std::int64_t i = 0; i < Q; ++i)
        for (std::int64_t j = 0; j < Q; ++j) {
          if (j <= i) {
            const double decay = s[i] * inv_s[j];
            ++counter.multiplies;
            for (std::int64_t rr = 0; rr < R * R; ++rr) {
              G[(i * Q + j) * R * R + rr] *= decay;
              ++counter.multiplies;
            }
          } else {
            for (std::int64_t rr = 0; rr < R * R; ++rr) G[(i * Q + j) * R * R + rr] = 0.0;
          }
        }
      // intra-chunk output: Y[i,p,r] = sum_{j,r'} G[i,j,r,r'] X[j,p,r']
      for (std::int64_t i = 0; i < Q; ++i) {
        if (c0 + i >= in.L) continue;
        for (std::int64_t p = 0; p < P; ++p)
          for (std::int64_t r = 0; r < R; ++r) {
            double acc = 0.0;
            for (std::int64_t j = 0; j < Q; ++j)
              for (std::int64_t rp = 0; rp < R; ++rp)
                acc += G[((i * Q + j) * R + r) * R + rp] * x_at(c0 + j, h, p, rp);
            counter.multiplies += Q * R;
            counter.adds += Q * R;
            y[((c0 + i) * H + h) * P * R + p * R + r] = acc;
          }
      }
      // state contribution to outputs: y_t += s_t * (C_t^T h_prev)
      for (std::int64_t i = 0; i < Q; ++i) {
        if (c0 + i >= in.L) continue;
        for (std::int64_t p = 0; p < P; ++p)
          for (std::int64_t r = 0; r < R; ++r) {
            double acc = 0.0;
            for (std::int64_t n = 0; n < N; ++n)
              acc += c_at(c0 + i, h, n, r) * h_state[(h * P + p) * N + n];
            counter.multiplies += N;
            counter.adds += N;
            acc *= s[i];
            ++counter.multiplies;
            y[((c0 + i) * H + h) * P * R + p * R + r] += acc;
            ++counter.adds;
          }
      }
      // chunk state accumulation: h_acc = sum_j ((s_Q / s_j) X_j) B_j^T
      std::fill(hacc.begin(), hacc.end(), 0.0);
      std::vector<double> xw(P * R);
      for (std::int64_t j = 0; j < Q; ++j) {
        const double w = s[Q - 1] * inv_s[j];
        ++counter.multiplies;
        for (std::int64_t p = 0; p < P; ++p)
          for (std::int64_t r = 0; r < R; ++r) {
            xw[p * R + r] = w * x_at(c0 + j, h, p, r);
            ++counter.multiplies;
          }
        for (std::int64_t p = 0; p < P; ++p)
          for (std::int64_t n = 0; n < N; ++n)
            for (std::int64_t r = 0; r < R; ++r) {
              hacc[p * N + n] += xw[p * R + r] * b_at(c0 + j, h, n, r);
              ++counter.multiplies;
              ++counter.adds;
            }
      }
      // inter-chunk recurrence: h = s_Q * h + h_acc (scalar decay pre-scale)
      for (std::int64_t i = 0; i < P * N; ++i) {
        h_state[h * P * N + i] = s[Q - 1] * h_state[h * P * N + i] + hacc[i];
        ++counter.prescales;
        ++counter.adds;
      }
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Counted end-to-end state-update block references (discretization, scan,
// readout), used to pin the analytic per-layer inventories to ground truth.

struct ToyBlock {
  std::int64_t L = 0, H = 1, P = 1, N = 1, R = 1;
  bool elementwise_decay = false;  // Mamba-1 style
  std::vector<double> dt;          // L*H (scalar) or L*(H*P) (per channel)
  std::vector<double> A;           // H (scalar) or (H*P)*N (diagonal)
  std::vector<double> X;           // L*H*P*R
  std::vector<double> B;           // L*H*N*R
  std::vector<double> C;           // L*H*N*R
  std::vector<double> h0;          // H*P*N, empty = zeros
};

enum class BlockFormulation { Sequential, PScan, SSD };

// Runs dt-discretization + scan + readout with full instrumentation.
// Sequential counts are exact against the analytic inventory; pscan matches
// at power-of-two L; SSD within the documented padding slop.
inline std::vector<double> run_state_update_block(const ToyBlock& blk, BlockFormulation form,
                                                  OpCounter& counter, std::int64_t Q = 8) {
  ScanInput in;
  in.L = blk.L; in.H = blk.H; in.P = blk.P; in.N = blk.N; in.R = blk.R;
  in.elementwise_decay = blk.elementwise_decay;
  in.X = blk.X; in.B = blk.B; in.C = blk.C; in.h0 = blk.h0;

  const std::int64_t s = in.state_size();
  if (blk.elementwise_decay) {
    if (blk.R != 1) throw InputError("elementwise-decay block requires R == 1");
    // a[c,n] = exp(dt_c * A[c,n]); b[c,n] = (B_n x_c) * dt_c
    in.a.resize(blk.L * s);
    in.b.resize(blk.L * s);
    const std::int64_t channels = blk.H * blk.P;
    for (std::int64_t t = 0; t < blk.L; ++t)
      for (std::int64_t c = 0; c < channels; ++c) {
        const double dt = blk.dt[t * channels + c];
        const double x = blk.X[(t * channels + c)];
        for (std::int64_t n = 0; n < blk.N; ++n) {
          in.a[t * s + c * blk.N + n] = std::exp(dt * blk.A[c * blk.N + n]);
          ++counter.multiplies;
          ++counter.transcendentals;
          const std::int64_t h = c / blk.P;
          in.b[t * s + c * blk.N + n] = (blk.B[(t * blk.H + h) * blk.N + n] * x) * dt;
          counter.multiplies += 2;
        }
      }
  } else {
    // a[h] = exp(-dt_h A_h); X scaled by dt per head
    in.a.resize(blk.L * blk.H);
    in.X.resize(blk.X.size());
    for (std::int64_t t = 0; t < blk.L; ++t)
      for (std::int64_t h = 0; h < blk.H; ++h) {
        const double dt = blk.dt[t * blk.H + h];
        in.a[t * blk.H + h] = std::exp(-dt * blk.A[h]);
        ++counter.multiplies;
        ++counter.transcendentals;
        for (std::int64_t i = 0; i < blk.P * blk.R; ++i) {
          in.X[((t * blk.H + h) * blk.P * blk.R) + i] =
              dt * blk.X[((t * blk.H + h) * blk.P * blk.R) + i];
          ++counter.multiplies;
        }
      }
  }

  if (form == BlockFormulation::SSD) {
    if (blk.elementwise_decay) throw InputError("SSD block requires scalar decay");
    return chunked_ssd(in, Q, counter);
  }

  if (!blk.elementwise_decay) {
    // fused update h <- a*h + X B^T: R multiply-accumulates per state element
    const std::int64_t sS = s;
    std::vector<double> h(in.h0.empty() ? std::vector<double>(sS, 0.0) : in.h0);
    std::vector<double> states(blk.L * sS);
    for (std::int64_t t = 0; t < blk.L; ++t) {
      for (std::int64_t hh = 0; hh < blk.H; ++hh) {
        const double ah = in.a[t * blk.H + hh];
        for (std::int64_t p = 0; p < blk.P; ++p)
          for (std::int64_t n = 0; n < blk.N; ++n) {
            double acc = ah * h[(hh * blk.P + p) * blk.N + n];
            ++counter.prescales;
            for (std::int64_t r = 0; r < blk.R; ++r) {
              acc += in.X[((t * blk.H + hh) * blk.P + p) * blk.R + r] *
                     in.B[((t * blk.H + hh) * blk.N + n) * blk.R + r];
              ++counter.multiplies;
              ++counter.adds;
            }
            h[(hh * blk.P + p) * blk.N + n] = acc;
          }
      }
      std::copy(h.begin(), h.end(), states.begin() + t * sS);
    }
    return readout_sequence(in, states, &counter);
  }

  // in.b was filled by the counted per-channel discretization above
  std::vector<double> states = (form == BlockFormulation::PScan)
                                   ? blelloch_pscan(in, counter)
                                   : sequential_scan(in, counter);
  return readout_sequence(in, states, &counter);
}

// Seeded random toy instances for the property corpora.
inline ScanInput make_random_scan_input(std::mt19937_64& rng, std::int64_t L, std::int64_t H,
                                        std::int64_t P, std::int64_t N, std::int64_t R,
                                        bool elementwise_decay) {
  std::uniform_real_distribution<double> decay(0.5, 1.0);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  ScanInput in;
  in.L = L; in.H = H; in.P = P; in.N = N; in.R = R;
  in.elementwise_decay = elementwise_decay;
  const std::int64_t alen = elementwise_decay ? L * in.state_size() : L * H;
  in.a.resize(alen);
  for (auto& v : in.a) v = decay(rng);
  in.X.resize(L * H * P * R);
  in.B.resize(L * H * N * R);
  in.C.resize(L * H * N * R);
  for (auto& v : in.X) v = val(rng);
  for (auto& v : in.B) v = val(rng);
  for (auto& v : in.C) v = val(rng);
  in.h0.resize(in.state_size());
  for (auto& v : in.h0) v = val(rng);
  in.b = materialize_b(in, nullptr);
  return in;
}

inline double max_rel_deviation(const std::vector<double>& got, const std::vector<double>& want) {
  if (got.size() != want.size()) throw InputError("max_rel_deviation: size mismatch");
  double scale = 0.0;
  for (double v : want) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;
  double dev = 0.0;
  for (size_t i = 0; i < got.size(); ++i) dev = std::max(dev, std::abs(got[i] - want[i]) / scale);
  return dev;
}

}  // namespace ssmperf
