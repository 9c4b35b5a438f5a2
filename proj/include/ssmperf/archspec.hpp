#pragma once

// Mamba variant architecture descriptions: model hyperparameters, weight
// inventories, parameter counting, parameter-matched width scaling and the
// SSM-vs-attention crossover rule.
//
// Weight inventory (per layer), used by both param_count and the operator
// graph builder so the two can never disagree:
//
//   Mamba-1 (diagonal decay, d_inner = expand * d_model):
//     in_proj   d_model x 2*d_inner
//     conv1d    d_inner x d_conv (+ bias d_inner)
//     x_proj    d_inner x (dt_rank + 2*d_state)
//     dt_proj   dt_rank x d_inner (+ bias d_inner)
//     A_log     d_inner x d_state
//     D         d_inner
//     out_proj  d_inner x d_model
//     norm      d_model
//
//   Mamba-2 / Mamba-3 (scalar-per-head decay; Mamba-3 adds a MIMO rank R:
//   x/z/y widen to R*d_inner and B/C carry R*d_state columns each):
//     in_proj   d_model x (2*R*d_inner + 2*R*d_state + n_heads)
//     conv1d    (R*d_inner + 2*R*d_state) x d_conv (+ bias)
//     A_log, D, dt_bias   n_heads each
//     gated_norm          R*d_inner
//     out_proj  R*d_inner x d_model
//     norm      d_model
//
// Model level: final norm (d_model, present when n_layers >= 1) and, when
// vocab_size > 0, untied embedding + LM head (vocab_size x d_model each).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ssmperf {

enum class VariantKind { Mamba1, Mamba2, Mamba3 };

enum class Formulation { Sequential, PScan, SSD };

inline const char* to_string(VariantKind v) {
  switch (v) {
    case VariantKind::Mamba1: return "mamba1";
    case VariantKind::Mamba2: return "mamba2";
    case VariantKind::Mamba3: return "mamba3";
  }
  return "?";
}

inline const char* to_string(Formulation f) {
  switch (f) {
    case Formulation::Sequential: return "sequential";
    case Formulation::PScan: return "pscan";
    case Formulation::SSD: return "ssd";
  }
  return "?";
}

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct MatchingError : std::runtime_error {
  explicit MatchingError(const std::string& what) : std::runtime_error(what) {}
};

// Width rounding granularity (channels) for parameter matching.
inline constexpr std::int64_t kWidthGranularity = 8;

struct ModelConfig {
  VariantKind variant = VariantKind::Mamba1;
  std::int64_t d_model = 0;
  std::int64_t n_layers = 0;
  std::int64_t d_state = 0;
  double expand = 2.0;
  std::int64_t d_conv = 4;
  std::int64_t dt_rank = 0;    // Mamba-1 only; 0 -> ceil(d_model/16)
  std::int64_t n_heads = 1;    // 1 for Mamba-1 semantics
  std::int64_t head_dim = 0;   // Mamba-2/3: n_heads*head_dim == expand*d_model
  std::int64_t mimo_rank = 1;  // >1 only for Mamba-3
  std::int64_t vocab_size = 0; // 0 = exclude embedding/LM head from params

  std::int64_t d_inner() const {
    return static_cast<std::int64_t>(std::llround(expand * static_cast<double>(d_model)));
  }
  // Activation width of the SSM block: x/z/y streams. R*d_inner for Mamba-3.
  std::int64_t block_width() const { return mimo_rank * d_inner(); }
  std::int64_t dt_rank_effective() const {
    return dt_rank > 0 ? dt_rank : (d_model + 15) / 16;
  }
};

inline void validate(const ModelConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError("model config: " + m); };
  if (c.d_model < 1) fail("d_model must be >= 1");
  if (c.n_layers < 0) fail("n_layers must be >= 0");
  if (c.d_state < 1) fail("d_state must be >= 1");
  if (c.expand <= 0) fail("expand must be positive");
  if (c.d_conv < 1) fail("d_conv must be >= 1");
  if (c.n_heads < 1) fail("n_heads must be >= 1");
  if (c.mimo_rank < 1) fail("mimo_rank must be >= 1");
  if (c.vocab_size < 0) fail("vocab_size must be >= 0");
  const double di = c.expand * static_cast<double>(c.d_model);
  if (std::abs(di - std::llround(di)) > 1e-9) fail("expand*d_model must be integral");
  if (c.mimo_rank != 1 && c.variant != VariantKind::Mamba3)
    fail("mimo_rank != 1 is only valid for mamba3");
  if (c.variant != VariantKind::Mamba1) {
    if (c.head_dim < 1) fail("head_dim must be >= 1 for mamba2/3");
    if (c.n_heads * c.head_dim != c.d_inner())
      fail("n_heads*head_dim must equal expand*d_model, got " +
           std::to_string(c.n_heads) + "*" + std::to_string(c.head_dim) +
           " vs " + std::to_string(c.d_inner()));
  }
}

inline bool formulation_valid(VariantKind v, Formulation f) {
  if (f == Formulation::Sequential) return true;
  if (f == Formulation::PScan) return v == VariantKind::Mamba1;
  return v == VariantKind::Mamba2 || v == VariantKind::Mamba3;
}

// One weight tensor of a layer, in the order it is consumed.
struct WeightTensor {
  std::string name;
  std::int64_t count = 0;
};

inline std::vector<WeightTensor> layer_weight_inventory(const ModelConfig& c) {
  const std::int64_t di = c.d_inner();
  std::vector<WeightTensor> w;
  if (c.variant == VariantKind::Mamba1) {
    const std::int64_t dtr = c.dt_rank_effective();
    w.push_back({"in_proj", c.d_model * 2 * di});
    w.push_back({"conv1d", di * c.d_conv + di});
    w.push_back({"x_proj", di * (dtr + 2 * c.d_state)});
    w.push_back({"dt_proj", dtr * di + di});
    w.push_back({"A_log", di * c.d_state});
    w.push_back({"D", di});
    w.push_back({"out_proj", di * c.d_model});
    w.push_back({"norm", c.d_model});
    return w;
  }
  const std::int64_t r = c.mimo_rank;
  const std::int64_t bw = r * di;              // x/z/y width
  const std::int64_t conv_ch = bw + 2 * r * c.d_state;
  w.push_back({"in_proj", c.d_model * (2 * bw + 2 * r * c.d_state + c.n_heads)});
  w.push_back({"conv1d", conv_ch * c.d_conv + conv_ch});
  w.push_back({"A_log", c.n_heads});
  w.push_back({"D", c.n_heads});
  w.push_back({"dt_bias", c.n_heads});
  w.push_back({"gated_norm", bw});
  w.push_back({"out_proj", bw * c.d_model});
  w.push_back({"norm", c.d_model});
  return w;
}

inline std::int64_t param_count_layer(const ModelConfig& c) {
  std::int64_t total = 0;
  for (const auto& t : layer_weight_inventory(c)) total += t.count;
  return total;
}

// Total parameter count. Embedding and LM head (untied) are included iff
// vocab_size > 0; the final norm exists only when the model has layers.
inline std::int64_t param_count(const ModelConfig& c) {
  validate(c);
  std::int64_t total = c.n_layers * param_count_layer(c);
  if (c.n_layers >= 1) total += c.d_model;  // final norm
  total += 2 * c.vocab_size * c.d_model;    // embedding + head
  return total;
}

// Sequence length above which linear SSM arithmetic beats quadratic attention.
inline std::int64_t attention_crossover(std::int64_t d_model) {
  if (d_model < 1) throw ConfigError("attention_crossover: d_model must be >= 1");
  return 6 * d_model;
}

namespace detail {

// Largest head_dim from {64,32,16,8,4,2,1} dividing the inner width.
inline std::int64_t pick_head_dim(std::int64_t d_inner) {
  for (std::int64_t p : {64, 32, 16, 8, 4, 2, 1})
    if (d_inner % p == 0) return p;
  return 1;
}

inline ModelConfig instantiate(VariantKind v, std::int64_t d, std::int64_t n,
                               std::int64_t d_state, std::int64_t mimo_rank,
                               std::int64_t vocab) {
  ModelConfig c;
  c.variant = v;
  c.d_model = d;
  c.n_layers = n;
  c.d_state = d_state;
  c.expand = 2.0;
  c.d_conv = 4;
  c.vocab_size = vocab;
  if (v == VariantKind::Mamba1) {
    c.n_heads = 1;
    c.head_dim = 0;
    c.mimo_rank = 1;
    c.dt_rank = (d + 15) / 16;
  } else {
    c.head_dim = pick_head_dim(c.d_inner());
    c.n_heads = c.d_inner() / c.head_dim;
    c.mimo_rank = (v == VariantKind::Mamba3) ? mimo_rank : 1;
  }
  return c;
}

}  // namespace detail

// Conventional d_state per variant, used when deriving fresh configs.
inline std::int64_t conventional_d_state(VariantKind v) {
  return v == VariantKind::Mamba1 ? 64 : 128;
}

// Returns a config of `variant` whose param_count matches `reference` within
// +-2%. Mamba-3 uses the fixed width rule d_model/sqrt(R) (rounded to the
// granularity) and adjusts depth only; other variants search width with
// small depth adjustments.
inline ModelConfig match_param_count(VariantKind variant, const ModelConfig& reference,
                                     std::int64_t mimo_rank = 4,
                                     std::int64_t granularity = kWidthGranularity) {
  validate(reference);
  if (granularity < 1) throw ConfigError("match_param_count: granularity must be >= 1");
  const std::int64_t target = param_count(reference);
  if (target <= 0) throw MatchingError("match_param_count: reference has no parameters");
  const double tol = 0.02;
  const std::int64_t rank = (variant == VariantKind::Mamba3) ? mimo_rank : 1;

  auto rel_err = [target](const ModelConfig& c) {
    return std::abs(static_cast<double>(param_count(c)) / static_cast<double>(target) - 1.0);
  };

  if (variant == VariantKind::Mamba3) {
    const double scaled = static_cast<double>(reference.d_model) / std::sqrt(static_cast<double>(rank));
    std::int64_t d = static_cast<std::int64_t>(std::llround(scaled / granularity)) * granularity;
    if (d < granularity) d = granularity;
    ModelConfig best;
    double best_err = 1e9;
    for (std::int64_t dn = 0; dn <= 8; ++dn) {
      for (int sgn : {+1, -1}) {
        const std::int64_t n = reference.n_layers + sgn * dn;
        if (n < 1 || (dn == 0 && sgn < 0)) continue;
        ModelConfig c = detail::instantiate(variant, d, n, conventional_d_state(variant),
                                            rank, reference.vocab_size);
        const double e = rel_err(c);
        if (e < best_err) { best_err = e; best = c; }
      }
      if (best_err <= tol) return best;  // prefer the smallest depth change
    }
    throw MatchingError("match_param_count: mamba3 width rule cannot reach +-2% of " +
                        std::to_string(target) + " at d_model=" + std::to_string(d));
  }

  // Width search for Mamba-1/2.
  ModelConfig best;
  double best_err = 1e9;
  for (std::int64_t dn = 0; dn <= 6; ++dn) {
    for (int sgn : {+1, -1}) {
      const std::int64_t n = reference.n_layers + sgn * dn;
      if (n < 1 || (dn == 0 && sgn < 0)) continue;
      // binary search width on the granularity grid
      std::int64_t lo = granularity, hi = 16384;
      while (lo < hi) {
        const std::int64_t mid = ((lo + hi) / 2 / granularity) * granularity;
        ModelConfig c = detail::instantiate(variant, std::max(mid, granularity), n,
                                            conventional_d_state(variant), 1,
                                            reference.vocab_size);
        if (param_count(c) < target) lo = mid + granularity; else hi = mid;
      }
      for (std::int64_t d : {lo - granularity, lo, lo + granularity}) {
        if (d < granularity) continue;
        ModelConfig c = detail::instantiate(variant, d, n, conventional_d_state(variant), 1,
                                            reference.vocab_size);
        const double e = rel_err(c);
        if (e < best_err) { best_err = e; best = c; }
      }
    }
    if (best_err <= tol) return best;
  }
  throw MatchingError("match_param_count: no " + std::string(to_string(variant)) +
                      " config within +-2% of " + std::to_string(target) +
                      " (searched widths 8..16384, depth +-6)");
}

// Builds a Mamba-2 backbone reference config near `target_params` (vocab 0),
// aspect ratio d_model/n_layers near the calibrated 880M shape, such that the
// Mamba-3 width-rule match is feasible. Used by the model-size sweep.
inline ModelConfig build_reference_config(std::int64_t target_params) {
  if (target_params < 1000000) throw MatchingError("build_reference_config: size must be >= 1M");
  constexpr double kAspect = 118.0;  // ~ 2368/20
  ModelConfig best;
  double best_aspect = 1e9, best_err = 1e9;
  bool found = false;
  for (std::int64_t d = 128; d <= 4096; d += 32) {
    ModelConfig probe = detail::instantiate(VariantKind::Mamba2, d, 1,
                                            conventional_d_state(VariantKind::Mamba2), 1, 0);
    const double layer = static_cast<double>(param_count_layer(probe));
    const double n_real = static_cast<double>(target_params) / layer;
    for (std::int64_t n : {static_cast<std::int64_t>(n_real),
                           static_cast<std::int64_t>(n_real) + 1}) {
      if (n < 1) continue;
      ModelConfig c = detail::instantiate(VariantKind::Mamba2, d, n,
                                          conventional_d_state(VariantKind::Mamba2), 1, 0);
      const double err = std::abs(static_cast<double>(param_count(c)) /
                                  static_cast<double>(target_params) - 1.0);
      if (err > 0.025) continue;
      bool matchable = true;
      try { (void)match_param_count(VariantKind::Mamba3, c); }
      catch (const MatchingError&) { matchable = false; }
      if (!matchable) continue;
      const double aspect_dev = std::abs(std::log((static_cast<double>(d) / n) / kAspect));
      if (!found || aspect_dev < best_aspect - 1e-12 ||
          (std::abs(aspect_dev - best_aspect) < 1e-12 && err < best_err)) {
        found = true; best_aspect = aspect_dev; best_err = err; best = c;
      }
    }
  }
  if (!found)
    throw MatchingError("build_reference_config: no matchable reference near " +
                        std::to_string(target_params) + " params");
  return best;
}

}  // namespace ssmperf
