// ssmperf command-line front end: analyze single configurations, reproduce
// the six-row comparison table, run model-size and batch sweeps, and run the
// oracle verification corpus.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssmperf/archspec.hpp"
#include "ssmperf/config_io.hpp"
#include "ssmperf/opgraph.hpp"
#include "ssmperf/oracle_check.hpp"
#include "ssmperf/perf.hpp"
#include "ssmperf/report.hpp"

namespace {

using namespace ssmperf;

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot write output file '" + out_path + "'");
  f << text;
}

std::string render(const Report& rep, const std::string& format) {
  if (format == "md") return render_markdown(rep);
  if (format == "csv") return render_csv(rep);
  if (format == "json") return render_json(rep);
  throw ConfigError("unknown format '" + format + "'");
}

struct AnalyzeArgs {
  std::string model_path, hw_path;
  std::string phase = "prefill";
  std::int64_t batch = 1;
  std::int64_t seq_len = 2048;
  std::string formulation = "sequential";
  std::int64_t chunk_size = 0;
  std::int64_t layers_override = -1;
  std::string format = "md";
  std::string out;
};

int cmd_analyze(const AnalyzeArgs& a) {
  ModelConfig c = load_model_config(a.model_path);
  const HardwareConfig hw = load_hw_config(a.hw_path);
  if (a.layers_override >= 0) c.n_layers = a.layers_override;

  WorkloadSpec w;
  w.phase = (a.phase == "decode") ? Phase::Decode : Phase::Prefill;
  w.batch = a.batch;
  w.seq_len = a.seq_len;
  w.formulation = formulation_from_string(a.formulation);
  w.chunk_size = a.chunk_size > 0 ? a.chunk_size : calibrated_chunk_size(c.variant);

  const LayerGraph g = build_layer_graph(c, w, OpConvention{}, data_widths(hw));
  const OpTotals t = count_ops(g);

  Report rep;
  rep.metadata["tool"] = "ssmperf";
  rep.metadata["version"] = kToolVersion;
  rep.metadata["model_config"] = a.model_path;
  rep.metadata["model_config_hash"] = std::to_string(file_hash(a.model_path));
  rep.metadata["hw_config_hash"] = std::to_string(file_hash(a.hw_path));
  ReportRow row;
  row.variant = c.variant;
  row.formulation = w.formulation;
  if (t.total_ops_per_token > 0) {
    const PerfEstimate e = roofline_estimate(t, w, hw);
    row.total_gops_per_tok = e.ops_per_token_gops;
    row.state_update_gops_per_tok = e.state_update_ops_gops;
    row.oi_ops_per_byte = su_block_oi(t);
    row.throughput_tok_per_s = e.throughput_tok_per_s;
    row.energy_mj_per_tok = e.energy_mj_per_token;
  }
  rep.rows.push_back(row);
  write_output(render(rep, a.format), a.out);
  return 0;
}

struct CompareArgs {
  std::string configs_dir = "configs";
  std::string hw_path = "hw/edge-asic-default";
  std::int64_t seq_len = 2048;
  std::string size = "880m";
  std::string format = "md";
  std::string out;
};

int cmd_compare(const CompareArgs& a) {
  const HardwareConfig hw = load_hw_config(a.hw_path);
  auto path = [&](const char* v) { return a.configs_dir + "/" + v + "-" + a.size; };
  const ModelConfig m1 = load_model_config(path("mamba1"));
  const ModelConfig m2 = load_model_config(path("mamba2"));
  const ModelConfig m3 = load_model_config(path("mamba3"));
  Report rep = build_comparison_report(m1, m2, m3, hw, a.seq_len);
  rep.metadata["hw_config_hash"] = std::to_string(file_hash(a.hw_path));
  for (const char* v : {"mamba1", "mamba2", "mamba3"})
    rep.metadata[std::string(v) + "_config_hash"] = std::to_string(file_hash(path(v)));
  write_output(render(rep, a.format), a.out);
  return 0;
}

struct SweepArgs {
  std::string kind;
  double from = 15e6, to = 880e6;
  int points = 7;
  std::string config_path;
  std::string hw_path = "hw/edge-asic-default";
  std::string batches = "1,2,4,8,16,32,64,128,256,512,1024";
  std::string normalize_to = "mamba2";
  std::string out;
  std::string svg;
};

int cmd_sweep(const SweepArgs& a) {
  const HardwareConfig hw = load_hw_config(a.hw_path);
  if (a.kind == "size") {
    if (a.points <= 0 || a.to < a.from) {
      std::cerr << "warning: empty sweep range, nothing to do\n";
      write_output("", a.out);
      return 0;
    }
    std::vector<double> sizes;
    for (int i = 0; i < a.points; ++i) {
      const double t = a.points == 1 ? 0.0 : static_cast<double>(i) / (a.points - 1);
      sizes.push_back(a.from * std::pow(a.to / a.from, t));
    }
    const std::vector<VariantKind> variants{VariantKind::Mamba1, VariantKind::Mamba2,
                                            VariantKind::Mamba3};
    const auto rows = sweep_model_size(sizes, variants, hw);

    FigureData fig;
    fig.x_label = "parameters";
    fig.series_labels = {"mamba1", "mamba2", "mamba3"};
    fig.series.resize(3);
    const bool norm_m1 = (a.normalize_to == "mamba1");
    for (const auto& row : rows) {
      fig.x.push_back(row.target_params);
      double base = 1.0;
      if (norm_m1) base = row.entries[0].normalized_iso;
      for (size_t v = 0; v < 3; ++v)
        fig.series[v].push_back(row.entries[v].normalized_iso / base);
    }
    write_output(render_figure_csv(fig), a.out);
    if (!a.svg.empty()) {
      std::ofstream f(a.svg, std::ios::binary);
      f << render_figure_svg(fig, "Normalized latency vs model size (prefill, B=1)");
    }
    const auto& smallest = rows.front();
    const double pen = (smallest.entries[2].normalized_iso / smallest.entries[1].normalized_iso - 1.0) * 100.0;
    std::cerr << "mode: pure roofline, iso-parameter normalized latency (normalize-to "
              << a.normalize_to << ")\n";
    std::cerr << "mamba3 penalty at " << smallest.target_params / 1e6 << "M params: +" << pen
              << "%\n";
    return 0;
  }
  if (a.kind == "batch") {
    if (a.config_path.empty()) throw ConfigError("sweep batch requires --config");
    const ModelConfig c = load_model_config(a.config_path);
    std::vector<std::int64_t> batches;
    std::stringstream ss(a.batches);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) batches.push_back(std::stoll(tok));
    if (batches.empty()) {
      std::cerr << "warning: empty batch list, nothing to do\n";
      write_output("", a.out);
      return 0;
    }
    const auto rows = sweep_batch(c, batches, hw);
    FigureData fig;
    fig.x_label = "batch";
    fig.series_labels = {"throughput_tok_per_s"};
    fig.series.resize(1);
    for (const auto& r : rows) {
      fig.x.push_back(static_cast<double>(r.batch));
      fig.series[0].push_back(r.estimate.throughput_tok_per_s);
    }
    write_output(render_figure_csv(fig), a.out);
    if (!a.svg.empty()) {
      std::ofstream f(a.svg, std::ios::binary);
      f << render_figure_svg(fig, "Decode throughput vs batch size");
    }
    return 0;
  }
  throw ConfigError("sweep kind must be 'size' or 'batch'");
}

struct OracleArgs {
  std::uint64_t seed = 0;
  int instances = 1000;
  std::string sizes;
  bool inject_fault = false;
};

int cmd_oracle_check(const OracleArgs& a) {
  OracleCheckOptions opt;
  opt.seed = a.seed;
  opt.instances = a.instances;
  opt.inject_fault = a.inject_fault;
  if (!a.sizes.empty()) {
    std::string spec = a.sizes;
    if (spec.rfind("L=", 0) == 0) spec = spec.substr(2);
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) opt.sizes.push_back(std::stoll(tok));
  }
  const OracleCheckResult res = run_oracle_checks(opt);
  std::cout << "oracle-check: " << res.checks << " checks, max pscan deviation "
            << res.max_pscan_dev << ", max ssd deviation " << res.max_ssd_dev << "\n";
  if (res.ok()) {
    std::cout << "all oracle checks passed\n";
    return 0;
  }
  for (const auto& f : res.failures) std::cout << "FAIL: " << f << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ssmperf: operator-level edge performance modeling for Mamba-family SSMs"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "evaluate one model/hardware configuration");
  analyze->add_option("model", an.model_path, "model config file")->required();
  analyze->add_option("hardware", an.hw_path, "hardware config file")->required();
  analyze->add_option("--phase", an.phase, "prefill|decode")
      ->check(CLI::IsMember({"prefill", "decode"}));
  analyze->add_option("--batch", an.batch, "batch size");
  analyze->add_option("--seq-len", an.seq_len, "sequence length");
  analyze->add_option("--formulation", an.formulation, "sequential|pscan|ssd")
      ->check(CLI::IsMember({"sequential", "pscan", "ssd"}));
  analyze->add_option("--chunk-size", an.chunk_size, "SSD chunk size (0 = calibrated default)");
  analyze->add_option("--layers", an.layers_override, "override layer count");
  analyze->add_option("--format", an.format, "md|csv|json")
      ->check(CLI::IsMember({"md", "csv", "json"}));
  analyze->add_option("--out", an.out, "output path (default stdout)");

  CompareArgs cm;
  auto* compare = app.add_subcommand("compare", "six-row variant/formulation comparison table");
  compare->add_option("--configs-dir", cm.configs_dir, "directory with mamba{1,2,3}-<size> files");
  compare->add_option("--hw", cm.hw_path, "hardware config file");
  compare->add_option("--size", cm.size, "config size suffix (880m or 15m)");
  compare->add_option("--seq-len", cm.seq_len, "sequence length");
  compare->add_option("--format", cm.format, "md|csv|json")
      ->check(CLI::IsMember({"md", "csv", "json"}));
  compare->add_option("--out", cm.out, "output path (default stdout)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "model-size or batch sweep, figure data output");
  sweep->add_option("kind", sw.kind, "size|batch")->required()
      ->check(CLI::IsMember({"size", "batch"}));
  sweep->add_option("--from", sw.from, "smallest parameter count (size sweep)");
  sweep->add_option("--to", sw.to, "largest parameter count (size sweep)");
  sweep->add_option("--points", sw.points, "number of sweep points");
  sweep->add_option("--config", sw.config_path, "model config (batch sweep)");
  sweep->add_option("--hw", sw.hw_path, "hardware config file");
  sweep->add_option("--batches", sw.batches, "comma-separated batch sizes");
  sweep->add_option("--normalize-to", sw.normalize_to, "mamba1|mamba2")
      ->check(CLI::IsMember({"mamba1", "mamba2"}));
  sweep->add_option("--out", sw.out, "figure data output path (default stdout)");
  sweep->add_option("--svg", sw.svg, "also write an SVG plot");

  OracleArgs oc;
  auto* oracle = app.add_subcommand("oracle-check", "run oracle equivalence and count checks");
  oracle->add_option("--seed", oc.seed, "RNG seed for the corpus");
  oracle->add_option("--instances", oc.instances, "number of random instances");
  oracle->add_option("--sizes", oc.sizes, "restrict sequence lengths, e.g. L=1,8,64");
  oracle->add_flag("--inject-fault", oc.inject_fault, "test hook: corrupt one result");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*analyze) return cmd_analyze(an);
    if (*compare) return cmd_compare(cm);
    if (*sweep) return cmd_sweep(sw);
    if (*oracle) return cmd_oracle_check(oc);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MatchingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyWorkloadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
