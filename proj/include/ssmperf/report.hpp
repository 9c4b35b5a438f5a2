#pragma once

// Table-style reports over (variant, formulation) rows and figure-data
// emission. Reports are always derived from a fresh evaluation; percentage
// deltas are recomputed from raw values at render time, never stored.

#include <cstdint>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "archspec.hpp"
#include "config_io.hpp"
#include "opgraph.hpp"
#include "perf.hpp"

namespace ssmperf {

inline constexpr const char* kToolVersion = "0.1.0";

struct ReportRow {
  VariantKind variant;
  Formulation formulation;
  double total_gops_per_tok = 0.0;
  double state_update_gops_per_tok = 0.0;
  double oi_ops_per_byte = 0.0;  // state-update block OI
  double throughput_tok_per_s = 0.0;
  double energy_mj_per_tok = 0.0;
};

struct Report {
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> metadata;
};

inline ReportRow evaluate_table_row(const ModelConfig& c, Formulation f,
                                    const HardwareConfig& hw, std::int64_t seq_len = 2048,
                                    std::int64_t chunk_size = 0) {
  WorkloadSpec w;
  w.phase = Phase::Prefill;
  w.batch = 1;
  w.seq_len = seq_len;
  w.formulation = f;
  w.chunk_size = chunk_size > 0 ? chunk_size : calibrated_chunk_size(c.variant);
  const LayerGraph g = build_layer_graph(c, w, OpConvention{}, data_widths(hw));
  const OpTotals t = count_ops(g);
  ReportRow row;
  row.variant = c.variant;
  row.formulation = f;
  if (t.total_ops_per_token > 0) {
    const PerfEstimate e = roofline_estimate(t, w, hw);
    row.total_gops_per_tok = e.ops_per_token_gops;
    row.state_update_gops_per_tok = e.state_update_ops_gops;
    row.oi_ops_per_byte = su_block_oi(t);
    row.throughput_tok_per_s = e.throughput_tok_per_s;
    row.energy_mj_per_tok = e.energy_mj_per_token;
  }
  return row;
}

// The six-row reference comparison: sequential plus the parallel formulation
// of each variant.
inline Report build_comparison_report(const ModelConfig& m1, const ModelConfig& m2,
                                      const ModelConfig& m3, const HardwareConfig& hw,
                                      std::int64_t seq_len = 2048) {
  Report rep;
  rep.metadata["tool"] = "ssmperf";
  rep.metadata["version"] = kToolVersion;
  rep.rows.push_back(evaluate_table_row(m1, Formulation::Sequential, hw, seq_len));
  rep.rows.push_back(evaluate_table_row(m1, Formulation::PScan, hw, seq_len));
  rep.rows.push_back(evaluate_table_row(m2, Formulation::Sequential, hw, seq_len));
  rep.rows.push_back(evaluate_table_row(m2, Formulation::SSD, hw, seq_len));
  rep.rows.push_back(evaluate_table_row(m3, Formulation::Sequential, hw, seq_len));
  rep.rows.push_back(evaluate_table_row(m3, Formulation::SSD, hw, seq_len));
  return rep;
}

namespace report_detail {

inline std::string fmt(double v, int prec) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << v;
  return os.str();
}

inline const ReportRow* find_row(const Report& r, VariantKind v, Formulation f) {
  for (const auto& row : r.rows)
    if (row.variant == v && row.formulation == f) return &row;
  return nullptr;
}

}  // namespace report_detail

inline std::string render_markdown(const Report& r) {
  std::ostringstream os;
  os << "| Variant | Total ops [GOps/tok] | State-update ops [GOps/tok] | OI [ops/B] "
     << "| Throughput [tok/s] | Energy [mJ/tok] |\n";
  os << "|---|---|---|---|---|---|\n";
  using report_detail::fmt;
  const ReportRow* m2s = report_detail::find_row(r, VariantKind::Mamba2, Formulation::Sequential);
  for (const auto& row : r.rows) {
    std::string total = fmt(row.total_gops_per_tok, 2);
    std::string su = fmt(row.state_update_gops_per_tok, 3);
    if (m2s && row.variant == VariantKind::Mamba3 && row.formulation == Formulation::Sequential &&
        m2s->total_gops_per_tok > 0) {
      // deltas recomputed from raw values
      const double dpct = (row.total_gops_per_tok / m2s->total_gops_per_tok - 1.0) * 100.0;
      const double ratio = row.state_update_gops_per_tok / m2s->state_update_gops_per_tok;
      total += " (+" + fmt(dpct, 0) + "%)";
      su += " (x" + fmt(ratio, 1) + ")";
    }
    os << "| " << to_string(row.variant) << " (" << to_string(row.formulation) << ") | " << total
       << " | " << su << " | " << fmt(row.oi_ops_per_byte, 1) << " | "
       << fmt(row.throughput_tok_per_s, 1) << " | " << fmt(row.energy_mj_per_tok, 2) << " |\n";
  }
  return os.str();
}

// Fixed documented header; plain RFC-4180 fields (no quoting needed).
inline constexpr const char* kCsvHeader =
    "variant,formulation,total_gops_per_tok,state_update_gops_per_tok,"
    "oi_ops_per_byte,throughput_tok_per_s,energy_mj_per_tok";

inline std::string render_csv(const Report& r) {
  std::ostringstream os;
  os << kCsvHeader << "\r\n";
  os << std::setprecision(17);
  for (const auto& row : r.rows) {
    os << to_string(row.variant) << ',' << to_string(row.formulation) << ','
       << row.total_gops_per_tok << ',' << row.state_update_gops_per_tok << ','
       << row.oi_ops_per_byte << ',' << row.throughput_tok_per_s << ','
       << row.energy_mj_per_tok << "\r\n";
  }
  return os.str();
}

inline nlohmann::json to_json(const Report& r) {
  nlohmann::json j;
  j["metadata"] = r.metadata;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"variant", to_string(row.variant)},
                         {"formulation", to_string(row.formulation)},
                         {"total_gops_per_tok", row.total_gops_per_tok},
                         {"state_update_gops_per_tok", row.state_update_gops_per_tok},
                         {"oi_ops_per_byte", row.oi_ops_per_byte},
                         {"throughput_tok_per_s", row.throughput_tok_per_s},
                         {"energy_mj_per_tok", row.energy_mj_per_tok}});
  }
  return j;
}

inline std::string render_json(const Report& r) { return to_json(r).dump(2) + "\n"; }

inline Report report_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  Report r;
  if (j.contains("metadata"))
    for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it)
      r.metadata[it.key()] = it.value().get<std::string>();
  for (const auto& jr : j.at("rows")) {
    ReportRow row;
    row.variant = variant_from_string(jr.at("variant").get<std::string>());
    row.formulation = formulation_from_string(jr.at("formulation").get<std::string>());
    row.total_gops_per_tok = jr.at("total_gops_per_tok").get<double>();
    row.state_update_gops_per_tok = jr.at("state_update_gops_per_tok").get<double>();
    row.oi_ops_per_byte = jr.at("oi_ops_per_byte").get<double>();
    row.throughput_tok_per_s = jr.at("throughput_tok_per_s").get<double>();
    row.energy_mj_per_tok = jr.at("energy_mj_per_tok").get<double>();
    r.rows.push_back(row);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Figure data (x, series...) tables and a minimal deterministic SVG plot.

struct FigureData {
  std::string x_label;
  std::vector<std::string> series_labels;
  std::vector<double> x;
  std::vector<std::vector<double>> series;  // series[i][j]: series i at x j
};

inline std::string render_figure_csv(const FigureData& f) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << f.x_label;
  for (const auto& s : f.series_labels) os << ',' << s;
  os << "\r\n";
  for (size_t j = 0; j < f.x.size(); ++j) {
    os << f.x[j];
    for (const auto& s : f.series) os << ',' << s[j];
    os << "\r\n";
  }
  return os.str();
}

// Fixed-layout line chart; coordinates rounded so output is byte-stable.
inline std::string render_figure_svg(const FigureData& f, const std::string& title) {
  const double W = 640, H = 400, ml = 70, mr = 20, mt = 40, mb = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (double v : f.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
  for (const auto& s : f.series)
    for (double v : s) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad; ymax += ypad;
  auto sx = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto sy = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (int)W << "\" height=\"" << (int)H
     << "\" viewBox=\"0 0 " << (int)W << " " << (int)H << "\">\n";
  os << "<rect width=\"" << (int)W << "\" height=\"" << (int)H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"14\">" << title << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  for (size_t i = 0; i < f.series.size(); ++i) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[i % 5] << "\" stroke-width=\"2\" points=\"";
    for (size_t j = 0; j < f.x.size(); ++j) {
      if (j) os << ' ';
      os << sx(f.x[j]) << ',' << sy(f.series[i][j]);
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - mr - 4 << "\" y=\"" << mt + 16 + 16 * static_cast<double>(i)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
       << colors[i % 5] << "\">" << f.series_labels[i] << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << f.x_label
     << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace ssmperf
