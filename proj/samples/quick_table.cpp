// Minimal library usage: load the reference configs, print the comparison
// table and the two regime orderings.

#include <iostream>

#include "ssmperf/config_io.hpp"
#include "ssmperf/perf.hpp"
#include "ssmperf/report.hpp"

int main() {
  using namespace ssmperf;
  const std::string root = SSMPERF_REPO_DIR;
  const HardwareConfig hw = load_hw_config(root + "/hw/edge-asic-default");
  const ModelConfig m1 = load_model_config(root + "/configs/mamba1-880m");
  const ModelConfig m2 = load_model_config(root + "/configs/mamba2-880m");
  const ModelConfig m3 = load_model_config(root + "/configs/mamba3-880m");

  std::cout << render_markdown(build_comparison_report(m1, m2, m3, hw)) << "\n";

  for (auto sc : {Scenario::EdgePrefill, Scenario::HyperscaleDecode}) {
    std::cout << (sc == Scenario::EdgePrefill ? "edge prefill" : "hyperscale decode")
              << " normalized state-update throughput:";
    for (const auto& row : regime_table({m1, m2, m3}, sc, hw))
      std::cout << " " << to_string(row.variant) << "=" << row.normalized;
    std::cout << "\n";
  }
  return 0;
}
