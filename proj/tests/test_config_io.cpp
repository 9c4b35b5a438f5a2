#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "ssmperf/config_io.hpp"

using namespace ssmperf;

namespace {

std::string repo(const char* rel) { return std::string(SSMPERF_REPO_DIR) + "/" + rel; }

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "ssmperf_test_cfg_" + std::to_string(counter++) + ".tmp";
    std::ofstream f(path);
    f << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("all shipped configs load and validate") {
  for (const char* name : {"configs/mamba1-880m", "configs/mamba2-880m", "configs/mamba3-880m",
                           "configs/mamba1-15m", "configs/mamba2-15m", "configs/mamba3-15m"}) {
    CAPTURE(name);
    const ModelConfig c = load_model_config(repo(name));
    CHECK(c.d_model >= 1);
  }
  const HardwareConfig h = load_hw_config(repo("hw/edge-asic-default"));
  CHECK(h.mac_units == 1024);
  CHECK(h.simd_lanes == 32);
  CHECK(h.clock_hz == 250e6);
  CHECK(h.sram_bytes == 2 * 1024 * 1024);
  CHECK(h.dram_bw_bytes_per_s == 34e9);
  CHECK(h.e_mem_pj_per_bit == 15.0);
  CHECK(h.e_op_pj == 2.0);
}

TEST_CASE("missing file is a config error") {
  REQUIRE_THROWS_AS(load_model_config("no/such/file"), ConfigError);
}

TEST_CASE("unknown key is rejected and named") {
  TempFile f("variant = mamba1\nd_model = 64\nn_layers = 2\nd_state = 16\nexpand = 2\nbogus = 3\n");
  try {
    load_model_config(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("malformed value names the key") {
  TempFile f("variant = mamba1\nd_model = sixty\nn_layers = 2\nd_state = 16\nexpand = 2\n");
  try {
    load_model_config(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("d_model") != std::string::npos);
  }
}

TEST_CASE("duplicate keys are rejected") {
  TempFile f("variant = mamba1\nd_model = 64\nd_model = 65\nn_layers = 2\nd_state = 16\nexpand = 2\n");
  REQUIRE_THROWS_AS(load_model_config(f.path), ConfigError);
}

TEST_CASE("missing required key is reported") {
  TempFile f("variant = mamba1\nn_layers = 2\nd_state = 16\nexpand = 2\n");
  try {
    load_model_config(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("d_model") != std::string::npos);
  }
}

TEST_CASE("serialize and reload a config") {
  const ModelConfig c = load_model_config(repo("configs/mamba3-880m"));
  TempFile f(serialize(c));
  const ModelConfig back = load_model_config(f.path);
  CHECK(back.variant == c.variant);
  CHECK(back.d_model == c.d_model);
  CHECK(back.n_layers == c.n_layers);
  CHECK(back.d_state == c.d_state);
  CHECK(back.n_heads == c.n_heads);
  CHECK(back.head_dim == c.head_dim);
  CHECK(back.mimo_rank == c.mimo_rank);
  CHECK(back.vocab_size == c.vocab_size);
}

TEST_CASE("hardware values accept scientific notation") {
  TempFile f("clock_hz = 1e9\nmac_units = 2.048e3\n");
  const HardwareConfig h = load_hw_config(f.path);
  CHECK(h.clock_hz == 1e9);
  CHECK(h.mac_units == 2048);
}

TEST_CASE("file hashing is stable") {
  CHECK(file_hash(repo("hw/edge-asic-default")) == file_hash(repo("hw/edge-asic-default")));
  CHECK(fnv1a("abc") != fnv1a("abd"));
}
