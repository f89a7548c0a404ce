#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "augrl/config.hpp"
#include "augrl/io.hpp"
#include "augrl/rng.hpp"

using namespace augrl;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const auto dir = fs::temp_directory_path() / "augrl_io_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("spectrogram file round-trips byte for byte") {
  const auto dir = temp_dir();
  Spectrogram s(7, 5);
  SplitRng rng(3);
  for (auto& v : s.values) v = static_cast<float>(rng.gaussian(0, 1));

  const auto p1 = dir / "a.spec";
  const auto p2 = dir / "b.spec";
  write_spectrogram_file(p1, s);
  const Spectrogram r = read_spectrogram_file(p1);
  CHECK(r == s);
  write_spectrogram_file(p2, r);
  CHECK(read_file(p1) == read_file(p2));
}

TEST_CASE("dataset file round-trips") {
  const auto dir = temp_dir();
  Dataset d;
  d.n_time = 4;
  d.n_freq = 3;
  d.n_classes = 2;
  SplitRng rng(5);
  for (int i = 0; i < 6; ++i) {
    Spectrogram s(4, 3);
    for (auto& v : s.values) v = static_cast<float>(rng.uniform());
    d.specs.push_back(s);
    d.labels.push_back(i % 2);
  }
  const auto p = dir / "d.spds";
  write_dataset_file(p, d);
  const Dataset r = read_dataset_file(p);
  CHECK(r.n_time == d.n_time);
  CHECK(r.n_freq == d.n_freq);
  CHECK(r.n_classes == d.n_classes);
  CHECK(r.labels == d.labels);
  CHECK(r.specs == d.specs);
}

TEST_CASE("corrupt files are rejected") {
  const auto dir = temp_dir();
  const auto p = dir / "bad.spec";
  atomic_write_text(p, "not a spectrogram");
  CHECK_THROWS(read_spectrogram_file(p));
  atomic_write_text(p, "SPEC1");  // truncated header
  CHECK_THROWS(read_spectrogram_file(p));
}

TEST_CASE("config files parse key = value with comments") {
  const auto dir = temp_dir();
  const auto p = dir / "a.conf";
  atomic_write_text(p,
                    "# comment line\n"
                    "mode = rl   # trailing comment\n"
                    "epochs=25\n"
                    "\n"
                    "eta_asr = 0.05\n");
  const ConfigMap c = load_config_file(p);
  CHECK(c.get("mode") == "rl");
  CHECK(c.get_int("epochs") == 25);
  CHECK(c.get_double("eta_asr") == doctest::Approx(0.05));
  CHECK_FALSE(c.has("missing"));
  CHECK_THROWS(c.get("missing"));
}

TEST_CASE("malformed config lines report the line number") {
  const auto dir = temp_dir();
  const auto p = dir / "bad.conf";
  atomic_write_text(p, "mode = rl\nbroken line\n");
  try {
    load_config_file(p);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  atomic_write_text(p, "mode = rl\nmode = none\n");
  CHECK_THROWS(load_config_file(p));
}

TEST_CASE("typed getters reject junk") {
  ConfigMap c;
  c.set("x", "12abc");
  CHECK_THROWS(c.get_int("x"));
  c.set("x", "yes");
  CHECK_THROWS(c.get_bool("x"));
  c.set("x", "true");
  CHECK(c.get_bool("x"));
}

TEST_CASE("manifest round-trips") {
  const auto dir = temp_dir();
  RunManifest m;
  m.command = "train";
  m.config.set("mode", "rl");
  m.config.set("m", "4");
  m.artifacts = {"metrics.jsonl"};
  m.started_at = utc_timestamp();
  m.finished_at = m.started_at;
  const auto p = dir / "manifest.json";
  write_manifest(p, m);
  const RunManifest r = read_manifest(p);
  CHECK(r.command == "train");
  CHECK(r.config.get("mode") == "rl");
  CHECK(r.config.get_int("m") == 4);
  CHECK(r.artifacts == m.artifacts);
  CHECK(r.tool_version == std::string(kToolVersion));
}

TEST_CASE("int list parsing") {
  CHECK(parse_int_list("2,4,8") == std::vector<int>{2, 4, 8});
  CHECK(parse_int_list(" 3 ") == std::vector<int>{3});
  CHECK_THROWS(parse_int_list("2,,4"));
  CHECK_THROWS(parse_int_list("a,b"));
}
