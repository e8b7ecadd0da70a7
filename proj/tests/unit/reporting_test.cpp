#include <doctest.h>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "slfs/errors.hpp"
#include "slfs/reporting.hpp"
#include "slfs/rng.hpp"

using namespace slfs;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / "slfs_reporting_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("manifests round-trip through json") {
  RunManifest m;
  m.command = "select";
  m.config_json = R"({"lambda":1.5,"order":"shuffle:9"})";
  m.data_path = "/tmp/x.csv";
  m.data_checksum = "fnv1a64:00ff";
  m.seed = 9;
  m.outputs = {"selection.json", "tbn.dot"};
  m.timings_s = {{"total_s", 0.5}};

  const std::string text = m.to_json_string();
  const RunManifest back = RunManifest::from_json_string(text);
  CHECK_EQ(back.command, m.command);
  CHECK_EQ(back.data_path, m.data_path);
  CHECK_EQ(back.data_checksum, m.data_checksum);
  CHECK_EQ(back.seed, m.seed);
  CHECK_EQ(back.outputs, m.outputs);
  CHECK_EQ(back.timings_s, m.timings_s);
  CHECK_EQ(back.version, kToolVersion);
  // The config snapshot embeds as a json value, not an escaped string.
  CHECK(text.find("\"lambda\"") != std::string::npos);
  CHECK_EQ(back.to_json_string(), text);

  CHECK_THROWS_AS(RunManifest::from_json_string("}{"), SchemaError);
}

TEST_CASE("an empty config snapshot serializes as null") {
  RunManifest m;
  m.command = "discretize";
  const RunManifest back = RunManifest::from_json_string(m.to_json_string());
  CHECK_EQ(back.config_json, "");
}

TEST_CASE("file checksums are stable and prefixed") {
  const auto p = scratch_dir() / "sum.bin";
  std::ofstream(p, std::ios::binary) << "hello, world\n";
  CHECK_EQ(file_checksum(p.string()), "fnv1a64:9a24251e3ac660eb");
  CHECK_THROWS_AS(file_checksum((scratch_dir() / "absent").string()), DataError);
}

TEST_CASE("atomic writes create directories and leave no temp files") {
  const auto dir = scratch_dir() / "nested" / "deeper";
  fs::remove_all(scratch_dir() / "nested");
  const auto target = dir / "out.txt";
  atomic_write_file(target.string(), "first");
  CHECK_EQ(read_file(target.string()), "first");
  atomic_write_file(target.string(), "second");
  CHECK_EQ(read_file(target.string()), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK_EQ(entries, 1);
}

TEST_CASE("read_file reports unreadable paths") {
  CHECK_THROWS_AS(read_file("/nonexistent/nowhere.txt"), DataError);
}

TEST_CASE("doubles render shortest-round-trip") {
  CHECK_EQ(format_double(0.5), "0.5");
  CHECK_EQ(format_double(1.0), "1");
  CHECK_EQ(format_double(-2.25), "-2.25");
  CHECK_EQ(format_double(0.1), "0.1");

  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 500; ++trial) {
    double v;
    do {
      const std::uint64_t bits = rng();
      static_assert(sizeof(bits) == sizeof(v));
      __builtin_memcpy(&v, &bits, sizeof(v));
    } while (!std::isfinite(v));
    const std::string s = format_double(v);
    double parsed = 0.0;
    const auto rc = std::from_chars(s.data(), s.data() + s.size(), parsed);
    REQUIRE(rc.ec == std::errc{});
    CHECK_EQ(parsed, v);
  }
}

TEST_CASE("csv cells quote only when needed") {
  CHECK_EQ(csv_escape("plain"), "plain");
  CHECK_EQ(csv_escape("with,comma"), "\"with,comma\"");
  CHECK_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
  CHECK_EQ(csv_escape("line\nbreak"), "\"line\nbreak\"");
  CHECK_EQ(csv_escape("semi;colon", ';'), "\"semi;colon\"");
  CHECK_EQ(csv_escape("semi;colon", ','), "semi;colon");
}
