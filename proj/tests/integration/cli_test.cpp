#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "slfs/reporting.hpp"

// End-to-end checks that spawn the installed command line binary. The path
// arrives through the SLFS_CLI environment variable set by ctest.

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string cli_path() {
  const char* p = std::getenv("SLFS_CLI");
  REQUIRE_MESSAGE(p != nullptr, "SLFS_CLI must point at the built binary");
  return p;
}

fs::path scratch() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "slfs_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path write_fixture_a() {
  const auto p = scratch() / "a.csv";
  std::ofstream(p) << "y,f0,f1,f2\n"
                      "0,0,0,0\n0,0,0,1\n0,1,0,0\n0,1,1,1\n"
                      "1,0,1,0\n1,0,1,1\n1,1,1,0\n1,1,0,1\n";
  return p;
}

fs::path write_numeric_fixture() {
  const auto p = scratch() / "num.csv";
  std::ofstream out(p);
  out << "x,noise,y\n";
  for (int i = 0; i < 40; ++i) {
    const int cls = (i / 4) % 2;
    out << cls * 10 + i % 4 << "," << (i * 7) % 5 << ","
        << (cls ? "pos" : "neg") << "\n";
  }
  return p;
}

}  // namespace

TEST_CASE("select writes its outputs and finds the informative feature") {
  const auto data = write_fixture_a();
  const auto out = scratch() / "select_out";
  REQUIRE_EQ(run("select --data " + data.string() + " --class y --categorical f0,f1,f2 --out-dir " + out.string()),
             0);
  for (const char* name : {"selection.json", "j_trace.csv", "tbn.dot", "manifest.json"})
    CHECK(fs::exists(out / name));

  const json sel = json::parse(slfs::read_file((out / "selection.json").string()));
  REQUIRE_EQ(sel.at("selected").size(), 1);
  CHECK_EQ(sel.at("selected")[0].at("name"), "f1");
  CHECK_EQ(sel.at("selected")[0].at("parent_name"), "Y");
  CHECK_EQ(sel.at("rejected").size(), 2);

  const json man = json::parse(slfs::read_file((out / "manifest.json").string()));
  CHECK_EQ(man.at("command"), "select");
  CHECK(man.at("data_checksum").get<std::string>().rfind("fnv1a64:", 0) == 0);
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  const auto data = write_fixture_a();
  const auto out1 = scratch() / "rep1";
  const auto out2 = scratch() / "rep2";
  const std::string common =
      "select --data " + data.string() + " --class y --categorical f0,f1,f2 --order shuffle:5 --out-dir ";
  REQUIRE_EQ(run(common + out1.string()), 0);
  REQUIRE_EQ(run(common + out2.string()), 0);
  for (const char* name : {"selection.json", "j_trace.csv", "tbn.dot"})
    CHECK_EQ(slfs::read_file((out1 / name).string()), slfs::read_file((out2 / name).string()));
}

TEST_CASE("rerun reproduces a run from its manifest and verifies it") {
  const auto data = write_numeric_fixture();
  const auto out = scratch() / "orig";
  REQUIRE_EQ(run("benchmark --data " + data.string() +
                 " --class y --folds 4 --seed 3 --selectors slfs,chi2 --classifiers nb,knn3,bnslfs --out-dir " +
                 out.string()),
             0);
  const auto redo = scratch() / "redo";
  CHECK_EQ(run("rerun --manifest " + (out / "manifest.json").string() + " --verify --out-dir " +
               redo.string()),
           0);
  CHECK_EQ(slfs::read_file((out / "benchmark.csv").string()),
           slfs::read_file((redo / "benchmark.csv").string()));
}

TEST_CASE("train then predict recovers training accuracy") {
  const auto data = write_numeric_fixture();
  const auto tr = scratch() / "train_out";
  REQUIRE_EQ(run("train --data " + data.string() + " --class y --epsilon 0 --out-dir " + tr.string()), 0);
  CHECK(fs::exists(tr / "model.json"));

  const auto pr = scratch() / "pred_out";
  REQUIRE_EQ(run("predict --data " + data.string() + " --model " + (tr / "model.json").string() +
                 " --out-dir " + pr.string()),
             0);
  const std::string csv = slfs::read_file((pr / "predictions.csv").string());
  CHECK_EQ(static_cast<int>(std::count(csv.begin(), csv.end(), '\n')), 41);
  CHECK(csv.rfind("row,label,p_neg,p_pos\n", 0) == 0);
}

TEST_CASE("discretize reports the fitted thresholds") {
  const auto p = scratch() / "steps.csv";
  std::ofstream(p) << "v,y\n1,a\n2,a\n3,b\n4,b\n";
  const auto out = scratch() / "disc_out";
  REQUIRE_EQ(run("discretize --data " + p.string() + " --class y --out-dir " + out.string()), 0);
  const json cuts = json::parse(slfs::read_file((out / "cuts.json").string()));
  REQUIRE_EQ(cuts.at("columns").size(), 1);
  CHECK_EQ(cuts.at("columns")[0].at("name"), "v");
  CHECK_EQ(cuts.at("columns")[0].at("cuts"), json::array({2.5}));
}

TEST_CASE("export-dot writes only the tree") {
  const auto data = write_fixture_a();
  const auto out = scratch() / "dot_out";
  REQUIRE_EQ(run("export-dot --data " + data.string() + " --class y --categorical f0,f1,f2 --out-dir " +
                 out.string()),
             0);
  CHECK(fs::exists(out / "tbn.dot"));
  CHECK(!fs::exists(out / "selection.json"));
  const std::string dot = slfs::read_file((out / "tbn.dot").string());
  CHECK(dot.rfind("digraph tbn {", 0) == 0);
}

TEST_CASE("a config file supplies defaults and flags override them") {
  const auto data = write_fixture_a();
  const auto cfg = scratch() / "run.json";
  std::ofstream(cfg) << R"({"data":")" << data.string()
                     << R"(","class":"y","categorical":"f0,f1,f2","lambda":2.5,"epsilon":0.2})";
  const auto out = scratch() / "cfg_out";
  REQUIRE_EQ(run("select --config " + cfg.string() + " --epsilon 0.05 --out-dir " + out.string()), 0);
  const json man = json::parse(slfs::read_file((out / "manifest.json").string()));
  CHECK_EQ(man.at("config").at("lambda"), 2.5);     // from the file
  CHECK_EQ(man.at("config").at("epsilon"), 0.05);   // flag wins
}

TEST_CASE("failures map to distinct exit codes") {
  const auto data = write_fixture_a();
  CHECK_EQ(run("select --class y"), 2);                       // missing --data
  CHECK_EQ(run("select --data " + data.string()), 2);         // missing --class
  CHECK_EQ(run("select --no-such-flag"), 2);
  CHECK_EQ(run("select --data /nope.csv --class y"), 3);
  CHECK_EQ(run("select --data " + data.string() + " --class zz"), 3);
  CHECK_EQ(run("select --data " + data.string() + " --class y --lambda 0"), 2);
  CHECK_EQ(run("select --data " + data.string() + " --class y --order shuffle:x"), 2);

  // A model trained elsewhere cannot score a table missing its columns.
  const auto num = write_numeric_fixture();
  const auto tr = scratch() / "schema_train";
  REQUIRE_EQ(run("train --data " + num.string() + " --class y --epsilon 0 --out-dir " + tr.string()), 0);
  const auto other = scratch() / "other.csv";
  std::ofstream(other) << "z,y\n1,neg\n2,pos\n";
  CHECK_EQ(run("predict --data " + other.string() + " --model " + (tr / "model.json").string() +
               " --out-dir " + (scratch() / "schema_pred").string()),
           4);
}
