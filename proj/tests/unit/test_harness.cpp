#include "fixtures.hpp"

#include "uavmec/harness.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uavmec;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("uavmec_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_scenario(const fs::path& dir, const ScenarioConfig& cfg) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << serialize_scenario(cfg);
  return p;
}

}  // namespace

TEST(Digest, StableUnderKeyReordering) {
  const ScenarioConfig cfg = reference_scenario();
  nlohmann::json doc = nlohmann::json::parse(serialize_scenario(cfg));
  // rebuild the object with keys inserted in reverse order
  nlohmann::ordered_json rev;
  std::vector<std::string> keys;
  for (auto it = doc.begin(); it != doc.end(); ++it) keys.push_back(it.key());
  for (auto it = keys.rbegin(); it != keys.rend(); ++it) rev[*it] = doc[*it];
  const ScenarioConfig back = load_scenario(rev.dump(2));
  EXPECT_EQ(scenario_digest(cfg), scenario_digest(back));
  EXPECT_EQ(scenario_digest(cfg).size(), 64u);
  ScenarioConfig other = cfg;
  other.tbs_budget += 1.0;
  EXPECT_NE(scenario_digest(cfg), scenario_digest(other));
}

TEST(Format, NumbersAreLocaleFree) {
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1234567.0), "1234567");
  EXPECT_EQ(format_number(-2.5e-7), "-2.5e-07");
  EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Solve, MissingFileWritesNothing) {
  TempDir tmp;
  std::ostringstream err;
  const fs::path out = tmp.path() / "out";
  EXPECT_EQ(cmd_solve(tmp.path() / "nope.json", "tdma", {}, out, err), kExitError);
  EXPECT_FALSE(fs::exists(out / "result.json"));
  EXPECT_FALSE(err.str().empty());
}

TEST(Solve, UnknownSchemeIsAnError) {
  TempDir tmp;
  std::ostringstream err;
  const fs::path scen = write_scenario(tmp.path(), fixture::tiny_single());
  EXPECT_EQ(cmd_solve(scen, "cdma", {}, tmp.path() / "out", err), kExitError);
  EXPECT_FALSE(fs::exists(tmp.path() / "out" / "result.json"));
}

TEST(Solve, UnreachableScenarioIsInfeasible) {
  TempDir tmp;
  std::ostringstream err;
  ScenarioConfig cfg = fixture::single_uav_short();
  cfg.uavs[0].final_pos = Vec2(5000, -200);
  std::ofstream(tmp.path() / "far.json") << serialize_scenario(cfg);
  // the loader rejects it before any solve
  EXPECT_NE(cmd_solve(tmp.path() / "far.json", "tdma", {}, tmp.path() / "out", err), kExitOk);
  EXPECT_FALSE(fs::exists(tmp.path() / "out" / "result.json"));
}

TEST(Solve, ArtifactsAreDeterministic) {
  TempDir tmp;
  std::ostringstream err;
  const fs::path scen = write_scenario(tmp.path(), fixture::single_uav_short());
  ASSERT_EQ(cmd_solve(scen, "tdma", {}, tmp.path() / "a", err), kExitOk) << err.str();
  ASSERT_EQ(cmd_solve(scen, "tdma", {}, tmp.path() / "b", err), kExitOk) << err.str();
  EXPECT_EQ(slurp(tmp.path() / "a" / "result.json"), slurp(tmp.path() / "b" / "result.json"));
  EXPECT_EQ(slurp(tmp.path() / "a" / "trajectory.csv"), slurp(tmp.path() / "b" / "trajectory.csv"));

  const auto doc = nlohmann::json::parse(slurp(tmp.path() / "a" / "result.json"));
  EXPECT_EQ(doc["scheme"], "tdma");
  EXPECT_TRUE(doc.contains("energy"));
  EXPECT_TRUE(doc.contains("rho"));
  EXPECT_TRUE(doc.contains("trace_J"));
  EXPECT_TRUE(doc.contains("violations"));
  const std::string csv = slurp(tmp.path() / "a" / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "uav,n,t_s,x_m,y_m,vx_mps,vy_mps,ax_mps2,ay_mps2,speed_mps,accel_mps2");
  // grid points 0..N+1 for one UAV, plus the header
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 21);
}

TEST(Sweep, EmptyValuesGiveEmptyTable) {
  TempDir tmp;
  std::ostringstream err;
  SweepOptions o;
  const auto rows = run_sweep(fixture::single_uav_short(), o, tmp.path(), err);
  EXPECT_TRUE(rows.empty());
  const std::string table = slurp(tmp.path() / "sweep.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1);
  const fs::path scen = write_scenario(tmp.path(), fixture::single_uav_short());
  EXPECT_EQ(cmd_sweep(scen, o, tmp.path() / "again", err), kExitOk);
}

TEST(Sweep, HorizonCellRescalesDelta) {
  SweepOptions o;
  o.axis = SweepAxis::Horizon;
  const ScenarioConfig base = fixture::reference_delta1();
  const ScenarioConfig shortc = sweep_cell_scenario(base, o, 25.0);
  EXPECT_DOUBLE_EQ(shortc.horizon, 25.0);
  EXPECT_DOUBLE_EQ(shortc.slot, 1.0);
  const ScenarioConfig longc = sweep_cell_scenario(base, o, 95.0);
  EXPECT_DOUBLE_EQ(longc.slot, 95.0 / 61.0);
  EXPECT_LE(longc.slot_count(), 60);
  o.keep_slot = true;
  EXPECT_DOUBLE_EQ(sweep_cell_scenario(base, o, 95.0).slot, 1.0);
  o.axis = SweepAxis::Budget;
  EXPECT_DOUBLE_EQ(sweep_cell_scenario(base, o, 2000.0).tbs_budget, 2000.0);
  EXPECT_THROW(parse_axis("altitude"), std::invalid_argument);
}

TEST(Sweep, RecordsAndExport) {
  TempDir tmp;
  std::ostringstream err;
  SweepOptions o;
  o.values = {500.0, 4000.0};
  o.schemes = {"tdma", "noma"};
  const auto rows = run_sweep(fixture::single_uav_short(), o, tmp.path(), err);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) EXPECT_NE(r.status, "error") << r.message;
  EXPECT_EQ(rows[0].value, 500.0);
  EXPECT_EQ(rows[1].scheme, "noma");
  int records = 0;
  for (const auto& e : fs::directory_iterator(tmp.path() / "records")) {
    const auto rec = nlohmann::json::parse(slurp(e.path()));
    EXPECT_TRUE(rec.contains("scenario_digest"));
    EXPECT_TRUE(rec.contains("started_at"));
    ++records;
  }
  EXPECT_EQ(records, 4);

  // records are append-only: a second sweep into the same directory adds
  run_sweep(fixture::single_uav_short(), o, tmp.path(), err);
  records = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(tmp.path() / "records")) ++records;
  EXPECT_EQ(records, 8);

  const std::string f5 = export_plotdata({tmp.path() / "cells"}, "f5");
  EXPECT_EQ(std::count(f5.begin(), f5.end(), '\n'), 1 + 4);
  const std::string f4 = export_plotdata({tmp.path() / "cells"}, "f4");
  EXPECT_NE(f4.find("uplink"), std::string::npos);
  EXPECT_THROW(export_plotdata({tmp.path() / "cells"}, "f9"), std::runtime_error);
}

TEST(Export, EmptyInputIsAnErrorAndWritesNothing) {
  TempDir tmp;
  std::ostringstream err;
  fs::create_directories(tmp.path() / "empty");
  const fs::path out = tmp.path() / "f2.csv";
  EXPECT_THROW(export_plotdata({tmp.path() / "empty"}, "f2"), std::runtime_error);
  EXPECT_EQ(cmd_export_plotdata({tmp.path() / "empty"}, "f2", out, err), kExitError);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, SolveAndExitCodes) {
  TempDir tmp;
  const fs::path scen = write_scenario(tmp.path(), fixture::single_uav_short());
  const std::string cli = UAVMEC_CLI;
  const auto run = [&](const std::string& args) {
    const int rc = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  EXPECT_EQ(run("solve " + scen.string() + " --scheme noma --relax-budget --relax-causality --out " +
                (tmp.path() / "lb").string()),
            kExitOk);
  EXPECT_TRUE(fs::exists(tmp.path() / "lb" / "result.json"));
  EXPECT_EQ(run("solve " + (tmp.path() / "missing.json").string() + " --out " + (tmp.path() / "x").string()),
            kExitError);
  EXPECT_FALSE(fs::exists(tmp.path() / "x" / "result.json"));
  EXPECT_EQ(run("export-plotdata --figure f3 --out " + (tmp.path() / "f3.csv").string() + " " +
                (tmp.path() / "lb").string()),
            kExitOk);
  EXPECT_TRUE(fs::exists(tmp.path() / "f3.csv"));
}
