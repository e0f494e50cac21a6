#include "uavmec/harness.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace uavmec {

using nlohmann::json;
namespace fs = std::filesystem;

#ifndef UAVMEC_VERSION
#define UAVMEC_VERSION "unknown"
#endif

std::string tool_version() { return UAVMEC_VERSION; }

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

json vec_json(const std::vector<double>& v) { return json(v); }

json options_json(const SolveOptions& o) {
  return {{"sca_tol", o.sca_tol},
          {"sca_max_iter", o.sca_max_iter},
          {"outer_max_iter", o.outer_max_iter},
          {"stage_max_iter", o.stage_max_iter},
          {"inner_tol", o.inner.tol},
          {"inner_max_iter", o.inner.max_iter},
          {"relax_budget", o.relax_budget},
          {"relax_causality", o.relax_causality},
          {"theta", o.rounding_threshold}};
}

json energy_json(const EnergyBreakdown& e) {
  json per = json::array();
  for (const auto& u : e.per_uav) per.push_back({{"fly_J", u.fly}, {"comp_J", u.comp}, {"comm_J", u.comm}});
  return {{"fly_J", e.fly}, {"comp_J", e.comp}, {"comm_J", e.comm}, {"total_J", e.total}, {"per_uav", per}};
}

json scenario_doc(const ScenarioConfig& cfg) { return json::parse(serialize_scenario(cfg)); }

// A solve that leaves the caller without a usable plan maps to 2.
bool infeasible_status(const std::string& status) { return status == "rounding-infeasible"; }

}  // namespace

std::string scenario_digest(const ScenarioConfig& cfg) { return sha256_hex(scenario_doc(cfg).dump()); }

std::string bundle_json(const ScenarioConfig& cfg, const std::string& scheme, const SolveOptions& opts,
                        const SolutionBundle& b) {
  json doc;
  doc["tool_version"] = tool_version();
  doc["scenario_digest"] = scenario_digest(cfg);
  doc["scenario"] = scenario_doc(cfg);
  doc["scheme"] = scheme;
  doc["options"] = options_json(opts);
  doc["status"] = b.status;
  doc["energy"] = energy_json(b.energy);
  json parts = json::array(), offl = json::array(), kin = json::array();
  for (std::size_t k = 0; k < b.offload.uavs.size(); ++k) {
    parts.push_back(b.offload.uavs[k].partition);
    offl.push_back(1.0 - b.offload.uavs[k].partition);
    kin.push_back(kinetic_delta_per_kg(cfg.uavs[k]));
  }
  doc["rho"] = parts;
  doc["offloaded_fraction"] = offl;
  doc["kinetic_delta_J_per_kg"] = kin;
  json viol = json::object();
  for (const auto& [name, v] : b.audit.items()) viol[name] = v;
  doc["violations"] = viol;
  doc["violation_worst"] = b.audit.worst();
  doc["trace_J"] = vec_json(b.trace);
  doc["subproblems"] = b.subproblems;
  doc["outer_iterations"] = b.outer_iterations;
  doc["newton_iterations"] = b.newton_iterations;
  if (b.access == Scheme::OneByOne) doc["relaxed_total_J"] = b.relaxed_total;
  doc["notes"] = b.notes;

  json uavs = json::array();
  for (std::size_t k = 0; k < b.traj.uavs.size(); ++k) {
    const auto& t = b.traj.uavs[k];
    const auto& o = b.offload.uavs[k];
    json px = json::array(), py = json::array(), vx = json::array(), vy = json::array(), ax = json::array(),
         ay = json::array();
    for (std::size_t n = 0; n < t.pos.size(); ++n) {
      px.push_back(t.pos[n].x());
      py.push_back(t.pos[n].y());
      vx.push_back(t.vel[n].x());
      vy.push_back(t.vel[n].y());
      ax.push_back(t.acc[n].x());
      ay.push_back(t.acc[n].y());
    }
    uavs.push_back({{"x_m", px},
                    {"y_m", py},
                    {"vx_mps", vx},
                    {"vy_mps", vy},
                    {"ax_mps2", ax},
                    {"ay_mps2", ay},
                    {"uplink_bits", o.uplink_bits},
                    {"processed_bits", o.processed_bits},
                    {"power_W", o.power},
                    {"schedule", o.schedule}});
  }
  doc["plan"] = uavs;
  return doc.dump(2) + "\n";
}

std::string trajectory_csv(const ScenarioConfig& cfg, const TrajectoryPlan& traj) {
  std::ostringstream s;
  s << "uav,n,t_s,x_m,y_m,vx_mps,vy_mps,ax_mps2,ay_mps2,speed_mps,accel_mps2\n";
  for (std::size_t k = 0; k < traj.uavs.size(); ++k) {
    const auto& t = traj.uavs[k];
    for (std::size_t n = 0; n < t.pos.size(); ++n) {
      s << k + 1 << ',' << n << ',' << format_number(static_cast<double>(n) * cfg.slot) << ','
        << format_number(t.pos[n].x()) << ',' << format_number(t.pos[n].y()) << ',' << format_number(t.vel[n].x())
        << ',' << format_number(t.vel[n].y()) << ',' << format_number(t.acc[n].x()) << ','
        << format_number(t.acc[n].y()) << ',' << format_number(t.vel[n].norm()) << ','
        << format_number(t.acc[n].norm()) << '\n';
    }
  }
  return s.str();
}

int cmd_solve(const fs::path& scenario_path, const std::string& scheme, const SolveOptions& opts,
              const fs::path& out_dir, std::ostream& err) {
  try {
    const ScenarioConfig cfg = load_scenario_file(scenario_path);
    const SolutionBundle b = solve_by_name(scheme, cfg, opts);
    fs::create_directories(out_dir);
    write_file(out_dir / "result.json", bundle_json(cfg, scheme, opts, b));
    write_file(out_dir / "trajectory.csv", trajectory_csv(cfg, b.traj));
    if (infeasible_status(b.status)) {
      err << "solve: " << b.status << "; relaxed plan written\n";
      return kExitInfeasible;
    }
    return kExitOk;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ScenarioValidationError& e) {
    err << "invalid scenario:";
    for (const auto& v : e.violations()) err << " [" << v << "]";
    err << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "budget") return SweepAxis::Budget;
  if (name == "horizon") return SweepAxis::Horizon;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (budget|horizon)");
}

ScenarioConfig sweep_cell_scenario(const ScenarioConfig& base, const SweepOptions& opts, double value) {
  ScenarioConfig cfg = base;
  if (opts.axis == SweepAxis::Budget) {
    cfg.tbs_budget = value;
    return cfg;
  }
  cfg.horizon = value;
  if (opts.keep_slot) return cfg;
  long long slots = std::llround(value / base.slot);
  if (std::abs(static_cast<double>(slots) * base.slot - value) > 1e-9 * value || slots - 1 > opts.max_slots) {
    slots = std::min<long long>(opts.max_slots + 1, std::max<long long>(4, std::llround(value / base.slot)));
    cfg.slot = value / static_cast<double>(slots);
  }
  return cfg;
}

namespace {

std::string cell_name(const SweepOptions& opts, double value, const std::string& scheme) {
  return std::string(opts.axis == SweepAxis::Budget ? "budget" : "horizon") + "_" + format_number(value) + "_" +
         scheme;
}

SweepRow run_cell(const ScenarioConfig& base, const SweepOptions& opts, double value, const std::string& scheme,
                  const fs::path& out_dir, std::mutex& index_mu) {
  SweepRow row;
  row.value = value;
  row.scheme = scheme;
  const std::string started = utc_now();
  ScenarioConfig cfg;
  json summary;
  std::string digest;
  const fs::path cell_dir = out_dir / "cells" / cell_name(opts, value, scheme);
  try {
    cfg = sweep_cell_scenario(base, opts, value);
    row.delta = cfg.slot;
    digest = scenario_digest(cfg);
    const SolutionBundle b = solve_by_name(scheme, cfg, opts.solve);
    row.status = b.status;
    row.energy = b.energy;
    for (const auto& u : b.offload.uavs) row.offloaded.push_back(1.0 - u.partition);
    fs::create_directories(cell_dir);
    write_file(cell_dir / "result.json", bundle_json(cfg, scheme, opts.solve, b));
    write_file(cell_dir / "trajectory.csv", trajectory_csv(cfg, b.traj));
    summary = {{"status", b.status},
               {"energy", energy_json(b.energy)},
               {"offloaded_fraction", row.offloaded},
               {"violation_worst", b.audit.worst()}};
  } catch (const InfeasibleError& e) {
    row.status = "infeasible";
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
  }
  if (summary.is_null()) summary = {{"status", row.status}, {"message", row.message}};

  json rec;
  rec["scenario_digest"] = digest;
  rec["scheme"] = scheme;
  rec["axis"] = opts.axis == SweepAxis::Budget ? "budget" : "horizon";
  rec["value"] = value;
  rec["delta"] = row.delta;
  rec["options"] = options_json(opts.solve);
  rec["summary"] = summary;
  rec["started_at"] = started;
  rec["finished_at"] = utc_now();
  rec["tool_version"] = tool_version();
  rec["result"] = fs::exists(cell_dir / "result.json") ? (cell_dir / "result.json").lexically_relative(out_dir).string()
                                                       : std::string();

  // Records are append-only: a rerun gets the next free id.
  std::lock_guard<std::mutex> lock(index_mu);
  fs::create_directories(out_dir / "records");
  const std::string stem = cell_name(opts, value, scheme) + "_" + digest.substr(0, std::min<std::size_t>(12, digest.size()));
  std::string id = stem;
  for (int i = 2; fs::exists(out_dir / "records" / (id + ".json")); ++i) id = stem + "-" + std::to_string(i);
  rec["id"] = id;
  write_file(out_dir / "records" / (id + ".json"), rec.dump(2) + "\n");
  const fs::path index = out_dir / "index.csv";
  const bool fresh = !fs::exists(index);
  std::ofstream idx(index, std::ios::app | std::ios::binary);
  if (fresh) idx << "id,axis,value,scheme,status,total_J,scenario_digest,finished_at\n";
  idx << id << ',' << rec["axis"].get<std::string>() << ',' << format_number(value) << ',' << scheme << ','
      << row.status << ',' << format_number(row.energy.total) << ',' << digest << ','
      << rec["finished_at"].get<std::string>() << '\n';
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ScenarioConfig& base, const SweepOptions& opts, const fs::path& out_dir,
                                std::ostream& err) {
  opts.solve.validate();
  if (opts.max_slots < 3) throw std::invalid_argument("max_slots must be at least 3");
  std::vector<std::pair<double, std::string>> cells;
  for (double v : opts.values) {
    for (const auto& s : opts.schemes) cells.emplace_back(v, s);
  }
  std::vector<SweepRow> rows(cells.size());
  fs::create_directories(out_dir);
  std::mutex index_mu, err_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = run_cell(base, opts, cells[i].first, cells[i].second, out_dir, index_mu);
      if (!rows[i].message.empty()) {
        std::lock_guard<std::mutex> lock(err_mu);
        err << "sweep cell " << format_number(rows[i].value) << " " << rows[i].scheme << ": " << rows[i].status
            << ": " << rows[i].message << "\n";
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(cells.size())));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  write_file(out_dir / "sweep.csv", sweep_csv(rows, base.num_uavs));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, int num_uavs) {
  std::ostringstream s;
  s << "value,scheme,status,delta_s,fly_J,comp_J,comm_J,total_J";
  for (int k = 1; k <= num_uavs; ++k) s << ",offloaded_uav" << k;
  s << '\n';
  for (const auto& r : rows) {
    const bool ok = !r.offloaded.empty();
    auto cell = [&](double v) { return ok ? format_number(v) : std::string(); };
    s << format_number(r.value) << ',' << r.scheme << ',' << r.status << ',' << format_number(r.delta) << ','
      << cell(r.energy.fly) << ',' << cell(r.energy.comp) << ',' << cell(r.energy.comm) << ','
      << cell(r.energy.total);
    for (int k = 0; k < num_uavs; ++k) s << ',' << (k < static_cast<int>(r.offloaded.size()) ? format_number(r.offloaded[k]) : "");
    s << '\n';
  }
  return s.str();
}

int cmd_sweep(const fs::path& scenario_path, const SweepOptions& opts, const fs::path& out_dir, std::ostream& err) {
  try {
    const ScenarioConfig base = load_scenario_file(scenario_path);
    run_sweep(base, opts, out_dir, err);
    return kExitOk;
  } catch (const ScenarioValidationError& e) {
    err << "invalid scenario:";
    for (const auto& v : e.violations()) err << " [" << v << "]";
    err << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

namespace {

std::vector<fs::path> collect_results(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && e.path().filename() == "result.json") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      out.push_back(p);
    } else {
      throw std::runtime_error("no such record: " + p.string());
    }
  }
  return out;
}

json read_json(const fs::path& p) {
  std::ifstream f(p);
  if (!f) throw std::runtime_error("cannot read " + p.string());
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

}  // namespace

std::string export_plotdata(const std::vector<fs::path>& inputs, const std::string& figure) {
  static const std::vector<std::string> figures{"f2", "f3", "f4", "f5", "f6"};
  if (std::find(figures.begin(), figures.end(), figure) == figures.end()) {
    throw std::runtime_error("unknown figure '" + figure + "' (f2|f3|f4|f5|f6)");
  }
  const auto files = collect_results(inputs);
  if (files.empty()) throw std::runtime_error("no run records found");

  std::ostringstream s;
  if (figure == "f2") s << "run,scheme,uav,n,x_m,y_m\n";
  if (figure == "f3") s << "run,scheme,uav,n,t_s,speed_mps,accel_mps2\n";
  if (figure == "f4") s << "run,scheme,uav,n,uplink_bits,processed_bits\n";
  if (figure == "f5") s << "run,scheme,E_total_J,uav,offloaded_fraction\n";
  if (figure == "f6") s << "run,scheme,T_s,delta_s,E_total_J,relax_budget,relax_causality,fly_J,comp_J,comm_J,total_J\n";

  for (std::size_t r = 0; r < files.size(); ++r) {
    const json doc = read_json(files[r]);
    const std::string run = std::to_string(r + 1);
    std::string scheme;
    try {
      scheme = doc.at("scheme").get<std::string>();
      const json& sc = doc.at("scenario");
      const double delta = sc.at("delta").get<double>();
      const json& plan = doc.at("plan");
      if (figure == "f5") {
        const auto& off = doc.at("offloaded_fraction");
        for (std::size_t k = 0; k < off.size(); ++k) {
          s << run << ',' << scheme << ',' << format_number(sc.at("E_total").get<double>()) << ',' << k + 1 << ','
            << format_number(off[k].get<double>()) << '\n';
        }
        continue;
      }
      if (figure == "f6") {
        const json& e = doc.at("energy");
        const json& o = doc.at("options");
        s << run << ',' << scheme << ',' << format_number(sc.at("T").get<double>()) << ',' << format_number(delta)
          << ',' << format_number(sc.at("E_total").get<double>()) << ',' << int(o.at("relax_budget").get<bool>())
          << ',' << int(o.at("relax_causality").get<bool>()) << ',' << format_number(e.at("fly_J").get<double>())
          << ',' << format_number(e.at("comp_J").get<double>()) << ',' << format_number(e.at("comm_J").get<double>())
          << ',' << format_number(e.at("total_J").get<double>()) << '\n';
        continue;
      }
      for (std::size_t k = 0; k < plan.size(); ++k) {
        const json& u = plan[k];
        if (figure == "f4") {
          const auto& up = u.at("uplink_bits");
          const auto& pr = u.at("processed_bits");
          // uplink index i is slot i+1; processing of the same entry happens in slot i+2
          const std::size_t slots = up.size() + 2;
          for (std::size_t n = 1; n < slots; ++n) {
            const double upv = n - 1 < up.size() ? up[n - 1].get<double>() : 0.0;
            const double prv = n >= 2 && n - 2 < pr.size() ? pr[n - 2].get<double>() : 0.0;
            s << run << ',' << scheme << ',' << k + 1 << ',' << n << ',' << format_number(upv) << ','
              << format_number(prv) << '\n';
          }
          continue;
        }
        const auto& x = u.at("x_m");
        for (std::size_t n = 0; n < x.size(); ++n) {
          if (figure == "f2") {
            s << run << ',' << scheme << ',' << k + 1 << ',' << n << ',' << format_number(x[n].get<double>()) << ','
              << format_number(u.at("y_m")[n].get<double>()) << '\n';
          } else {
            const double speed = std::hypot(u.at("vx_mps")[n].get<double>(), u.at("vy_mps")[n].get<double>());
            const double acc = std::hypot(u.at("ax_mps2")[n].get<double>(), u.at("ay_mps2")[n].get<double>());
            s << run << ',' << scheme << ',' << k + 1 << ',' << n << ',' << format_number(static_cast<double>(n) * delta)
              << ',' << format_number(speed) << ',' << format_number(acc) << '\n';
          }
        }
      }
    } catch (const json::exception& e) {
      throw std::runtime_error(files[r].string() + ": malformed record: " + e.what());
    }
  }
  return s.str();
}

int cmd_export_plotdata(const std::vector<fs::path>& inputs, const std::string& figure, const fs::path& out_file,
                        std::ostream& err) {
  try {
    const std::string csv = export_plotdata(inputs, figure);
    if (out_file.has_parent_path()) fs::create_directories(out_file.parent_path());
    write_file(out_file, csv);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace uavmec
