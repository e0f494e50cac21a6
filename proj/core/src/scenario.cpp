#include "uavmec/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace uavmec {

using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys = {"K",     "T",     "delta", "H",   "B",  "gamma0",
                                             "P_max", "V_max", "a_max", "c1",  "c2", "g",
                                             "G",     "E_total", "w",   "uavs"};
const std::set<std::string> kUavKeys = {"q_I", "q_F", "v_I", "v_F", "L"};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

double read_number(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioParseError("missing key '" + key + "' in " + where);
  if (!it->is_number()) throw ScenarioParseError("key '" + key + "' in " + where + " must be a number");
  return it->get<double>();
}

Vec2 read_vec2(const json& obj, const std::string& key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioParseError("missing key '" + key + "' in " + where);
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw ScenarioParseError("key '" + key + "' in " + where + " must be a 2-element numeric array");
  }
  return Vec2((*it)[0].get<double>(), (*it)[1].get<double>());
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ScenarioParseError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

json vec_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

// |r - round(r)| within a few ulps of r counts as integral.
bool ratio_is_integral(double horizon, double slot, long long* count) {
  const double r = horizon / slot;
  if (!std::isfinite(r)) return false;
  const long long n = std::llround(r);
  if (std::abs(r - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(r))) return false;
  *count = n;
  return true;
}

}  // namespace

ScenarioValidationError::ScenarioValidationError(std::vector<std::string> violations)
    : ScenarioError("invalid scenario: " + join(violations)), violations_(std::move(violations)) {}

int discretize(double horizon, double slot) {
  if (!(horizon > 0.0) || !(slot > 0.0)) throw ScenarioError("T and delta must be positive");
  long long count = 0;
  if (!ratio_is_integral(horizon, slot, &count)) throw ScenarioError("T/delta not integral");
  if (count < 3) throw ScenarioError("T/delta must be at least 3");
  if (count > 1'000'000) throw ScenarioError("T/delta too large");
  return static_cast<int>(count - 1);
}

int ScenarioConfig::slot_count() const { return discretize(horizon, slot); }

std::vector<std::string> validate(const ScenarioConfig& cfg) {
  std::vector<std::string> bad;
  if (cfg.num_uavs < 1) bad.emplace_back("K >= 1");
  if (static_cast<int>(cfg.uavs.size()) != cfg.num_uavs) bad.emplace_back("K matches uavs");
  if (!(cfg.horizon > 0.0)) bad.emplace_back("T > 0");
  if (!(cfg.slot > 0.0)) bad.emplace_back("delta > 0");
  if (cfg.horizon > 0.0 && cfg.slot > 0.0) {
    long long count = 0;
    if (!ratio_is_integral(cfg.horizon, cfg.slot, &count)) {
      bad.emplace_back("T/delta not integral");
    } else if (count < 3) {
      bad.emplace_back("T/delta >= 3");
    }
  }
  if (!(cfg.altitude > 0.0)) bad.emplace_back("H > 0");
  if (!(cfg.bandwidth > 0.0)) bad.emplace_back("B > 0");
  if (!(cfg.ref_snr > 0.0)) bad.emplace_back("gamma0 > 0");
  if (!(cfg.max_power > 0.0)) bad.emplace_back("P_max > 0");
  if (!(cfg.max_speed > 0.0)) bad.emplace_back("V_max > 0");
  if (!(cfg.max_accel > 0.0)) bad.emplace_back("a_max > 0");
  if (!(cfg.prop_c1 > 0.0)) bad.emplace_back("c1 > 0");
  if (!(cfg.prop_c2 > 0.0)) bad.emplace_back("c2 > 0");
  if (!(cfg.gravity > 0.0)) bad.emplace_back("g > 0");
  if (!(cfg.comp_coeff > 0.0)) bad.emplace_back("G > 0");
  if (!(cfg.tbs_budget >= 0.0)) bad.emplace_back("E_total >= 0");
  if (!cfg.tbs_position.allFinite()) bad.emplace_back("w finite");

  bool bits_ok = true, speed_ok = true, reach_ok = true, finite_ok = true;
  for (const auto& u : cfg.uavs) {
    if (!(u.init_pos.allFinite() && u.final_pos.allFinite() && u.init_vel.allFinite() &&
          u.final_vel.allFinite() && std::isfinite(u.task_bits))) {
      finite_ok = false;
      continue;
    }
    if (!(u.task_bits >= 0.0)) bits_ok = false;
    if (u.init_vel.norm() > cfg.max_speed || u.final_vel.norm() > cfg.max_speed) speed_ok = false;
    if ((u.final_pos - u.init_pos).norm() > cfg.max_speed * cfg.horizon) reach_ok = false;
  }
  if (!finite_ok) bad.emplace_back("uav fields finite");
  if (!bits_ok) bad.emplace_back("L >= 0");
  if (!speed_ok) bad.emplace_back("boundary speed <= V_max");
  if (!reach_ok) bad.emplace_back("reachability");
  return bad;
}

std::vector<std::string> scenario_warnings(const ScenarioConfig& cfg) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < cfg.uavs.size(); ++k) {
    const auto& u = cfg.uavs[k];
    if (std::abs(u.init_vel.norm() - u.final_vel.norm()) > 1e-9) {
      out.push_back("uav " + std::to_string(k + 1) +
                    ": initial and final speeds differ; kinetic-energy change is reported "
                    "but not optimized");
    }
  }
  return out;
}

ScenarioConfig load_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("malformed scenario document: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioParseError("scenario document must be a JSON object");
  reject_unknown(doc, kTopLevelKeys, "scenario");

  ScenarioConfig cfg;
  const std::string top = "scenario";
  auto k_it = doc.find("K");
  if (k_it == doc.end()) throw ScenarioParseError("missing key 'K' in scenario");
  if (!k_it->is_number_integer()) throw ScenarioParseError("key 'K' must be an integer");
  cfg.num_uavs = k_it->get<int>();
  cfg.horizon = read_number(doc, "T", top);
  cfg.slot = read_number(doc, "delta", top);
  cfg.altitude = read_number(doc, "H", top);
  cfg.bandwidth = read_number(doc, "B", top);
  cfg.ref_snr = read_number(doc, "gamma0", top);
  cfg.max_power = read_number(doc, "P_max", top);
  cfg.max_speed = read_number(doc, "V_max", top);
  cfg.max_accel = read_number(doc, "a_max", top);
  cfg.prop_c1 = read_number(doc, "c1", top);
  cfg.prop_c2 = read_number(doc, "c2", top);
  if (doc.contains("g")) cfg.gravity = read_number(doc, "g", top);
  cfg.comp_coeff = read_number(doc, "G", top);
  cfg.tbs_budget = read_number(doc, "E_total", top);
  cfg.tbs_position = read_vec2(doc, "w", top);

  auto uavs = doc.find("uavs");
  if (uavs == doc.end()) throw ScenarioParseError("missing key 'uavs' in scenario");
  if (!uavs->is_array()) throw ScenarioParseError("key 'uavs' must be an array");
  for (std::size_t k = 0; k < uavs->size(); ++k) {
    const json& item = (*uavs)[k];
    const std::string where = "uavs[" + std::to_string(k) + "]";
    if (!item.is_object()) throw ScenarioParseError(where + " must be an object");
    reject_unknown(item, kUavKeys, where);
    UavSpec u;
    u.init_pos = read_vec2(item, "q_I", where);
    u.final_pos = read_vec2(item, "q_F", where);
    u.init_vel = read_vec2(item, "v_I", where);
    u.final_vel = read_vec2(item, "v_F", where);
    u.task_bits = read_number(item, "L", where);
    cfg.uavs.push_back(u);
  }

  if (auto bad = validate(cfg); !bad.empty()) throw ScenarioValidationError(std::move(bad));
  return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  json doc;
  doc["K"] = cfg.num_uavs;
  doc["T"] = cfg.horizon;
  doc["delta"] = cfg.slot;
  doc["H"] = cfg.altitude;
  doc["B"] = cfg.bandwidth;
  doc["gamma0"] = cfg.ref_snr;
  doc["P_max"] = cfg.max_power;
  doc["V_max"] = cfg.max_speed;
  doc["a_max"] = cfg.max_accel;
  doc["c1"] = cfg.prop_c1;
  doc["c2"] = cfg.prop_c2;
  doc["g"] = cfg.gravity;
  doc["G"] = cfg.comp_coeff;
  doc["E_total"] = cfg.tbs_budget;
  doc["w"] = vec_json(cfg.tbs_position);
  json uavs = json::array();
  for (const auto& u : cfg.uavs) {
    uavs.push_back({{"q_I", vec_json(u.init_pos)},
                    {"q_F", vec_json(u.final_pos)},
                    {"v_I", vec_json(u.init_vel)},
                    {"v_F", vec_json(u.final_vel)},
                    {"L", u.task_bits}});
  }
  doc["uavs"] = uavs;
  return doc.dump(2);
}

ScenarioConfig reference_scenario() {
  ScenarioConfig cfg;
  cfg.num_uavs = 2;
  cfg.horizon = 60.0;
  cfg.slot = 0.5;
  cfg.altitude = 80.0;
  cfg.bandwidth = 1e6;
  cfg.ref_snr = 5e3;
  cfg.max_power = 2.0;
  cfg.max_speed = 50.0;
  cfg.max_accel = 5.0;
  cfg.prop_c1 = 0.002;
  cfg.prop_c2 = 70.698;
  cfg.gravity = 9.8;
  cfg.comp_coeff = 1e-11;
  cfg.tbs_budget = 4e3;
  cfg.tbs_position = Vec2(0.0, 0.0);
  cfg.uavs = {
      UavSpec{Vec2(-500, -500), Vec2(500, -500), Vec2(20, 20), Vec2(20, -20), 0.5e6},
      UavSpec{Vec2(-500, 500), Vec2(500, 500), Vec2(20, -20), Vec2(20, 20), 1e6},
  };
  return cfg;
}

OffloadPlan all_local_offload(const ScenarioConfig& cfg, double schedule_value) {
  const int slots = cfg.slot_count() - 1;
  OffloadPlan plan;
  plan.uavs.resize(cfg.uavs.size());
  for (auto& u : plan.uavs) {
    u.uplink_bits.assign(slots, 0.0);
    u.processed_bits.assign(slots, 0.0);
    u.power.assign(slots, 0.0);
    u.schedule.assign(slots, schedule_value);
    u.partition = 1.0;
  }
  return plan;
}

}  // namespace uavmec
