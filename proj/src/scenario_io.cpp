#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "swarmdef/bench.hpp"
#include "swarmdef/simulation.hpp"

namespace swarmdef::scenario_io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail("unknown key '" + it.key() + "' in " + where);
  }
}

Vec2 vec(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(where + " must be a [x, y] pair");
  }
  return Vec2(j[0].get<double>(), j[1].get<double>());
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      fail(std::string("bad value for '") + key + "'");
    }
  }
}

AgentParams read_params(const json& j, AgentParams p, const std::string& where) {
  only_keys(j, {"u_max", "drag", "body_radius", "interception_radius", "sensing_radius"}, where);
  read(j, "u_max", p.u_max);
  read(j, "drag", p.drag);
  read(j, "body_radius", p.body_radius);
  read(j, "interception_radius", p.interception_radius);
  read(j, "sensing_radius", p.sensing_radius);
  return p;
}

json write_params(const AgentParams& p) {
  return {{"u_max", p.u_max},
          {"drag", p.drag},
          {"body_radius", p.body_radius},
          {"interception_radius", p.interception_radius},
          {"sensing_radius", p.sensing_radius}};
}

AgentState read_state(const json& j, const std::string& where, int* group) {
  std::set<std::string> keys{"x", "y", "vx", "vy"};
  if (group) keys.insert("group");
  only_keys(j, keys, where);
  if (!j.contains("x") || !j.contains("y")) fail(where + " needs x and y");
  AgentState s;
  double x = 0, y = 0, vx = 0, vy = 0;
  read(j, "x", x);
  read(j, "y", y);
  read(j, "vx", vx);
  read(j, "vy", vy);
  s.position = Vec2(x, y);
  s.velocity = Vec2(vx, vy);
  if (group) read(j, "group", *group);
  return s;
}

void read_tunables(const json& j, Tunables& t) {
  only_keys(j,
            {"w", "lead_time", "eps_tol", "min_clusters", "string_length", "spacing", "standoff",
             "eps1", "eps2", "herd_speed_factor", "cruise_speed", "avoid_radius", "seek_speed",
             "enclose_speed", "collision_avoidance", "cbf_k1", "cbf_k2", "cbf_range",
             "split_check_period"},
            "tunables");
  read(j, "w", t.w);
  read(j, "lead_time", t.lead_time);
  read(j, "eps_tol", t.eps_tol);
  read(j, "min_clusters", t.min_clusters);
  read(j, "string_length", t.string_length);
  read(j, "spacing", t.spacing);
  read(j, "standoff", t.standoff);
  read(j, "eps1", t.eps1);
  read(j, "eps2", t.eps2);
  read(j, "herd_speed_factor", t.herd_speed_factor);
  read(j, "cruise_speed", t.cruise_speed);
  read(j, "avoid_radius", t.avoid_radius);
  read(j, "seek_speed", t.seek_speed);
  read(j, "enclose_speed", t.enclose_speed);
  read(j, "collision_avoidance", t.collision_avoidance);
  read(j, "cbf_k1", t.cbf_k1);
  read(j, "cbf_k2", t.cbf_k2);
  read(j, "cbf_range", t.cbf_range);
  read(j, "split_check_period", t.split_check_period);
}

json write_tunables(const Tunables& t) {
  return {{"w", t.w},
          {"lead_time", t.lead_time},
          {"eps_tol", t.eps_tol},
          {"min_clusters", t.min_clusters},
          {"string_length", t.string_length},
          {"spacing", t.spacing},
          {"standoff", t.standoff},
          {"eps1", t.eps1},
          {"eps2", t.eps2},
          {"herd_speed_factor", t.herd_speed_factor},
          {"cruise_speed", t.cruise_speed},
          {"avoid_radius", t.avoid_radius},
          {"seek_speed", t.seek_speed},
          {"enclose_speed", t.enclose_speed},
          {"collision_avoidance", t.collision_avoidance},
          {"cbf_k1", t.cbf_k1},
          {"cbf_k2", t.cbf_k2},
          {"cbf_range", t.cbf_range},
          {"split_check_period", t.split_check_period}};
}

WorldGeometry read_world(const json& w) {
  only_keys(w, {"protected_center", "protected_radius", "safe_areas", "sense_inner", "sense_outer"},
            "world");
  WorldGeometry g;
  if (w.contains("protected_center")) g.protected_center = vec(w["protected_center"], "protected_center");
  read(w, "protected_radius", g.protected_radius);
  read(w, "sense_inner", g.sense_inner);
  read(w, "sense_outer", g.sense_outer);
  for (const auto& s : w.value("safe_areas", json::array())) {
    only_keys(s, {"center", "radius"}, "safe area");
    SafeArea a;
    a.center = vec(s.at("center"), "safe area center");
    read(s, "radius", a.radius);
    g.safe_areas.push_back(a);
  }
  return g;
}

json write_world(const WorldGeometry& g) {
  json w{{"protected_center", {g.protected_center.x(), g.protected_center.y()}},
         {"protected_radius", g.protected_radius},
         {"sense_inner", g.sense_inner},
         {"sense_outer", g.sense_outer},
         {"safe_areas", json::array()}};
  for (const auto& s : g.safe_areas) {
    w["safe_areas"].push_back({{"center", {s.center.x(), s.center.y()}}, {"radius", s.radius}});
  }
  return w;
}

json write_state(const AgentState& s, int id) {
  return {{"id", id},
          {"x", s.position.x()},
          {"y", s.position.y()},
          {"vx", s.velocity.x()},
          {"vy", s.velocity.y()}};
}

AgentState read_tagged_state(const json& j, const std::string& where, int& id) {
  only_keys(j, {"id", "x", "y", "vx", "vy"}, where);
  json plain = j;
  plain.erase("id");
  read(j, "id", id);
  return read_state(plain, where, nullptr);
}

json write_table(const ResourceAllocation& rd) {
  json t = json::array();
  for (const auto& [n, r] : rd.table()) t.push_back({n, r});
  return t;
}

ResourceAllocation read_table(const json& rows) {
  std::map<int, int> table;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != 2) fail("resource_table rows are [n, R_d(n)] pairs");
    table[row[0].get<int>()] = row[1].get<int>();
  }
  return ResourceAllocation(table);
}

SplitScript read_script(const json& j) {
  only_keys(j, {"group", "time", "trigger_distance", "subgroups", "breakaways"}, "script");
  SplitScript s;
  read(j, "group", s.group);
  if (j.contains("time")) s.time = j.at("time").get<double>();
  if (j.contains("trigger_distance")) s.trigger_distance = j.at("trigger_distance").get<double>();
  for (const auto& g : j.value("subgroups", json::array())) {
    only_keys(g, {"members", "drift_deg", "drift_speed", "drift_time"}, "subgroup");
    SubgroupScript sub;
    read(g, "members", sub.members);
    read(g, "drift_deg", sub.drift_deg);
    read(g, "drift_speed", sub.drift_speed);
    read(g, "drift_time", sub.drift_time);
    s.subgroups.push_back(sub);
  }
  for (const auto& b : j.value("breakaways", json::array())) {
    only_keys(b, {"members", "delay", "dash_deg", "dash_time"}, "breakaway");
    BreakawayScript br;
    read(b, "members", br.members);
    read(b, "delay", br.delay);
    read(b, "dash_deg", br.dash_deg);
    read(b, "dash_time", br.dash_time);
    s.breakaways.push_back(br);
  }
  return s;
}

json write_script(const SplitScript& s) {
  json j{{"group", s.group}};
  if (s.time) j["time"] = *s.time;
  if (s.trigger_distance) j["trigger_distance"] = *s.trigger_distance;
  j["subgroups"] = json::array();
  for (const auto& g : s.subgroups) {
    j["subgroups"].push_back({{"members", g.members},
                              {"drift_deg", g.drift_deg},
                              {"drift_speed", g.drift_speed},
                              {"drift_time", g.drift_time}});
  }
  j["breakaways"] = json::array();
  for (const auto& b : s.breakaways) {
    j["breakaways"].push_back({{"members", b.members},
                               {"delay", b.delay},
                               {"dash_deg", b.dash_deg},
                               {"dash_time", b.dash_time}});
  }
  return j;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j,
            {"version", "name", "seed", "dt", "duration", "trace_stride", "world",
             "attacker_params", "defender_params", "tunables", "split_solver", "resource_table",
             "defenders", "attackers", "scripts"},
            "config");
  if (j.value("version", std::string()) != kVersion) fail("version must be \"v1\"");

  ScenarioConfig c;
  read(j, "name", c.name);
  read(j, "seed", c.seed);
  read(j, "dt", c.dt);
  read(j, "duration", c.duration);
  read(j, "trace_stride", c.trace_stride);
  if (j.contains("world")) c.world = read_world(j["world"]);
  if (j.contains("attacker_params")) c.attacker = read_params(j["attacker_params"], c.attacker, "attacker_params");
  if (j.contains("defender_params")) c.defender = read_params(j["defender_params"], c.defender, "defender_params");
  if (j.contains("tunables")) read_tunables(j["tunables"], c.tune);
  if (j.contains("split_solver")) {
    auto s = parse_split_solver(j["split_solver"].get<std::string>());
    if (!s) fail("split_solver must be miqcqp, rs_miqcqp or heuristic");
    c.split_solver = *s;
  }
  if (j.contains("resource_table")) c.rd = read_table(j["resource_table"]);
  int idx = 0;
  for (const auto& d : j.value("defenders", json::array())) {
    c.defenders.push_back(read_state(d, "defender " + std::to_string(idx++), nullptr));
  }
  idx = 0;
  for (const auto& a : j.value("attackers", json::array())) {
    AttackerSpec spec;
    spec.state = read_state(a, "attacker " + std::to_string(idx++), &spec.group);
    c.attackers.push_back(spec);
  }
  for (const auto& s : j.value("scripts", json::array())) c.scripts.push_back(read_script(s));
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& c) {
  json j;
  j["version"] = kVersion;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["dt"] = c.dt;
  j["duration"] = c.duration;
  j["trace_stride"] = c.trace_stride;
  j["world"] = write_world(c.world);
  j["attacker_params"] = write_params(c.attacker);
  j["defender_params"] = write_params(c.defender);
  j["tunables"] = write_tunables(c.tune);
  j["split_solver"] = to_string(c.split_solver);
  j["resource_table"] = write_table(c.rd);
  j["defenders"] = json::array();
  for (const auto& d : c.defenders) {
    j["defenders"].push_back({{"x", d.position.x()},
                              {"y", d.position.y()},
                              {"vx", d.velocity.x()},
                              {"vy", d.velocity.y()}});
  }
  j["attackers"] = json::array();
  for (const auto& a : c.attackers) {
    j["attackers"].push_back({{"x", a.state.position.x()},
                              {"y", a.state.position.y()},
                              {"vx", a.state.velocity.x()},
                              {"vy", a.state.velocity.y()},
                              {"group", a.group}});
  }
  j["scripts"] = json::array();
  for (const auto& s : c.scripts) j["scripts"].push_back(write_script(s));
  return j.dump(2);
}

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  out << "t,agent_id,class,x,y,vx,vy,phase,team\n";
  out << std::setprecision(10);
  for (const auto& r : trace.records) {
    out << r.t << ',' << r.agent_id << ',' << (r.cls == AgentClass::Attacker ? "attacker" : "defender")
        << ',' << r.position.x() << ',' << r.position.y() << ',' << r.velocity.x() << ','
        << r.velocity.y() << ',' << r.phase << ',' << r.team << '\n';
  }
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_events_csv(const SimTrace& trace, std::ostream& out) {
  out << "t,event_type,subject,object,detail\n";
  out << std::setprecision(10);
  for (const auto& e : trace.events) {
    out << e.t << ',' << csv_field(e.type) << ',' << csv_field(e.subject) << ','
        << csv_field(e.object) << ',' << csv_field(e.detail) << '\n';
  }
}

std::string dump_snapshot(const SplitSnapshot& snap) {
  json j;
  j["version"] = kVersion;
  j["kind"] = "split_snapshot";
  j["n_attackers"] = snap.n_attackers;
  j["cluster_centers"] = json::array();
  for (const auto& c : snap.cluster_centers) j["cluster_centers"].push_back({c.x(), c.y()});
  j["cluster_sizes"] = snap.cluster_sizes;
  if (!snap.capacities.empty()) j["capacities"] = snap.capacities;
  j["unclustered"] = json::array();
  for (int i = 0; i < snap.num_unclustered(); ++i) {
    int id = snap.unclustered_ids.empty() ? i : snap.unclustered_ids[i];
    j["unclustered"].push_back(write_state(snap.unclustered[i], id));
  }
  j["defenders"] = json::array();
  for (int l = 0; l < snap.num_defenders(); ++l) {
    int id = snap.defender_ids.empty() ? l : snap.defender_ids[l];
    j["defenders"].push_back(write_state(snap.defenders[l], id));
  }
  j["resource_table"] = write_table(snap.rd);
  j["world"] = write_world(snap.model.world);
  return j.dump(2);
}

SplitSnapshot parse_snapshot(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  only_keys(j,
            {"version", "kind", "n_attackers", "cluster_centers", "cluster_sizes", "capacities",
             "unclustered", "defenders", "resource_table", "world"},
            "snapshot");
  if (j.value("version", std::string()) != kVersion) fail("version must be \"v1\"");
  if (j.value("kind", std::string("split_snapshot")) != "split_snapshot") fail("kind must be split_snapshot");
  SplitSnapshot s;
  read(j, "n_attackers", s.n_attackers);
  for (const auto& c : j.value("cluster_centers", json::array())) s.cluster_centers.push_back(vec(c, "cluster center"));
  read(j, "cluster_sizes", s.cluster_sizes);
  read(j, "capacities", s.capacities);
  int idx = 0;
  for (const auto& a : j.value("unclustered", json::array())) {
    int id = idx;
    s.unclustered.push_back(read_tagged_state(a, "unclustered " + std::to_string(idx), id));
    s.unclustered_ids.push_back(id);
    ++idx;
  }
  idx = 0;
  for (const auto& d : j.value("defenders", json::array())) {
    int id = idx;
    s.defenders.push_back(read_tagged_state(d, "defender " + std::to_string(idx), id));
    s.defender_ids.push_back(id);
    ++idx;
  }
  if (j.contains("resource_table")) s.rd = read_table(j["resource_table"]);
  if (j.contains("world")) s.model.world = read_world(j["world"]);
  s.model.world.validate();
  for (int n : s.cluster_sizes) {
    if (n < 1) fail("cluster sizes must be positive");
  }
  assignment::check_capacity(s);
  return s;
}

}  // namespace swarmdef::scenario_io
