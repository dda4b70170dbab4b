// config.cpp

#include "hsteer/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <type_traits>

namespace hsteer {

using nlohmann::json;

namespace {

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.at(key).is_number_integer() && !j.at(key).is_number_unsigned()) {
        throw ConfigError(where + "." + key + ": expected a non-negative integer");
      }
    }
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

void read_number(const json& j, const char* key, double& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
  out = j.at(key).get<double>();
}

SourceConfig parse_source(const json& j, const std::string& where) {
  require_object(j, where);
  check_keys(j, {"squeezing", "singlet_fidelity", "overlap_h", "overlap_v", "pair_state"}, where);
  SourceConfig s;
  read_number(j, "squeezing", s.squeezing, where);
  read_number(j, "singlet_fidelity", s.singlet_fidelity, where);
  read_number(j, "overlap_h", s.overlap.h, where);
  read_number(j, "overlap_v", s.overlap.v, where);
  if (j.contains("pair_state")) {
    std::string name;
    read(j, "pair_state", name, where);
    s.pair_state = parse_pair_state(name);
  }
  return s;
}

json source_json(const SourceConfig& s) {
  return {{"squeezing", s.squeezing},
          {"singlet_fidelity", s.singlet_fidelity},
          {"overlap_h", s.overlap.h},
          {"overlap_v", s.overlap.v},
          {"pair_state", to_string(s.pair_state)}};
}

ThresholdDetector parse_detector(const json& j, const std::string& where) {
  require_object(j, where);
  check_keys(j, {"efficiency", "dark_count_probability"}, where);
  ThresholdDetector d;
  read_number(j, "efficiency", d.efficiency, where);
  read_number(j, "dark_count_probability", d.dark_count, where);
  return d;
}

json detector_json(const ThresholdDetector& d) {
  return {{"efficiency", d.efficiency}, {"dark_count_probability", d.dark_count}};
}

SpacetimeEvent parse_event(const json& j, const std::string& where) {
  require_object(j, where);
  check_keys(j, {"label", "x_m", "y_m", "t_ns"}, where);
  SpacetimeEvent e;
  e.label = where;
  read(j, "label", e.label, where);
  if (!j.contains("x_m") || !j.contains("t_ns")) throw ConfigError(where + ": x_m and t_ns required");
  read_number(j, "x_m", e.x_m, where);
  read_number(j, "y_m", e.y_m, where);
  read_number(j, "t_ns", e.t_ns, where);
  return e;
}

json event_json(const SpacetimeEvent& e) {
  return {{"label", e.label}, {"x_m", e.x_m}, {"y_m", e.y_m}, {"t_ns", e.t_ns}};
}

}  // namespace

std::string to_string(PairState state) {
  switch (state) {
    case PairState::kSinglet: return "singlet";
    case PairState::kProductZ: return "product_z";
    case PairState::kProductX: return "product_x";
  }
  return "singlet";
}

PairState parse_pair_state(const std::string& name) {
  if (name == "singlet") return PairState::kSinglet;
  if (name == "product_z") return PairState::kProductZ;
  if (name == "product_x") return PairState::kProductX;
  throw ConfigError("unknown pair_state '" + name + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

ExperimentConfig parse_experiment_config(const json& j) {
  const std::string where = "config";
  require_object(j, where);
  check_keys(j,
             {"source1", "source2", "channel_loss_db", "bp_filter_loss_db", "bsm_loss_db", "detectors",
              "bsm_transmissivity_h", "bsm_transmissivity_v", "swap_enabled", "rng_seed",
              "settings_n", "max_photons", "tail_tolerance", "metadata"},
             where);
  ExperimentConfig c;
  if (j.contains("source1")) c.source1 = parse_source(j.at("source1"), "source1");
  if (j.contains("source2")) c.source2 = parse_source(j.at("source2"), "source2");
  read_number(j, "channel_loss_db", c.channel_loss_db, where);
  read_number(j, "bp_filter_loss_db", c.bp_filter_loss_db, where);
  read_number(j, "bsm_loss_db", c.bsm_loss_db, where);
  read_number(j, "bsm_transmissivity_h", c.bsm_transmissivity_h, where);
  read_number(j, "bsm_transmissivity_v", c.bsm_transmissivity_v, where);
  read_number(j, "tail_tolerance", c.tail_tolerance, where);
  read(j, "swap_enabled", c.swap_enabled, where);
  read(j, "rng_seed", c.rng_seed, where);
  read(j, "settings_n", c.settings_n, where);
  read(j, "max_photons", c.max_photons, where);
  if (j.contains("metadata") && !j.at("metadata").is_object()) {
    throw ConfigError("metadata: expected an object");
  }
  if (j.contains("detectors")) {
    const auto& d = j.at("detectors");
    require_object(d, "detectors");
    check_keys(d, {"bsm_plus", "bsm_minus", "alice_plus", "alice_minus", "bob_plus", "bob_minus"},
               "detectors");
    auto set = [&](const char* key, ThresholdDetector& out) {
      if (d.contains(key)) out = parse_detector(d.at(key), std::string("detectors.") + key);
    };
    set("bsm_plus", c.detectors.bsm_plus);
    set("bsm_minus", c.detectors.bsm_minus);
    set("alice_plus", c.detectors.alice_plus);
    set("alice_minus", c.detectors.alice_minus);
    set("bob_plus", c.detectors.bob_plus);
    set("bob_minus", c.detectors.bob_minus);
  }
  try {
    c.validate();
    platonic_settings(c.settings_n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(read_json_file(path));
}

json to_json(const ExperimentConfig& c) {
  return {{"source1", source_json(c.source1)},
          {"source2", source_json(c.source2)},
          {"channel_loss_db", c.channel_loss_db},
          {"bp_filter_loss_db", c.bp_filter_loss_db},
          {"bsm_loss_db", c.bsm_loss_db},
          {"detectors",
           {{"bsm_plus", detector_json(c.detectors.bsm_plus)},
            {"bsm_minus", detector_json(c.detectors.bsm_minus)},
            {"alice_plus", detector_json(c.detectors.alice_plus)},
            {"alice_minus", detector_json(c.detectors.alice_minus)},
            {"bob_plus", detector_json(c.detectors.bob_plus)},
            {"bob_minus", detector_json(c.detectors.bob_minus)}}},
          {"bsm_transmissivity_h", c.bsm_transmissivity_h},
          {"bsm_transmissivity_v", c.bsm_transmissivity_v},
          {"swap_enabled", c.swap_enabled},
          {"rng_seed", c.rng_seed},
          {"settings_n", c.settings_n},
          {"max_photons", c.max_photons},
          {"tail_tolerance", c.tail_tolerance}};
}

SpacetimeGeometry parse_geometry(const json& j) {
  require_object(j, "geometry");
  check_keys(j, {"signal_speed_fraction", "pair_generation", "rng", "bsm", "bob_detection",
                 "alice_report"},
             "geometry");
  SpacetimeGeometry g;
  read_number(j, "signal_speed_fraction", g.signal_speed_fraction, "geometry");
  if (!j.contains("pair_generation") || !j.at("pair_generation").is_array()) {
    throw ConfigError("geometry.pair_generation: expected an array");
  }
  for (const auto& e : j.at("pair_generation")) g.pair_generation.push_back(parse_event(e, "pair_generation"));
  for (auto [key, event] : {std::pair{"rng", &g.rng}, std::pair{"bsm", &g.bsm},
                            std::pair{"bob_detection", &g.bob_detection},
                            std::pair{"alice_report", &g.alice_report}}) {
    if (!j.contains(key)) throw ConfigError(std::string("geometry.") + key + ": missing");
    *event = parse_event(j.at(key), key);
  }
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

SpacetimeGeometry load_geometry(const std::string& path) { return parse_geometry(read_json_file(path)); }

json to_json(const SpacetimeGeometry& g) {
  json pairs = json::array();
  for (const auto& e : g.pair_generation) pairs.push_back(event_json(e));
  return {{"signal_speed_fraction", g.signal_speed_fraction},
          {"pair_generation", pairs},
          {"rng", event_json(g.rng)},
          {"bsm", event_json(g.bsm)},
          {"bob_detection", event_json(g.bob_detection)},
          {"alice_report", event_json(g.alice_report)}};
}

}  // namespace hsteer
