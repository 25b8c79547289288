#include "prmlab/config.hpp"

#include <fstream>
#include <sstream>

namespace prmlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value, const std::string& field) {
  std::vector<std::string> items;
  std::istringstream is(value);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(field + ": empty list item");
    items.push_back(item);
  }
  if (items.empty()) throw ConfigError(field + ": empty list");
  return items;
}

double parse_double(const std::string& value, const std::string& field) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& value, const std::string& field) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(value, &pos);
    if (pos != value.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected an integer, got '" + value + "'");
  }
}

uint64_t parse_u64(const std::string& value, const std::string& field) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size() || value[0] == '-') throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field + ": expected a non-negative integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& value, const std::string& field) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError(field + ": expected true or false, got '" + value + "'");
}

ScoreDist parse_dist(const std::string& value, const std::string& field) {
  if (value.size() < 3 || value.back() != ')') {
    throw ConfigError(field + ": expected beta(a,b) or point(v), got '" + value + "'");
  }
  std::size_t open = value.find('(');
  if (open == std::string::npos) {
    throw ConfigError(field + ": expected beta(a,b) or point(v), got '" + value + "'");
  }
  std::string name = trim(value.substr(0, open));
  std::string inner = value.substr(open + 1, value.size() - open - 2);
  if (name == "beta") {
    std::vector<std::string> parts = split_list(inner, field);
    if (parts.size() != 2) throw ConfigError(field + ": beta takes two parameters");
    return ScoreDist::beta_dist(parse_double(parts[0], field), parse_double(parts[1], field));
  }
  if (name == "point") {
    return ScoreDist::point_mass(parse_double(trim(inner), field));
  }
  throw ConfigError(field + ": unknown distribution '" + name + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "world" && section != "weighting" && section != "ttrl" &&
          section != "sweep") {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + section +
                          "]");
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                        "' outside any section");
    }
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    }
    std::string field = section + "." + key;

    if (section == "world") {
      if (key == "num_question_classes") {
        cfg.world.num_question_classes = parse_int(value, field);
      } else if (key == "answers_per_question") {
        cfg.world.answers_per_question = parse_int(value, field);
      } else if (key == "consensus_error_strength") {
        cfg.world.consensus_error_strength = parse_double(value, field);
      } else if (key == "correct_score_dist") {
        cfg.world.correct_score_dist = parse_dist(value, field);
      } else if (key == "incorrect_score_dist") {
        cfg.world.incorrect_score_dist = parse_dist(value, field);
      } else if (key == "verifier_flip_prob") {
        cfg.world.verifier_flip_prob = parse_double(value, field);
      } else {
        throw ConfigError(field + ": unknown key");
      }
    } else if (section == "weighting") {
      if (key == "alpha") {
        cfg.weighting.alpha = parse_double(value, field);
      } else if (key == "beta") {
        cfg.weighting.beta = parse_double(value, field);
      } else {
        throw ConfigError(field + ": unknown key");
      }
    } else if (section == "ttrl") {
      if (key == "enabled") {
        cfg.ttrl_enabled = parse_bool(value, field);
      } else if (key == "learning_rate") {
        cfg.ttrl.learning_rate = parse_double(value, field);
      } else if (key == "updater") {
        cfg.ttrl.updater = updater_from_string(value);
      } else if (key == "clip_ratio") {
        cfg.ttrl.clip_ratio = parse_double(value, field);
      } else if (key == "kl_coefficient") {
        cfg.ttrl.kl_coefficient = parse_double(value, field);
      } else if (key == "group_std_epsilon") {
        cfg.ttrl.group_std_epsilon = parse_double(value, field);
      } else {
        throw ConfigError(field + ": unknown key");
      }
    } else {  // sweep
      if (key == "m_values") {
        cfg.m_values.clear();
        for (const std::string& item : split_list(value, field)) {
          cfg.m_values.push_back(parse_int(item, field));
        }
      } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const std::string& item : split_list(value, field)) {
          cfg.seeds.push_back(parse_u64(item, field));
        }
      } else if (key == "strategies") {
        cfg.strategies.clear();
        for (const std::string& item : split_list(value, field)) {
          cfg.strategies.push_back(strategy_from_string(item));
        }
      } else if (key == "questions_per_run") {
        cfg.questions_per_run = parse_int(value, field);
      } else {
        throw ConfigError(field + ": unknown key");
      }
    }
  }
  validate_experiment(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_experiment_config(buf.str());
}

}  // namespace prmlab
