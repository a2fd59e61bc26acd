#include "qif/io.hpp"

#include <fstream>
#include <sstream>

namespace qif::io {

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorKind::Parse, std::string("missing field '") + name + "'");
  return j.at(name);
}

Labels labels_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorKind::Parse, std::string(what) + " must be an array of labels");
  Labels out;
  for (const auto& e : j) {
    if (!e.is_string()) throw Error(ErrorKind::Parse, std::string(what) + " entries must be strings");
    out.push_back(Label::parse(e.get<std::string>()));
  }
  return out;
}

Json labels_to_json(const Labels& ls) {
  Json out = Json::array();
  for (const auto& l : ls) out.push_back(l.to_string());
  return out;
}

Eigen::MatrixXd data_from_json(const Json& j, std::size_t rows, std::size_t cols) {
  if (!j.is_array() || j.size() != rows) throw Error(ErrorKind::Parse, "data must have one array per row");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || row.size() != cols) throw Error(ErrorKind::Parse, "row " + std::to_string(i) + " has the wrong length");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!row[k].is_number()) throw Error(ErrorKind::Parse, "data entries must be numbers");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k].get<double>();
    }
  }
  return m;
}

Json data_to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(std::move(row));
  }
  return out;
}

template <typename Key>
std::vector<std::pair<Key, double>> weights_from_json(const Json& j) {
  const Json& w = field(j, "weights");
  if (!w.is_object()) throw Error(ErrorKind::Parse, "weights must be an object");
  std::vector<std::pair<Key, double>> out;
  for (const auto& [k, v] : w.items()) {
    if (!v.is_number()) throw Error(ErrorKind::Parse, "weight of '" + k + "' is not a number");
    if constexpr (std::is_same_v<Key, Label>) {
      out.emplace_back(Label::parse(k), v.template get<double>());
    } else {
      out.emplace_back(k, v.template get<double>());
    }
  }
  return out;
}

Json pairs_to_json(const std::vector<std::pair<Label, Label>>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k.to_string()] = v.to_string();
  return out;
}

Json behavioral_to_json(const BehavioralMap& m) {
  Json out = Json::object();
  for (const auto& [k, d] : m) out[k.to_string()] = weights_to_json(d);
  return out;
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

Json to_json(const LabeledMatrixd& m) {
  Json j;
  j["rows"] = labels_to_json(m.rows());
  j["cols"] = labels_to_json(m.cols());
  j["data"] = data_to_json(m.data());
  return j;
}

LabeledMatrixd matrix_from_json(const Json& j) {
  Labels rows = labels_from_json(field(j, "rows"), "rows");
  Labels cols = labels_from_json(field(j, "cols"), "cols");
  Eigen::MatrixXd data = data_from_json(field(j, "data"), rows.size(), cols.size());
  return LabeledMatrixd(std::move(rows), std::move(cols), std::move(data));
}

Json to_json(const Channeld& c) {
  Json j;
  j["kind"] = "channel";
  Json m = to_json(c.matrix());
  for (auto& [k, v] : m.items()) j[k] = v;
  return j;
}

Channeld channel_from_json(const Json& j) {
  if (j.is_object() && j.contains("kind") && j.at("kind") != "channel") {
    throw Error(ErrorKind::Parse, "expected kind 'channel'");
  }
  return Channeld(matrix_from_json(j));
}

Json to_json(const Priord& pi) {
  Json w = Json::object();
  for (const auto& [k, v] : pi) w[k.to_string()] = v;
  return Json{{"weights", w}};
}

Priord prior_from_json(const Json& j) { return Priord::normalized(weights_from_json<Label>(j)); }

Json to_json(const IndexDistributiond& mu) {
  Json w = Json::object();
  for (const auto& [k, v] : mu) w[k] = v;
  return Json{{"weights", w}};
}

IndexDistributiond index_distribution_from_json(const Json& j) {
  return IndexDistributiond::normalized(weights_from_json<std::string>(j));
}

Json to_json(const VulnMeasured& v) {
  if (v.is_bayes()) return Json{{"kind", "bayes"}};
  const auto& g = v.gain_function();
  Json j;
  j["kind"] = "gain";
  j["guesses"] = labels_to_json(g.guesses());
  j["secrets"] = labels_to_json(g.secrets());
  j["gain"] = data_to_json(g.gain());
  return j;
}

VulnMeasured measure_from_json(const Json& j, const std::optional<Labels>& secrets) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "bayes") return VulnMeasured::bayes();
  if (kind != "gain") throw Error(ErrorKind::Parse, "unknown measure kind '" + kind + "'");
  Labels guesses = labels_from_json(field(j, "guesses"), "guesses");
  Labels xs;
  if (j.contains("secrets")) {
    xs = labels_from_json(j.at("secrets"), "secrets");
  } else if (secrets) {
    xs = *secrets;
  } else {
    throw Error(ErrorKind::Parse, "gain function needs a 'secrets' list");
  }
  Eigen::MatrixXd gain = data_from_json(field(j, "gain"), guesses.size(), xs.size());
  return VulnMeasured::gain(GainFunctiond(std::move(guesses), std::move(xs), std::move(gain)));
}

Json to_json(const LeakageGame& g) {
  Json j;
  j["defender"] = labels_to_json(g.defender());
  j["attacker"] = labels_to_json(g.attacker());
  j["prior"] = to_json(g.prior());
  j["measure"] = to_json(g.measure());
  Json cs = Json::object();
  for (const auto& d : g.defender()) {
    for (const auto& a : g.attacker()) cs[d.to_string() + "|" + a.to_string()] = to_json(g.channel(d, a));
  }
  j["channels"] = std::move(cs);
  return j;
}

LeakageGame game_from_json(const Json& j) {
  Labels defender = labels_from_json(field(j, "defender"), "defender");
  Labels attacker = labels_from_json(field(j, "attacker"), "attacker");
  Priord prior = prior_from_json(field(j, "prior"));
  VulnMeasured measure = j.contains("measure") ? measure_from_json(j.at("measure"), prior.keys()) : VulnMeasured::bayes();
  const Json& cs = field(j, "channels");
  if (!cs.is_object()) throw Error(ErrorKind::Parse, "channels must be an object");
  ChannelMap channels;
  for (const auto& [key, c] : cs.items()) {
    // Split on the first unescaped '|'.
    std::size_t bar = std::string::npos;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (key[i] == '\\') {
        ++i;
      } else if (key[i] == '|') {
        bar = i;
        break;
      }
    }
    if (bar == std::string::npos) throw Error(ErrorKind::Parse, "channel key '" + key + "' is not 'd|a'");
    channels.emplace(std::make_pair(Label::parse(key.substr(0, bar)), Label::parse(key.substr(bar + 1))),
                     channel_from_json(c));
  }
  return LeakageGame(std::move(defender), std::move(attacker), std::move(prior), std::move(measure), std::move(channels));
}

Json weights_to_json(const ActionDistribution& d) {
  Json out = Json::object();
  for (const auto& [k, v] : d) out[k.to_string()] = v;
  return out;
}

Json to_json(const GameSolution& s) {
  Json j;
  j["kind"] = std::string(to_string(s.kind));
  j["value"] = s.value;
  Json def = Json::object();
  if (s.defender_mixed) def["mixed"] = weights_to_json(*s.defender_mixed);
  if (s.defender_pure) def["pure"] = s.defender_pure->to_string();
  if (s.defender_function) def["function"] = pairs_to_json(*s.defender_function);
  if (s.defender_function_mixture) {
    Json mix = Json::array();
    for (const auto& [f, w] : *s.defender_function_mixture) {
      Json fj = Json::array();
      for (const auto& d : f) fj.push_back(d.to_string());
      mix.push_back(Json{{"function", fj}, {"weight", w}});
    }
    def["function_mixture"] = std::move(mix);
  }
  if (s.defender_behavioral) def["behavioral"] = behavioral_to_json(*s.defender_behavioral);
  j["defender"] = std::move(def);

  Json att = Json::object();
  if (s.attacker_mixed) att["mixed"] = weights_to_json(*s.attacker_mixed);
  if (s.attacker_pure) att["pure"] = s.attacker_pure->to_string();
  if (s.attacker_function) att["function"] = pairs_to_json(*s.attacker_function);
  if (s.attacker_behavioral) att["behavioral"] = behavioral_to_json(*s.attacker_behavioral);
  j["attacker"] = std::move(att);

  if (s.per_attacker_values) {
    Json per = Json::object();
    for (const auto& [a, v] : *s.per_attacker_values) per[a.to_string()] = v;
    j["per_attacker_values"] = std::move(per);
  }
  j["diagnostics"] = Json{{"solver", s.diagnostics.solver},
                          {"lp_rows", s.diagnostics.lp_rows},
                          {"lp_cols", s.diagnostics.lp_cols},
                          {"iterations", s.diagnostics.iterations},
                          {"duality_gap", s.diagnostics.duality_gap},
                          {"primal_residual", s.diagnostics.primal_residual}};
  if (!s.notes.empty()) j["notes"] = s.notes;
  return j;
}

Json to_json(const HierarchyReport& r) {
  Json values = Json::object();
  for (const auto& s : r.solutions) values[std::string(to_string(s.kind))] = s.value;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back(Json{{"relation", std::string(to_string(c.lhs)) + (c.equality ? " = " : " >= ") +
                                           std::string(to_string(c.rhs))},
                          {"lhs", c.lhs_value},
                          {"rhs", c.rhs_value},
                          {"ok", c.ok}});
  }
  return Json{{"values", values}, {"checks", checks}, {"ok", r.ok}};
}

Json to_json(const pwd::UniformEquilibriumReport& r) {
  Json per = Json::object();
  for (const auto& [a, v] : r.uniform_payoffs) per[a.to_string()] = v;
  return Json{{"bits", r.bits},
              {"uniform_payoffs", per},
              {"payoff_spread", r.payoff_spread},
              {"uniform_worst_case", r.uniform_worst_case},
              {"game_value", r.game_value},
              {"equal_payoffs", r.equal_payoffs},
              {"attains_optimum", r.attains_optimum},
              {"holds", r.holds()}};
}

}  // namespace qif::io
