#include "qif/games.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qif {

namespace {

// Index of the best value; near-ties (within tol) go to the lowest label.
std::size_t pick(const std::vector<double>& values, const Labels& labels, bool maximize, double tol) {
  double best = values.front();
  for (double v : values) best = maximize ? std::max(best, v) : std::min(best, v);
  std::size_t out = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - best) <= tol && (out == values.size() || labels[i] < labels[out])) out = i;
  }
  return out;
}

ActionDistribution from_vector(const Labels& labels, const Eigen::VectorXd& w) {
  std::vector<ActionDistribution::Entry> entries;
  for (std::size_t i = 0; i < labels.size(); ++i) entries.emplace_back(labels[i], w(static_cast<Eigen::Index>(i)));
  return ActionDistribution::normalized(std::move(entries));
}

ActionDistribution point(const Labels& labels, std::size_t k) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(labels.size()));
  w(static_cast<Eigen::Index>(k)) = 1;
  return from_vector(labels, w);
}

Eigen::MatrixXd payoff_data(const LeakageGame& g) { return payoff_table(g).data(); }

void require_hidden_typing(const LeakageGame& g) {
  for (const auto& a : g.attacker()) {
    const Channeld& ref = g.channel(g.defender().front(), a);
    for (const auto& d : g.defender()) {
      if (!g.channel(d, a).same_type_as(ref)) {
        throw Error(ErrorKind::TypeMismatch, "channel (" + d.to_string() + ", " + a.to_string() +
                                                 ") differs in type from (" + g.defender().front().to_string() +
                                                 ", " + a.to_string() + "); hidden choice needs one type per attacker action");
      }
    }
  }
}

GameSolution solve_I(const LeakageGame& g, const SolveOptions& opt) {
  const auto m = solve_matrix_game<double>(payoff_data(g), opt.lp);
  GameSolution s;
  s.kind = GameKind::I;
  s.value = m.value;
  s.defender_mixed = from_vector(g.defender(), m.defender);
  s.attacker_mixed = from_vector(g.attacker(), m.attacker);
  s.diagnostics = m.diagnostics;
  return s;
}

GameSolution solve_II(const LeakageGame& g, const SolveOptions& opt) {
  const Eigen::MatrixXd u = payoff_data(g);
  std::vector<std::pair<Label, Label>> best_response;
  BehavioralMap behavioral;
  std::vector<double> worst(g.defender().size());
  for (std::size_t d = 0; d < g.defender().size(); ++d) {
    std::vector<double> row(u.cols());
    for (Eigen::Index a = 0; a < u.cols(); ++a) row[static_cast<std::size_t>(a)] = u(static_cast<Eigen::Index>(d), a);
    const std::size_t a = pick(row, g.attacker(), true, opt.tie_tol);
    best_response.emplace_back(g.defender()[d], g.attacker()[a]);
    behavioral.emplace_back(g.defender()[d], point(g.attacker(), a));
    worst[d] = row[a];
  }
  const std::size_t d_star = pick(worst, g.defender(), false, opt.tie_tol);

  GameSolution s;
  s.kind = GameKind::II;
  s.value = worst[d_star];
  s.defender_pure = g.defender()[d_star];
  s.attacker_function = best_response;
  s.attacker_behavioral = behavioral;
  s.diagnostics.solver = "enumeration";

  // Pure and behavioral forms of the attacker's reply must give the same payoff.
  double behavioral_value = 0;
  for (const auto& [a, w] : behavioral[d_star].second) {
    behavioral_value += w * u(static_cast<Eigen::Index>(d_star), static_cast<Eigen::Index>(g.attacker_index(a)));
  }
  if (std::abs(behavioral_value - s.value) > 1e-12) {
    throw Error(ErrorKind::SolverFailure, "pure and behavioral attacker replies disagree");
  }
  return s;
}

GameSolution solve_III(const LeakageGame& g, const SolveOptions& opt) {
  const Eigen::MatrixXd u = payoff_data(g);
  std::vector<std::pair<Label, Label>> best_response;
  std::vector<double> guaranteed(g.attacker().size());
  for (std::size_t a = 0; a < g.attacker().size(); ++a) {
    std::vector<double> col(u.rows());
    for (Eigen::Index d = 0; d < u.rows(); ++d) col[static_cast<std::size_t>(d)] = u(d, static_cast<Eigen::Index>(a));
    const std::size_t d = pick(col, g.defender(), false, opt.tie_tol);
    best_response.emplace_back(g.attacker()[a], g.defender()[d]);
    guaranteed[a] = col[d];
  }
  const std::size_t a_star = pick(guaranteed, g.attacker(), true, opt.tie_tol);

  GameSolution s;
  s.kind = GameKind::III;
  s.value = guaranteed[a_star];
  s.attacker_pure = g.attacker()[a_star];
  s.defender_function = best_response;
  s.diagnostics.solver = "enumeration";
  return s;
}

GameSolution solve_IV(const LeakageGame& g, const SolveOptions& opt, GameKind kind) {
  const auto m = solve_convex_linear_game<double>(hidden_game_pieces(g), opt.lp);
  GameSolution s;
  s.kind = kind;
  s.value = m.value;
  s.defender_mixed = from_vector(g.defender(), m.defender);
  s.attacker_mixed = from_vector(g.attacker(), m.attacker);
  s.diagnostics = m.diagnostics;
  if (kind == GameKind::V) s.notes.emplace_back("Game V is solved as Game IV");
  return s;
}

GameSolution solve_VI_mixed(const LeakageGame& g, const SolveOptions& opt) {
  require_hidden_typing(g);
  const std::size_t nd = g.defender().size();
  const std::size_t na = g.attacker().size();
  std::size_t nf = 1;
  for (std::size_t i = 0; i < na; ++i) {
    if (nf > opt.vi_cap / nd) {
      throw Error(ErrorKind::TooLarge, std::to_string(nd) + "^" + std::to_string(na) +
                                           " defender functions exceed the cap of " + std::to_string(opt.vi_cap));
    }
    nf *= nd;
  }
  if (nf > opt.vi_cap) {
    throw Error(ErrorKind::TooLarge, std::to_string(nf) + " defender functions exceed the cap of " + std::to_string(opt.vi_cap));
  }

  // Function k maps attacker i to defender digit i of k in base |D|, attacker 0 most significant.
  auto digit = [&](std::size_t k, std::size_t a) {
    for (std::size_t i = na - 1; i > a; --i) k /= nd;
    return k % nd;
  };

  const auto base = hidden_game_pieces(g);
  std::vector<std::vector<Eigen::MatrixXd>> pieces(na);
  for (std::size_t a = 0; a < na; ++a) {
    for (const auto& blk : base[a]) {
      Eigen::MatrixXd lifted(blk.rows(), static_cast<Eigen::Index>(nf));
      for (std::size_t k = 0; k < nf; ++k) lifted.col(static_cast<Eigen::Index>(k)) = blk.col(static_cast<Eigen::Index>(digit(k, a)));
      pieces[a].push_back(std::move(lifted));
    }
  }
  const auto m = solve_convex_linear_game<double>(pieces, opt.lp);

  FunctionMixture sigma;
  for (std::size_t k = 0; k < nf; ++k) {
    const double w = m.defender(static_cast<Eigen::Index>(k));
    if (w <= 1e-12) continue;
    DefenderFunction f;
    for (std::size_t a = 0; a < na; ++a) f.push_back(g.defender()[digit(k, a)]);
    sigma.emplace_back(std::move(f), w);
  }
  double total = 0;
  for (const auto& e : sigma) total += e.second;
  for (auto& e : sigma) e.second /= total;

  std::vector<double> per_a(na);
  for (std::size_t a = 0; a < na; ++a) per_a[a] = convex_payoff<double>(pieces[a], m.defender);

  GameSolution s;
  s.kind = GameKind::VIMixed;
  s.value = m.value;
  s.defender_function_mixture = sigma;
  s.defender_behavioral = mixed_to_behavioral(sigma, g.attacker(), g.defender());
  s.attacker_pure = g.attacker()[pick(per_a, g.attacker(), true, opt.tie_tol)];
  s.diagnostics = m.diagnostics;
  return s;
}

GameSolution solve_VI_behavioral(const LeakageGame& g, const SolveOptions& opt) {
  const auto pieces = hidden_game_pieces(g);
  BehavioralMap behavioral;
  std::vector<double> values;
  SolverDiagnostics diag;
  diag.solver = "epigraph-lp per attacker action";
  for (std::size_t a = 0; a < g.attacker().size(); ++a) {
    const auto m = solve_convex_linear_game<double>({pieces[a]}, opt.lp);
    behavioral.emplace_back(g.attacker()[a], from_vector(g.defender(), m.defender));
    values.push_back(m.value);
    diag.lp_rows = std::max(diag.lp_rows, m.diagnostics.lp_rows);
    diag.lp_cols = std::max(diag.lp_cols, m.diagnostics.lp_cols);
    diag.iterations += m.diagnostics.iterations;
    diag.duality_gap = std::max(diag.duality_gap, m.diagnostics.duality_gap);
    diag.primal_residual = std::max(diag.primal_residual, m.diagnostics.primal_residual);
  }
  const std::size_t a_star = pick(values, g.attacker(), true, opt.tie_tol);

  GameSolution s;
  s.kind = GameKind::VIBehavioral;
  s.value = values[a_star];
  s.attacker_pure = g.attacker()[a_star];
  s.defender_behavioral = behavioral;
  std::vector<std::pair<Label, double>> per;
  for (std::size_t a = 0; a < values.size(); ++a) per.emplace_back(g.attacker()[a], values[a]);
  s.per_attacker_values = per;
  s.diagnostics = diag;
  return s;
}

}  // namespace

LeakageGame::LeakageGame(Labels defender, Labels attacker, Priord prior, VulnMeasured measure, ChannelMap channels)
    : defender_(std::move(defender)),
      attacker_(std::move(attacker)),
      prior_(std::move(prior)),
      measure_(std::move(measure)),
      channels_(std::move(channels)) {
  if (defender_.empty() || attacker_.empty()) throw Error(ErrorKind::UnknownAction, "action sets must be non-empty");
  detail::index_labels(defender_, "defender");
  detail::index_labels(attacker_, "attacker");
  const Labels xs = prior_.keys();
  for (const auto& d : defender_) {
    for (const auto& a : attacker_) {
      auto it = channels_.find({d, a});
      if (it == channels_.end()) {
        throw Error(ErrorKind::UnknownAction, "no channel for (" + d.to_string() + ", " + a.to_string() + ")");
      }
      if (!detail::same_label_set(it->second.rows(), xs)) {
        throw Error(ErrorKind::LabelMismatch,
                    "channel (" + d.to_string() + ", " + a.to_string() + ") rows differ from the prior's secrets");
      }
    }
  }
  if (channels_.size() != defender_.size() * attacker_.size()) {
    throw Error(ErrorKind::UnknownAction, "channel map names actions outside the action sets");
  }
  if (!measure_.is_bayes()) measure_.resolve(xs);
}

const Channeld& LeakageGame::channel(const Label& d, const Label& a) const {
  auto it = channels_.find({d, a});
  if (it == channels_.end()) throw Error(ErrorKind::UnknownAction, "no action pair (" + d.to_string() + ", " + a.to_string() + ")");
  return it->second;
}

std::size_t LeakageGame::defender_index(const Label& d) const {
  auto it = std::find(defender_.begin(), defender_.end(), d);
  if (it == defender_.end()) throw Error(ErrorKind::UnknownAction, "unknown defender action '" + d.to_string() + "'");
  return static_cast<std::size_t>(it - defender_.begin());
}

std::size_t LeakageGame::attacker_index(const Label& a) const {
  auto it = std::find(attacker_.begin(), attacker_.end(), a);
  if (it == attacker_.end()) throw Error(ErrorKind::UnknownAction, "unknown attacker action '" + a.to_string() + "'");
  return static_cast<std::size_t>(it - attacker_.begin());
}

LeakageGame LeakageGame::with_channel(const Label& d, const Label& a, Channeld c) const {
  ChannelMap m = channels_;
  channel(d, a);
  m.insert_or_assign({d, a}, std::move(c));
  return LeakageGame(defender_, attacker_, prior_, measure_, std::move(m));
}

std::string_view to_string(GameKind k) {
  switch (k) {
    case GameKind::I: return "I";
    case GameKind::II: return "II";
    case GameKind::III: return "III";
    case GameKind::IV: return "IV";
    case GameKind::V: return "V";
    case GameKind::VIMixed: return "VI-mixed";
    case GameKind::VIBehavioral: return "VI-behavioral";
  }
  return "?";
}

GameKind parse_game_kind(std::string_view text) {
  for (GameKind k : kAllGameKinds) {
    if (to_string(k) == text) return k;
  }
  if (text == "VI_mixed" || text == "VI_m") return GameKind::VIMixed;
  if (text == "VI_behavioral" || text == "VI_b") return GameKind::VIBehavioral;
  throw Error(ErrorKind::Parse, "unknown game kind '" + std::string(text) + "'");
}

double pure_payoff(const LeakageGame& g, const Label& d, const Label& a) {
  return posterior_vuln(g.measure(), g.prior(), g.channel(d, a));
}

LabeledMatrixd payoff_table(const LeakageGame& g) {
  Eigen::MatrixXd u(static_cast<Eigen::Index>(g.defender().size()), static_cast<Eigen::Index>(g.attacker().size()));
  for (std::size_t d = 0; d < g.defender().size(); ++d) {
    for (std::size_t a = 0; a < g.attacker().size(); ++a) {
      u(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(a)) = pure_payoff(g, g.defender()[d], g.attacker()[a]);
    }
  }
  return LabeledMatrixd(g.defender(), g.attacker(), std::move(u));
}

namespace {

IndexDistribution<double> as_index_distribution(const ActionDistribution& delta, ChannelFamily<double>& family,
                                                const LeakageGame& g, const Label& a) {
  std::vector<IndexDistribution<double>::Entry> entries;
  for (const auto& [d, w] : delta) {
    entries.emplace_back(d.to_string(), w);
    family.emplace_back(d.to_string(), g.channel(d, a));
  }
  return IndexDistribution<double>(std::move(entries));
}

}  // namespace

double hidden_payoff(const LeakageGame& g, const ActionDistribution& delta, const Label& a) {
  ChannelFamily<double> family;
  const auto mu = as_index_distribution(delta, family, g, a);
  return posterior_vuln(g.measure(), g.prior(), hidden_choice(mu, family));
}

double visible_payoff(const LeakageGame& g, const ActionDistribution& delta, const Label& a) {
  ChannelFamily<double> family;
  const auto mu = as_index_distribution(delta, family, g, a);
  return posterior_vuln(g.measure(), g.prior(), visible_choice(mu, family));
}

double function_mixture_payoff(const LeakageGame& g, const FunctionMixture& sigma, const Label& a) {
  const std::size_t ai = g.attacker_index(a);
  std::vector<IndexDistribution<double>::Entry> entries;
  ChannelFamily<double> family;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    entries.emplace_back(std::to_string(k), sigma[k].second);
    family.emplace_back(std::to_string(k), g.channel(sigma[k].first.at(ai), a));
  }
  return posterior_vuln(g.measure(), g.prior(), hidden_choice(IndexDistribution<double>(std::move(entries)), family));
}

std::vector<std::vector<Eigen::MatrixXd>> hidden_game_pieces(const LeakageGame& g) {
  require_hidden_typing(g);
  std::vector<std::vector<Eigen::MatrixXd>> out;
  for (const auto& a : g.attacker()) {
    std::vector<const Channeld*> cs;
    for (const auto& d : g.defender()) cs.push_back(&g.channel(d, a));
    out.push_back(hidden_choice_pieces(g.measure(), g.prior(), cs));
  }
  return out;
}

GameSolution solve(const LeakageGame& g, GameKind kind, const SolveOptions& opt) {
  switch (kind) {
    case GameKind::I: return solve_I(g, opt);
    case GameKind::II: return solve_II(g, opt);
    case GameKind::III: return solve_III(g, opt);
    case GameKind::IV:
    case GameKind::V: return solve_IV(g, opt, kind);
    case GameKind::VIMixed: return solve_VI_mixed(g, opt);
    case GameKind::VIBehavioral: return solve_VI_behavioral(g, opt);
  }
  throw Error(ErrorKind::Parse, "unknown game kind");
}

BehavioralMap mixed_to_behavioral(const FunctionMixture& sigma, const Labels& attacker, const Labels& defender) {
  BehavioralMap out;
  for (std::size_t a = 0; a < attacker.size(); ++a) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(defender.size()));
    for (const auto& [f, p] : sigma) {
      if (f.size() != attacker.size()) throw Error(ErrorKind::TypeMismatch, "function has the wrong number of values");
      auto it = std::find(defender.begin(), defender.end(), f[a]);
      if (it == defender.end()) throw Error(ErrorKind::UnknownAction, "unknown defender action '" + f[a].to_string() + "'");
      w(it - defender.begin()) += p;
    }
    out.emplace_back(attacker[a], from_vector(defender, w));
  }
  return out;
}

double HierarchyReport::value(GameKind k) const {
  for (const auto& s : solutions) {
    if (s.kind == k) return s.value;
  }
  throw Error(ErrorKind::UnknownAction, "kind not solved");
}

HierarchyReport audit_hierarchy(const LeakageGame& g, double tol, const SolveOptions& opt) {
  HierarchyReport r;
  for (GameKind k : kAllGameKinds) r.solutions.push_back(solve(g, k, opt));
  auto check = [&](GameKind lhs, GameKind rhs, bool equality) {
    OrderingCheck c{lhs, rhs, equality, r.value(lhs), r.value(rhs), false};
    c.ok = equality ? std::abs(c.lhs_value - c.rhs_value) <= tol : c.lhs_value >= c.rhs_value - tol;
    r.ok = r.ok && c.ok;
    r.checks.push_back(c);
  };
  check(GameKind::II, GameKind::I, false);
  check(GameKind::I, GameKind::III, false);
  check(GameKind::IV, GameKind::VIMixed, false);
  check(GameKind::I, GameKind::IV, false);
  check(GameKind::III, GameKind::VIMixed, false);
  check(GameKind::VIMixed, GameKind::VIBehavioral, false);
  check(GameKind::IV, GameKind::V, true);
  return r;
}

}  // namespace qif
