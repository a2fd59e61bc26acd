#ifndef QIF_GAMES_HPP
#define QIF_GAMES_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qif/channel.hpp"
#include "qif/distribution.hpp"
#include "qif/labeled_matrix.hpp"
#include "qif/minimax.hpp"
#include "qif/vulnerability.hpp"

namespace qif {

using ActionDistribution = Distribution<Label, double>;
/// Behavioral map: for each leader action (in order), a distribution over follower actions.
using BehavioralMap = std::vector<std::pair<Label, ActionDistribution>>;
/// Pure function A -> D stored as its values in attacker order.
using DefenderFunction = std::vector<Label>;
using FunctionMixture = std::vector<std::pair<DefenderFunction, double>>;
using ChannelMap = std::map<std::pair<Label, Label>, Channeld>;

/// Defender actions D, attacker actions A, channels C_da, prior and measure.
class LeakageGame {
 public:
  LeakageGame(Labels defender, Labels attacker, Priord prior, VulnMeasured measure, ChannelMap channels);

  const Labels& defender() const noexcept { return defender_; }
  const Labels& attacker() const noexcept { return attacker_; }
  const Priord& prior() const noexcept { return prior_; }
  const VulnMeasured& measure() const noexcept { return measure_; }
  const ChannelMap& channels() const noexcept { return channels_; }

  const Channeld& channel(const Label& d, const Label& a) const;
  std::size_t defender_index(const Label& d) const;
  std::size_t attacker_index(const Label& a) const;

  /// Copy with C_da replaced.
  LeakageGame with_channel(const Label& d, const Label& a, Channeld c) const;

 private:
  Labels defender_;
  Labels attacker_;
  Priord prior_;
  VulnMeasured measure_;
  ChannelMap channels_;
};

enum class GameKind { I, II, III, IV, V, VIMixed, VIBehavioral };

inline constexpr GameKind kAllGameKinds[] = {GameKind::I,  GameKind::II,      GameKind::III,         GameKind::IV,
                                             GameKind::V,  GameKind::VIMixed, GameKind::VIBehavioral};

std::string_view to_string(GameKind k);
GameKind parse_game_kind(std::string_view text);

struct SolveOptions {
  std::size_t vi_cap = 100000;
  double tie_tol = 1e-9;
  SimplexOptions lp;
};

/// Equilibrium of one game kind. Only the fields meaningful for the kind are set.
struct GameSolution {
  GameKind kind = GameKind::I;
  double value = 0;

  std::optional<ActionDistribution> defender_mixed;     // I, IV, V
  std::optional<Label> defender_pure;                   // II
  std::optional<std::vector<std::pair<Label, Label>>> defender_function;  // III: a -> d
  std::optional<FunctionMixture> defender_function_mixture;               // VI_mixed (support)
  std::optional<BehavioralMap> defender_behavioral;     // VI_mixed (marginals), VI_behavioral

  std::optional<ActionDistribution> attacker_mixed;     // I, IV, V
  std::optional<Label> attacker_pure;                   // III, VI
  std::optional<std::vector<std::pair<Label, Label>>> attacker_function;  // II: d -> a
  std::optional<BehavioralMap> attacker_behavioral;     // II

  /// VI_behavioral: value of each attacker action under its own minimizer.
  std::optional<std::vector<std::pair<Label, double>>> per_attacker_values;

  SolverDiagnostics diagnostics;
  std::vector<std::string> notes;
};

/// u(d, a) = V[pi, C_da]
double pure_payoff(const LeakageGame& g, const Label& d, const Label& a);
/// D x A table of pure payoffs.
LabeledMatrixd payoff_table(const LeakageGame& g);

/// V[pi, hidden choice over d <- delta of C_da], built with the channel operators.
double hidden_payoff(const LeakageGame& g, const ActionDistribution& delta, const Label& a);
/// V[pi, visible choice over d <- delta of C_da], built with the channel operators.
double visible_payoff(const LeakageGame& g, const ActionDistribution& delta, const Label& a);
/// V[pi, hidden choice over s <- sigma of C_{s(a) a}]
double function_mixture_payoff(const LeakageGame& g, const FunctionMixture& sigma, const Label& a);

GameSolution solve(const LeakageGame& g, GameKind kind, const SolveOptions& opt = {});

/// Per-a pieces of the convex payoff, for the epigraph solver.
std::vector<std::vector<Eigen::MatrixXd>> hidden_game_pieces(const LeakageGame& g);

/// phi(a)(d) = sum of sigma(s) over functions s with s(a) = d.
BehavioralMap mixed_to_behavioral(const FunctionMixture& sigma, const Labels& attacker, const Labels& defender);

struct OrderingCheck {
  GameKind lhs;
  GameKind rhs;
  bool equality = false;  // '=' rather than '>='
  double lhs_value = 0;
  double rhs_value = 0;
  bool ok = false;
};

struct HierarchyReport {
  std::vector<GameSolution> solutions;  // in kAllGameKinds order
  std::vector<OrderingCheck> checks;
  bool ok = true;

  double value(GameKind k) const;
};

/// Solves every kind and checks II>=I, I>=III, IV>=VI_m, I>=IV, III>=VI_m,
/// VI_m>=VI_b and IV=V, each to `tol`.
HierarchyReport audit_hierarchy(const LeakageGame& g, double tol = 1e-7, const SolveOptions& opt = {});

}  // namespace qif

#endif  // QIF_GAMES_HPP
