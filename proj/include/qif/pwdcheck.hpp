#ifndef QIF_PWDCHECK_HPP
#define QIF_PWDCHECK_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qif/channel.hpp"
#include "qif/games.hpp"
#include "qif/vulnerability.hpp"

namespace qif::pwd {

inline constexpr int kDefaultMaxBits = 5;

/// "00..0" to "11..1" in binary order; bit 1 is the leftmost character.
Labels bit_strings(int n);
/// All check orders as digit strings ("123", "132", ...) in lexicographic order.
Labels check_orders(int n);
/// (F,1), ..., (F,n), (T,n)
Labels observables(int n);

/// 1-based position in `order` of the first bit where x and a differ; 0 when equal.
int first_mismatch(const std::string& x, const std::string& a, const std::string& order);

/// Deterministic channel of the early-exit checker that compares bits in `order`
/// against the low input `a`.
Channeld pwd_channel(int n, const std::string& order, const std::string& a);
/// Checker without early exit: only accept/reject is observable.
Channeld const_time_channel(int n, const std::string& a);

Priord uniform_prior(int n);

/// Game over all check orders and low inputs; refuses n > max_bits.
LeakageGame build_game(int n, const Priord& prior, const VulnMeasured& measure = VulnMeasured::bayes(),
                       int max_bits = kDefaultMaxBits);

/// 2(1 - 2^-n)
double expected_iterations(int n);
/// Mean loop iterations of the early-exit checker over uniform secrets, low input all zeros.
double measured_iterations(int n, std::size_t samples, std::uint64_t seed);

/// Secret with bit i moved to position rho[i-1] (rho is 1-based).
std::string permute_secret(const std::string& x, const std::vector<int>& rho);
/// The order rho o d: each checked bit index j becomes rho[j-1].
std::string permute_order(const std::string& d, const std::vector<int>& rho);
std::string xor_bits(const std::string& x, const std::string& y);

struct UniformEquilibriumReport {
  int bits = 0;
  std::vector<std::pair<Label, double>> uniform_payoffs;  // per attacker action
  double payoff_spread = 0;                               // max - min of the above
  double uniform_worst_case = 0;                          // max over a
  double game_value = 0;                                  // Game IV LP value
  bool equal_payoffs = false;
  bool attains_optimum = false;
  bool holds() const { return equal_payoffs && attains_optimum; }
};

/// Checks that uniform delta equalizes every attacker action and attains the
/// Game IV optimum. Uses the uniform prior unless one is given.
UniformEquilibriumReport verify_uniform_equilibrium(int n, const std::optional<Priord>& prior = std::nullopt,
                                                    double equal_tol = 1e-9, double value_tol = 1e-8,
                                                    const SolveOptions& opt = {});

}  // namespace qif::pwd

#endif  // QIF_PWDCHECK_HPP
