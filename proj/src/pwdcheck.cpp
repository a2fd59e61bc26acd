#include "qif/pwdcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qif::pwd {

namespace {

void require_bits(int n) {
  if (n < 1 || n > 9) throw Error(ErrorKind::TooLarge, "bit count must be in 1..9, got " + std::to_string(n));
}

void require_bit_string(int n, const std::string& s, const char* what) {
  if (static_cast<int>(s.size()) != n || s.find_first_not_of("01") != std::string::npos) {
    throw Error(ErrorKind::Parse, std::string(what) + " '" + s + "' is not a " + std::to_string(n) + "-bit string");
  }
}

void require_order(int n, const std::string& d) {
  std::string sorted = d;
  std::sort(sorted.begin(), sorted.end());
  std::string expect;
  for (int i = 1; i <= n; ++i) expect.push_back(static_cast<char>('0' + i));
  if (sorted != expect) throw Error(ErrorKind::BadPermutation, "'" + d + "' is not an order of 1.." + std::to_string(n));
}

void require_rho(const std::vector<int>& rho) {
  std::vector<int> s = rho;
  std::sort(s.begin(), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != static_cast<int>(i) + 1) throw Error(ErrorKind::BadPermutation, "not a permutation of 1..n");
  }
}

std::string fail_label(int k) { return "(F," + std::to_string(k) + ")"; }
std::string accept_label(int n) { return "(T," + std::to_string(n) + ")"; }

}  // namespace

Labels bit_strings(int n) {
  require_bits(n);
  Labels out;
  for (unsigned v = 0; v < (1u << n); ++v) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i) {
      if (v & (1u << (n - 1 - i))) s[static_cast<std::size_t>(i)] = '1';
    }
    out.emplace_back(std::move(s));
  }
  return out;
}

Labels check_orders(int n) {
  require_bits(n);
  std::string d;
  for (int i = 1; i <= n; ++i) d.push_back(static_cast<char>('0' + i));
  Labels out;
  do {
    out.emplace_back(d);
  } while (std::next_permutation(d.begin(), d.end()));
  return out;
}

Labels observables(int n) {
  require_bits(n);
  Labels out;
  for (int k = 1; k <= n; ++k) out.emplace_back(fail_label(k));
  out.emplace_back(accept_label(n));
  return out;
}

int first_mismatch(const std::string& x, const std::string& a, const std::string& order) {
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto j = static_cast<std::size_t>(order[k] - '1');
    if (x[j] != a[j]) return static_cast<int>(k) + 1;
  }
  return 0;
}

Channeld pwd_channel(int n, const std::string& order, const std::string& a) {
  require_bits(n);
  require_order(n, order);
  require_bit_string(n, a, "low input");
  const Labels xs = bit_strings(n);
  const Labels ys = observables(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), n + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int k = first_mismatch(xs[i].atom(), a, order);
    m(static_cast<Eigen::Index>(i), k == 0 ? n : k - 1) = 1;
  }
  return Channeld(xs, ys, std::move(m));
}

Channeld const_time_channel(int n, const std::string& a) {
  require_bits(n);
  require_bit_string(n, a, "low input");
  const Labels xs = bit_strings(n);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(xs.size()), 2);
  for (std::size_t i = 0; i < xs.size(); ++i) m(static_cast<Eigen::Index>(i), xs[i].atom() == a ? 1 : 0) = 1;
  return Channeld(xs, Labels{Label(fail_label(n)), Label(accept_label(n))}, std::move(m));
}

Priord uniform_prior(int n) { return Priord::uniform(bit_strings(n)); }

LeakageGame build_game(int n, const Priord& prior, const VulnMeasured& measure, int max_bits) {
  if (n > max_bits) {
    throw Error(ErrorKind::TooLarge, std::to_string(n) + "-bit game exceeds the limit of " + std::to_string(max_bits) + " bits");
  }
  const Labels orders = check_orders(n);
  const Labels inputs = bit_strings(n);
  ChannelMap channels;
  for (const auto& d : orders) {
    for (const auto& a : inputs) channels.emplace(std::make_pair(d, a), pwd_channel(n, d.atom(), a.atom()));
  }
  return LeakageGame(orders, inputs, prior, measure, std::move(channels));
}

double expected_iterations(int n) {
  if (n < 1) throw Error(ErrorKind::TooLarge, "bit count must be positive");
  return 2.0 * (1.0 - std::ldexp(1.0, -n));
}

double measured_iterations(int n, std::size_t samples, std::uint64_t seed) {
  if (n < 1 || n > 63) throw Error(ErrorKind::TooLarge, "bit count must be in 1..63");
  if (samples == 0) throw Error(ErrorKind::BadDistribution, "samples must be positive");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution bit(0.5);
  std::uint64_t total = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    int k = 1;
    // Low input is all zeros: the loop stops at the first 1 bit, or after n checks.
    while (k < n && !bit(rng)) ++k;
    total += static_cast<std::uint64_t>(k);
  }
  return static_cast<double>(total) / static_cast<double>(samples);
}

std::string permute_secret(const std::string& x, const std::vector<int>& rho) {
  if (rho.size() != x.size()) throw Error(ErrorKind::BadPermutation, "permutation size differs from bit count");
  require_rho(rho);
  std::string out(x.size(), '0');
  for (std::size_t i = 0; i < x.size(); ++i) out[static_cast<std::size_t>(rho[i] - 1)] = x[i];
  return out;
}

std::string permute_order(const std::string& d, const std::vector<int>& rho) {
  if (rho.size() != d.size()) throw Error(ErrorKind::BadPermutation, "permutation size differs from bit count");
  require_rho(rho);
  std::string out = d;
  for (auto& c : out) c = static_cast<char>('0' + rho[static_cast<std::size_t>(c - '1')]);
  return out;
}

std::string xor_bits(const std::string& x, const std::string& y) {
  if (x.size() != y.size()) throw Error(ErrorKind::Parse, "bit strings differ in length");
  std::string out = x;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] == y[i] ? '0' : '1';
  return out;
}

UniformEquilibriumReport verify_uniform_equilibrium(int n, const std::optional<Priord>& prior, double equal_tol,
                                                    double value_tol, const SolveOptions& opt) {
  const LeakageGame g = build_game(n, prior ? *prior : uniform_prior(n));
  const auto delta = ActionDistribution::uniform(g.defender());

  UniformEquilibriumReport r;
  r.bits = n;
  double lo = 1e300;
  double hi = -1e300;
  for (const auto& a : g.attacker()) {
    const double v = hidden_payoff(g, delta, a);
    r.uniform_payoffs.emplace_back(a, v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  r.payoff_spread = hi - lo;
  r.uniform_worst_case = hi;
  r.game_value = solve(g, GameKind::IV, opt).value;
  r.equal_payoffs = r.payoff_spread <= equal_tol;
  r.attains_optimum = std::abs(r.game_value - r.uniform_worst_case) <= value_tol;
  return r;
}

}  // namespace qif::pwd
