#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "qif/io.hpp"

namespace qifgame {

namespace {

using qif::io::Json;

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level_from_env() {
  const char* v = std::getenv("QIFGAME_LOG");
  if (!v) return LogLevel::Warn;
  const std::string s = v;
  if (s == "error") return LogLevel::Error;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::variant<std::string, double>>> rows;
};

struct Config {
  std::uint64_t seed = 0;
  double tol = qif::kEquivalenceTol;
  std::size_t vi_cap = 100000;
  int max_bits = qif::pwd::kDefaultMaxBits;
  std::string format = "json";
  std::string output;
  bool trace_lp = false;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err), level_(log_level_from_env()) {}

  void log(LogLevel l, const std::string& msg) const {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (l <= level_) err_ << "[" << names[static_cast<int>(l)] << "] " << msg << "\n";
  }

  // JSON goes to -o when given, else stdout; csv/table render `table` when present.
  void emit(const Config& cfg, const Json& report, const std::optional<Table>& table) const {
    if (cfg.format == "json" || !table) {
      if (cfg.format != "json") log(LogLevel::Warn, "no tabular view for this command; writing JSON");
      if (!cfg.output.empty()) {
        qif::io::write_json(cfg.output, report);
        log(LogLevel::Info, "wrote " + cfg.output);
      } else {
        out_ << report.dump(2) << "\n";
      }
      return;
    }
    std::ostringstream os;
    if (cfg.format == "csv") {
      write_csv(os, *table);
    } else {
      write_pretty(os, *table);
    }
    if (!cfg.output.empty()) {
      std::ofstream f(cfg.output);
      if (!f) throw qif::Error(qif::ErrorKind::Parse, "cannot write '" + cfg.output + "'");
      f << os.str();
    } else {
      out_ << os.str();
    }
  }

  qif::SolveOptions solve_options(const Config& cfg) const {
    qif::SolveOptions opt;
    opt.vi_cap = cfg.vi_cap;
    if (cfg.trace_lp) opt.lp.trace = &err_;
    return opt;
  }

 private:
  static std::string cell_csv(const std::variant<std::string, double>& c) {
    if (const auto* s = std::get_if<std::string>(&c)) {
      if (s->find_first_of(",\"\n") == std::string::npos) return *s;
      std::string q = "\"";
      for (char ch : *s) {
        if (ch == '"') q.push_back('"');
        q.push_back(ch);
      }
      return q + "\"";
    }
    return Json(std::get<double>(c)).dump();
  }

  static std::string cell_pretty(const std::variant<std::string, double>& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    std::ostringstream os;
    os << std::setprecision(6) << std::get<double>(c);
    return os.str();
  }

  static void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << cell_csv(t.header[i]);
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_csv(row[i]);
      os << "\n";
    }
  }

  static void write_pretty(std::ostream& os, const Table& t) {
    std::vector<std::size_t> width(t.header.size(), 0);
    for (std::size_t i = 0; i < t.header.size(); ++i) width[i] = t.header[i].size();
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], cell_pretty(row[i]).size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << cells[i];
      }
      os << "\n";
    };
    line(t.header);
    for (const auto& row : t.rows) {
      std::vector<std::string> cells;
      for (const auto& c : row) cells.push_back(cell_pretty(c));
      line(cells);
    }
  }

  std::ostream& out_;
  std::ostream& err_;
  LogLevel level_;
};

Table matrix_table(const qif::LabeledMatrixd& m, const std::string& corner) {
  Table t;
  t.header.push_back(corner);
  for (const auto& c : m.cols()) t.header.push_back(c.to_string());
  for (Eigen::Index i = 0; i < m.num_rows(); ++i) {
    std::vector<std::variant<std::string, double>> row{m.rows()[static_cast<std::size_t>(i)].to_string()};
    for (Eigen::Index j = 0; j < m.num_cols(); ++j) row.emplace_back(m.data()(i, j));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// "index=path" or a bare path, which takes the next positional index "1", "2", ...
qif::ChannelFamily<double> load_family(const std::vector<std::string>& specs) {
  qif::ChannelFamily<double> family;
  int next = 1;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    std::string index;
    std::string path;
    if (eq == std::string::npos) {
      index = std::to_string(next++);
      path = s;
    } else {
      index = s.substr(0, eq);
      path = s.substr(eq + 1);
    }
    family.emplace_back(index, qif::io::channel_from_json(qif::io::read_json(path)));
  }
  return family;
}

qif::Priord load_prior(const std::string& source, int bits) {
  if (source == "uniform") return qif::pwd::uniform_prior(bits);
  return qif::io::prior_from_json(qif::io::read_json(source));
}

Json refinement_json(const qif::Refinement<double>& r) {
  Json pp = Json::array();
  for (Eigen::Index i = 0; i < r.post_processing.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < r.post_processing.cols(); ++j) row.push_back(r.post_processing(i, j));
    pp.push_back(std::move(row));
  }
  return Json{{"residual", r.residual}, {"worst_column", r.worst_column.to_string()}, {"post_processing", pp}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  Config cfg;
  CLI::App app{"Leakage games: channel operators, vulnerability and equilibrium solvers", "qifgame"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--seed", cfg.seed, "Seed for every random choice");
  app.add_option("--tol", cfg.tol, "Equivalence tolerance");
  app.add_option("--vi-cap", cfg.vi_cap, "Largest number of defender functions for VI-mixed");
  app.add_option("--max-bits", cfg.max_bits, "Largest password size accepted by pwd commands");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
  app.add_option("-o,--output", cfg.output, "Write the result to this file");
  app.add_flag("--trace-lp", cfg.trace_lp, "Dump simplex tableaux to stderr");

  int code = kOk;

  // channel
  auto* channel = app.add_subcommand("channel", "Channel operators");
  channel->require_subcommand(1);
  std::string op;
  std::string dist_path;
  std::vector<std::string> channel_specs;
  auto* compose = channel->add_subcommand("compose", "Hidden or visible choice over channels");
  compose->add_option("--op", op, "hidden | visible")->required()->check(CLI::IsMember({"hidden", "visible"}));
  compose->add_option("--dist", dist_path, "Index distribution JSON")->required();
  compose->add_option("channels", channel_specs, "Channel files, optionally index=path")->required();
  compose->callback([&] {
    const auto mu = qif::io::index_distribution_from_json(qif::io::read_json(dist_path));
    const auto family = load_family(channel_specs);
    const auto c = op == "hidden" ? qif::hidden_choice(mu, family) : qif::visible_choice(mu, family);
    runner.emit(cfg, qif::io::to_json(c), matrix_table(c.matrix(), "x"));
  });

  std::string path_a;
  std::string path_b;
  auto* equiv = channel->add_subcommand("equiv", "Decide channel equivalence");
  equiv->add_option("a", path_a)->required();
  equiv->add_option("b", path_b)->required();
  equiv->callback([&] {
    const auto a = qif::io::channel_from_json(qif::io::read_json(path_a));
    const auto b = qif::io::channel_from_json(qif::io::read_json(path_b));
    const auto r = qif::equivalent(a, b, cfg.tol);
    Json j{{"equivalent", r.equivalent},
           {"tolerance", cfg.tol},
           {"a_from_b", refinement_json(r.forward)},
           {"b_from_a", refinement_json(r.backward)}};
    runner.emit(cfg, j, std::nullopt);
    if (!r.equivalent) code = kNotEquivalent;
  });

  auto* validate = channel->add_subcommand("validate", "Check that a file holds a valid channel");
  validate->add_option("file", path_a)->required();
  validate->callback([&] {
    const auto c = qif::io::channel_from_json(qif::io::read_json(path_a));
    runner.emit(cfg, Json{{"valid", true}, {"rows", c.rows().size()}, {"cols", c.cols().size()}}, std::nullopt);
  });

  // vuln
  std::string prior_path;
  std::string channel_path;
  std::string measure_path;
  auto* vuln = app.add_subcommand("vuln", "Prior and posterior vulnerability and leakage");
  vuln->add_option("--prior", prior_path)->required();
  vuln->add_option("--channel", channel_path)->required();
  vuln->add_option("--measure", measure_path, "Measure JSON; Bayes when omitted");
  vuln->callback([&] {
    const auto pi = qif::io::prior_from_json(qif::io::read_json(prior_path));
    const auto c = qif::io::channel_from_json(qif::io::read_json(channel_path));
    const auto v = measure_path.empty() ? qif::VulnMeasured::bayes()
                                        : qif::io::measure_from_json(qif::io::read_json(measure_path), pi.keys());
    const double prior = qif::prior_vuln(v, pi);
    const double post = qif::posterior_vuln(v, pi, c);
    Json j{{"prior_vulnerability", prior},
           {"posterior_vulnerability", post},
           {"additive_leakage", qif::leakage(v, pi, c, qif::LeakageMode::Additive)}};
    Table t{{"quantity", "value"},
            {{std::string("prior_vulnerability"), prior},
             {std::string("posterior_vulnerability"), post},
             {std::string("additive_leakage"), post - prior}}};
    if (prior > 0) {
      const double mult = qif::leakage(v, pi, c, qif::LeakageMode::Multiplicative);
      j["multiplicative_leakage"] = mult;
      t.rows.push_back({std::string("multiplicative_leakage"), mult});
    } else {
      j["multiplicative_leakage"] = nullptr;
      runner.log(LogLevel::Warn, "prior vulnerability is zero; multiplicative leakage undefined");
    }
    runner.emit(cfg, j, t);
  });

  // game
  auto* game = app.add_subcommand("game", "Leakage games");
  game->require_subcommand(1);
  std::string game_path;
  std::string kind_text;
  auto* solve = game->add_subcommand("solve", "Solve one game kind");
  solve->add_option("game", game_path)->required();
  solve->add_option("--kind", kind_text, "I|II|III|IV|V|VI-mixed|VI-behavioral")->required();
  solve->callback([&] {
    const auto g = qif::io::game_from_json(qif::io::read_json(game_path));
    const auto kind = qif::parse_game_kind(kind_text);
    const auto s = qif::solve(g, kind, runner.solve_options(cfg));
    runner.log(LogLevel::Debug, "LP " + std::to_string(s.diagnostics.lp_rows) + "x" +
                                    std::to_string(s.diagnostics.lp_cols) + ", " +
                                    std::to_string(s.diagnostics.iterations) + " pivots");
    Table t{{"kind", "value"}, {{std::string(qif::to_string(kind)), s.value}}};
    runner.emit(cfg, qif::io::to_json(s), t);
  });

  auto* audit = game->add_subcommand("audit", "Solve every kind and check their ordering");
  audit->add_option("game", game_path)->required();
  audit->callback([&] {
    const auto g = qif::io::game_from_json(qif::io::read_json(game_path));
    const auto r = qif::audit_hierarchy(g, 1e-7, runner.solve_options(cfg));
    Table t{{"kind", "value"}, {}};
    for (const auto& s : r.solutions) t.rows.push_back({std::string(qif::to_string(s.kind)), s.value});
    for (const auto& c : r.checks) {
      if (!c.ok) {
        runner.log(LogLevel::Error, std::string("ordering violated: ") + std::string(qif::to_string(c.lhs)) +
                                        (c.equality ? " = " : " >= ") + std::string(qif::to_string(c.rhs)));
      }
    }
    runner.emit(cfg, qif::io::to_json(r), t);
    if (!r.ok) code = kOrderingViolation;
  });

  // pwd
  auto* pwd = app.add_subcommand("pwd", "Password-checker case study");
  pwd->require_subcommand(1);
  int bits = 3;
  std::string prior_source = "uniform";
  std::size_t samples = 100000;
  auto* gen = pwd->add_subcommand("gen", "Write the game JSON");
  gen->add_option("--bits", bits)->required();
  gen->add_option("--prior", prior_source, "Prior file or 'uniform'");
  gen->callback([&] {
    const auto g = qif::pwd::build_game(bits, load_prior(prior_source, bits), qif::VulnMeasured::bayes(), cfg.max_bits);
    runner.emit(cfg, qif::io::to_json(g), std::nullopt);
  });

  auto* analyze = pwd->add_subcommand("analyze", "Payoff table and Game IV equilibrium");
  analyze->add_option("--bits", bits)->required();
  analyze->add_option("--prior", prior_source, "Prior file or 'uniform'");
  analyze->callback([&] {
    const auto g = qif::pwd::build_game(bits, load_prior(prior_source, bits), qif::VulnMeasured::bayes(), cfg.max_bits);
    const auto table = qif::payoff_table(g);
    const auto s = qif::solve(g, qif::GameKind::IV, runner.solve_options(cfg));
    const auto uniform = qif::ActionDistribution::uniform(g.defender());
    double worst = 0;
    for (const auto& a : g.attacker()) worst = std::max(worst, qif::hidden_payoff(g, uniform, a));
    Json j{{"bits", bits},
           {"prior_vulnerability", qif::prior_vuln(g.measure(), g.prior())},
           {"payoff_table", qif::io::to_json(table)},
           {"game_iv", qif::io::to_json(s)},
           {"uniform_defender_worst_case", worst}};
    runner.emit(cfg, j, matrix_table(table, "order"));
  });

  auto* timing = pwd->add_subcommand("timing", "Expected loop iterations of the early-exit checker");
  timing->add_option("--bits", bits)->required();
  timing->add_option("--samples", samples);
  timing->callback([&] {
    const double analytic = qif::pwd::expected_iterations(bits);
    const double measured = qif::pwd::measured_iterations(bits, samples, cfg.seed);
    Json j{{"bits", bits}, {"analytic", analytic}, {"measured", measured}, {"samples", samples}, {"seed", cfg.seed}};
    Table t{{"bits", "analytic", "measured"}, {{std::to_string(bits), analytic, measured}}};
    runner.emit(cfg, j, t);
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kError;
  } catch (const qif::Error& e) {
    err << Json{{"error", std::string(qif::to_string(e.kind()))}, {"message", e.what()}}.dump() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << Json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
    return kError;
  }
  return code;
}

}  // namespace qifgame
