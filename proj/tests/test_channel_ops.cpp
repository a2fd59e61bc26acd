#include <map>

#include "doctest.h"
#include "qif/channel.hpp"
#include "support/instances.hpp"

using namespace qif;

namespace {

double max_diff(const LabeledMatrixd& a, const LabeledMatrixd& b) {
  REQUIRE(a.same_type_as(b));
  return (a.data() - b.aligned_to(a.rows(), a.cols())).cwiseAbs().maxCoeff();
}

double max_diff(const Channeld& a, const Channeld& b) { return max_diff(a.matrix(), b.matrix()); }

bool is_channel(const LabeledMatrixd& m) {
  if (m.data().minCoeff() < -1e-9 || m.data().maxCoeff() > 1 + 1e-9) return false;
  return (m.data().rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-9;
}

bool equiv(const Channeld& a, const Channeld& b) { return equivalent(a, b).equivalent; }

Channeld load(const std::string& rel) { return io::channel_from_json(io::read_json(test::data_path(rel))); }

Channeld mat(const Labels& xs, const Labels& ys, std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return Channeld(xs, ys, m);
}

struct Rand {
  std::mt19937_64 rng;
  explicit Rand(unsigned seed) : rng(seed) {}
  int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double unit() { return std::uniform_real_distribution<double>(0, 1)(rng); }
  Channeld channel(const Labels& xs, const Labels& ys) { return test::random_channel(xs, ys, rng); }
};

}  // namespace

TEST_CASE("channel validation") {
  const Labels xs = make_labels({"x1", "x2"});
  const Labels ys = make_labels({"y1", "y2"});
  CHECK_THROWS_AS(mat(xs, ys, {{0.5, 0.6}, {0.5, 0.5}}), Error);
  CHECK_THROWS_AS(mat(xs, ys, {{1.1, -0.1}, {0.5, 0.5}}), Error);
  const auto c = mat(xs, ys, {{0.5 + 5e-10, 0.5}, {-5e-10, 1}});
  CHECK(c.data().row(0).sum() == doctest::Approx(1).epsilon(1e-15));
  CHECK(c.data()(1, 0) == 0);
}

TEST_CASE("hidden choice: worked example") {
  const auto c1 = load("operators/C1.json");
  const auto c2 = load("operators/C2.json");
  const auto mu = io::index_distribution_from_json(io::read_json(test::data_path("operators/third.json")));
  const auto h = hidden_choice(mu, ChannelFamily<double>{{"1", c1}, {"2", c2}});
  CHECK(h.at("x1", "y1") == doctest::Approx(7.0 / 18).epsilon(1e-12));
  CHECK(h.at("x1", "y2") == doctest::Approx(11.0 / 18).epsilon(1e-12));
  CHECK(h.at("x2", "y1") == doctest::Approx(4.0 / 9).epsilon(1e-12));
  CHECK(h.at("x2", "y2") == doctest::Approx(5.0 / 9).epsilon(1e-12));
  CHECK(max_diff(binary_hidden(1.0 / 3, c1, c2), h) < 1e-15);
}

TEST_CASE("hidden choice: degenerate and type checks") {
  const auto c1 = load("operators/C1.json");
  const auto c2 = load("operators/C2.json");
  const auto c3 = load("operators/C3.json");
  CHECK(hidden_choice(IndexDistributiond::point("2"), ChannelFamily<double>{{"1", c1}, {"2", c2}}) == c2);
  CHECK(max_diff(binary_hidden(0.0, c1, c2), c2) == 0);
  try {
    binary_hidden(0.5, c1, c3);
    FAIL("expected TypeMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TypeMismatch);
  }
  // Zero-weight members are outside the support and may have any type.
  CHECK(binary_hidden(1.0, c1, c3) == c1);
  CHECK_THROWS_AS(binary_hidden(1.5, c1, c2), Error);
  CHECK_THROWS_AS(hidden_choice(IndexDistributiond::point("9"), ChannelFamily<double>{{"1", c1}}), Error);
}

TEST_CASE("hidden choice of running-example channels") {
  const double p = 0.3;
  const auto h = binary_hidden(p, test::running_channel(0, 0), test::running_channel(1, 0));
  CHECK(h.at("0", "0") == doctest::Approx(p));
  CHECK(h.at("0", "1") == doctest::Approx(1 - p));
  CHECK(h.at("1", "0") == doctest::Approx(1));
  CHECK(h.at("1", "1") == doctest::Approx(0));
}

TEST_CASE("visible choice: worked example") {
  const auto c1 = load("operators/C1.json");
  const auto c3 = load("operators/C3.json");
  const auto v = binary_visible(1.0 / 3, c1, c3, "1", "3");
  const Labels cols{Label::tagged("y1", "1"), Label::tagged("y2", "1"), Label::tagged("y1", "3"), Label::tagged("y3", "3")};
  REQUIRE(v.cols() == cols);
  Eigen::RowVectorXd x1(4);
  x1 << 1.0 / 6, 1.0 / 6, 2.0 / 9, 4.0 / 9;
  CHECK((v.data().row(0) - x1).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::RowVectorXd x2(4);
  x2 << 1.0 / 9, 2.0 / 9, 1.0 / 3, 1.0 / 3;
  CHECK((v.data().row(1) - x2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("visible choice: boundaries and errors") {
  const auto c1 = load("operators/C1.json");
  const auto c3 = load("operators/C3.json");
  const auto v = binary_visible(1.0, c1, c3);
  CHECK(v.num_cols() == 4);
  CHECK(v.at("x1", Label::tagged("y1", "1")) == 0.5);
  CHECK(v.data().rightCols(2).isZero());
  CHECK(visible_choice(IndexDistributiond::point("k"), ChannelFamily<double>{{"k", c3}}).matrix() == c3.matrix().tag_columns("k"));
  const auto other = mat(make_labels({"x1", "x9"}), make_labels({"y"}), {{1}, {1}});
  try {
    binary_visible(0.5, c1, other);
    FAIL("expected IncompatibleRows");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatibleRows);
  }
}

TEST_CASE("zero_extend") {
  const auto id = mat(make_labels({"a", "b"}), make_labels({"y1", "y2"}), {{1, 0}, {0, 1}});
  const auto z = zero_extend(id);
  REQUIRE(z.num_cols() == 3);
  CHECK(z.data().col(2).isZero());
  CHECK(z.data().rowwise().sum() == id.data().rowwise().sum());
  const auto zz = zero_extend(z);
  REQUIRE(zz.num_cols() == 4);
  CHECK(zz.cols()[2] != zz.cols()[3]);
  CHECK(equiv(zz, id));
}

TEST_CASE("equivalence: worked examples") {
  const auto c00 = test::running_channel(0, 0);
  const auto c01 = test::running_channel(0, 1);
  const auto c10 = test::running_channel(1, 0);
  const auto r = equivalent(c01, c10);
  CHECK(r.equivalent);
  CHECK(r.forward.residual <= 1e-9);
  // Exhaustive column matching: each column of one is a column of the other.
  for (Eigen::Index j = 0; j < 2; ++j) {
    bool found = false;
    for (Eigen::Index k = 0; k < 2; ++k) found = found || c01.data().col(j) == c10.data().col(k);
    CHECK(found);
  }

  const auto bad = equivalent(c00, c01);
  CHECK_FALSE(bad.equivalent);
  // c00's columns (1,1) and (0,0) cannot produce (0,1): best error is 1/2.
  CHECK(bad.backward.residual == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(bad.forward.residual <= 1e-9);
  CHECK_THROWS_AS(equivalent(c00, load("operators/C1.json")), Error);
}

TEST_CASE("equivalence: witness reproduces the channel") {
  Rand r(5);
  const Labels xs = test::numbered("x", 3);
  const auto c = r.channel(xs, test::numbered("y", 3));
  const auto v = binary_visible(0.4, c, c);
  const auto res = equivalent(v, c);
  REQUIRE(res.equivalent);
  const Eigen::MatrixXd rebuilt = c.data() * res.forward.post_processing;
  CHECK((rebuilt - v.data()).cwiseAbs().maxCoeff() <= 1e-7);
  CHECK((res.forward.post_processing.rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("property: both operators produce channels") {
  Rand r(101);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 4));
    const int n = r.between(1, 4);
    std::vector<std::string> idx;
    ChannelFamily<double> same;
    ChannelFamily<double> diff;
    const Labels ys = test::numbered("y", r.between(1, 4));
    for (int i = 0; i < n; ++i) {
      idx.push_back(std::to_string(i));
      same.emplace_back(idx.back(), r.channel(xs, ys));
      diff.emplace_back(idx.back(), r.channel(xs, test::numbered("y", r.between(1, 4))));
    }
    const auto mu = test::random_index_distribution(idx, r.rng);
    CHECK(is_channel(hidden_choice(mu, same).matrix()));
    const auto v = visible_choice(mu, diff);
    CHECK(is_channel(v.matrix()));
    Eigen::Index cols = 0;
    for (const auto& [k, c] : diff) cols += c.num_cols();
    CHECK(v.num_cols() == cols);
  }
}

TEST_CASE("property: choosing among copies of one channel") {
  Rand r(102);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 4));
    const auto c = r.channel(xs, test::numbered("y", r.between(1, 4)));
    std::vector<std::string> idx{"a", "b", "c"};
    ChannelFamily<double> fam{{"a", c}, {"b", c}, {"c", c}};
    const auto mu = test::random_index_distribution(idx, r.rng);
    CHECK(max_diff(hidden_choice(mu, fam), c) <= 1e-9);
    CHECK(equiv(visible_choice(mu, fam), c));
  }
}

TEST_CASE("property: nested choices reorganize") {
  Rand r(103);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 3));
    const std::vector<std::string> is{"1", "2"};
    const std::vector<std::string> js{"1", "2", "3"};
    const auto mu = test::random_index_distribution(is, r.rng);
    const auto eta = test::random_index_distribution(js, r.rng);
    const Labels ys = test::numbered("y", r.between(1, 3));
    std::map<std::pair<std::string, std::string>, Channeld> same;
    std::map<std::pair<std::string, std::string>, Channeld> per_j;
    std::map<std::string, Labels> yj;
    for (const auto& j : js) yj[j] = test::numbered("y" + j + "_", r.between(1, 3));
    for (const auto& i : is) {
      for (const auto& j : js) {
        same.emplace(std::make_pair(i, j), r.channel(xs, ys));
        per_j.emplace(std::make_pair(i, j), r.channel(xs, yj[j]));
      }
    }
    std::vector<IndexDistributiond::Entry> prod;
    ChannelFamily<double> flat_same;
    ChannelFamily<double> flat_per_j;
    for (const auto& [i, wi] : mu) {
      for (const auto& [j, wj] : eta) {
        prod.emplace_back(i + "," + j, wi * wj);
        flat_same.emplace_back(i + "," + j, same.at({i, j}));
        flat_per_j.emplace_back(i + "," + j, per_j.at({i, j}));
      }
    }
    const IndexDistributiond mu_eta(prod);

    auto inner = [&](const auto& op, const auto& cs, const std::string& i) {
      ChannelFamily<double> f;
      for (const auto& j : js) f.emplace_back(j, cs.at({i, j}));
      return op(eta, f);
    };
    auto hidden = [](const IndexDistributiond& m, const ChannelFamily<double>& f) { return hidden_choice(m, f); };
    auto visible = [](const IndexDistributiond& m, const ChannelFamily<double>& f) { return visible_choice(m, f); };

    // hidden of hidden
    ChannelFamily<double> hh;
    for (const auto& i : is) hh.emplace_back(i, inner(hidden, same, i));
    CHECK(max_diff(hidden_choice(mu, hh), hidden_choice(mu_eta, flat_same)) <= 1e-9);

    // visible of visible
    ChannelFamily<double> vv;
    for (const auto& i : is) vv.emplace_back(i, inner(visible, per_j, i));
    CHECK(equiv(visible_choice(mu, vv), visible_choice(mu_eta, flat_per_j)));

    // hidden of visible against visible of hidden
    ChannelFamily<double> hv;
    for (const auto& i : is) hv.emplace_back(i, inner(visible, per_j, i));
    ChannelFamily<double> vh;
    for (const auto& j : js) {
      ChannelFamily<double> f;
      for (const auto& i : is) f.emplace_back(i, per_j.at({i, j}));
      vh.emplace_back(j, hidden_choice(mu, f));
    }
    CHECK(equiv(hidden_choice(mu, hv), visible_choice(eta, vh)));
  }
}

TEST_CASE("property: binary hidden choice algebra") {
  Rand r(104);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 4));
    const Labels ys = test::numbered("y", r.between(1, 4));
    const auto c1 = r.channel(xs, ys);
    const auto c2 = r.channel(xs, ys);
    const auto c3 = r.channel(xs, ys);
    const double p = r.unit();
    const double q = 0.05 + 0.95 * r.unit();
    const double s = r.unit();

    CHECK(max_diff(binary_hidden(p, c1, c1), c1) <= 1e-9);
    CHECK(max_diff(binary_hidden(p, c1, c2), binary_hidden(1 - p, c2, c1)) <= 1e-9);

    const auto lhs = binary_hidden(p, c1, binary_hidden(q, c2, c3));
    // (1/q . C1 +_p C2) +_q (1-p) . C3, built on plain matrices
    const auto scaled = sum(std::vector<LabeledMatrixd>{p * ((1 / q) * c1.matrix()), (1 - p) * c2.matrix()});
    const auto rhs = sum(std::vector<LabeledMatrixd>{q * scaled, (1 - q) * ((1 - p) * c3.matrix())});
    CHECK(max_diff(lhs, Channeld(rhs)) <= 1e-9);

    const auto absorbed = binary_hidden(q, binary_hidden(p, c1, c2), binary_hidden(s, c1, c2));
    CHECK(max_diff(absorbed, binary_hidden(p * q + (1 - q) * s, c1, c2)) <= 1e-9);
  }
}

TEST_CASE("property: binary visible choice algebra") {
  Rand r(105);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 3));
    const auto c1 = r.channel(xs, test::numbered("y", r.between(1, 3)));
    const auto c2 = r.channel(xs, test::numbered("y", r.between(1, 3)));
    const auto c3 = r.channel(xs, test::numbered("y", r.between(1, 3)));
    const double p = r.unit();
    const double q = 0.05 + 0.95 * r.unit();

    CHECK(equiv(binary_visible(p, c1, c1), c1));
    CHECK(equiv(binary_visible(p, c1, c2), binary_visible(1 - p, c2, c1)));

    const auto lhs = binary_visible(p, c1, binary_visible(q, c2, c3));
    const auto scaled = concat(IndexedFamily<double>{{"1", p * ((1 / q) * c1.matrix())}, {"2", (1 - p) * c2.matrix()}});
    const auto rhs = concat(IndexedFamily<double>{{"1", q * scaled}, {"2", (1 - q) * ((1 - p) * c3.matrix())}});
    CHECK(equiv(lhs, Channeld(rhs)));
  }
}

TEST_CASE("property: visible choice distributes over hidden choice") {
  Rand r(106);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 3));
    const Labels ys = test::numbered("z", r.between(1, 3));
    const auto c1 = r.channel(xs, test::numbered("y", r.between(1, 3)));
    const auto c2 = r.channel(xs, ys);
    const auto c3 = r.channel(xs, ys);
    const double p = r.unit();
    const double q = r.unit();
    const auto lhs = binary_visible(p, c1, binary_hidden(q, c2, c3));
    const auto rhs = binary_hidden(q, binary_visible(p, c1, c2), binary_visible(p, c1, c3));
    CHECK(equiv(lhs, rhs));
  }
}

TEST_CASE("hidden choice does not distribute over visible choice") {
  Rand r(107);
  for (int trial = 0; trial < 100; ++trial) {
    const Labels xs = test::numbered("x", r.between(1, 3));
    const Labels ys = test::numbered("y", r.between(1, 3));
    const auto c1 = r.channel(xs, ys);
    const auto c2 = r.channel(xs, ys);
    const auto c3 = r.channel(xs, ys);
    const double p = 0.1 + 0.8 * r.unit();
    const double q = 0.1 + 0.8 * r.unit();
    // C1 +_q (C2 |_p C3) mixes a channel over Y with one over tagged outputs.
    try {
      binary_hidden(q, c1, binary_visible(p, c2, c3));
      FAIL("expected TypeMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TypeMismatch);
    }
  }
}
