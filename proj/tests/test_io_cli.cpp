#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <random>

#include "gasket/cli.hpp"
#include "gasket/io.hpp"

using namespace gasket;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gasket-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

LineFunction<Rational> random_line(int m, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> num(-1000000, 1000000);
  std::uniform_int_distribution<long> den(1, 999983);
  std::vector<Rational> s((size_t(1) << m) + 1);
  for (auto& x : s) x = Rational(num(rng), den(rng));
  return LineFunction<Rational>(m, std::move(s));
}

}  // namespace

TEST_CASE("json round trips are bit-exact") {
  SECTION("line function, rational") {
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
      auto f = random_line(5, seed);
      auto j = to_json(f);
      CHECK(line_from_json<Rational>(j) == f);
      // through text as well
      auto j2 = json::parse(j.dump());
      CHECK(line_from_json<Rational>(j2) == f);
    }
  }

  SECTION("line function, floating") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<double> s(33);
    for (auto& x : s) x = u(rng);
    LineFunction<double> f(5, s);
    auto j = json::parse(to_json(f).dump());
    CHECK(line_from_json<double>(j) == f);
  }

  SECTION("graph function") {
    auto g = to_graph(HarmonicFunction<Rational>{{Rational(1), Rational(-2), Rational(3, 7)}}, 3);
    auto j = json::parse(to_json(g).dump());
    CHECK(graph_from_json<Rational>(j) == g);
  }

  SECTION("malformed documents rejected") {
    CHECK_THROWS_AS(line_from_json<Rational>(json{{"kind", "other"}}), ParseError);
    json bad = to_json(LineFunction<Rational>::zero(2));
    bad["values"].erase(0);
    CHECK_THROWS_AS(line_from_json<Rational>(bad), ParseError);
    json bad2 = to_json(LineFunction<Rational>::zero(2));
    bad2["format"] = 99;
    CHECK_THROWS_AS(line_from_json<Rational>(bad2), ParseError);
  }
}

TEST_CASE("cli harmonic command") {
  TempDir tmp;
  SECTION("writes the worked trace values") {
    int rc = run_cli({"harmonic", "-a", "1", "-b", "0", "-c", "0", "-m", "2", "-o",
                      tmp.path.string()});
    CHECK(rc == 0);
    std::ifstream in(tmp.path / "trace.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,value");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == "0,0");
    CHECK(rows[1] == "1/4,4/25");
    CHECK(rows[2] == "1/2,1/5");
    CHECK(rows[3] == "3/4,4/25");
    CHECK(rows[4] == "1,0");
    auto g = graph_from_json<Rational>(load_json(tmp.path / "graph.json"));
    CHECK(g.level == 2);
  }

  SECTION("constant trace") {
    int rc = run_cli({"harmonic", "-a", "1", "-b", "1", "-c", "1", "-m", "3", "-o",
                      tmp.path.string()});
    CHECK(rc == 0);
    auto g = graph_from_json<Rational>(load_json(tmp.path / "graph.json"));
    for (const auto& v : g.values) CHECK(v == Rational(1));
  }

  SECTION("malformed triple exits 2") {
    CHECK(run_cli({"harmonic", "-a", "zebra", "-b", "0", "-c", "0", "-m", "2", "-o",
                   tmp.path.string()}) == 2);
  }
}

TEST_CASE("cli trace-norm command") {
  TempDir tmp;
  auto f = restrict_to_line(HarmonicFunction<Rational>{{Rational(1), Rational(0), Rational(0)}},
                            6);
  auto input = tmp.path / "line.json";
  atomic_write(input, to_json(f).dump());

  SECTION("t:2 on a harmonic trace keeps only the L2 part") {
    CHECK(run_cli({"trace-norm", input.string(), "--space", "t:2", "-o", tmp.path.string()}) ==
          0);
    auto report = load_json(tmp.path / "norm.json");
    CHECK(report["space"] == "t");
    for (const auto& term : report["terms"]) CHECK(term.get<double>() == 0.0);
  }

  SECTION("besov out of range exits 3") {
    CHECK(run_cli({"trace-norm", input.string(), "--space", "besov:0.4", "-o",
                   tmp.path.string()}) == 3);
  }

  SECTION("tinf on the tent trace reports growing maxima") {
    auto ft = tent_trace<Rational>(TentFunction(vertex_of_dyadic(DyadicPoint(1, 1))), 8);
    auto tin = tmp.path / "tent.json";
    atomic_write(tin, to_json(ft).dump());
    CHECK(run_cli({"trace-norm", tin.string(), "--space", "tinf", "-o", tmp.path.string(),
                   "--svg"}) == 0);
    auto report = load_json(tmp.path / "norm.json");
    auto terms = report["terms"].get<std::vector<double>>();
    for (size_t i = 1; i < terms.size(); ++i) CHECK(terms[i] > terms[i - 1]);
    CHECK(fs::exists(tmp.path / "norm.svg"));
  }

  SECTION("unknown space exits 2") {
    CHECK(run_cli({"trace-norm", input.string(), "--space", "weird:1", "-o",
                   tmp.path.string()}) == 2);
  }
}

TEST_CASE("cli extend command") {
  TempDir tmp;
  auto f = random_line(4, 77);
  auto input = tmp.path / "line.json";
  atomic_write(input, to_json(f).dump());

  SECTION("tilde extension footer reports exact restriction") {
    CHECK(run_cli({"extend", input.string(), "--map", "tilde", "-m", "6", "-o",
                   tmp.path.string()}) == 0);
    auto doc = load_json(tmp.path / "extension.json");
    CHECK(doc["verification"]["max_restriction_error"] == "0");
    auto g = graph_from_json<Rational>(doc);
    CHECK(g.level == 6);
  }

  SECTION("full extension keeps the footer exact") {
    CHECK(run_cli({"extend", input.string(), "--map", "full", "-m", "6",
                   "--corrector-level", "4", "-o", tmp.path.string()}) == 0);
    auto doc = load_json(tmp.path / "extension.json");
    CHECK(doc["verification"]["max_restriction_error"] == "0");
  }

  SECTION("level-0 input exits 4") {
    LineFunction<Rational> f0(0, {Rational(1), Rational(2)});
    auto in0 = tmp.path / "l0.json";
    atomic_write(in0, to_json(f0).dump());
    CHECK(run_cli({"extend", in0.string(), "--map", "tilde", "-m", "3", "-o",
                   tmp.path.string()}) == 4);
  }
}

TEST_CASE("cli verify and constants") {
  TempDir tmp;
  SECTION("single suite runs clean") {
    CHECK(run_cli({"verify", "recursion", "--max-level", "8", "--recursion-count", "5", "-o",
                   tmp.path.string()}) == 0);
    CHECK(fs::exists(tmp.path / "recursion.json"));
    CHECK(fs::exists(tmp.path / "summary.json"));
  }
  SECTION("list names the suites") { CHECK(run_cli({"verify", "list"}) == 0); }
  SECTION("unknown suite exits 2") { CHECK(run_cli({"verify", "bogus", "--no-bundle"}) == 2); }
  SECTION("constants prints") { CHECK(run_cli({"constants"}) == 0); }
  SECTION("bad flag exits 2") { CHECK(run_cli({"constants", "--nope"}) == 2); }
}
