#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <iterator>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccg/cli.hpp"
#include "ccg/config.hpp"
#include "ccg/empirics.hpp"
#include "ccg/verify.hpp"

namespace fs = std::filesystem;
using namespace ccg;

namespace {

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("ccg_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CCG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliOptions opts(const fs::path& cfg) {
  CliOptions o;
  o.config_path = cfg.string();
  return o;
}

}  // namespace

TEST_CASE("check-model exit codes") {
  const auto d = scratch("check");
  const auto good = write(d / "good.json", R"({"family":"linear","alpha":1,"gamma":0.5,"types":[1]})");
  const auto bad = write(d / "bad.json", R"({"family":"linear","alpha":1,"gamma":1,"types":[1]})");
  const auto notypes = write(d / "notypes.json", R"({"family":"linear","alpha":1,"gamma":0})");
  CHECK(run("check-model --config " + good.string()) == 0);
  CHECK(run("check-model --config " + bad.string() + " --out " + (d / "o").string()) == 2);
  CHECK(fs::exists(d / "o" / "assumptions.json"));
  CHECK(run("check-model --config " + notypes.string()) == 2);
  CHECK(run("check-model --config " + (d / "missing.json").string()) == 2);
  CHECK(run("no-such-command") == 2);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"model":{"family":"linear","alpha":1,"gamma":1,"types":[1]}})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"family":"other","types":[1]})")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"family":"linear","alpha":1,"gamma":0,"types":[2,1]})")),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::parse(R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"P":1})")),
                  ConfigError);
  const auto cfg = parse_config(nlohmann::json::parse(R"({"family":"kmr","W":2,"gamma":0.1,"types":[1,2],"seed":7})"));
  CHECK(cfg.seed == 7);
  CHECK(cfg.P == 2);
  CHECK(cfg.model.family() == Family::kmr);
}

TEST_CASE("sweeps expand into instances") {
  auto cfg = parse_config(nlohmann::json::parse(
      R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"sweep":{"param":"gamma","values":[0,0.5]}})"));
  CHECK(sweep_instances(cfg).size() == 2);
  cfg = parse_config(nlohmann::json::parse(
      R"({"family":"linear","alpha":1,"gamma":0,"sweep":{"param":"N","values":[2,4]}})"));
  const auto pts = sweep_instances(cfg);
  REQUIRE(pts.size() == 2);
  CHECK(pts[1].second.types().size() == 4);
}

TEST_CASE("sample writes a header-only file for zero samples") {
  const auto d = scratch("sample0");
  const auto cfg = write(d / "c.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1]})");
  auto o = opts(cfg);
  o.samples = 0;
  o.out_dir = (d / "o").string();
  std::ostringstream out, err;
  CHECK(cmd_sample(o, out, err) == 0);
  const std::string text = slurp(d / "o" / "samples.csv");
  CHECK(text.rfind("# config=", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(fs::exists(d / "o" / "strategy.json"));
}

TEST_CASE("sample output is reproducible and logs rounds") {
  const auto d = scratch("sample");
  const auto cfg = write(d / "c.json", R"({"family":"linear","alpha":0.5,"gamma":0.2,"types":[1],"P":3,"seed":4})");
  auto o = opts(cfg);
  o.samples = 50;
  o.rounds = 5;
  std::ostringstream a, b, err;
  CHECK(cmd_sample(o, a, err) == 0);
  CHECK(cmd_sample(o, b, err) == 0);
  CHECK(a.str() == b.str());
  const std::string text = a.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 52);
  o.out_dir = (d / "o").string();
  CHECK(cmd_sample(o, a, err) == 0);
  CHECK(std::count(std::istreambuf_iterator<char>(std::ifstream(d / "o" / "rounds.csv").rdbuf()), {}, '\n') == 7);
}

TEST_CASE("verify flags a mismatched equilibrium with exit code 3") {
  const auto d = scratch("verify");
  const auto ok = write(d / "ok.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"samples":5000,"grid":20})");
  const auto bad = write(d / "bad.json", R"({"model":{"family":"linear","alpha":1,"gamma":0.5,"types":[1]},)"
                                         R"("recommender":"engagement","equilibrium":"investment","samples":5000,"grid":20})");
  CHECK(run("verify --config " + ok.string()) == 0);
  CHECK(run("verify --config " + bad.string() + " --out " + (d / "o").string()) == 3);
  const auto j = nlohmann::json::parse(slurp(d / "o" / "verify.json"));
  CHECK(j["gap"].get<double>() > j["threshold"].get<double>());
}

TEST_CASE("failed runs leave no partial output") {
  const auto d = scratch("partial");
  // The second sweep point has gamma = 1, which is rejected before any work.
  const auto cfg = write(d / "c.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"samples":100,)"
                                       R"("sweep":{"param":"gamma","values":[0.2,1.0]}})");
  CHECK(run("metrics --config " + cfg.string() + " --out " + (d / "o").string()) == 2);
  CHECK_FALSE(fs::exists(d / "o" / "metrics.csv"));
  const auto bad = write(d / "bad.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1,2],"equilibrium":"homogeneous"})");
  CHECK(run("sample --config " + bad.string() + " --out " + (d / "o2").string()) == 2);
  CHECK_FALSE(fs::exists(d / "o2"));
}

TEST_CASE("metrics csv layout") {
  const auto d = scratch("metrics");
  const auto cfg = write(d / "c.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"recommender":"all","samples":2000})");
  auto o = opts(cfg);
  std::ostringstream out, err;
  CHECK(cmd_metrics(o, out, err) == 0);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# config=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "metric,recommender,params,mean,stderr,n");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 9);
}

TEST_CASE("empirics writes the table and ecdf files") {
  const auto d = scratch("emp");
  std::string data = "feed,genre,angriness,favorites\n";
  for (int a = 0; a < 5; ++a)
    for (int k = 0; k < 6; ++k) {
      data += "E,P," + std::to_string(a) + "," + std::to_string(a * 20 + k) + "\n";
      data += "C,NP," + std::to_string(a) + "," + std::to_string(50 - a + k) + "\n";
    }
  const auto csv = write(d / "data.csv", data);
  CliOptions o;
  o.data_path = csv.string();
  o.out_dir = (d / "o").string();
  std::ostringstream out, err;
  CHECK(cmd_empirics(o, out, err) == 0);
  const std::string table = slurp(d / "o" / "table1.csv");
  CHECK(table.find("feed,rho_P,p_P,n_P,rho_NP,p_NP,n_NP,rho_P+NP,p_P+NP,n_P+NP") != std::string::npos);
  CHECK(table.find("\nE,0.9") != std::string::npos);
  CHECK(fs::exists(d / "o" / "ecdf_E_P_a0.csv"));
  CHECK(fs::exists(d / "o" / "dominance_C_NP.csv"));
  CHECK(run("empirics --data " + (d / "missing.csv").string()) == 2);
}

namespace {

std::vector<Content> parse_samples(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<Content> out;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    out.push_back(Content{std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return out;
}

// Data rows of a metrics CSV split into cells.
std::vector<std::vector<std::string>> rows(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::vector<std::string>> out;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

std::vector<double> column(const std::string& text, const std::string& metric, const std::string& rec) {
  std::vector<double> v;
  for (const auto& r : rows(text))
    if (r[0] == metric && r[1] == rec) v.push_back(std::stod(r[3]));
  return v;
}

}  // namespace

TEST_CASE("sampled contents lie on the equilibrium curves") {
  const auto d = scratch("support");
  auto o = opts(write(d / "h.json", R"({"family":"linear","alpha":0.5,"gamma":0.1,"types":[1.3],"P":3})"));
  o.samples = 1000;
  std::ostringstream out, err;
  REQUIRE(cmd_sample(o, out, err) == 0);
  const auto h = parse_samples(out.str());
  CHECK(h.size() == 1000);
  const auto hom = ModelInstance::linear(0.5, 0.1, TypeSpace({1.3}));
  CHECK(support_containment(h, hom, 1e-9).empty());

  const auto types = make_well_separated_types(3, 0.01);
  nlohmann::json cfg{{"family", "linear"}, {"alpha", 1}, {"gamma", 0}, {"types", std::vector<double>(types.types().begin(), types.types().end())}};
  o = opts(write(d / "ws.json", cfg.dump()));
  o.samples = 2000;
  std::ostringstream ws;
  REQUIRE(cmd_sample(o, ws, err) == 0);
  const auto inst = ModelInstance::linear(1.0, 0.0, types);
  std::set<double> curves;
  for (const auto& w : parse_samples(ws.str()))
    for (double t : types.types())
      if (std::abs(w.w_costly - min_investment(inst, t, w.w_cheap)) <= 1e-9) curves.insert(t);
  CHECK(curves.size() <= static_cast<std::size_t>(n_prime(3)));
}

TEST_CASE("verify rejects a bad config") {
  const auto d = scratch("verify_bad");
  const auto cfg = write(d / "c.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"P":"two"})");
  CHECK(run("verify --config " + cfg.string()) == 2);
  CHECK(run("verify --config " + cfg.string() + " --grid 1") == 2);
}

TEST_CASE("metrics reproduce the welfare and quality orderings") {
  const auto d = scratch("fig");
  std::ostringstream out, err;
  auto o = opts(write(d / "a.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"recommender":"all","samples":20000})"));
  REQUIRE(cmd_metrics(o, out, err) == 0);
  CHECK(std::abs(column(out.str(), "UW", "engagement").at(0)) <= 1e-9);
  CHECK(column(out.str(), "UW", "random").at(0) == 1.0);

  std::ostringstream g;
  o = opts(write(d / "g.json", R"({"family":"linear","alpha":1,"gamma":0,"types":[1],"recommender":"engagement",)"
                               R"("samples":20000,"sweep":{"param":"gamma","values":[0,0.2,0.4]}})"));
  REQUIRE(cmd_metrics(o, g, err) == 0);
  const auto ucq = column(g.str(), "UCQ", "engagement");
  REQUIRE(ucq.size() == 3);
  CHECK(ucq[0] > ucq[1]);
  CHECK(ucq[1] > ucq[2]);

  std::ostringstream n;
  o = opts(write(d / "n.json", R"({"family":"linear","alpha":1,"gamma":0,"recommender":"all",)"
                               R"("samples":20000,"sweep":{"param":"N","values":[2,4,8]}})"));
  REQUIRE(cmd_metrics(o, n, err) == 0);
  CHECK(column(n.str(), "RE", "engagement").at(2) < column(n.str(), "RE", "investment").at(2));
}

TEST_CASE("empirics on synthetic data") {
  const auto d = scratch("emp_syn");
  std::string concordant = "feed,genre,angriness,favorites\n";
  for (const char* feed : {"E", "C"})
    for (const char* genre : {"P", "NP"})
      for (int a = 0; a < 5; ++a)
        for (int k = 0; k < 3; ++k)
          concordant += std::string(feed) + "," + genre + "," + std::to_string(a) + "," + std::to_string(10 * a) + "\n";
  CliOptions o;
  o.data_path = write(d / "conc.csv", concordant).string();
  std::ostringstream out, err;
  REQUIRE(cmd_empirics(o, out, err) == 0);
  CHECK(out.str().find("\nE,1,0,15,1,0,15,1,0,30\n") != std::string::npos);
  CHECK(out.str().find("\nC,1,0,15,1,0,15,1,0,30\n") != std::string::npos);

  // Independent angriness and favorites: the rank correlation should vanish.
  Stream rng(99, 0);
  std::vector<TweetRecord> rs;
  for (int i = 0; i < 10000; ++i)
    rs.push_back(TweetRecord{Feed::engagement, Genre::political, static_cast<int>(rng.below(5)),
                             static_cast<long long>(rng.below(1000))});
  const auto s = spearman_rho(rs, Feed::engagement, GenreSet{});
  CHECK(std::abs(s.rho) < 0.05);
  CHECK(s.p > 0.01);
}
