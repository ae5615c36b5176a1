// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ccg/empirics.hpp"
#include "ccg/equilibrium.hpp"
#include "ccg/metrics.hpp"
#include "ccg/verify.hpp"

using namespace ccg;

namespace {

constexpr std::uint64_t kN = 100000;

int failures = 0;

void detail(const std::string& s) { std::cout << "    " << s << "\n"; }

void report(int id, const std::string& title, bool ok) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << id << "] " << title << "\n";
  if (!ok) ++failures;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

ModelInstance linear(double alpha, double gamma, std::vector<double> types) {
  return ModelInstance::linear(alpha, gamma, TypeSpace(std::move(types)));
}

bool certify(const std::string& label, const ModelInstance& inst, Metric m, const MixedStrategy& eq,
             int P) {
  const auto start = std::chrono::steady_clock::now();
  const auto rep = best_response_gap(inst, m, eq, P, 200, kN, 11, Exec::serial);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = rep.accepted() && secs < 120.0;
  detail(label + ": gap " + fmt(rep.gap) + " <= " + fmt(rep.threshold) + " (eq utility " +
         fmt(rep.eq_utility.mean) + ", " + std::to_string(rep.candidates.size()) + " candidates, " +
         fmt(secs) + " s)" + (ok ? "" : "  <-- fails"));
  return ok;
}

void criterion_1() {
  bool ok = true;
  {
    const auto inst = linear(1.0, 0.0, {1.0});
    ok &= certify("(a) homogeneous alpha=1 gamma=0 t=1 P=2", inst, Metric::engagement,
                  engagement_eq_homogeneous(inst, 2), 2);
  }
  {
    const auto inst = linear(-0.5, 0.3, {2.0});
    ok &= certify("(b) homogeneous alpha=-0.5 gamma=0.3 t=2 P=3", inst, Metric::engagement,
                  engagement_eq_homogeneous(inst, 3), 3);
  }
  for (double r : {2.0, 1.45, 1.2}) {
    const auto inst = linear(1.0, 0.0, {0.5, 1.5 * r - 1.0});
    const auto eq = engagement_eq_two_types(inst);
    ok &= certify("(c) two types ratio " + fmt(r) + " " + eq.descriptor(), inst, Metric::engagement, eq, 2);
  }
  {
    const auto inst = ModelInstance::linear(1.0, 0.0, make_well_separated_types(4, 0.01));
    ok &= certify("(d) well-separated N=4 eps=0.01", inst, Metric::engagement,
                  engagement_eq_well_separated(inst), 2);
  }
  for (double alpha : {1.0, -0.5}) {
    const auto inst = linear(alpha, 0.0, {1.0});
    ok &= certify("(e) investment alpha=" + fmt(alpha), inst, Metric::investment, investment_eq(inst, 2), 2);
  }
  for (double kappa : {0.3, 0.75}) {
    // kappa = c(beta, 0) = -alpha for a single type with negative baseline utility.
    const auto inst = linear(-kappa, 0.0, {1.0});
    ok &= certify("(f) random kappa=" + fmt(kappa) + " nu=" + fmt(random_opt_out_probability(kappa, 2)), inst,
                  Metric::random, random_eq(inst, 2), 2);
  }
  report(1, "equilibrium certification by best-response gap", ok);
}

void criterion_2() {
  bool ok = true;
  {
    const auto inst = linear(1.0, 0.0, {1.0});
    const auto e = estimate_ucq(inst, Metric::investment, investment_eq(inst, 2), 2, kN, 21, Exec::serial);
    const bool pass = std::abs(e.mean - 2.0 / 3.0) <= 3 * e.std_error;
    detail("UCQ(investment) = " + fmt(e.mean) + " +- " + fmt(e.std_error) + " vs 2/3");
    ok &= pass;
  }
  for (int N : {2, 4, 8}) {
    const auto inst = ModelInstance::linear(1.0, 0.0, make_well_separated_types(N, 0.01));
    const auto e = estimate_ucq(inst, Metric::engagement, engagement_eq(inst, 2), 2, kN, 22, Exec::serial);
    const bool pass = e.mean <= 1.0 / N + 3 * e.std_error;
    detail("N=" + std::to_string(N) + ": UCQ(engagement) = " + fmt(e.mean) + " +- " + fmt(e.std_error) +
           " vs bound " + fmt(1.0 / N));
    ok &= pass;
  }
  report(2, "quality consumption values", ok);
}

void criterion_3() {
  bool ok = true;
  double prev = INFINITY;
  for (double g : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const double v = closed_form_ucq_homogeneous(0.5, g, 1.0, 2);
    detail("gamma=" + fmt(g) + ": UCQ(engagement) = " + fmt(v));
    ok &= v < prev;
    prev = v;
  }
  // Investment equilibrium quality cdf at alpha = 0.5: min(1, w).
  const double inv = expected_max_from_cdf([](double w) { return std::clamp(w, 0.0, 1.0); }, 2, 1.0, 1e-12);
  const double at0 = closed_form_ucq_homogeneous(0.5, 0.0, 1.0, 2);
  detail("investment value " + fmt(inv) + ", engagement at gamma=0 differs by " + fmt(std::abs(inv - at0)));
  ok &= std::abs(inv - at0) <= 1e-9;
  report(3, "quality consumption decreasing in gaming cost", ok);
}

void criterion_4() {
  bool ok = true;
  {
    const auto inst = linear(1.0, 0.0, {1.0});
    const auto e = estimate_uw(inst, Metric::engagement, engagement_eq(inst, 2), 2, kN, 41, Exec::serial);
    const auto r = estimate_uw(inst, Metric::random, random_eq(inst, 2), 2, kN, 42, Exec::serial);
    detail("alpha=1: UW(engagement) = " + fmt(e.mean) + ", UW(random) = " + fmt(r.mean));
    ok &= e.mean <= 1e-9 && r.mean == 1.0;
  }
  {
    const auto inst = linear(-0.5, 0.3, {1.0});
    const auto e = estimate_uw(inst, Metric::engagement, engagement_eq(inst, 2), 2, kN, 43, Exec::serial);
    const auto r = estimate_uw(inst, Metric::random, random_eq(inst, 2), 2, kN, 44, Exec::serial);
    detail("alpha=-0.5: UW(engagement) = " + fmt(e.mean) + ", UW(random) = " + fmt(r.mean));
    ok &= std::abs(e.mean) <= 1e-12 && r.mean == 0.0;
  }
  report(4, "user welfare separation", ok);
}

void criterion_5() {
  bool ok = true;
  const auto inst = ModelInstance::linear(1.0, 0.0, make_well_separated_types(64, 0.01));
  const auto eq_e = engagement_eq(inst, 2);
  const auto re_e = estimate_re(inst, Metric::engagement, eq_e, 2, kN, 51, Exec::serial);
  const auto re_i = estimate_re(inst, Metric::investment, investment_eq(inst, 2), 2, kN, 52, Exec::serial);
  detail("T_64: RE(engagement) = " + fmt(re_e.mean) + " +- " + fmt(re_e.std_error) +
         ", RE(investment) = " + fmt(re_i.mean) + " +- " + fmt(re_i.std_error));
  ok &= re_e.mean + 3 * re_e.std_error < re_i.mean - 3 * re_i.std_error;

  const double top = std::exp(1.0 - std::exp(-1.0));
  const double bp[] = {1.0, top};
  const double lim = expected_max_from_cdf([](double v) { return limit_engagement_cdf(v, 0.0); }, 2, top, 1e-10, bp);
  detail("limit E[max of 2] = " + fmt(lim) + " vs investment 5/3");
  ok &= lim < 5.0 / 3.0;

  Stream rng(53, 0);
  std::vector<double> v;
  for (std::uint64_t i = 0; i < kN; ++i) v.push_back(inst.engagement(eq_e.sample(rng)) + 1.0);
  const double ks = ks_distance(v, [](double x) { return limit_engagement_cdf(x, 0.01); });
  detail("KS(engagement + s vs limit cdf) = " + fmt(ks));
  ok &= ks <= 0.1;
  report(5, "realized engagement below investment-based ranking", ok);
}

void criterion_6() {
  bool ok = true;
  const double eps = 0.01;
  for (double c : {1.2, 2.0}) {
    const auto inst = ModelInstance::kmr(1.0, 0.0, TypeSpace({eps, c * (1.0 + eps) - 1.0}));
    const auto e = estimate_uw(inst, Metric::engagement, engagement_eq(inst, 2), 2, kN, 61, Exec::serial);
    const auto r = estimate_uw(inst, Metric::random, random_eq(inst, 2), 2, kN, 62, Exec::serial);
    detail("c=" + fmt(c) + ": UW(engagement) = " + fmt(e.mean) + " +- " + fmt(e.std_error) +
           ", UW(random) = " + fmt(r.mean) + " +- " + fmt(r.std_error));
    if (c < 1.5)
      ok &= e.mean > r.mean + 3 * r.std_error + 3 * e.std_error;
    else
      ok &= e.mean < r.mean - 3 * r.std_error - 3 * e.std_error;
  }
  report(6, "two-type watch-time welfare reversal", ok);
}

void criterion_7() {
  bool ok = true;
  for (int P : {2, 3}) {
    const auto inst = linear(0.5, 0.1, {1.0});
    const auto eq = engagement_eq(inst, P);
    Stream rng(71, static_cast<std::uint64_t>(P));
    std::vector<Content> s;
    for (int i = 0; i < 10000; ++i) s.push_back(eq.sample(rng));
    const auto bad = check_positive_correlation(s, 1e-12);
    detail("P=" + std::to_string(P) + ": monotonicity violations " + std::to_string(bad.size()));
    ok &= bad.empty();
  }
  std::vector<std::pair<std::string, MixedStrategy>> eqs;
  eqs.emplace_back("homogeneous a", engagement_eq(linear(1.0, 0.0, {1.0}), 2));
  eqs.emplace_back("homogeneous b", engagement_eq(linear(-0.5, 0.3, {2.0}), 3));
  eqs.emplace_back("homogeneous c", engagement_eq(linear(0.5, 0.1, {1.0}), 2));
  for (double r : {2.0, 1.45, 1.2})
    eqs.emplace_back("two types r=" + fmt(r), engagement_eq(linear(1.0, 0.0, {0.5, 1.5 * r - 1.0}), 2));
  for (int N : {4, 64})
    eqs.emplace_back("well-separated N=" + std::to_string(N),
                     engagement_eq(ModelInstance::linear(1.0, 0.0, make_well_separated_types(N, 0.01)), 2));
  eqs.emplace_back("watch-time two types",
                   engagement_eq(ModelInstance::kmr(1.0, 0.0, TypeSpace({0.01, 1.2 * 1.01 - 1.0})), 2));
  std::size_t total_bad = 0;
  for (const auto& [name, eq] : eqs) {
    Stream rng(72, total_bad);
    std::vector<Content> s;
    for (int i = 0; i < 10000; ++i) s.push_back(eq.sample(rng));
    total_bad += support_containment(s, eq.instance(), 1e-9).size();
  }
  detail(std::to_string(eqs.size()) + " equilibria: support violations " + std::to_string(total_bad));
  ok &= total_bad == 0;
  report(7, "positive correlation and support containment", ok);
}

void criterion_8() {
  double worst = 0.0;
  for (double alpha : {-0.5, 0.5, 1.0}) {
    for (double gamma : {0.0, 0.3, 0.6}) {
      const auto inst = linear(alpha, gamma, {1.0});
      const auto eq = engagement_eq(inst, 2);
      Stream rng(81, 0);
      std::vector<double> q;
      for (std::uint64_t i = 0; i < kN; ++i) q.push_back(eq.sample(rng).w_costly);
      const double ks =
          ks_distance(q, [=](double w) { return homogeneous_quality_cdf(alpha, gamma, 1.0, 2, w); });
      worst = std::max(worst, ks);
    }
  }
  detail("worst KS over the 3x3 grid = " + fmt(worst));
  report(8, "sampler fidelity against the closed-form quality cdf", worst <= 0.01);
}

// Ranks by explicit tie groups and Pearson on ranks, written independently.
double brute_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) {
        if (w < v[i]) ++less;
        if (w == v[i]) ++equal;
      }
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i] / n, my += ry[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

void criterion_9() {
  Stream rng(91, 0);
  double worst = 0.0;
  int done = 0;
  while (done < 200) {
    const std::size_t n = 3 + rng.below(30);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.below(5));
      y[i] = static_cast<double>(rng.below(8));
    }
    SpearmanResult s;
    try {
      s = spearman(x, y);
    } catch (const DataError&) {
      continue;  // constant coordinate: undefined
    }
    worst = std::max(worst, std::abs(s.rho - brute_spearman(x, y)));
    ++done;
  }
  detail("max |rho - brute force| over 200 tied datasets = " + fmt(worst));
  const std::vector<double> a{1, 2, 3, 4, 5}, rev{5, 4, 3, 2, 1};
  const double r1 = spearman(a, a).rho, rm = spearman(a, rev).rho;
  const double rh = spearman(std::vector<double>{1, 2, 3}, std::vector<double>{2, 1, 3}).rho;
  detail("hand cases: " + fmt(r1) + ", " + fmt(rh) + ", " + fmt(rm));
  report(9, "rank correlation oracle", worst <= 1e-12 && r1 == 1.0 && rh == 0.5 && rm == -1.0);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ccg_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"model":{"family":"linear","alpha":1,"gamma":0,"types":[1]},"recommender":"all","P":2,)"
        << R"("samples":20000,"seed":5,"sweep":{"param":"gamma","values":[0,0.2,0.4]}})";
  }
  auto run = [&](const std::string& out, int threads) {
    const std::string cmd = std::string(CCG_CLI_PATH) + " metrics --config " + (dir / "config.json").string() +
                            " --out " + (dir / out).string() + " --threads " + std::to_string(threads);
    return std::system(cmd.c_str());
  };
  const int a = run("run1", 1), b = run("run2", 1), c = run("run3", 4);
  const std::string r1 = slurp(dir / "run1" / "metrics.csv");
  const std::string r2 = slurp(dir / "run2" / "metrics.csv");
  const std::string r3 = slurp(dir / "run3" / "metrics.csv");
  detail("exit codes " + std::to_string(a) + " " + std::to_string(b) + " " + std::to_string(c) + ", " +
         std::to_string(r1.size()) + " bytes; parallel run identical: " + (r1 == r3 ? "yes" : "no"));
  report(10, "byte-identical metrics output for identical config and seed",
         a == 0 && b == 0 && !r1.empty() && r1 == r2);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                    criterion_5, criterion_6, criterion_7, criterion_8,
                                                    criterion_9, criterion_10};
  for (const auto& c : criteria) {
    c();
    std::cout.flush();
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
