#include "ccg/empirics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

namespace ccg {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

long long parse_integer(const std::string& s, const std::string& what, int line_number) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size())
    throw DataError("line " + std::to_string(line_number) + ": " + what + " '" + s +
                    "' is not an integer");
  return v;
}

}  // namespace

std::string GenreSet::label() const {
  if (political && non_political) return "P+NP";
  if (political) return "P";
  if (non_political) return "NP";
  return "none";
}

TweetRecord parse_record(const std::string& line, int line_number) {
  const auto cells = split_csv(line);
  const std::string where = "line " + std::to_string(line_number) + ": ";
  if (cells.size() != 4) throw DataError(where + "expected 4 fields");
  TweetRecord r;
  if (cells[0] == "E")
    r.feed = Feed::engagement;
  else if (cells[0] == "C")
    r.feed = Feed::chronological;
  else
    throw DataError(where + "feed must be E or C");
  if (cells[1] == "P")
    r.genre = Genre::political;
  else if (cells[1] == "NP")
    r.genre = Genre::non_political;
  else
    throw DataError(where + "genre must be P or NP");
  const long long a = parse_integer(cells[2], "angriness", line_number);
  if (a < 0 || a > 4) throw DataError(where + "angriness must be in 0..4");
  r.angriness = static_cast<int>(a);
  r.favorites = parse_integer(cells[3], "favorites", line_number);
  if (r.favorites < 0) throw DataError(where + "favorites must be nonnegative");
  return r;
}

std::vector<TweetRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  int line_number = 0;
  std::vector<TweetRecord> out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!header_seen) {
      const auto cells = split_csv(line);
      if (cells != std::vector<std::string>{"feed", "genre", "angriness", "favorites"})
        throw DataError("line " + std::to_string(line_number) +
                        ": expected header feed,genre,angriness,favorites");
      header_seen = true;
      continue;
    }
    out.push_back(parse_record(line, line_number));
  }
  return out;
}

Ecdf::Ecdf(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DataError("empirical cdf of an empty sample");
  std::sort(values_.begin(), values_.end());
}

double Ecdf::operator()(double x) const {
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

std::optional<Ecdf> conditional_ecdf(std::span<const TweetRecord> records, int angriness, Feed f,
                                     GenreSet genres) {
  std::vector<double> v;
  for (const auto& r : records)
    if (r.angriness == angriness && r.feed == f && genres.contains(r.genre))
      v.push_back(std::log1p(static_cast<double>(r.favorites)));
  if (v.empty()) return std::nullopt;
  return Ecdf(std::move(v));
}

DominanceMatrix dominance_matrix(std::span<const TweetRecord> records, Feed f, GenreSet genres,
                                 std::span<const double> grid) {
  std::array<std::optional<Ecdf>, 5> cdfs;
  DominanceMatrix m;
  for (int a = 0; a < 5; ++a) {
    cdfs[a] = conditional_ecdf(records, a, f, genres);
    if (!cdfs[a]) m.missing_levels.push_back(a);
  }
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      if (!cdfs[a] || !cdfs[b] || grid.empty()) continue;
      std::size_t below = 0;
      for (double x : grid)
        if ((*cdfs[a])(x) <= (*cdfs[b])(x)) ++below;
      m.entry[a][b] = static_cast<double>(below) / static_cast<double>(grid.size());
    }
  }
  return m;
}

std::vector<double> mid_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);  // mean of positions i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: coordinate lengths differ");
  const std::size_t n = x.size();
  if (n < 3) throw DataError("spearman: need at least 3 pairs");
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  const double mean = 0.5 * static_cast<double>(n + 1);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = rx[i] - mean, dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("spearman: a coordinate has zero variance");
  SpearmanResult r;
  r.n = n;
  r.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (r.rho >= 1.0) {
    r.p = 0.0;
  } else if (r.rho <= -1.0) {
    r.p = 1.0;
  } else {
    const double dof = static_cast<double>(n - 2);
    const double t = r.rho * std::sqrt(dof / ((1.0 - r.rho) * (1.0 + r.rho)));
    const boost::math::students_t_distribution<double> dist(dof);
    r.p = boost::math::cdf(boost::math::complement(dist, t));
  }
  return r;
}

SpearmanResult spearman_rho(std::span<const TweetRecord> records, Feed f, GenreSet genres) {
  std::vector<double> a, l;
  for (const auto& r : records) {
    if (r.feed != f || !genres.contains(r.genre)) continue;
    a.push_back(r.angriness);
    l.push_back(std::log1p(static_cast<double>(r.favorites)));
  }
  return spearman(a, l);
}

}  // namespace ccg
