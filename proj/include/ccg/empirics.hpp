#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccg {

enum class Feed { engagement, chronological };
enum class Genre { political, non_political };

struct TweetRecord {
  Feed feed = Feed::engagement;
  Genre genre = Genre::political;
  int angriness = 0;  // 0..4
  long long favorites = 0;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Subset of genres used to condition on.
struct GenreSet {
  bool political = true;
  bool non_political = true;

  bool contains(Genre g) const { return g == Genre::political ? political : non_political; }
  std::string label() const;
};

// Parses CSV with header feed,genre,angriness,favorites. Throws DataError
// naming the offending line.
std::vector<TweetRecord> load_records(const std::string& path);
TweetRecord parse_record(const std::string& line, int line_number);

class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);  // nonempty

  double operator()(double x) const;
  std::span<const double> sorted() const { return values_; }

 private:
  std::vector<double> values_;
};

// Empirical cdf of ln(1 + favorites) over records with the given angriness,
// feed and genre; nullopt when nothing matches.
std::optional<Ecdf> conditional_ecdf(std::span<const TweetRecord> records, int angriness, Feed f,
                                     GenreSet genres);

struct DominanceMatrix {
  // entry[a][b]: fraction of grid points with ECDF_a <= ECDF_b; empty when a level is missing.
  std::array<std::array<std::optional<double>, 5>, 5> entry;
  std::vector<int> missing_levels;
};

DominanceMatrix dominance_matrix(std::span<const TweetRecord> records, Feed f, GenreSet genres,
                                 std::span<const double> grid);

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;  // one-sided, positive association
  std::size_t n = 0;
};

// Mid-rank Spearman correlation with a Student-t p-value on n - 2 degrees of
// freedom. Throws DataError for fewer than 3 pairs or a constant coordinate.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y);
SpearmanResult spearman_rho(std::span<const TweetRecord> records, Feed f, GenreSet genres);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> mid_ranks(std::span<const double> v);

}  // namespace ccg
