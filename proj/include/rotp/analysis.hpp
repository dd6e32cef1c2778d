#pragma once

// Closed-form information bounds (all in bits) and the Monte-Carlo
// estimators that compare simulated transcripts against them.

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rotp/protocol.hpp"

namespace rotp::analysis {

/// phi(x) = (1+x)log2(1+x) + (1-x)log2(1-x), with 0 log 0 = 0. x in [0, 1].
double phi(double x);

/// Individual-attack bound on Eve's information about the encoding
/// operation: phi(2 sqrt(d(1-d))) / 2. Accepts d in [0, 1]; the curve is
/// symmetric about 1/2.
double i0_bound(double d);

/// Error rate induced on the attacked basis: sin^2(theta) / 2.
double d_of_theta(double theta);

/// Distance from the epsilon-tilde pole at which evaluation is refused.
inline constexpr double kPoleTolerance = 1e-9;

/// Lower bound on epsilon-tilde as a function of the tolerated error rate:
///   ((1 - 4 sqrt(sqrt(2 - 8 d) d)) / (1 - 8 sqrt(2) d))^2.
/// Pole at d = 1/(8 sqrt 2); d in [0, 0.25].
double epsilon_tilde_min(double d_m);

/// 1 - log2(1+e) + e/(1+e) log2(e), with e log e = 0 at e = 0.
double i1_from_epsilon(double eps);

double i1_bound(double d_m);

/// (4 sqrt 2 / ln 2) d_m, the small-error-rate form of the I1 bound.
double small_dm_linear_bound(double d_m);

enum class BoundKind { I0, I1, SmallDmLinear, EpsilonTilde };

struct BoundPoint {
  double d = 0;
  double value = 0;
  BoundKind kind = BoundKind::I0;
};

BoundPoint evaluate(BoundKind kind, double d);

/// One CSV row of the bound table.
struct BoundRow {
  double d = 0, i0 = 0, i1 = 0, linear = 0, eps_tilde = 0;
};

/// Tolerance used when vetting a user grid for the pole. Much wider than
/// kPoleTolerance: a grid point this close evaluates to a meaningless spike.
inline constexpr double kGridPoleTolerance = 1e-3;

/// Throws SingularityError naming the first grid point near the pole, or
/// DomainError for a point outside [0, 0.25].
std::vector<BoundRow> bound_table(std::span<const double> grid);

/// Header `d,i0,i1,linear,eps_tilde`.
void write_bound_csv(std::ostream& os, std::span<const BoundRow> rows);

enum class ErrorSubset { SampleBits, MatchedAttackBasis, All };

struct RateEstimate {
  std::size_t n = 0;
  std::size_t errors = 0;

  double rate() const { return n ? static_cast<double>(errors) / static_cast<double>(n) : 0.0; }
};

/// Decode errors against the modified message over the subset. Matched
/// attack basis means: photons prepared in the U_TB attack basis (DomainError
/// if the transcript's attack is not U_TB).
RateEstimate error_counts(const protocol::SessionTranscript& t, ErrorSubset subset);

/// error_counts(...).rate(); DomainError on an empty subset.
double empirical_error_rate(const protocol::SessionTranscript& t, ErrorSubset subset);

/// Nonnegative contingency table, rows = hidden variable, cols = observation.
class JointCounts {
 public:
  using Table = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  JointCounts(Eigen::Index rows, Eigen::Index cols) : table_(Table::Zero(rows, cols)) {}
  explicit JointCounts(Table table);

  void add(Eigen::Index hidden, Eigen::Index observed, std::int64_t count = 1);
  const Table& table() const { return table_; }
  std::int64_t total() const { return table_.sum(); }

  JointCounts& operator+=(const JointCounts& other);

 private:
  Table table_;
};

/// Plug-in estimate sum p(a,e) log2(p(a,e) / (p(a) p(e))). DomainError when
/// the table is empty.
double empirical_mutual_information(const JointCounts& counts);

/// Eve's column index for a record: probe outcome (U_TB) or
/// 2 * basis + outcome (intercept-resend).
Eigen::Index eve_observation_index(const adversary::EveRecord& rec);

/// Rows: Alice's encoding bit; cols: Eve's observation (4 columns).
JointCounts eve_encoding_counts(const protocol::SessionTranscript& t);

/// Rows: Alice's encoding bit; cols: Bob's decoded bit.
JointCounts bob_encoding_counts(const protocol::SessionTranscript& t);

/// Fraction of attacked photons in Eve's basis whose ciphertext eigenstate
/// label Eve guessed correctly.
RateEstimate eve_ciphertext_guess_hits(const protocol::SessionTranscript& t);

/// Fraction of known-plaintext basis guesses that name the true MB.
RateEstimate basis_guess_hits(const protocol::SessionTranscript& t);

/// Probability, for one photon whose ciphertext is `c`, that Bob's
/// measurement in `bob_basis` yields `outcome` under the transcript-free
/// attack model (exact, no sampling). Used to cross-check sampled rates.
double exact_outcome_probability(const quantum::Ketd& c, const adversary::AttackModel& attack,
                                 quantum::Basis bob_basis, Bit outcome);

}  // namespace rotp::analysis
