#include "rotp/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

namespace rotp::analysis {

namespace {

double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

void require_range(double v, double lo, double hi, const char* name) {
  if (!(v >= lo && v <= hi))
    throw DomainError(std::string(name) + " = " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

double phi(double x) {
  require_range(x, 0.0, 1.0, "phi argument");
  return xlog2x(1 + x) + xlog2x(1 - x);
}

double i0_bound(double d) {
  require_range(d, 0.0, 1.0, "error rate");
  // Rounding can push 2 sqrt(d(1-d)) a hair above 1 at d = 1/2.
  const double x = std::min(1.0, 2 * std::sqrt(d * (1 - d)));
  return 0.5 * phi(x);
}

double d_of_theta(double theta) {
  quantum::check_attack_angle(theta);
  const double s = std::sin(theta);
  return 0.5 * s * s;
}

double epsilon_tilde_min(double d_m) {
  require_range(d_m, 0.0, 0.25, "tolerated error rate");
  const double denom = 1 - 8 * std::numbers::sqrt2 * d_m;
  if (std::abs(denom) < kPoleTolerance)
    throw SingularityError("epsilon-tilde bound is singular at d_m = 1/(8 sqrt 2), got " +
                           std::to_string(d_m));
  const double numer = 1 - 4 * std::sqrt(std::sqrt(2 - 8 * d_m) * d_m);
  const double r = numer / denom;
  return r * r;
}

double i1_from_epsilon(double eps) {
  if (!(eps >= 0) || !std::isfinite(eps)) throw DomainError("epsilon-tilde must be finite and >= 0");
  const double ratio_log = eps > 0 ? eps / (1 + eps) * std::log2(eps) : 0.0;
  return 1 - std::log2(1 + eps) + ratio_log;
}

double i1_bound(double d_m) { return i1_from_epsilon(epsilon_tilde_min(d_m)); }

double small_dm_linear_bound(double d_m) {
  require_range(d_m, 0.0, 0.25, "tolerated error rate");
  return 4 * std::numbers::sqrt2 / std::numbers::ln2 * d_m;
}

BoundPoint evaluate(BoundKind kind, double d) {
  switch (kind) {
    case BoundKind::I0: return {d, i0_bound(d), kind};
    case BoundKind::I1: return {d, i1_bound(d), kind};
    case BoundKind::SmallDmLinear: return {d, small_dm_linear_bound(d), kind};
    case BoundKind::EpsilonTilde: return {d, epsilon_tilde_min(d), kind};
  }
  throw DomainError("unknown bound kind");
}

std::vector<BoundRow> bound_table(std::span<const double> grid) {
  std::vector<BoundRow> rows;
  rows.reserve(grid.size());
  for (double d : grid) {
    require_range(d, 0.0, 0.25, "grid point");
    if (std::abs(1 - 8 * std::numbers::sqrt2 * d) < kGridPoleTolerance)
      throw SingularityError("grid point d = " + fmt(d) +
                             " is at the epsilon-tilde pole 1/(8 sqrt 2) ~ 0.0883883");
    const double eps = epsilon_tilde_min(d);
    rows.push_back({d, i0_bound(d), i1_from_epsilon(eps), small_dm_linear_bound(d), eps});
  }
  return rows;
}

void write_bound_csv(std::ostream& os, std::span<const BoundRow> rows) {
  os << "d,i0,i1,linear,eps_tilde\n";
  for (const auto& r : rows)
    os << fmt(r.d) << ',' << fmt(r.i0) << ',' << fmt(r.i1) << ',' << fmt(r.linear) << ','
       << fmt(r.eps_tilde) << '\n';
}

RateEstimate error_counts(const protocol::SessionTranscript& t, ErrorSubset subset) {
  const adversary::IndividualUtb* utb = t.attack.as_utb();
  if (subset == ErrorSubset::MatchedAttackBasis && !utb)
    throw DomainError("matched-attack-basis subset needs a U_TB attack");

  RateEstimate est;
  for (const auto& p : t.photons) {
    const bool in_subset = subset == ErrorSubset::All ||
                           (subset == ErrorSubset::SampleBits && p.is_sample) ||
                           (subset == ErrorSubset::MatchedAttackBasis &&
                            p.basis_key.basis() == utb->attack_basis);
    if (!in_subset) continue;
    ++est.n;
    if (p.decoded_bit != t.modified.bits[p.index]) ++est.errors;
  }
  return est;
}

double empirical_error_rate(const protocol::SessionTranscript& t, ErrorSubset subset) {
  const RateEstimate est = error_counts(t, subset);
  if (est.n == 0) throw DomainError("error rate undefined on an empty subset");
  return est.rate();
}

JointCounts::JointCounts(Table table) : table_(std::move(table)) {
  if ((table_.array() < 0).any()) throw DomainError("contingency counts must be nonnegative");
}

void JointCounts::add(Eigen::Index hidden, Eigen::Index observed, std::int64_t count) {
  if (hidden < 0 || hidden >= table_.rows() || observed < 0 || observed >= table_.cols())
    throw DomainError("contingency cell out of range");
  if (count < 0) throw DomainError("contingency counts must be nonnegative");
  table_(hidden, observed) += count;
}

JointCounts& JointCounts::operator+=(const JointCounts& other) {
  if (other.table_.rows() != table_.rows() || other.table_.cols() != table_.cols())
    throw DomainError("contingency table shapes differ");
  table_ += other.table_;
  return *this;
}

double empirical_mutual_information(const JointCounts& counts) {
  const auto n = static_cast<double>(counts.total());
  if (n <= 0) throw DomainError("mutual information of an empty table");
  const Eigen::MatrixXd p = counts.table().cast<double>() / n;
  const Eigen::VectorXd pa = p.rowwise().sum();
  const Eigen::RowVectorXd pe = p.colwise().sum();
  double mi = 0;
  for (Eigen::Index a = 0; a < p.rows(); ++a)
    for (Eigen::Index e = 0; e < p.cols(); ++e)
      if (p(a, e) > 0) mi += p(a, e) * std::log2(p(a, e) / (pa(a) * pe(e)));
  return std::max(0.0, mi);
}

Eigen::Index eve_observation_index(const adversary::EveRecord& rec) {
  if (rec.strategy == adversary::EveStrategy::IndividualUtb) return rec.probe_outcome.value_or(0);
  return 2 * static_cast<Eigen::Index>(rec.eve_basis) + rec.measured_outcome.value_or(0);
}

JointCounts eve_encoding_counts(const protocol::SessionTranscript& t) {
  JointCounts c(2, 4);
  for (const auto& rec : t.attack_events) c.add(t.modified.bits[rec.photon_index], eve_observation_index(rec));
  return c;
}

JointCounts bob_encoding_counts(const protocol::SessionTranscript& t) {
  JointCounts c(2, 2);
  for (const auto& p : t.photons) c.add(t.modified.bits[p.index], p.decoded_bit);
  return c;
}

RateEstimate eve_ciphertext_guess_hits(const protocol::SessionTranscript& t) {
  RateEstimate est;
  for (const auto& rec : t.attack_events) {
    const auto& p = t.photons[rec.photon_index];
    if (!rec.inferred_bit_guess || p.basis_key.basis() != rec.eve_basis) continue;
    // U1 swaps the two eigenstates of either basis.
    const Bit label = p.basis_key.eigen_index() ^ t.modified.bits[p.index];
    ++est.n;
    if (*rec.inferred_bit_guess == label) ++est.errors;
  }
  return est;
}

RateEstimate basis_guess_hits(const protocol::SessionTranscript& t) {
  RateEstimate est;
  for (std::size_t i = 0; i < t.basis_guesses.size(); ++i) {
    if (!t.basis_guesses[i]) continue;
    ++est.n;
    if (*t.basis_guesses[i] == t.photons[i].basis_key.basis()) ++est.errors;
  }
  return est;
}

double exact_outcome_probability(const quantum::Ketd& c, const adversary::AttackModel& attack,
                                 quantum::Basis bob_basis, Bit outcome) {
  using quantum::Basis;
  return std::visit(
      [&](const auto& a) -> double {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, adversary::NoAttack>) {
          return quantum::born_probability(c, bob_basis, outcome);
        } else if constexpr (std::is_same_v<T, adversary::InterceptResend>) {
          auto via = [&](Basis eve) {
            double p = 0;
            for (Bit k = 0; k < 2; ++k)
              p += quantum::born_probability(c, eve, k) *
                   quantum::born_probability(quantum::basis_state(eve, k), bob_basis, outcome);
            return p;
          };
          switch (a.strategy) {
            case adversary::IrBasisStrategy::FixedPlus: return via(Basis::Plus);
            case adversary::IrBasisStrategy::FixedCross: return via(Basis::Cross);
            case adversary::IrBasisStrategy::RandomMB:
              return 0.5 * (via(Basis::Plus) + via(Basis::Cross));
          }
          return 0.0;
        } else {
          const quantum::JointKetd j = quantum::utb_apply(c, a.theta, a.attack_basis);
          return quantum::probe_branch(j, bob_basis, outcome).squaredNorm();
        }
      },
      attack.channel);
}

}  // namespace rotp::analysis
