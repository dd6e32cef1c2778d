#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <type_traits>

#include "oracle.hpp"
#include "rotp/adversary.hpp"
#include "rotp/analysis.hpp"
#include "rotp/protocol.hpp"

using namespace rotp;
using namespace rotp::adversary;
using quantum::basis_state;

namespace {

const double kPi = std::numbers::pi;

protocol::SessionTranscript session(const AttackModel& attack, std::size_t n_sample,
                                    std::uint64_t seed, std::size_t n_message = 0) {
  protocol::SessionConfig c;
  c.n_message = n_message;
  c.n_sample = n_sample;
  c.seed = seed;
  RandomStream rng(derive_seed(seed, 500));
  const auto pad = keystore::generate_pad(2 * c.n_photons(), rng);
  keystore::BitString msg(n_message);
  for (auto& b : msg) b = rng.bit();
  return protocol::run_session(c, pad, msg, attack);
}

}  // namespace

// The attack entry point sees only the model, the stream position, the
// photon and Eve's own randomness.
static_assert(std::is_invocable_r_v<AttackOutcome, decltype(&attack_photon), const AttackModel&,
                                    std::size_t, const Ketd&, RandomStream&>);

TEST_CASE("attack_photon dispatch examples") {
  RandomStream rng(1);
  const Ketd d = basis_state(Basis::Cross, 1);
  auto none = attack_photon(AttackModel::none(), 0, d, rng);
  CHECK_FALSE(none.record);
  CHECK((std::get<Ketd>(none.forwarded) - d).norm() == 0.0);

  const Ketd u = basis_state(Basis::Cross, 0);
  auto zero = attack_photon(AttackModel::utb(0.0, Basis::Plus), 3, u, rng);
  REQUIRE(zero.record);
  CHECK(zero.record->photon_index == 3);
  const auto& joint = std::get<JointKetd>(zero.forwarded);
  CHECK((joint - quantum::tensor<double>(u, basis_state(Basis::Plus, 0))).norm() < 1e-12);

  const Ketd h = basis_state(Basis::Plus, 0);
  for (int i = 0; i < 100; ++i) {
    auto ir = attack_photon(AttackModel::intercept_resend(IrBasisStrategy::FixedPlus), 0, h, rng);
    CHECK(*ir.record->measured_outcome == 0);
    CHECK((std::get<Ketd>(ir.forwarded) - h).norm() < 1e-12);
  }
  CHECK_THROWS_AS(AttackModel::utb(1.0, Basis::Plus), DomainError);
}

TEST_CASE("intercept_resend matched and mismatched bases") {
  RandomStream rng(2);
  const Ketd u = basis_state(Basis::Cross, 0);
  const int n = 100000;
  int bob_err_matched = 0, bob_err_mismatched = 0;
  for (int i = 0; i < n; ++i) {
    auto m = intercept_resend(IrBasisStrategy::FixedCross, 0, u, rng);
    bob_err_matched += quantum::measure(std::get<Ketd>(m.forwarded), Basis::Cross, rng).outcome;
    auto x = intercept_resend(IrBasisStrategy::FixedPlus, 0, u, rng);
    bob_err_mismatched += quantum::measure(std::get<Ketd>(x.forwarded), Basis::Cross, rng).outcome;
  }
  CHECK(bob_err_matched == 0);
  const double want = 1 - oracle::bob_after_ir(oracle::eigenstate(1, 0), 0, 1, 0);
  CHECK(want == doctest::Approx(0.5));
  CHECK(std::abs(bob_err_mismatched / double(n) - want) <= oracle::three_sigma(want, n));
}

TEST_CASE("random-basis intercept-resend averages 1/4 error") {
  CHECK(oracle::intercept_resend_error_rate() == doctest::Approx(0.25).epsilon(1e-14));
  const auto t = session(AttackModel::intercept_resend(IrBasisStrategy::RandomMB), 20000, 3);
  const double rate = analysis::empirical_error_rate(t, analysis::ErrorSubset::SampleBits);
  CHECK(std::abs(rate - 0.25) <= oracle::three_sigma(0.25, 20000));
}

TEST_CASE("intercept-resend session detection probability is 1 - (3/4)^Ns") {
  const std::size_t ns = 4;
  const int trials = 4000;
  int detected = 0;
  for (int i = 0; i < trials; ++i)
    detected += !session(AttackModel::intercept_resend(IrBasisStrategy::RandomMB), ns, 1000 + i)
                     .error_report.accepted;
  const double want = 1 - std::pow(0.75, ns);
  CHECK(std::abs(detected / double(trials) - want) <= oracle::three_sigma(want, trials));
}

TEST_CASE("U_TB error law on the attacked basis and overall") {
  const double theta = kPi / 4;
  CHECK(oracle::utb_error_rate(theta, 0, true) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(oracle::utb_error_rate(theta, 0, false) ==
        doctest::Approx((std::pow(std::sin(theta), 2) + 1 - std::cos(theta)) / 4).epsilon(1e-12));
  CHECK(oracle::utb_error_rate(theta, 0, false) == doctest::Approx(0.1982233047).epsilon(1e-9));

  for (Basis b : {Basis::Plus, Basis::Cross}) {
    const auto t = session(AttackModel::utb(theta, b), 40000, 4 + static_cast<int>(b));
    const auto matched = analysis::error_counts(t, analysis::ErrorSubset::MatchedAttackBasis);
    const auto all = analysis::error_counts(t, analysis::ErrorSubset::All);
    CHECK(std::abs(matched.rate() - 0.25) <= oracle::three_sigma(0.25, matched.n));
    const double overall = oracle::utb_error_rate(theta, static_cast<int>(b), false);
    CHECK(std::abs(all.rate() - overall) <= oracle::three_sigma(overall, all.n));
  }
}

TEST_CASE("U_TB at theta = 0 carries no information") {
  const auto t = session(AttackModel::utb(0.0, Basis::Plus), 5000, 6);
  CHECK(analysis::empirical_error_rate(t, analysis::ErrorSubset::All) == 0.0);
  for (const auto& r : t.attack_events) {
    CHECK(*r.probe_outcome == 0);
    CHECK(std::abs(std::abs((*r.probe_state)(0)) - 1) < 1e-12);
  }
  CHECK(analysis::empirical_mutual_information(analysis::eve_encoding_counts(t)) == 0.0);
}

TEST_CASE("utb record carries the Bob-conditioned probe state") {
  // |V> attacked at pi/4 in plus: Bob sees 0 -> probe |1>; Bob sees 1 -> probe |0>.
  RandomStream rng(7);
  for (int i = 0; i < 200; ++i) {
    auto out = utb_intercept(basis_state(Basis::Plus, 1), kPi / 4, Basis::Plus, 0);
    auto m = quantum::measure_photon_of_joint(std::get<JointKetd>(out.forwarded), Basis::Plus, rng);
    finish_utb_record(*out.record, m.probe, rng);
    CHECK(*out.record->probe_outcome == (m.outcome == 0 ? 1 : 0));
  }
}

TEST_CASE("disturbance and Eve's ciphertext knowledge both grow with theta") {
  double prev_err = -1, prev_acc = -1;
  for (int i = 0; i <= 4; ++i) {
    const double theta = kPi / 16 * i;
    const auto t = session(AttackModel::utb(theta, Basis::Plus), 40000, 20 + i);
    const auto err = analysis::error_counts(t, analysis::ErrorSubset::MatchedAttackBasis);
    const auto acc = analysis::eve_ciphertext_guess_hits(t);
    // Exact accuracy 1/2 + sin^2/2 on the attacked basis; error sin^2/2.
    const double s2 = std::pow(std::sin(theta), 2);
    CHECK(std::abs(acc.rate() - (0.5 + s2 / 2)) <= oracle::three_sigma(0.5 + s2 / 2, acc.n) + 1e-12);
    // Non-decreasing up to sampling noise.
    CHECK(err.rate() >= prev_err - oracle::three_sigma(0.25, err.n));
    CHECK(acc.rate() >= prev_acc - oracle::three_sigma(0.5, acc.n));
    prev_err = err.rate();
    prev_acc = acc.rate();
  }
}

TEST_CASE("known_plaintext_infer") {
  SUBCASE("no inner attack, no guesses") {
    const auto t = session(AttackModel::none().with_known_plaintext({}), 100, 8, 0);
    for (const auto& g : t.basis_guesses) CHECK_FALSE(g);
  }
  SUBCASE("intercept-resend: enumerated likelihoods tie, accuracy stays at 1/2 < 1") {
    // With the encoding bit known, each basis keeps two equiprobable keys, so
    // the summed likelihood of Eve's outcome is 1/2 + 0 vs 1/4 + 1/4.
    const Ketd c = basis_state(Basis::Plus, 0);
    EveRecord rec;
    rec.strategy = EveStrategy::InterceptResend;
    rec.eve_basis = Basis::Plus;
    rec.measured_outcome = 0;
    double plus = 0, cross = 0;
    for (Bit b0 = 0; b0 < 2; ++b0)
      for (Bit b1 = 0; b1 < 2; ++b1) {
        const quantum::BasisKeyPair k(b0, b1);
        const double l = observation_likelihood(rec, quantum::state_from_basis_key(k));
        (k.basis() == Basis::Plus ? plus : cross) += l;
      }
    CHECK(plus == doctest::Approx(cross));
    (void)c;

    keystore::BitString msg(2000);
    RandomStream rng(9);
    for (auto& b : msg) b = rng.bit();
    protocol::SessionConfig cfg;
    cfg.n_message = 2000;
    cfg.n_sample = 2000;
    cfg.seed = 10;
    const auto pad = keystore::generate_pad(8000, rng);
    const auto t = protocol::run_session(
        cfg, pad, msg,
        AttackModel::intercept_resend(IrBasisStrategy::RandomMB).with_known_plaintext(msg));
    const auto hits = analysis::basis_guess_hits(t);
    CHECK(hits.n == 4000);
    CHECK(hits.rate() < 1.0);
    CHECK(std::abs(hits.rate() - 0.5) <= oracle::three_sigma(0.5, hits.n));
  }
  SUBCASE("theta = 0 U_TB: chance level") {
    keystore::BitString msg(3000, 0);
    protocol::SessionConfig cfg;
    cfg.n_message = 3000;
    cfg.n_sample = 1000;
    cfg.seed = 11;
    RandomStream rng(12);
    const auto pad = keystore::generate_pad(8000, rng);
    const auto t = protocol::run_session(
        cfg, pad, msg, AttackModel::utb(0.0, Basis::Plus).with_known_plaintext(msg));
    const auto hits = analysis::basis_guess_hits(t);
    CHECK(hits.n == 4000);
    CHECK(std::abs(hits.rate() - 0.5) <= oracle::three_sigma(0.5, hits.n));
  }
}

TEST_CASE("known_plaintext_infer reconstructs encodings from the public record") {
  EveRecord rec;
  rec.photon_index = 1;
  rec.strategy = EveStrategy::InterceptResend;
  rec.eve_basis = Basis::Cross;
  rec.measured_outcome = 1;
  // Photon 1 is a public sample; the known message covers photons 0 and 2.
  auto g = known_plaintext_infer({rec}, {0, 1}, {1}, {1}, 3);
  REQUIRE(g.size() == 3);
  CHECK_FALSE(g[0]);
  REQUIRE(g[1]);
  CHECK(*g[1] == Basis::Cross);
  CHECK_THROWS_AS(known_plaintext_infer({rec}, {}, {5}, {1}, 3), DomainError);
}

TEST_CASE("describe") {
  CHECK(AttackModel::none().describe() == "none");
  CHECK(AttackModel::intercept_resend(IrBasisStrategy::FixedCross).describe() ==
        "intercept_resend(cross)");
  CHECK(AttackModel::utb(0.5, Basis::Plus).with_known_plaintext({}).describe() ==
        "utb(theta=0.5, basis=plus)+known_plaintext");
}
