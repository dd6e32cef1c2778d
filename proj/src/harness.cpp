#include "rotp/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "rotp/analysis.hpp"
#include "rotp/transcript_io.hpp"

namespace rotp::harness {

namespace {

// Sub-stream indices under the run seed.
constexpr std::uint64_t kPadStream = 100;
constexpr std::uint64_t kMessageStream = 101;
constexpr std::uint64_t kSessionStream = 200;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

quantum::Basis parse_basis(const std::string& s, const char* flag) {
  if (s == "plus") return quantum::Basis::Plus;
  if (s == "cross") return quantum::Basis::Cross;
  throw ConfigError(std::string(flag) + " must be plus or cross, got '" + s + "'");
}

/// Writes through `fallback` unless spec.out names a file.
void emit(const RunSpec& spec, std::ostream& fallback, const std::function<void(std::ostream&)>& body) {
  if (!spec.out) {
    body(fallback);
    return;
  }
  std::ofstream os(*spec.out, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + spec.out->string());
  body(os);
}

template <typename F>
int guarded(std::ostream& log, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kError;
}

}  // namespace

adversary::AttackModel attack_from_spec(const RunSpec& spec, const keystore::BitString& message) {
  adversary::AttackModel model;
  if (spec.attack == "none") {
    model = adversary::AttackModel::none();
  } else if (spec.attack == "intercept_resend") {
    adversary::IrBasisStrategy s;
    if (spec.ir_basis == "random") {
      s = adversary::IrBasisStrategy::RandomMB;
    } else if (spec.ir_basis == "plus") {
      s = adversary::IrBasisStrategy::FixedPlus;
    } else if (spec.ir_basis == "cross") {
      s = adversary::IrBasisStrategy::FixedCross;
    } else {
      throw ConfigError("ir_basis must be random, plus or cross, got '" + spec.ir_basis + "'");
    }
    model = adversary::AttackModel::intercept_resend(s);
  } else if (spec.attack == "utb") {
    try {
      model = adversary::AttackModel::utb(spec.theta, parse_basis(spec.utb_basis, "utb_basis"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else {
    throw ConfigError("attack must be none, intercept_resend or utb, got '" + spec.attack + "'");
  }
  if (spec.known_plaintext) model = model.with_known_plaintext(message);
  return model;
}

keystore::BitString message_from_spec(const RunSpec& spec, std::uint64_t stream) {
  if (spec.message) {
    try {
      return io::string_to_bits(*spec.message);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("message: ") + e.what());
    }
  }
  RandomStream rng(derive_seed(spec.seed, stream));
  keystore::BitString m(spec.message_bits);
  for (auto& b : m) b = rng.bit() ? 1 : 0;
  return m;
}

protocol::SessionConfig session_config_from_spec(const RunSpec& spec, std::size_t n_message,
                                                 std::uint64_t session_seed) {
  protocol::SessionConfig c;
  c.n_message = n_message;
  c.n_sample = spec.samples.value_or(protocol::SessionConfig::default_samples(n_message));
  c.abort_threshold = spec.threshold;
  c.insecure_demo = spec.insecure_demo;
  c.seed = session_seed;
  c.validate();
  return c;
}

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const keystore::BitString message = message_from_spec(spec, kMessageStream);
    const protocol::SessionConfig config = session_config_from_spec(spec, message.size(), spec.seed);
    const adversary::AttackModel attack = attack_from_spec(spec, message);

    keystore::PadKey pad;
    if (spec.pad_in) {
      pad = keystore::load_pad(*spec.pad_in);
    } else {
      RandomStream rng(derive_seed(spec.seed, kPadStream));
      pad = keystore::generate_pad(std::max(spec.pad_bits, 2 * config.n_photons()), rng);
    }

    const protocol::SessionTranscript t = protocol::run_session(config, pad, message, attack);

    emit(spec, out, [&](std::ostream& os) {
      if (spec.format == OutputFormat::CSV) {
        io::write_photon_csv(os, t);
      } else {
        os << io::transcript_to_json(t, spec.reveal).dump(2) << '\n';
      }
    });

    const auto& r = t.error_report;
    log << (r.accepted ? "accepted" : "rejected: eavesdropping detected") << " error_rate=" << fmt(r.rate)
        << " checked=" << r.n_checked << " errors=" << r.n_errors;
    if (t.extracted_message) {
      log << " message_sha256=" << io::sha256_digest(*t.extracted_message);
      if (spec.reveal) log << " message=" << io::bits_to_string(*t.extracted_message);
    }
    log << '\n';

    if (t.recycled_pad && spec.pad_out) keystore::save_pad(*t.recycled_pad, *spec.pad_out);
    return r.accepted ? kAccepted : kRejected;
  });
}

std::vector<double> theta_grid(const RunSpec& spec) {
  if (!spec.thetas.empty()) {
    if (spec.thetas.size() < 2) throw ConfigError("theta grid needs at least 2 points");
    return spec.thetas;
  }
  if (spec.grid_points < 2) throw ConfigError("theta grid needs at least 2 points");
  std::vector<double> g(spec.grid_points);
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = std::numbers::pi / 4 * static_cast<double>(i) / static_cast<double>(g.size() - 1);
  g.back() = std::numbers::pi / 4;
  return g;
}

namespace {

SweepRow sweep_point(const RunSpec& spec, double theta, quantum::Basis basis, std::uint64_t seed) {
  protocol::SessionConfig c;
  c.n_message = 0;
  c.n_sample = spec.photons;
  c.seed = seed;
  RandomStream pad_rng(derive_seed(seed, kPadStream));
  const keystore::PadKey pad = keystore::generate_pad(2 * spec.photons, pad_rng);
  const auto t = protocol::run_session(c, pad, {}, adversary::AttackModel::utb(theta, basis));

  SweepRow row;
  row.theta = theta;
  row.d_theory = analysis::d_of_theta(theta);
  const auto matched = analysis::error_counts(t, analysis::ErrorSubset::MatchedAttackBasis);
  const auto overall = analysis::error_counts(t, analysis::ErrorSubset::All);
  row.d_matched_empirical = matched.rate();
  row.d_overall_empirical = overall.rate();
  row.n_matched = matched.n;
  row.n_overall = overall.n;
  row.mi_empirical = analysis::empirical_mutual_information(analysis::eve_encoding_counts(t));
  row.i0_at_d = analysis::i0_bound(row.d_theory);
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_theta(const RunSpec& spec) {
  const std::vector<double> grid = theta_grid(spec);
  const quantum::Basis basis = parse_basis(spec.utb_basis, "utb_basis");
  if (spec.photons == 0) throw ConfigError("photons per point must be positive");
  for (double th : grid) {
    try {
      quantum::check_attack_angle(th);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }

  std::vector<SweepRow> rows(grid.size());
  const unsigned jobs = std::max(1u, spec.jobs);
  for (std::size_t start = 0; start < grid.size(); start += jobs) {
    const std::size_t stop = std::min(grid.size(), start + jobs);
    std::vector<std::future<SweepRow>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                 sweep_point, std::cref(spec), grid[i], basis,
                                 derive_seed(spec.seed, i)));
    }
    for (std::size_t i = start; i < stop; ++i) rows[i] = batch[i - start].get();
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "theta,D_theory,D_matched_empirical,D_overall_empirical,MI_empirical,I0_at_D\n";
  for (const auto& r : rows) {
    os << fmt(r.theta) << ',' << fmt(r.d_theory) << ',' << fmt(r.d_matched_empirical) << ','
       << fmt(r.d_overall_empirical) << ',' << fmt(r.mi_empirical) << ',' << fmt(r.i0_at_d) << '\n';
  }
}

int cmd_sweep_theta(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const auto rows = sweep_theta(spec);
    emit(spec, out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
    log << "sweep: " << rows.size() << " points, " << spec.photons << " photons each\n";
    return kAccepted;
  });
}

std::vector<double> d_grid(const RunSpec& spec) {
  if (!spec.d_grid.empty()) return spec.d_grid;
  if (spec.d_points < 2) throw ConfigError("bound grid needs at least 2 points");
  if (!(spec.d_min <= spec.d_max)) throw ConfigError("d_min must not exceed d_max");
  std::vector<double> g(spec.d_points);
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = spec.d_min + (spec.d_max - spec.d_min) * static_cast<double>(i) /
                            static_cast<double>(g.size() - 1);
  return g;
}

int cmd_bounds(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const auto grid = d_grid(spec);
    const auto rows = analysis::bound_table(grid);
    emit(spec, out, [&](std::ostream& os) { analysis::write_bound_csv(os, rows); });
    return kAccepted;
  });
}

RecycleDemoReport recycle_demo(const RunSpec& spec) {
  if (spec.sessions < 1) throw ConfigError("recycle demo needs at least one session");
  const std::size_t n_message = spec.message ? spec.message->size() : spec.message_bits;
  const std::size_t n_sample = spec.samples.value_or(protocol::SessionConfig::default_samples(n_message));

  keystore::PadKey pad;
  if (spec.pad_in) {
    pad = keystore::load_pad(*spec.pad_in);
  } else {
    RandomStream rng(derive_seed(spec.seed, kPadStream));
    const std::size_t need = 2 * (n_message + n_sample) * spec.sessions;
    pad = keystore::generate_pad(spec.pad_bits ? spec.pad_bits : need, rng);
  }

  RecycleDemoReport rep;
  rep.initial_pad_bits = pad.size();
  rep.all_messages_exact = true;
  std::set<std::size_t> announced_so_far;

  for (std::size_t k = 1; k <= spec.sessions; ++k) {
    const keystore::BitString message = message_from_spec(spec, kMessageStream + 1000 * k);
    const std::uint64_t seed = derive_seed(spec.seed, kSessionStream + k);
    const protocol::SessionConfig config = session_config_from_spec(spec, message.size(), seed);
    const bool attacked = spec.attack_session && *spec.attack_session == k;
    const adversary::AttackModel attack =
        attacked ? attack_from_spec(spec, message) : adversary::AttackModel::none();

    protocol::SessionTranscript t;
    try {
      t = protocol::run_session(config, pad, message, attack);
    } catch (const PadExhausted& e) {
      throw PadExhausted("session " + std::to_string(k) + ": " + e.what());
    }

    for (std::size_t bit : t.used_origin_bits)
      if (announced_so_far.count(bit)) ++rep.reused_announced_bits;
    announced_so_far.insert(t.announced_origin_bits.begin(), t.announced_origin_bits.end());

    DemoSession s;
    s.session = k;
    s.pad_bits_before = pad.size();
    s.generation = pad.generation;
    s.attacked = attacked;
    s.accepted = t.error_report.accepted;
    s.error_rate = t.error_report.rate;
    s.message_exact = t.extracted_message && *t.extracted_message == message;
    if (s.accepted && !s.message_exact) rep.all_messages_exact = false;

    if (!s.accepted) {
      s.pad_bits_after = pad.size();
      rep.sessions.push_back(s);
      rep.halted = true;
      break;
    }
    pad = *t.recycled_pad;
    s.pad_bits_after = pad.size();
    rep.sessions.push_back(s);
  }
  rep.final_pad_bits = pad.size();
  return rep;
}

int cmd_recycle_demo(const RunSpec& spec, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const RecycleDemoReport rep = recycle_demo(spec);
    emit(spec, out, [&](std::ostream& os) {
      os << "session,pad_bits_before,pad_bits_after,generation,attacked,accepted,error_rate,"
            "message_exact\n";
      for (const auto& s : rep.sessions) {
        os << s.session << ',' << s.pad_bits_before << ',' << s.pad_bits_after << ','
           << s.generation << ',' << int(s.attacked) << ',' << int(s.accepted) << ','
           << fmt(s.error_rate) << ',' << int(s.message_exact) << '\n';
      }
    });
    log << "initial_pad_bits=" << rep.initial_pad_bits << " final_pad_bits=" << rep.final_pad_bits
        << " sessions_run=" << rep.sessions.size() << " halted=" << (rep.halted ? "yes" : "no")
        << " all_messages_exact=" << (rep.all_messages_exact ? "yes" : "no")
        << " reused_announced_bits=" << rep.reused_announced_bits << '\n';
    return rep.halted ? kRejected : kAccepted;
  });
}

}  // namespace rotp::harness
