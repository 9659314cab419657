#include <doctest.h>

#include <cmath>
#include <sstream>

#include "atomchain/error.hpp"
#include "atomchain/protocols.hpp"

using namespace atomchain;

namespace {

bool throws_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  }
  return false;
}

TrajectoryRecord width_record(const std::vector<double>& widths) {
  TrajectoryRecord r;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    r.t.push_back(static_cast<double>(i));
    r.width_rms.push_back(widths[i]);
    r.width_fit.push_back(2.0 * widths[i]);
  }
  return r;
}

// A short wavepacket run on a small chain, no probe.
ProtocolConfig small_packet(Scenario scenario, ThetaSchedule schedule) {
  ProtocolConfig c = default_config(scenario);
  c.chain.N = 60;
  c.schedule = std::move(schedule);
  c.probe_enabled = false;
  c.initial.kind = InitialKind::Wavepacket;
  c.initial.width_sites = 6.0;
  c.initial.center_site = 20;
  c.integration.dt = 8e-3;
  c.integration.stride = 50;
  c.integration.fit_width = false;
  return c;
}

}  // namespace

TEST_CASE("dispersion report") {
  const auto flat = dispersion_report(width_record({3, 3, 3, 3, 3}), 0.0, 4.0);
  CHECK(flat.fractional_change == 0.0);
  CHECK_FALSE(flat.rephasing);
  CHECK(flat.width_min == 3.0);

  const auto grown = dispersion_report(width_record({2, 2.02, 2.05, 2.08, 2.1}), 0.0, 4.0);
  CHECK(grown.fractional_change == doctest::Approx(0.05));
  CHECK_FALSE(grown.rephasing);

  const auto breathing = dispersion_report(width_record({1, 2, 4, 3, 2, 1.5}), 1.0, 4.0);
  CHECK(breathing.width_trap_start == 2.0);
  CHECK(breathing.width_release == 2.0);
  CHECK(breathing.width_min == 2.0);
  CHECK(breathing.rephasing);

  CHECK(dispersion_report(width_record({1, 2, 4}), 0.0, 2.0, true).width_trap_start == 2.0);
  CHECK(throws_kind(ErrorKind::InsufficientSamples,
                    [] { dispersion_report(width_record({1, 2, 4}), 1.5, 1.6); }));
}

TEST_CASE("default configs and windows") {
  const ProtocolConfig release = default_config(Scenario::TrapRelease);
  release.validate();
  CHECK(release.schedule.duration() == doctest::Approx(640.0));
  CHECK(release.chain.N == 200);
  CHECK(release.output.prefix == "trap_release");
  CHECK(release.warnings().empty());

  const PhaseWindows w = phase_windows(release);
  CHECK(w.has_trap);
  CHECK(w.pre_begin == doctest::Approx(release.probe.center + 3.0 * release.probe.width));
  CHECK(w.pre_end == doctest::Approx(200.0));
  CHECK(w.trap_begin == doctest::Approx(300.0));
  CHECK(w.trap_end == doctest::Approx(480.0));
  CHECK(w.post_begin == doctest::Approx(580.0));
  CHECK(w.post_end == doctest::Approx(640.0));
  CHECK(w.ramps.size() == 2);

  const ProtocolConfig reflect = default_config(Scenario::TrapReflect);
  CHECK(reflect.schedule.theta(640.0) == doctest::Approx(0.8 * kPi));

  const PhaseWindows free = phase_windows(default_config(Scenario::Free));
  CHECK_FALSE(free.has_trap);
  CHECK(free.pre_end == doctest::Approx(400.0));

  CHECK_FALSE(default_config(Scenario::BandSweep).probe_enabled);
}

TEST_CASE("scenario names") {
  for (Scenario s : {Scenario::Free, Scenario::TrapRelease, Scenario::TrapReflect, Scenario::BandSweep}) {
    CHECK(parse_scenario(to_string(s)) == s);
  }
  CHECK(parse_scenario("trap-reflect") == Scenario::TrapReflect);
  CHECK(throws_kind(ErrorKind::ValidationError, [] { parse_scenario("trap"); }));
}

TEST_CASE("config validation") {
  ProtocolConfig c = default_config(Scenario::TrapRelease);
  c.probe.width = -1.0;
  try {
    c.validate();
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ValidationError);
    CHECK(std::string(e.what()).find("probe.width must be > 0") != std::string::npos);
  }
  c = default_config(Scenario::TrapRelease);
  c.schedule = default_trap_schedule(0.8 * kPi);
  CHECK(throws_kind(ErrorKind::ValidationError, [&] { c.validate(); }));
  c = default_config(Scenario::TrapRelease);
  c.integration.t_end = 1000.0;
  CHECK(throws_kind(ErrorKind::ValidationError, [&] { c.validate(); }));
  c = default_config(Scenario::Free);
  c.chain.N = 0;
  CHECK(throws_kind(ErrorKind::ValidationError, [&] { c.validate(); }));

  c = default_config(Scenario::Free);
  c.chain.a = 0.6;
  REQUIRE(c.warnings().size() == 1);
  CHECK(c.warnings()[0].find("no subradiant") != std::string::npos);
}

TEST_CASE("free packet moves steadily") {
  const ProtocolConfig c = small_packet(Scenario::Free, ThetaSchedule::constant(0.0, 30.0));
  const ProtocolResult r = run_protocol(c);
  REQUIRE(r.record);
  const auto& cen = r.record->centroid;
  for (std::size_t i = 1; i < cen.size(); ++i) CHECK(cen[i] > cen[i - 1]);
  REQUIRE(r.summary.v_pre);
  CHECK(*r.summary.v_pre > 0.05);
  CHECK_FALSE(r.summary.v_trap);
  CHECK_FALSE(r.summary.hold_ok);
}

TEST_CASE("zero-duration trap reduces to free propagation") {
  const ThetaSchedule degenerate({Hold{0.0, 15.0}, CosineRamp{0.0, kPi / 2, 0.0},
                                  Oscillate{kPi / 2, 0.2, 10.0, 0}, CosineRamp{kPi / 2, 0.0, 0.0},
                                  Hold{0.0, 15.0}});
  const auto trapped = run_protocol(small_packet(Scenario::TrapRelease, degenerate));
  const auto free = run_protocol(small_packet(Scenario::Free, ThetaSchedule::constant(0.0, 30.0)));
  REQUIRE(trapped.record);
  REQUIRE(free.record);
  CHECK(trapped.record->t == free.record->t);
  CHECK(trapped.record->centroid == free.record->centroid);
  CHECK(trapped.record->norm2 == free.record->norm2);
}

TEST_CASE("short trap slows and releases the packet") {
  // Trap on a small chain with a fast schedule; a strict adiabaticity factor flags it.
  const ThetaSchedule s({Hold{0.0, 20.0}, CosineRamp{0.0, kPi / 2, 5.0}, Hold{kPi / 2, 20.0},
                         CosineRamp{kPi / 2, 0.0, 5.0}, Hold{0.0, 20.0}});
  ProtocolConfig c = small_packet(Scenario::TrapRelease, s);
  c.chain.N = 80;
  c.integration.stride = 25;
  c.thresholds.adiabatic_factor = 1000.0;
  const ProtocolResult r = run_protocol(c);
  REQUIRE(r.summary.v_pre);
  REQUIRE(r.summary.v_trap);
  REQUIRE(r.summary.v_post);
  CHECK(std::abs(*r.summary.v_trap) < 0.1 * std::abs(*r.summary.v_pre));
  CHECK(*r.summary.v_post > 0.0);
  REQUIRE(r.summary.exchange_correlation);
  CHECK(*r.summary.exchange_correlation < -0.9);
  bool adiabatic_warning = false;
  for (const auto& w : r.summary.warnings) adiabatic_warning |= w.find("not adiabatic") != std::string::npos;
  CHECK(adiabatic_warning);

  std::ostringstream out;
  write_summary(out, r.summary);
  const std::string text = out.str();
  for (const char* key : {"scenario = trap_release", "peak_population = ", "v_pre = ", "v_trap = ",
                          "v_post = ", "width_fractional_change = ", "exchange_correlation = ",
                          "hold_ok = ", "release_ok = ", "reflect_ok = na", "width_ok = ",
                          "exchange_ok = true", "warning.0 = "}) {
    CHECK_MESSAGE(text.find(key) != std::string::npos, std::string(key));
  }
}

TEST_CASE("run_protocol is deterministic and batches agree") {
  const ProtocolConfig a = small_packet(Scenario::Free, ThetaSchedule::constant(0.0, 10.0));
  ProtocolConfig b = a;
  b.initial.center_site = 30;
  const auto batch = run_batch({a, b}, 2);
  const auto single = run_protocol(a);
  REQUIRE(batch.size() == 2);
  CHECK(batch[0].record->centroid == single.record->centroid);
  CHECK(batch[1].record->centroid != single.record->centroid);
}

TEST_CASE("band sweep scenario returns bands only") {
  ProtocolConfig c = default_config(Scenario::BandSweep);
  c.grid.nodes = 200;
  const ProtocolResult r = run_protocol(c);
  CHECK_FALSE(r.record);
  REQUIRE(r.bands);
  CHECK(r.bands->points.size() + r.bands->dropped.size() == 200);
}

TEST_CASE("minimum band gap") {
  ChainParams p;
  ControlField f;
  const double gap = minimum_band_gap(p, f, 0.0, kPi / 2);
  CHECK(gap > 0.0);
  CHECK(gap <= 0.5 * f.delta + 1e-12);
}
