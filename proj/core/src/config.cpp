#include "atomchain/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "atomchain/csv.hpp"
#include "atomchain/error.hpp"

#ifndef ATOMCHAIN_VERSION
#define ATOMCHAIN_VERSION "0.0.0"
#endif

namespace atomchain {

std::string_view version() noexcept { return ATOMCHAIN_VERSION; }

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // 1-based column of the value
};

[[noreturn]] void parse_fail(int line, int column, const std::string& msg) {
  throw Error(ErrorKind::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_plain(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// "x", "xpi", "pi", "-pi", "x/y", "xpi/y".
std::optional<double> parse_factor(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.substr(s.size() - 2) == "pi") {
    std::string_view head = trim(s.substr(0, s.size() - 2));
    if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
    if (head.empty() || head == "+") return kPi;
    if (head == "-") return -kPi;
    const auto v = parse_plain(head);
    if (!v) return std::nullopt;
    return *v * kPi;
  }
  return parse_plain(s);
}

std::optional<double> parse_real_text(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) return parse_factor(s);
  const auto num = parse_factor(s.substr(0, slash));
  const auto den = parse_factor(s.substr(slash + 1));
  if (!num || !den || *den == 0.0) return std::nullopt;
  return *num / *den;
}

double real_of(const Entry& e, int offset, std::string_view text) {
  const auto v = parse_real_text(text);
  if (!v || !std::isfinite(*v)) {
    parse_fail(e.line, e.column + offset, "expected a real number, got '" + std::string(trim(text)) + "'");
  }
  return *v;
}

long integer_of(const Entry& e, int offset, std::string_view text) {
  text = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    parse_fail(e.line, e.column + offset, "expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool bool_of(const Entry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no") return false;
  parse_fail(e.line, e.column, "expected true or false, got '" + e.value + "'");
}

ThetaSchedule schedule_of(const Entry& e) {
  std::vector<Segment> segments;
  const std::string& s = e.value;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find(';', pos);
    if (end == std::string::npos) end = s.size();
    const std::string_view item_raw(s.data() + pos, end - pos);
    const auto lead = item_raw.find_first_not_of(" \t");
    if (lead == std::string_view::npos) {
      pos = end + 1;
      continue;
    }
    const int col = static_cast<int>(pos + lead);
    const std::string_view item = trim(item_raw);
    const auto open = item.find('(');
    if (open == std::string_view::npos || item.back() != ')') {
      parse_fail(e.line, e.column + col, "schedule segment must look like name(args)");
    }
    const std::string name(trim(item.substr(0, open)));
    std::vector<std::pair<std::string_view, int>> args;
    std::size_t a = open + 1;
    while (a < item.size() - 1) {
      std::size_t comma = item.find(',', a);
      if (comma == std::string_view::npos || comma > item.size() - 1) comma = item.size() - 1;
      args.emplace_back(item.substr(a, comma - a), col + static_cast<int>(a));
      a = comma + 1;
    }
    auto need = [&](std::size_t n) {
      if (args.size() != n) {
        parse_fail(e.line, e.column + col,
                   name + " takes " + std::to_string(n) + " arguments, got " +
                       std::to_string(args.size()));
      }
    };
    auto r = [&](std::size_t i) { return real_of(e, args[i].second, args[i].first); };
    if (name == "hold") {
      need(2);
      segments.push_back(Hold{r(0), r(1)});
    } else if (name == "cosine_ramp" || name == "ramp") {
      need(3);
      segments.push_back(CosineRamp{r(0), r(1), r(2)});
    } else if (name == "oscillate") {
      need(4);
      segments.push_back(
          Oscillate{r(0), r(1), r(2), static_cast<int>(integer_of(e, args[3].second, args[3].first))});
    } else {
      parse_fail(e.line, e.column + col, "unknown schedule segment '" + name + "'");
    }
    pos = end + 1;
  }
  if (segments.empty()) parse_fail(e.line, e.column, "schedule is empty");
  return ThetaSchedule(std::move(segments));
}

template <typename Enum>
Enum enum_of(const Entry& e, std::initializer_list<std::pair<const char*, Enum>> names) {
  std::string options;
  for (const auto& [n, v] : names) {
    if (e.value == n) return v;
    options += options.empty() ? n : std::string(", ") + n;
  }
  parse_fail(e.line, e.column, "expected one of " + options + ", got '" + e.value + "'");
}

std::string schedule_text(const ThetaSchedule& s) {
  std::string out;
  for (const Segment& seg : s.segments()) {
    if (!out.empty()) out += "; ";
    if (const auto* h = std::get_if<Hold>(&seg)) {
      out += "hold(" + format_double(h->theta) + ", " + format_double(h->duration) + ")";
    } else if (const auto* r = std::get_if<CosineRamp>(&seg)) {
      out += "cosine_ramp(" + format_double(r->from) + ", " + format_double(r->to) + ", " +
             format_double(r->duration) + ")";
    } else {
      const auto& o = std::get<Oscillate>(seg);
      out += "oscillate(" + format_double(o.center) + ", " + format_double(o.amplitude) + ", " +
             format_double(o.period) + ", " + std::to_string(o.cycles) + ")";
    }
  }
  return out;
}

}  // namespace

ParsedConfig parse_config_text(std::string_view text) {
  std::map<std::string, Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    const int key_col = static_cast<int>(line.find_first_not_of(" \t") + 1);
    if (eq == std::string_view::npos) parse_fail(line_no, key_col, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) parse_fail(line_no, key_col, "missing key before '='");
    const std::string_view rest = line.substr(eq + 1);
    const auto vstart = rest.find_first_not_of(" \t");
    if (vstart == std::string_view::npos) parse_fail(line_no, static_cast<int>(eq + 2), "missing value for '" + key + "'");
    Entry entry{std::string(trim(rest)), line_no, static_cast<int>(eq + 1 + vstart + 1)};
    if (entries.count(key)) parse_fail(line_no, key_col, "duplicate key '" + key + "'");
    entries.emplace(key, std::move(entry));
    if (end == text.size()) break;
  }

  Scenario scenario = Scenario::TrapRelease;
  if (auto it = entries.find("scenario"); it != entries.end()) {
    try {
      scenario = parse_scenario(it->second.value);
    } catch (const Error& e) {
      parse_fail(it->second.line, it->second.column, e.what());
    }
    entries.erase(it);
  } else {
    throw Error(ErrorKind::ValidationError, "scenario must be set");
  }

  ParsedConfig parsed;
  ProtocolConfig& c = parsed.config;
  c = default_config(scenario);

  using Setter = void (*)(ProtocolConfig&, const Entry&);
  static const std::map<std::string, Setter> setters = {
      {"chain.N", [](ProtocolConfig& c, const Entry& e) { c.chain.N = static_cast<int>(integer_of(e, 0, e.value)); }},
      {"chain.a", [](ProtocolConfig& c, const Entry& e) { c.chain.a = real_of(e, 0, e.value); }},
      {"chain.gamma0", [](ProtocolConfig& c, const Entry& e) { c.chain.gamma0 = real_of(e, 0, e.value); }},
      {"chain.k0", [](ProtocolConfig& c, const Entry& e) { c.chain.k0 = real_of(e, 0, e.value); }},
      {"field.delta", [](ProtocolConfig& c, const Entry& e) { c.field.delta = real_of(e, 0, e.value); }},
      {"field.theta", [](ProtocolConfig& c, const Entry& e) { c.field.theta = real_of(e, 0, e.value); }},
      {"field.k_c", [](ProtocolConfig& c, const Entry& e) { c.field.k_c = real_of(e, 0, e.value); }},
      {"field.Delta", [](ProtocolConfig& c, const Entry& e) { c.field.Delta = real_of(e, 0, e.value); }},
      {"schedule", [](ProtocolConfig& c, const Entry& e) { c.schedule = schedule_of(e); }},
      {"probe.enabled", [](ProtocolConfig& c, const Entry& e) { c.probe_enabled = bool_of(e); }},
      {"probe.site", [](ProtocolConfig& c, const Entry& e) { c.probe.site = static_cast<int>(integer_of(e, 0, e.value)); }},
      {"probe.amplitude", [](ProtocolConfig& c, const Entry& e) { c.probe.amplitude = real_of(e, 0, e.value); }},
      {"probe.center", [](ProtocolConfig& c, const Entry& e) { c.probe.center = real_of(e, 0, e.value); }},
      {"probe.width", [](ProtocolConfig& c, const Entry& e) { c.probe.width = real_of(e, 0, e.value); }},
      {"probe.detuning", [](ProtocolConfig& c, const Entry& e) { c.probe.detuning = real_of(e, 0, e.value); }},
      {"probe.polarization", [](ProtocolConfig& c, const Entry& e) {
         c.probe.polarization = enum_of<Polarization>(
             e, {{"linear", Polarization::Linear}, {"sigma_plus", Polarization::SigmaPlus},
                 {"sigma_minus", Polarization::SigmaMinus}});
       }},
      {"probe.detuning_reference", [](ProtocolConfig& c, const Entry& e) {
         c.probe.reference = enum_of<DetuningReference>(
             e, {{"bare_transition", DetuningReference::BareTransition},
                 {"shift_frame", DetuningReference::ShiftFrame}});
       }},
      {"initial.kind", [](ProtocolConfig& c, const Entry& e) {
         c.initial.kind = enum_of<InitialKind>(
             e, {{"vacuum", InitialKind::Vacuum}, {"wavepacket", InitialKind::Wavepacket}});
       }},
      {"initial.band", [](ProtocolConfig& c, const Entry& e) {
         c.initial.band = enum_of<Band>(e, {{"lower", Band::Lower}, {"upper", Band::Upper}});
       }},
      {"initial.k_center", [](ProtocolConfig& c, const Entry& e) { c.initial.k_center = real_of(e, 0, e.value); }},
      {"initial.width", [](ProtocolConfig& c, const Entry& e) { c.initial.width_sites = real_of(e, 0, e.value); }},
      {"initial.center_site", [](ProtocolConfig& c, const Entry& e) { c.initial.center_site = static_cast<int>(integer_of(e, 0, e.value)); }},
      {"integration.dt", [](ProtocolConfig& c, const Entry& e) { c.integration.dt = real_of(e, 0, e.value); }},
      {"integration.stride", [](ProtocolConfig& c, const Entry& e) { c.integration.stride = static_cast<int>(integer_of(e, 0, e.value)); }},
      {"integration.t_end", [](ProtocolConfig& c, const Entry& e) { c.integration.t_end = real_of(e, 0, e.value); }},
      {"integration.fit_width", [](ProtocolConfig& c, const Entry& e) { c.integration.fit_width = bool_of(e); }},
      {"integration.keep_sites", [](ProtocolConfig& c, const Entry& e) { c.integration.keep_sites = bool_of(e); }},
      {"grid.nodes", [](ProtocolConfig& c, const Entry& e) { c.grid.nodes = static_cast<int>(integer_of(e, 0, e.value)); }},
      {"grid.exclusion", [](ProtocolConfig& c, const Entry& e) { c.grid.exclusion = real_of(e, 0, e.value); }},
      {"grid.threads", [](ProtocolConfig& c, const Entry& e) { c.grid.threads = static_cast<int>(integer_of(e, 0, e.value)); }},
      {"thresholds.hold_velocity_factor", [](ProtocolConfig& c, const Entry& e) { c.thresholds.hold_velocity_factor = real_of(e, 0, e.value); }},
      {"thresholds.width_change", [](ProtocolConfig& c, const Entry& e) { c.thresholds.width_change = real_of(e, 0, e.value); }},
      {"thresholds.release_tolerance", [](ProtocolConfig& c, const Entry& e) { c.thresholds.release_tolerance = real_of(e, 0, e.value); }},
      {"thresholds.exchange_correlation", [](ProtocolConfig& c, const Entry& e) { c.thresholds.exchange_correlation = real_of(e, 0, e.value); }},
      {"thresholds.adiabatic_factor", [](ProtocolConfig& c, const Entry& e) { c.thresholds.adiabatic_factor = real_of(e, 0, e.value); }},
      {"output.dir", [](ProtocolConfig& c, const Entry& e) { c.output.dir = e.value; }},
      {"output.prefix", [](ProtocolConfig& c, const Entry& e) { c.output.prefix = e.value; }},
  };

  // Unknown keys are reported in file order.
  const Entry* first_unknown = nullptr;
  std::string unknown_key;
  for (const auto& [key, entry] : entries) {
    if (setters.count(key)) continue;
    if (!first_unknown || entry.line < first_unknown->line) {
      first_unknown = &entry;
      unknown_key = key;
    }
  }
  if (first_unknown) parse_fail(first_unknown->line, 1, "unknown key '" + unknown_key + "'");
  for (const auto& [key, entry] : entries) setters.at(key)(c, entry);

  c.validate();
  parsed.warnings = c.warnings();
  return parsed;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize_config(const ProtocolConfig& c) {
  std::ostringstream o;
  auto d = [](double x) { return format_double(x); };
  auto b = [](bool x) { return x ? "true" : "false"; };
  o << "# Units: rates in Gamma0, lengths in lambda0, times in 1/Gamma0.\n"
    << "scenario = " << to_string(c.scenario) << '\n'
    << "chain.N = " << c.chain.N << '\n'
    << "chain.a = " << d(c.chain.a) << '\n'
    << "chain.gamma0 = " << d(c.chain.gamma0) << '\n'
    << "chain.k0 = " << d(c.chain.k0) << '\n'
    << "field.delta = " << d(c.field.delta) << '\n'
    << "field.theta = " << d(c.field.theta) << '\n'
    << "field.k_c = " << d(c.field.k_c) << '\n'
    << "field.Delta = " << d(c.field.Delta) << '\n'
    << "schedule = " << schedule_text(c.schedule) << '\n'
    << "probe.enabled = " << b(c.probe_enabled) << '\n'
    << "probe.site = " << c.probe.site << '\n'
    << "probe.amplitude = " << d(c.probe.amplitude) << '\n'
    << "probe.center = " << d(c.probe.center) << '\n'
    << "probe.width = " << d(c.probe.width) << '\n'
    << "probe.detuning = " << d(c.probe.detuning) << '\n'
    << "probe.polarization = "
    << (c.probe.polarization == Polarization::Linear      ? "linear"
        : c.probe.polarization == Polarization::SigmaPlus ? "sigma_plus"
                                                          : "sigma_minus")
    << '\n'
    << "probe.detuning_reference = "
    << (c.probe.reference == DetuningReference::BareTransition ? "bare_transition" : "shift_frame")
    << '\n'
    << "initial.kind = " << (c.initial.kind == InitialKind::Vacuum ? "vacuum" : "wavepacket") << '\n'
    << "initial.band = " << (c.initial.band == Band::Lower ? "lower" : "upper") << '\n'
    << "initial.k_center = " << d(c.initial.k_center) << '\n'
    << "initial.width = " << d(c.initial.width_sites) << '\n'
    << "initial.center_site = " << c.initial.center_site << '\n'
    << "integration.dt = " << d(c.integration.dt) << '\n'
    << "integration.stride = " << c.integration.stride << '\n'
    << "integration.t_end = " << d(c.integration.t_end) << '\n'
    << "integration.fit_width = " << b(c.integration.fit_width) << '\n'
    << "integration.keep_sites = " << b(c.integration.keep_sites) << '\n'
    << "grid.nodes = " << c.grid.nodes << '\n'
    << "grid.exclusion = " << d(c.grid.exclusion) << '\n'
    << "grid.threads = " << c.grid.threads << '\n'
    << "thresholds.hold_velocity_factor = " << d(c.thresholds.hold_velocity_factor) << '\n'
    << "thresholds.width_change = " << d(c.thresholds.width_change) << '\n'
    << "thresholds.release_tolerance = " << d(c.thresholds.release_tolerance) << '\n'
    << "thresholds.exchange_correlation = " << d(c.thresholds.exchange_correlation) << '\n'
    << "thresholds.adiabatic_factor = " << d(c.thresholds.adiabatic_factor) << '\n'
    << "output.dir = " << c.output.dir.string() << '\n'
    << "output.prefix = " << c.output.prefix << '\n';
  return o.str();
}

std::uint64_t config_hash(const ProtocolConfig& config) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "config_hash = " << hash_hex(m.config_hash) << '\n'
      << "tool_version = " << m.tool_version << '\n'
      << "runtime_seconds = " << format_double(m.runtime_seconds) << '\n';
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    out << "output." << i << " = " << m.outputs[i].string() << '\n';
  }
}

}  // namespace atomchain
