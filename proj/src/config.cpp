#include "cbsq/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <set>

#include "cbsq/diagnostics.hpp"
#include "cbsq/errors.hpp"
#include "cbsq/solver.hpp"

namespace cbsq {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::linear: return "linear";
    case Mode::simulate: return "simulate";
    case Mode::sweep: return "sweep";
    case Mode::verify_multiplier: return "verify-multiplier";
    case Mode::fit_decay: return "fit-decay";
  }
  return "unknown";
}

Mode parse_mode(std::string_view s) {
  if (s == "linear") return Mode::linear;
  if (s == "simulate") return Mode::simulate;
  if (s == "sweep") return Mode::sweep;
  if (s == "verify-multiplier" || s == "verify_multiplier") return Mode::verify_multiplier;
  if (s == "fit-decay" || s == "fit_decay") return Mode::fit_decay;
  throw ConfigError("unknown mode '" + std::string(s) + "'");
}

namespace {

struct Pos {
  int line = 1, column = 1;
};

struct Value {
  std::string text;               // scalar text (quotes stripped)
  std::vector<std::string> items; // list items
  std::vector<Pos> item_pos;
  bool is_list = false;
  bool quoted = false;
  Pos pos;
};

[[noreturn]] void fail(const Pos& p, const std::string& msg) { throw ConfigError(msg, p.line, p.column); }

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

double parse_double(const std::string& raw, const Pos& p, const std::string& key) {
  std::string s = raw;
  double factor = 1.0;
  if (s == "pi") return std::numbers::pi;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "*pi") == 0) {
    factor = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 3));
  }
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last || s.empty())
    fail(p, "key '" + key + "': expected a number, got '" + raw + "'");
  return v * factor;
}

long long parse_int(const std::string& s, const Pos& p, const std::string& key) {
  long long v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
    fail(p, "key '" + key + "': expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const Pos& p, const std::string& key) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || s.empty())
    fail(p, "key '" + key + "': expected an unsigned integer, got '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s, const Pos& p, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  fail(p, "key '" + key + "': expected true or false, got '" + s + "'");
}

class Lexer {
 public:
  explicit Lexer(std::string_view t) : t_(t) {}
  bool eof() const { return i_ >= t_.size(); }
  char peek() const { return eof() ? '\0' : t_[i_]; }
  Pos pos() const { return p_; }
  char get() {
    const char c = t_[i_++];
    if (c == '\n') {
      ++p_.line;
      p_.column = 1;
    } else {
      ++p_.column;
    }
    return c;
  }
  void skip_blank() {
    while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) get();
  }
  void skip_comment() {
    while (!eof() && peek() != '\n') get();
  }
  // Separators, whitespace, newlines and comments between entries.
  void skip_separators() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ',' || c == ';') get();
      else if (c == '#') skip_comment();
      else break;
    }
  }

 private:
  std::string_view t_;
  std::size_t i_ = 0;
  Pos p_;
};

bool key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

std::string read_quoted(Lexer& lx) {
  const Pos start = lx.pos();
  lx.get();
  std::string s;
  while (true) {
    if (lx.eof() || lx.peek() == '\n') fail(start, "unterminated string");
    const char c = lx.get();
    if (c == '"') break;
    if (c == '\\') {
      if (lx.eof()) fail(start, "unterminated string");
      s += lx.get();
    } else {
      s += c;
    }
  }
  return s;
}

Value read_value(Lexer& lx) {
  Value v;
  v.pos = lx.pos();
  if (lx.peek() == '[') {
    v.is_list = true;
    lx.get();
    while (true) {
      while (!lx.eof() && (lx.peek() == ' ' || lx.peek() == '\t' || lx.peek() == '\r' || lx.peek() == '\n')) lx.get();
      if (lx.eof()) fail(v.pos, "unterminated list");
      if (lx.peek() == ']') {
        lx.get();
        break;
      }
      const Pos ip = lx.pos();
      std::string item;
      while (!lx.eof() && lx.peek() != ',' && lx.peek() != ']' && lx.peek() != '\n') item += lx.get();
      item = trim(item);
      if (item.empty()) fail(ip, "empty list item");
      v.items.push_back(item);
      v.item_pos.push_back(ip);
      while (!lx.eof() && (lx.peek() == ' ' || lx.peek() == '\t' || lx.peek() == '\r' || lx.peek() == '\n')) lx.get();
      if (lx.peek() == ',') lx.get();
    }
    return v;
  }
  if (lx.peek() == '"') {
    v.quoted = true;
    v.text = read_quoted(lx);
    return v;
  }
  std::string s;
  while (!lx.eof() && lx.peek() != '\n' && lx.peek() != ',' && lx.peek() != ';' && lx.peek() != '#') s += lx.get();
  v.text = trim(s);
  if (v.text.empty()) fail(v.pos, "missing value");
  return v;
}

using Setter = std::function<void(RunConfig&, const Value&, const std::string&)>;

Setter num(double RunConfig::*m) {
  return [m](RunConfig& c, const Value& v, const std::string& k) {
    if (v.is_list) fail(v.pos, "key '" + k + "': expected a scalar");
    c.*m = parse_double(v.text, v.pos, k);
  };
}
Setter phys(double PhysicsParams::*m) {
  return [m](RunConfig& c, const Value& v, const std::string& k) {
    if (v.is_list) fail(v.pos, "key '" + k + "': expected a scalar");
    c.physics.*m = parse_double(v.text, v.pos, k);
  };
}
Setter flag(bool RunConfig::*m) {
  return [m](RunConfig& c, const Value& v, const std::string& k) {
    if (v.is_list) fail(v.pos, "key '" + k + "': expected a scalar");
    c.*m = parse_bool(v.text, v.pos, k);
  };
}
Setter str(std::string RunConfig::*m) {
  return [m](RunConfig& c, const Value& v, const std::string& k) {
    if (v.is_list) fail(v.pos, "key '" + k + "': expected a string");
    c.*m = v.text;
  };
}

int to_int(long long x, const Pos& p, const std::string& k) {
  if (x < -2147483647LL || x > 2147483647LL) fail(p, "key '" + k + "': integer out of range");
  return static_cast<int>(x);
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"mode",
       [](RunConfig& c, const Value& v, const std::string& k) {
         if (v.is_list) fail(v.pos, "key '" + k + "': expected a scalar");
         try {
           c.mode = parse_mode(v.text);
         } catch (const ConfigError& e) {
           fail(v.pos, e.what());
         }
       }},
      {"kmax",
       [](RunConfig& c, const Value& v, const std::string& k) {
         c.lattice.kmax = to_int(parse_int(v.text, v.pos, k), v.pos, k);
       }},
      {"jmax",
       [](RunConfig& c, const Value& v, const std::string& k) {
         c.lattice.jmax = to_int(parse_int(v.text, v.pos, k), v.pos, k);
       }},
      {"ly",
       [](RunConfig& c, const Value& v, const std::string& k) { c.lattice.ly = parse_double(v.text, v.pos, k); }},
      {"nu", phys(&PhysicsParams::nu)},
      {"mu", phys(&PhysicsParams::mu)},
      {"sigma",
       [](RunConfig& c, const Value& v, const std::string& k) {
         const auto s = parse_int(v.text, v.pos, k);
         if (s != 0 && s != 1) fail(v.pos, "key 'sigma': must be 0 or 1");
         c.physics.sigma = static_cast<int>(s);
       }},
      {"b", phys(&PhysicsParams::b)},
      {"beta", phys(&PhysicsParams::beta)},
      {"alpha", phys(&PhysicsParams::alpha)},
      {"delta", phys(&PhysicsParams::delta)},
      {"epsilon", num(&RunConfig::epsilon)},
      {"scheme",
       [](RunConfig& c, const Value& v, const std::string&) {
         if (v.text == "rk4") c.scheme = Scheme::rk4;
         else if (v.text == "midpoint") c.scheme = Scheme::midpoint;
         else fail(v.pos, "key 'scheme': expected rk4 or midpoint, got '" + v.text + "'");
       }},
      {"dt_max", num(&RunConfig::dt_max)},
      {"cfl_safety", num(&RunConfig::cfl_safety)},
      {"t_end", num(&RunConfig::t_end)},
      {"horizon_efolds", num(&RunConfig::horizon_efolds)},
      {"output_dir", str(&RunConfig::output_dir)},
      {"report_every", num(&RunConfig::report_every)},
      {"checkpoint_every", num(&RunConfig::checkpoint_every)},
      {"seed",
       [](RunConfig& c, const Value& v, const std::string& k) { c.seed = parse_u64(v.text, v.pos, k); }},
      {"theta_zero", flag(&RunConfig::theta_zero)},
      {"quad_tol", num(&RunConfig::quad_tol)},
      {"confinement_threshold", num(&RunConfig::confinement_threshold)},
      {"beta_grid",
       [](RunConfig& c, const Value& v, const std::string& k) {
         if (!v.is_list) fail(v.pos, "key '" + k + "': expected a bracketed list");
         c.beta_grid.clear();
         for (std::size_t i = 0; i < v.items.size(); ++i) c.beta_grid.push_back(parse_double(v.items[i], v.item_pos[i], k));
       }},
      {"nu_grid",
       [](RunConfig& c, const Value& v, const std::string& k) {
         if (!v.is_list) fail(v.pos, "key '" + k + "': expected a bracketed list");
         c.nu_grid.clear();
         for (std::size_t i = 0; i < v.items.size(); ++i) c.nu_grid.push_back(parse_double(v.items[i], v.item_pos[i], k));
       }},
      {"growth_factor", num(&RunConfig::growth_factor)},
      {"k_list",
       [](RunConfig& c, const Value& v, const std::string& k) {
         if (!v.is_list) fail(v.pos, "key '" + k + "': expected a bracketed list");
         c.k_list.clear();
         for (std::size_t i = 0; i < v.items.size(); ++i)
           c.k_list.push_back(to_int(parse_int(v.items[i], v.item_pos[i], k), v.item_pos[i], k));
       }},
      {"series_path", str(&RunConfig::series_path)},
      {"override_index_check", flag(&RunConfig::override_index_check)},
  };
  return s;
}

void check(bool ok, const std::string& msg, Pos p = {0, 0}) {
  if (!ok) throw ConfigError(msg, p.line, p.column);
}

void validate_at(const RunConfig& c, const std::map<std::string, Pos>& where) {
  auto at = [&](const char* key) {
    const auto it = where.find(key);
    return it == where.end() ? Pos{0, 0} : it->second;
  };
  try {
    const FrequencyLattice check_lattice(c.lattice.kmax, c.lattice.jmax, c.lattice.ly);
    (void)check_lattice;
  } catch (const ConfigError& e) {
    Pos p = at("kmax");
    if (p.line == 0) p = at("jmax");
    if (p.line == 0) p = at("ly");
    throw ConfigError(e.what(), p.line, p.column);
  }
  try {
    validate_physics(c.physics);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), at("nu").line, at("nu").column);
  }
  check(std::isfinite(c.epsilon) && c.epsilon >= 0.0, "epsilon must be finite and >= 0", at("epsilon"));
  check(c.dt_max > 0.0 && std::isfinite(c.dt_max), "dt_max must be positive", at("dt_max"));
  check(c.cfl_safety > 0.0 && c.cfl_safety <= 1.0, "cfl_safety must lie in (0, 1]", at("cfl_safety"));
  check(c.t_end >= 0.0 && std::isfinite(c.t_end), "t_end must be finite and >= 0", at("t_end"));
  check(c.horizon_efolds >= 1.0 && std::isfinite(c.horizon_efolds), "horizon_efolds must be >= 1", at("horizon_efolds"));
  check(c.report_every > 0.0 && std::isfinite(c.report_every), "report_every must be positive", at("report_every"));
  check(c.checkpoint_every >= 0.0 && std::isfinite(c.checkpoint_every), "checkpoint_every must be >= 0",
        at("checkpoint_every"));
  check(c.quad_tol > 0.0 && c.quad_tol < 1.0, "quad_tol must lie in (0, 1)", at("quad_tol"));
  check(c.confinement_threshold > 0.0 && c.confinement_threshold <= 1.0, "confinement_threshold must lie in (0, 1]",
        at("confinement_threshold"));
  check(c.growth_factor > 0.0 && std::isfinite(c.growth_factor), "growth_factor must be positive", at("growth_factor"));
  check(!c.beta_grid.empty(), "beta_grid must not be empty", at("beta_grid"));
  for (double b : c.beta_grid) check(std::isfinite(b), "beta_grid values must be finite", at("beta_grid"));
  check(!c.nu_grid.empty(), "nu_grid must not be empty", at("nu_grid"));
  for (double n : c.nu_grid) check(n > 0.0 && std::isfinite(n), "nu_grid values must be positive", at("nu_grid"));
  check(!c.k_list.empty(), "k_list must not be empty", at("k_list"));
  for (int k : c.k_list)
    check(k != 0 && std::abs(k) <= c.lattice.kmax, "k_list entries must be nonzero and within kmax", at("k_list"));
  for (const std::string* s : {&c.output_dir, &c.series_path})
    check(s->find_first_of("\"\n") == std::string::npos, "paths must not contain quotes or newlines");
  check(!c.output_dir.empty(), "output_dir must not be empty", at("output_dir"));

  if (c.mode == Mode::simulate || c.mode == Mode::sweep) {
    Pos p = {0, 0};
    for (const char* key : {"sigma", "b", "beta", "alpha", "delta", "nu", "mu"}) {
      const Pos q = at(key);
      if (q.line > p.line || (q.line == p.line && q.column > p.column)) p = q;
    }
    if (!c.override_index_check) {
      if (c.mode == Mode::simulate) {
        const auto v = index_condition_violations(c.physics);
        if (!v.empty()) {
          std::string msg = "index conditions violated (set override_index_check to run anyway): ";
          for (std::size_t i = 0; i < v.size(); ++i) msg += (i ? "; " : "") + v[i];
          throw ConfigError(msg, p.line, p.column);
        }
        check(c.physics.nu == c.physics.mu, "nonlinear runs require nu == mu", p);
      } else {
        // Sweeps probe beta below the threshold on purpose; only the regularity index is checked.
        const double b_min = c.physics.sigma == 0 ? 4.0 / 3.0 : 1.0;
        check(c.physics.b > b_min, "sweep requires b > " + format_double(b_min) + " for sigma = " +
                                       std::to_string(c.physics.sigma), at("b"));
      }
      const double tm = t_max(c.lattice);
      if (c.mode == Mode::simulate) {
        check(effective_t_end(c) <= tm, "t_end " + format_double(effective_t_end(c)) + " exceeds t_max = 4 pi jmax / ly = " +
                                            format_double(tm), at("t_end").line ? at("t_end") : at("horizon_efolds"));
      } else {
        for (double n : c.nu_grid)
          check(c.horizon_efolds * std::pow(n, -1.0 / 3.0) <= tm,
                "sweep horizon exceeds t_max = 4 pi jmax / ly = " + format_double(tm) + " for nu = " + format_double(n),
                at("horizon_efolds").line ? at("horizon_efolds") : at("nu_grid"));
      }
    }
  }
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '\\' || ch == '"') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string emit_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s + "]";
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::function<void(RunConfig&)>& adjust) {
  RunConfig c;
  std::map<std::string, Pos> where;
  Lexer lx(text);
  while (true) {
    lx.skip_separators();
    if (lx.eof()) break;
    const Pos kp = lx.pos();
    std::string key;
    while (!lx.eof() && key_char(lx.peek())) key += lx.get();
    if (key.empty()) fail(kp, std::string("expected a key, found '") + lx.peek() + "'");
    lx.skip_blank();
    if (lx.peek() != '=') fail(lx.pos(), "expected '=' after key '" + key + "'");
    lx.get();
    lx.skip_blank();
    const auto it = setters().find(key);
    if (it == setters().end()) fail(kp, "unknown key '" + key + "'");
    if (where.count(key)) fail(kp, "duplicate key '" + key + "'");
    where[key] = kp;
    const Value v = read_value(lx);
    it->second(c, v, key);
    lx.skip_blank();
    if (!lx.eof() && lx.peek() != '\n' && lx.peek() != ',' && lx.peek() != ';' && lx.peek() != '#')
      fail(lx.pos(), "unexpected text after value of '" + key + "'");
  }
  if (adjust) adjust(c);
  validate_at(c, where);
  return c;
}

void validate_config(const RunConfig& config) { validate_at(config, {}); }

double effective_t_end(const RunConfig& c) {
  return c.t_end > 0.0 ? c.t_end : c.horizon_efolds * std::pow(c.physics.nu, -1.0 / 3.0);
}

std::string emit_config(const RunConfig& c) {
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  line("mode", std::string(to_string(c.mode)));
  line("kmax", std::to_string(c.lattice.kmax));
  line("jmax", std::to_string(c.lattice.jmax));
  line("ly", format_double(c.lattice.ly));
  line("nu", format_double(c.physics.nu));
  line("mu", format_double(c.physics.mu));
  line("sigma", std::to_string(c.physics.sigma));
  line("b", format_double(c.physics.b));
  line("beta", format_double(c.physics.beta));
  line("alpha", format_double(c.physics.alpha));
  line("delta", format_double(c.physics.delta));
  line("epsilon", format_double(c.epsilon));
  line("scheme", c.scheme == Scheme::rk4 ? "rk4" : "midpoint");
  line("dt_max", format_double(c.dt_max));
  line("cfl_safety", format_double(c.cfl_safety));
  line("t_end", format_double(c.t_end));
  line("horizon_efolds", format_double(c.horizon_efolds));
  line("output_dir", quote(c.output_dir));
  line("report_every", format_double(c.report_every));
  line("checkpoint_every", format_double(c.checkpoint_every));
  line("seed", std::to_string(c.seed));
  line("theta_zero", c.theta_zero ? "true" : "false");
  line("quad_tol", format_double(c.quad_tol));
  line("confinement_threshold", format_double(c.confinement_threshold));
  line("beta_grid", emit_list(c.beta_grid));
  line("nu_grid", emit_list(c.nu_grid));
  line("growth_factor", format_double(c.growth_factor));
  std::string ks = "[";
  for (std::size_t i = 0; i < c.k_list.size(); ++i) ks += (i ? ", " : "") + std::to_string(c.k_list[i]);
  line("k_list", ks + "]");
  line("series_path", quote(c.series_path));
  line("override_index_check", c.override_index_check ? "true" : "false");
  return s;
}

}  // namespace cbsq
