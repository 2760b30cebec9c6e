#include <doctest.h>

#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstring>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "cbsq/checkpoint.hpp"
#include "cbsq/config.hpp"
#include "cbsq/errors.hpp"
#include "cbsq/harness.hpp"
#include "cbsq/io.hpp"
#include "cbsq/solver.hpp"
#include "generators.hpp"

using namespace cbsq;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cbsq_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

// Runs the CLI and returns its exit status.
int cli(const std::string& args) {
  const std::string cmd = std::string(CBSQ_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ErrorKind config_error_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for: " << text);
  return ErrorKind::usage;
}

}  // namespace

// --- configuration ---------------------------------------------------------

TEST_CASE("empty document gives the defaults table") {
  const auto c = parse_config("");
  CHECK(c == RunConfig{});
  CHECK(c.lattice.kmax == 32);
  CHECK(c.lattice.jmax == 256);
  CHECK(c.lattice.ly == doctest::Approx(16.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(c.physics.b == 1.5);
  CHECK(c.physics.nu == 1e-3);
  CHECK(c.physics.mu == 1e-3);
  CHECK(c.physics.sigma == 0);
  CHECK(c.scheme == Scheme::rk4);
  CHECK(c.cfl_safety == 0.4);
  CHECK(c.epsilon == 0.05);
}

TEST_CASE("index conditions follow the selected regime") {
  try {
    parse_config("beta = 0.5, sigma = 0");
    FAIL("beta 0.5 with sigma 0 must be rejected");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(e.line() == 1);
    CHECK(std::string(e.what()).find("beta") != std::string::npos);
  }
  const auto c = parse_config("beta = 0.5, sigma = 1, b = 1.1");
  CHECK(c.physics.sigma == 1);
  CHECK(c.physics.beta == 0.5);
  CHECK(c.physics.b == 1.1);
  // Override flag downgrades the check.
  CHECK(parse_config("beta = 0.5, sigma = 0, override_index_check = true").override_index_check);
  CHECK(config_error_kind("b = 1.2, sigma = 0") == ErrorKind::config);
  CHECK(config_error_kind("nu = 1e-3, mu = 2e-3") == ErrorKind::config);
  // Distinct viscosities are fine for the linear oracle.
  CHECK(parse_config("mode = linear, nu = 1e-3, mu = 2e-3").physics.mu == 2e-3);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_config("kmax = 16\n\n   bogus_key = 3\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 4);
  }
  try {
    parse_config("nu = 1e-3\njmax = abc\n");
    FAIL("bad integer accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() >= 1);
  }
  CHECK(config_error_kind("kmax = 16\nkmax = 17") == ErrorKind::config);
  CHECK(config_error_kind("nu_grid = [1e-2, 3e-3") == ErrorKind::config);
  CHECK(config_error_kind("mode = warp") == ErrorKind::config);
  CHECK(config_error_kind("cfl_safety = 1.5") == ErrorKind::config);
  CHECK(config_error_kind("kmax = 0") == ErrorKind::config);
}

TEST_CASE("value syntax: comments, separators, lists, pi") {
  const auto c = parse_config(
      "# header\n"
      "mode = sweep; kmax = 12, jmax = 96   # trailing\n"
      "ly = 8*pi\n"
      "nu_grid = [1e-2, 3e-3,\n 1e-3]\n"
      "k_list = [1, 3]\n"
      "output_dir = \"runs/a b\"\n"
      "seed = 18446744073709551615\n");
  CHECK(c.mode == Mode::sweep);
  CHECK(c.lattice.kmax == 12);
  CHECK(c.lattice.ly == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(c.nu_grid == std::vector<double>{1e-2, 3e-3, 1e-3});
  CHECK(c.k_list == std::vector<int>{1, 3});
  CHECK(c.output_dir == "runs/a b");
  CHECK(c.seed == 18446744073709551615ull);
}

TEST_CASE("t_end beyond the lattice horizon needs the override") {
  CHECK(config_error_kind("kmax = 8, jmax = 16, ly = 16*pi, t_end = 100") == ErrorKind::config);
  CHECK(parse_config("kmax = 8, jmax = 16, ly = 16*pi, t_end = 100, override_index_check = true").t_end == 100.0);
}

TEST_CASE("parse(emit(config)) is the identity on random configs") {
  testgen::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    RunConfig c;
    c.mode = static_cast<Mode>(rng.integer(0, 4));
    c.lattice = FrequencyLattice(rng.integer(1, 64), rng.integer(1, 512), rng.uniform(0.1, 200.0));
    c.physics.sigma = rng.integer(0, 1);
    c.physics.nu = std::pow(10.0, rng.uniform(-6.0, -1.0));
    c.physics.mu = rng.coin() ? c.physics.nu : std::pow(10.0, rng.uniform(-6.0, -1.0));
    c.physics.b = rng.uniform(0.0, 3.0);
    c.physics.beta = rng.uniform(0.0, 2.0);
    c.physics.alpha = rng.uniform(0.0, 2.0);
    c.physics.delta = rng.uniform(0.0, 2.0);
    c.epsilon = rng.uniform(0.0, 1.0);
    c.scheme = rng.coin() ? Scheme::rk4 : Scheme::midpoint;
    c.dt_max = rng.uniform(1e-4, 1.0);
    c.cfl_safety = rng.uniform(0.01, 1.0);
    c.t_end = rng.coin() ? 0.0 : rng.uniform(0.1, 50.0);
    c.horizon_efolds = rng.uniform(1.0, 10.0);
    c.output_dir = "out/run_" + std::to_string(trial) + (rng.coin() ? " with space" : "");
    c.report_every = rng.uniform(0.01, 2.0);
    c.checkpoint_every = rng.coin() ? 0.0 : rng.uniform(0.1, 5.0);
    c.seed = rng.eng();
    c.theta_zero = rng.coin();
    c.quad_tol = std::pow(10.0, rng.uniform(-14.0, -2.0));
    c.confinement_threshold = std::pow(10.0, rng.uniform(-12.0, -2.0));
    c.beta_grid.assign(static_cast<std::size_t>(rng.integer(1, 4)), 0.0);
    for (auto& b : c.beta_grid) b = rng.uniform(0.0, 2.0);
    c.nu_grid.assign(static_cast<std::size_t>(rng.integer(1, 4)), 0.0);
    for (auto& n : c.nu_grid) n = std::pow(10.0, rng.uniform(-5.0, -1.0));
    c.growth_factor = rng.uniform(1.0, 10.0);
    c.k_list.assign(static_cast<std::size_t>(rng.integer(1, 5)), 0);
    for (auto& k : c.k_list) k = rng.integer(1, c.lattice.kmax);
    c.series_path = rng.coin() ? "" : "data/series.csv";
    c.override_index_check = true;  // random physics rarely satisfies the index conditions
    const auto text = emit_config(c);
    INFO(text);
    CHECK(parse_config(text) == c);
  }
}

TEST_CASE("adjust hook runs before validation") {
  const auto c = parse_config("beta = 0.5, sigma = 0", [](RunConfig& rc) { rc.override_index_check = true; });
  CHECK(c.physics.beta == 0.5);
}

// --- checkpoints and io ----------------------------------------------------

namespace {

SimState sample_state(std::uint64_t seed) {
  const FrequencyLattice lat(5, 9, 7.5);
  testgen::Rng rng(seed);
  SimState s;
  s.omega = testgen::field(lat, rng, 5, 9, 1.25);
  s.theta = testgen::field(lat, rng, 5, 9, 1.25);
  s.params.nu = s.params.mu = 2e-3;
  s.params.sigma = 1;
  s.params.b = 1.1;
  s.t = 1.25;
  return s;
}

}  // namespace

TEST_CASE("checkpoint layout and round trip") {
  const auto s = sample_state(5);
  const auto bytes = checkpoint::encode(s);
  const std::size_t header = 5 + 1 + 4 + 4 + 8 * 4 + 1 + 8;
  REQUIRE(bytes.size() == header + 2 * s.omega.lattice().size() * 16);
  CHECK(std::string(bytes.begin(), bytes.begin() + 5) == "CBSQ1");
  CHECK(bytes[5] == 1);
  CHECK(bytes[6] == 5);  // kmax, little-endian u32
  CHECK(bytes[7] == 0);
  CHECK(bytes[10] == 9);
  double ly = 0.0;
  std::memcpy(&ly, bytes.data() + 14, 8);
  CHECK(ly == 7.5);
  CHECK(bytes[14 + 32] == 1);  // sigma

  const auto back = checkpoint::decode(bytes, s.params);
  CHECK(back.omega.identical(s.omega));
  CHECK(back.theta.identical(s.theta));
  CHECK(back.t == s.t);
  CHECK(back.params == s.params);
  CHECK(checkpoint::state_hash(back) == checkpoint::state_hash(s));
  CHECK(checkpoint::state_hash(s) == io::git_blob_hash(std::span<const std::uint8_t>(bytes)));

  const auto dir = scratch("ckpt");
  checkpoint::write(dir / "a.cbsq", s);
  CHECK(checkpoint::read(dir / "a.cbsq", s.params).omega.identical(s.omega));
}

TEST_CASE("corrupt checkpoints are io errors") {
  const auto bytes = checkpoint::encode(sample_state(6));
  auto expect_io = [](std::vector<std::uint8_t> b) {
    try {
      checkpoint::decode(b);
      FAIL("corrupt checkpoint accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::io);
    }
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  expect_io(bad_magic);
  auto bad_version = bytes;
  bad_version[5] = 2;
  expect_io(bad_version);
  expect_io(std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 1));
  expect_io(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 20));
  auto trailing = bytes;
  trailing.push_back(0);
  expect_io(trailing);
  try {
    checkpoint::read("/nonexistent/dir/x.cbsq");
    FAIL("missing file accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("git blob hashes match git hash-object") {
  CHECK(io::git_blob_hash(std::string_view{}) == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  CHECK(io::git_blob_hash(std::string_view{"hello\n"}) == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("atomic writes replace the target and leave no temporaries") {
  const auto dir = scratch("atomic");
  io::write_atomic(dir / "f.txt", std::string_view{"one"});
  io::write_atomic(dir / "f.txt", std::string_view{"two"});
  CHECK(io::read_text(dir / "f.txt") == "two");
  int count = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++count;
  CHECK(count == 1);
  try {
    // The parent is a regular file, so no directory can be created there.
    io::write_atomic(dir / "f.txt" / "g.txt", std::string_view{"x"});
    FAIL("write below a regular file succeeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
}

TEST_CASE("exit code table") {
  CHECK(exit_code(ErrorKind::usage) == 2);
  CHECK(exit_code(ErrorKind::config) == 2);
  CHECK(exit_code(ErrorKind::io) == 3);
  CHECK(exit_code(ErrorKind::verification) == 4);
  CHECK(exit_code(ErrorKind::confinement) == 5);
  CHECK(exit_code(ErrorKind::nan_abort) == 6);
  CHECK(exit_code(ErrorKind::accuracy) == 7);
  CHECK(exit_code(ErrorKind::domain) == 8);
  CHECK(exit_code(ErrorKind::precondition) == 8);
}

// --- CLI -------------------------------------------------------------------

TEST_CASE("cli usage and config failures") {
  const auto dir = scratch("cli_usage");
  CHECK(cli("--version") == 0);
  CHECK(cli("") == 2);
  CHECK(cli("simulate --no-such-flag") == 2);
  write_file(dir / "bad.cfg", "kmax = 8\nwhat = 1\n");
  CHECK(cli("simulate --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o").string()) == 2);
  CHECK(cli("simulate --config " + (dir / "missing.cfg").string()) == 3);
  write_file(dir / "ok.cfg", "kmax = 4, jmax = 8, t_end = 0.5");
  CHECK(cli("sweep --config " + (dir / "ok.cfg").string() + " --jobs 0 --out " + (dir / "o").string()) == 2);
}

TEST_CASE("verify-multiplier on defaults exits 0 with a slack report") {
  const auto dir = scratch("cli_verify");
  REQUIRE(cli("verify-multiplier --out " + dir.string()) == 0);
  const auto report = json::parse(io::read_text(dir / "multiplier_report.json"));
  CHECK(report["pass"] == true);
  CHECK(report["kmax"] == 32);
  CHECK(report["jmax"] == 256);
  REQUIRE(!report["results"].empty());
  for (const auto& r : report["results"]) {
    CHECK(r["pass"] == true);
    for (const auto& row : r["rows"]) {
      if (!row["applicable"].get<bool>()) continue;
      CHECK(row["min_slack_m1"].get<double>() >= 0.0);
      CHECK(row["min_slack_full"].get<double>() >= 0.0);
    }
    CHECK(r["m_min"].get<double>() >= 1.0);
    CHECK(r["m_max"].get<double>() <= 2.0 + std::numbers::pi);
  }
  const auto manifest = json::parse(io::read_text(dir / "manifest.json"));
  CHECK(manifest["status"] == "ok");
  CHECK(manifest["outputs"].contains("multiplier_report.json"));
}

TEST_CASE("zero amplitude simulate writes an all-zero energy CSV") {
  const auto dir = scratch("cli_zero");
  write_file(dir / "z.cfg", "kmax = 8, jmax = 32, epsilon = 0, t_end = 2, report_every = 0.5\n");
  REQUIRE(cli("simulate --config " + (dir / "z.cfg").string() + " --out " + (dir / "o").string()) == 0);
  std::ifstream in(dir / "o" / "energy.csv");
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // t
    while (std::getline(ss, cell, ',')) CHECK(std::stod(cell) == 0.0);
  }
  CHECK(rows == 5);
  const auto summary = json::parse(io::read_text(dir / "o" / "summary.json"));
  CHECK(summary["status"] == "ok");
  CHECK(summary["theta_identically_zero"] == true);
}

TEST_CASE("forced confinement failure exits with the confinement code") {
  const auto dir = scratch("cli_confine");
  // Tiny Ly and a huge amplitude cascade into the outer vertical band within a few steps.
  write_file(dir / "c.cfg", "kmax = 8, jmax = 16, ly = 1.0, epsilon = 1e5, t_end = 2, report_every = 0.5\n");
  CHECK(cli("simulate --config " + (dir / "c.cfg").string() + " --out " + (dir / "o").string()) == 5);
  const auto summary = json::parse(io::read_text(dir / "o" / "summary.json"));
  CHECK(summary["status"] == "aborted");
  const auto manifest = json::parse(io::read_text(dir / "o" / "manifest.json"));
  CHECK(manifest["status"] == "error: confinement");
}

TEST_CASE("resume: immediate, split-run and mismatch") {
  const auto dir = scratch("cli_resume");
  const std::string base = "kmax = 8, jmax = 32, t_end = 2, report_every = 0.5, checkpoint_every = 1, epsilon = 20\n";
  write_file(dir / "full.cfg", base);
  REQUIRE(cli("simulate --config " + (dir / "full.cfg").string() + " --out " + (dir / "full").string()) == 0);
  const auto full = json::parse(io::read_text(dir / "full" / "summary.json"));
  REQUIRE(fs::exists(dir / "full" / "checkpoint_t1.cbsq"));

  REQUIRE(cli("simulate --config " + (dir / "full.cfg").string() + " --resume " +
              (dir / "full" / "checkpoint_t1.cbsq").string() + " --out " + (dir / "split").string()) == 0);
  const auto split = json::parse(io::read_text(dir / "split" / "summary.json"));
  CHECK(split["final_state_hash"] == full["final_state_hash"]);

  REQUIRE(cli("simulate --config " + (dir / "full.cfg").string() + " --resume " +
              (dir / "full" / "final.cbsq").string() + " --out " + (dir / "again").string()) == 0);
  const auto again = json::parse(io::read_text(dir / "again" / "summary.json"));
  CHECK(again["final_state_hash"] == full["final_state_hash"]);
  CHECK(again["resumed_hash"] == full["final_state_hash"]);
  CHECK(again["steps"] == 0);

  write_file(dir / "other.cfg", "kmax = 6, jmax = 32, t_end = 2\n");
  CHECK(cli("simulate --config " + (dir / "other.cfg").string() + " --resume " +
            (dir / "full" / "final.cbsq").string() + " --out " + (dir / "bad").string()) == 2);

  auto bytes = io::read_bytes(dir / "full" / "final.cbsq");
  bytes[5] = 9;
  io::write_atomic(dir / "v9.cbsq", std::span<const std::uint8_t>(bytes));
  CHECK(cli("simulate --config " + (dir / "full.cfg").string() + " --resume " + (dir / "v9.cbsq").string() +
            " --out " + (dir / "bad2").string()) == 3);
}

TEST_CASE("identical config, seed and threads give byte-identical CSVs") {
  const auto dir = scratch("cli_repro");
  write_file(dir / "r.cfg", "kmax = 8, jmax = 32, t_end = 2, report_every = 0.25, epsilon = 20\n");
  const std::string cfg = " --config " + (dir / "r.cfg").string() + " --seed 99";
  REQUIRE(cli("simulate" + cfg + " --out " + (dir / "a").string()) == 0);
  REQUIRE(cli("simulate" + cfg + " --out " + (dir / "b").string()) == 0);
  CHECK(io::read_text(dir / "a" / "energy.csv") == io::read_text(dir / "b" / "energy.csv"));
  CHECK(io::read_bytes(dir / "a" / "final.cbsq") == io::read_bytes(dir / "b" / "final.cbsq"));

  write_file(dir / "s.cfg",
             "kmax = 8, jmax = 48, horizon_efolds = 1, nu_grid = [1e-2, 3e-2], beta_grid = [0.7, 0.9]\n");
  const std::string sw = " --config " + (dir / "s.cfg").string() + " --seed 3";
  REQUIRE(cli("sweep" + sw + " --jobs 1 --out " + (dir / "s1").string()) == 0);
  REQUIRE(cli("sweep" + sw + " --jobs 2 --out " + (dir / "s2").string()) == 0);
  CHECK(io::read_text(dir / "s1" / "threshold.csv") == io::read_text(dir / "s2" / "threshold.csv"));
  CHECK(cli("sweep --config " + (dir / "s.cfg").string() + " --seed 4 --out " + (dir / "s3").string()) == 0);
  CHECK(io::read_text(dir / "s1" / "threshold.csv") != io::read_text(dir / "s3" / "threshold.csv"));
}

TEST_CASE("linear and fit-decay modes write their artifacts") {
  const auto dir = scratch("cli_linear");
  write_file(dir / "l.cfg", "mode = linear, kmax = 8, jmax = 32, nu = 1e-2, mu = 2e-2, t_end = 2, report_every = 0.5\n");
  REQUIRE(cli("linear --config " + (dir / "l.cfg").string() + " --out " + (dir / "l").string()) == 0);
  CHECK(fs::exists(dir / "l" / "linear_modes.csv"));
  CHECK(fs::exists(dir / "l" / "energy.csv"));
  const auto lsum = json::parse(io::read_text(dir / "l" / "summary.json"));
  CHECK(lsum["bundle_lhs"].get<double>() > 0.0);

  write_file(dir / "f.cfg", "nu_grid = [1e-2, 1e-3, 1e-4], k_list = [1, 2, 4]\n");
  REQUIRE(cli("fit-decay --config " + (dir / "f.cfg").string() + " --out " + (dir / "f").string()) == 0);
  const auto fsum = json::parse(io::read_text(dir / "f" / "summary.json"));
  const double p = fsum["scaling"]["p_nu"].get<double>();
  CHECK(std::abs(p - 1.0 / 3.0) <= 0.05);

  // fit-decay from the linear run's per-mode series.
  write_file(dir / "g.cfg", "nu = 1e-2, mu = 1e-2, series_path = \"" + (dir / "l" / "linear_modes.csv").string() + "\"\n");
  CHECK(cli("fit-decay --config " + (dir / "g.cfg").string() + " --out " + (dir / "g").string()) == 0);
  CHECK(fs::exists(dir / "g" / "decay_fits.csv"));
}
