#include <doctest.h>

#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "cbsq/errors.hpp"
#include "cbsq/spectral_ops.hpp"
#include "cbsq/transform.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cbsq;
using testgen::Rng;

namespace {

constexpr double pi = std::numbers::pi;

SpectralField single_mode(const FrequencyLattice& lat, int k, int j, cplx c = {1.0, 0.0}, double t = 0.0) {
  SpectralField f(lat, t);
  f(k, j) = c;
  if (k != 0 || j != 0) f(-k, -j) = std::conj(c);
  return f;
}

std::map<std::string, std::string> normalization_table() {
  std::ifstream is(std::string(CBSQ_SOURCE_DIR) + "/docs/normalization.md");
  REQUIRE(is);
  std::map<std::string, std::string> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.size() < 2 || line[0] != '|' || line.find("---") != std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line.substr(1));
    std::string cell;
    while (std::getline(ss, cell, '|')) {
      const auto a = cell.find_first_not_of(' ');
      const auto b = cell.find_last_not_of(' ');
      cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    if (cells.size() >= 2 && cells[0] != "quantity") rows[cells[0]] = cells[1];
  }
  return rows;
}

}  // namespace

TEST_CASE("lattice validation and geometry") {
  CHECK_THROWS_AS(FrequencyLattice(0, 4, 1.0), ConfigError);
  CHECK_THROWS_AS(FrequencyLattice(2, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(FrequencyLattice(2, 4, 0.0), ConfigError);
  const FrequencyLattice lat(4, 7, 3.0);
  CHECK(lat.nk() == 9);
  CHECK(lat.nj() == 15);
  CHECK(lat.dy() == doctest::Approx(3.0 / 15));
  for (std::size_t i = 0; i < lat.size(); ++i) CHECK(lat.index(lat.k_of(i), lat.j_of(i)) == i);
}

TEST_CASE("normalization table matches the implementation") {
  const auto rows = normalization_table();
  REQUIRE(rows.size() >= 14);
  CHECK(rows.at("nz") == "2K+1");
  CHECK(rows.at("ny") == "2J+1");
  CHECK(rows.at("cell_measure") == "2π·Ly");
  CHECK(rows.at("single_mode_norm") == "sqrt(2π·Ly)");
  CHECK(rows.at("forward_scale") == "1/(nz·ny)");
  CHECK(rows.at("dealias_band_k") == "floor(2K/3)");
  CHECK(rows.at("t_max") == "2·η_max = 4π·J/Ly");

  const FrequencyLattice lat(5, 11, 7.5);
  CHECK(lat.cell_measure() == doctest::Approx(2 * pi * 7.5));
  CHECK(lat.band_k() == 3);
  CHECK(lat.band_j() == 7);
  CHECK(lat.dz() == doctest::Approx(2 * pi / 11));
  CHECK(lat.dy() == doctest::Approx(7.5 / 23));
  CHECK(l2_norm(single_mode(lat, 0, 0)) == doctest::Approx(std::sqrt(2 * pi * 7.5)).epsilon(1e-14));

  // forward_scale: a constant grid of ones maps to c(0,0) = 1.
  const GridTransform tr(lat);
  std::vector<double> ones(lat.size(), 1.0);
  SpectralField f(lat);
  tr.from_grid(ones, f.coeffs());
  CHECK(f(0, 0).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(f(1, 0)) < 1e-15);
}

TEST_CASE("lambda_shear_weight examples") {
  const FrequencyLattice lat(3, 4, 2 * pi);  // eta spacing 1
  for (double t : {0.0, 0.7, 5.0}) {
    const auto w = lambda_shear_weight(lat, t, 2.0);
    CHECK(w[lat.index(0, 0)] == 1.0);
    CHECK(w[lat.index(1, 1)] == doctest::Approx(3.0).epsilon(1e-15));
  }
  for (double x : lambda_shear_weight(lat, 2.0, 0.0)) CHECK(x == 1.0);
  // Lab frame: the symbol is evaluated at eta = xi + k t.
  const auto lab = lambda_shear_weight(lat, 1.0, 2.0, Frame::lab);
  CHECK(lab[lat.index(1, 0)] == doctest::Approx(3.0));
}

TEST_CASE("fractional_dx") {
  const FrequencyLattice lat(4, 4, 2 * pi);
  const auto f = single_mode(lat, 2, 0);
  CHECK(fractional_dx(f, 1.0 / 3.0)(2, 0).real() == doctest::Approx(std::cbrt(2.0)).epsilon(1e-15));
  Rng r(11);
  const auto g = testgen::full_field(lat, r);
  CHECK(fractional_dx(g, 0.0).identical(g));
  CHECK(fractional_dx(project_zero(g), 1.0 / 3.0).is_zero());
  CHECK_THROWS_AS(fractional_dx(g, -0.5), Error);
  try {
    fractional_dx(g, -0.5);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  const auto h = fractional_dx(project_nonzero(g), -0.5);
  CHECK(h(3, 1) == g(3, 1) * std::pow(3.0, -0.5));
}

TEST_CASE("projections") {
  Rng r(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lat = testgen::small_lattice(r);
    const auto f = testgen::full_field(lat, r);
    const auto z = project_zero(f), n = project_nonzero(f);
    CHECK((z + n).identical(f));
    CHECK(project_zero(z).identical(z));
    CHECK(project_nonzero(n).identical(n));
    CHECK(project_nonzero(z).is_zero());
    CHECK(project_zero(single_mode(lat, 3 % (lat.kmax + 1) == 0 ? 1 : 3 % (lat.kmax + 1), 1)).is_zero());
    CHECK(z.reality_defect() == 0.0);
    CHECK(n.reality_defect() == 0.0);
  }
}

TEST_CASE("biot_savart examples and divergence") {
  const FrequencyLattice lat(4, 6, 2 * pi);
  SpectralField w = single_mode(lat, 1, 0);
  const auto vel = biot_savart(w, 0.0);
  CHECK(vel.u(1, 0) == cplx{0.0, 0.0});
  CHECK(vel.v(1, 0).real() == 0.0);
  CHECK(vel.v(1, 0).imag() == doctest::Approx(-1.0));

  const auto zero = biot_savart(SpectralField(lat), 0.3);
  CHECK(zero.u.is_zero());
  CHECK(zero.v.is_zero());

  SpectralField bad(lat);
  bad(0, 0) = 1.0;
  try {
    biot_savart(bad, 0.0);
    FAIL("expected a precondition error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::precondition);
  }

  Rng r(13);
  for (int trial = 0; trial < 10; ++trial) {
    const auto l2 = testgen::small_lattice(r);
    const double t = r.uniform(0.0, 7.0);
    const auto f = testgen::field(l2, r, l2.kmax, l2.jmax, t);
    const auto v = biot_savart(f, t);
    CHECK(v.u.reality_defect() < 1e-15);
    for (int k = -l2.kmax; k <= l2.kmax; ++k)
      for (int j = -l2.jmax; j <= l2.jmax; ++j) {
        const double xi = l2.eta(j) - k * t;
        const cplx div = cplx{0.0, double(k)} * v.u(k, j) + cplx{0.0, xi} * v.v(k, j);
        CHECK(std::abs(div) <= 1e-14 * (1.0 + std::abs(f(k, j))));
        if (k == 0 && j != 0) {
          CHECK(std::abs(v.u(0, j) - cplx{0.0, 1.0 / l2.eta(j)} * f(0, j)) < 1e-14 * std::abs(f(0, j)) + 1e-300);
          CHECK(v.v(0, j) == cplx{});
        }
      }
  }
}

TEST_CASE("dealiased_product: identities and single modes") {
  const FrequencyLattice lat(6, 9, 5.0);
  Rng r(14);
  const auto g = testgen::field(lat, r, lat.band_k(), lat.band_j(), 0.0, false);
  const auto one = single_mode(lat, 0, 0);
  CHECK(testgen::max_abs_diff(dealiased_product(one, g), g) < 1e-14);

  const auto p = dealiased_product(single_mode(lat, 1, 0), single_mode(lat, 2, 0));
  // e^{ix} + e^{-ix} times e^{2ix} + e^{-2ix}: k = 3 and k = 1 terms, unit amplitudes.
  CHECK(std::abs(p(3, 0) - 1.0) < 1e-14);
  CHECK(std::abs(p(1, 0) - 1.0) < 1e-14);
  CHECK(std::abs(p(2, 0)) < 1e-14);

  CHECK_THROWS_AS(dealiased_product(g, SpectralField(FrequencyLattice(6, 9, 4.0))), Error);
  CHECK_THROWS_AS(dealiased_product(g, SpectralField(lat, 1.0)), Error);
}

TEST_CASE("dealiased_product matches the dense convolution oracle") {
  Rng r(15);
  for (int trial = 0; trial < 12; ++trial) {
    const auto lat = testgen::small_lattice(r);
    const auto f = testgen::full_field(lat, r), g = testgen::full_field(lat, r);
    const auto p = dealiased_product(f, g);
    const auto q = testgen::dense_convolution(f, g);
    CHECK(testgen::max_abs_diff(p, q) <= 1e-12 * (1.0 + testgen::max_abs(q)));
    CHECK(is_band_limited(p));
    CHECK(p.reality_defect() < 1e-13);
  }
}

TEST_CASE("weighted_l2_norm examples") {
  const FrequencyLattice lat(3, 4, 2 * pi);
  const double unit = std::sqrt(2 * pi * 2 * pi);
  CHECK(weighted_l2_norm(SpectralField(lat), std::vector<double>(lat.size(), 1.0)) == 0.0);
  SpectralField one(lat);
  one(1, 1) = 1.0;
  CHECK(l2_norm(one) == doctest::Approx(unit).epsilon(1e-15));
  CHECK(weighted_l2_norm(one, lambda_shear_weight(lat, 0.0, 2.0)) == doctest::Approx(std::sqrt(3.0) * unit));
  CHECK_THROWS_AS(weighted_l2_norm(one, std::vector<double>(3, 1.0)), Error);
  std::vector<double> neg(lat.size(), 1.0);
  neg[0] = -1.0;
  CHECK_THROWS_AS(weighted_l2_norm(one, neg), Error);
}

TEST_CASE("Plancherel: spectral and grid L2 norms agree") {
  Rng r(16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lat = testgen::small_lattice(r);
    const auto f = testgen::full_field(lat, r);
    CHECK(grid_l2_norm(f) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
    const auto g = testgen::full_field(lat, r);
    CHECK(std::abs(inner_product(f, g).imag()) < 1e-10 * l2_norm(f) * l2_norm(g));
  }
}

TEST_CASE("transform round trip is exact to rounding and preserves reality") {
  Rng r(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto lat = testgen::small_lattice(r);
    const auto f = testgen::full_field(lat, r);
    const auto back = from_grid(lat, to_grid(f));
    CHECK(testgen::max_abs_diff(back, f) < 1e-13);
    CHECK(back.reality_defect() == 0.0);
    CHECK(back(0, 0).imag() == 0.0);
  }
}

TEST_CASE("reality symmetry is preserved by every operator") {
  Rng r(18);
  const FrequencyLattice lat(7, 12, 9.0);
  const double t = 1.7;
  const auto f = testgen::field(lat, r, 7, 12, t);
  const auto g = testgen::field(lat, r, 7, 12, t);
  const auto vel = biot_savart(f, t);
  for (const SpectralField* x : {&vel.u, &vel.v}) CHECK(x->reality_defect() < 1e-15);
  CHECK(fractional_dx(f, 1.0 / 3.0).reality_defect() < 1e-15);
  CHECK(project_zero(f).reality_defect() == 0.0);
  CHECK(project_nonzero(f).reality_defect() == 0.0);
  CHECK(dealiased_product(f, g).reality_defect() < 1e-13);
}

TEST_CASE("product estimate holds on random band-limited data") {
  Rng r(19);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const FrequencyLattice lat(r.integer(6, 12), r.integer(12, 30), r.uniform(4.0, 40.0));
    const double b = r.uniform(1.05, 2.5);
    const auto f = testgen::inner_field(lat, r), g = testgen::inner_field(lat, r);
    const auto w = lambda_shear_weight(lat, 0.0, 2.0 * b);
    const double lhs = weighted_l2_norm(dealiased_product(f, g), w);
    const double rhs = grid_linf_norm(f) * weighted_l2_norm(g, w) + grid_linf_norm(g) * weighted_l2_norm(f, w);
    CHECK(lhs <= rhs);
    ++checked;
  }
  CHECK(checked == 40);
}

TEST_CASE("product estimate needs a constant above one for concentrated data") {
  // f = g = 2 cos(2x), b = 3: ||Lambda^3 (f^2)|| exceeds 2 ||f||_inf ||Lambda^3 f||.
  const FrequencyLattice lat(8, 4, 2 * pi);
  const auto f = single_mode(lat, 2, 0);
  const auto w = lambda_shear_weight(lat, 0.0, 6.0);
  const double lhs = weighted_l2_norm(dealiased_product(f, f), w);
  const double rhs = 2.0 * grid_linf_norm(f) * weighted_l2_norm(f, w);
  CHECK(lhs > rhs);
  CHECK(lhs < 2.0 * rhs);
}

TEST_CASE("L-infinity embedding constant") {
  Rng r(20);
  for (int trial = 0; trial < 20; ++trial) {
    const auto lat = testgen::small_lattice(r);
    const double b = r.uniform(1.05, 3.0);
    const auto f = testgen::full_field(lat, r);
    const double c = linf_embedding_constant(lat, b);
    CHECK(grid_linf_norm(f) <= c * weighted_l2_norm(f, lambda_shear_weight(lat, 0.0, 2.0 * b)) * (1 + 1e-12));
  }
  // The extremal field c = (1+k^2+eta^2)^{-b} attains the bound at the origin.
  const FrequencyLattice lat(5, 8, 6.0);
  const double b = 1.4;
  SpectralField e(lat);
  for (int k = -5; k <= 5; ++k)
    for (int j = -8; j <= 8; ++j) e(k, j) = std::pow(1.0 + k * k + lat.eta(j) * lat.eta(j), -b);
  const double sup = to_grid(e)[0];
  CHECK(sup == doctest::Approx(linf_embedding_constant(lat, b) * weighted_l2_norm(e, lambda_shear_weight(lat, 0.0, 2 * b))).epsilon(1e-12));
}

TEST_CASE("unshear maps onto the widened lab lattice") {
  const FrequencyLattice lat(3, 5, 2 * pi);
  Rng r(21);
  const auto f = testgen::full_field(lat, r, 2.0);
  const auto lab = unshear(f);
  CHECK(lab.frame() == Frame::lab);
  CHECK(lab.lattice().jmax == 5 + 3 * 2);
  CHECK(lab(2, 1 - 4) == f(2, 1));
  CHECK(l2_norm(lab) == doctest::Approx(l2_norm(f)).epsilon(1e-14));
  CHECK_THROWS_AS(unshear(testgen::full_field(lat, r, 0.5)), Error);
  CHECK_THROWS_AS(unshear(lab), Error);
}

TEST_CASE("concurrent calls on distinct data match sequential results") {
  const FrequencyLattice lat(10, 40, 12.0);
  Rng r(22);
  std::vector<SpectralField> fs, gs, expect(4), got(4);
  for (int i = 0; i < 4; ++i) {
    fs.push_back(testgen::full_field(lat, r));
    gs.push_back(testgen::full_field(lat, r));
    expect[i] = dealiased_product(fs[i], gs[i]);
  }
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&, i] {
      for (int rep = 0; rep < 5; ++rep) got[i] = dealiased_product(fs[i], gs[i]);
    });
  for (auto& t : threads) t.join();
  for (int i = 0; i < 4; ++i) CHECK(got[i].identical(expect[i]));
}
