#include <cmath>
#include <complex>
#include <vector>

#include "catch_amalgamated.hpp"
#include "test_util.hpp"

#include <suita/quadrature.hpp>
#include <suita/ratio.hpp>

using suita::Complex;
using suita::DomainSpec;
using test_util::catch_error;

namespace {

// Annulus diagonal kernel straight from the monomial norms: K(z0) =
// sum_n |z0|^{2n} / ||z^n||^2 with ||z^n||^2 = pi (1 - q^{2n+2})/(n+1) for
// n != -1 and 2 pi log(1/q) for n = -1. Organized differently from the
// library's series (explicit bilateral loop, no tail bookkeeping).
double annulus_kernel_oracle(double q, double rho, int terms = 400) {
  const double L = std::log(1.0 / q);
  double k = std::pow(rho, -2.0) / (2.0 * suita::pi * L);
  for (int n = 0; n <= terms; ++n) {
    k += (n + 1) * std::pow(rho, 2.0 * n) / (suita::pi * (1.0 - std::pow(q, 2.0 * n + 2)));
    // the n <= -2 half, reflected through n -> -2 - n so no power overflows
    k += (n + 1) * std::pow(q / rho, 2.0 * n + 2) /
         (suita::pi * suita::sq(rho) * (1.0 - std::pow(q, 2.0 * n + 2)));
  }
  return k;
}

// log c on the annulus from the Fourier-mode expansion of the Green
// function at a real pole rho: the n = 0 mode contributes (log rho)^2 / L,
// each n >= 1 mode rho^{2n}/n plus the hole correction B_n (rho^{-n} -
// rho^n) with B_n = (q^{2n}/n)(rho^{-n} - rho^n)/(1 - q^{2n}).
double annulus_log_capacity_oracle(double q, double rho, int terms = 200) {
  const double L = std::log(1.0 / q);
  double lc = suita::sq(std::log(rho)) / L;
  for (int n = 1; n <= terms; ++n) {
    const double balance = std::pow(rho, -n) - std::pow(rho, n);
    const double bn = std::pow(q, 2.0 * n) / n * balance / (1.0 - std::pow(q, 2.0 * n));
    lc += std::pow(rho, 2.0 * n) / n + bn * balance;
  }
  return lc;
}

}  // namespace

TEST_CASE("disc ratios collapse to the equality case") {
  const auto disc = suita::make_unit_disc();
  for (Complex z0 : {Complex(0.0), Complex(0.3), Complex(0.6), Complex(0.3, 0.4)}) {
    const auto rec = suita::suita_ratio(disc, z0);
    REQUIRE(rec.ratio == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(rec.curvature == Catch::Approx(-4.0 * rec.ratio).margin(1e-14));
    REQUIRE(rec.method_K == "closed_form");
    REQUIRE(rec.method_c == "closed_form");
  }

  const auto off = suita::make_disc(Complex(0.4, -0.2), 1.7);
  const auto rec = suita::suita_ratio(off, Complex(0.9, 0.1));
  REQUIRE(rec.ratio == Catch::Approx(1.0).margin(1e-12));

  // same equality through the numeric machinery, at grid accuracy
  suita::KernelOptions opt;
  opt.force_numeric = true;
  opt.resolution = 256;
  const auto num = suita::suita_ratio(disc, Complex(0.3), opt);
  REQUIRE(num.method_K == "gram_numeric");
  REQUIRE(num.ratio == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("annulus ratios against the bilateral-series oracles") {
  struct Anchor {
    double q, rho, kernel, log_cap;
  };
  // frozen from the oracles above; the excess over 1 shrinks rapidly in q
  const Anchor anchors[] = {
      {0.10, std::sqrt(0.10), 1.4835947273, 0.768085805441},
      {0.25, 0.5, 1.6347119390, 0.818093006390},
      {0.50, std::sqrt(0.50), 3.2694067500, 1.164669216149},
  };
  for (const auto& a : anchors) {
    REQUIRE(annulus_kernel_oracle(a.q, a.rho) == Catch::Approx(a.kernel).epsilon(1e-9));
    REQUIRE(annulus_log_capacity_oracle(a.q, a.rho) == Catch::Approx(a.log_cap).margin(1e-11));

    const auto rec = suita::suita_ratio(suita::make_annulus(a.q), Complex(a.rho));
    REQUIRE(rec.method_K == "laurent_series");
    REQUIRE(rec.K == Catch::Approx(annulus_kernel_oracle(a.q, a.rho)).epsilon(1e-10));
    REQUIRE(std::log(rec.c) == Catch::Approx(a.log_cap).margin(1e-11));
    REQUIRE(rec.ratio >= 1.0 - 1e-12);
  }

  // the excess at the critical radius sqrt(q), frozen per q: visible at
  // q = 0.1, five orders smaller by q = 0.25, below rounding at q = 0.5
  const auto r10 = suita::suita_ratio(suita::make_annulus(0.10), Complex(std::sqrt(0.10)));
  REQUIRE(r10.ratio == Catch::Approx(1.0030309).margin(5e-7));
  const auto r25 = suita::suita_ratio(suita::make_annulus(0.25), Complex(0.5));
  REQUIRE(r25.ratio - 1.0 > 0.9e-5);
  REQUIRE(r25.ratio - 1.0 < 1.2e-5);
  const auto r50 = suita::suita_ratio(suita::make_annulus(0.50), Complex(std::sqrt(0.50)));
  REQUIRE(std::abs(r50.ratio - 1.0) < 5e-9);
}

TEST_CASE("annulus ratio symmetry under rho -> q/rho") {
  const double q = 0.1;
  const auto lo = suita::suita_ratio(suita::make_annulus(q), Complex(std::pow(q, 0.55)));
  const auto hi = suita::suita_ratio(suita::make_annulus(q), Complex(std::pow(q, 0.45)));
  REQUIRE(lo.ratio == Catch::Approx(hi.ratio).epsilon(1e-10));
  REQUIRE(lo.ratio == Catch::Approx(1.002884345).margin(5e-9));
  // both stay clear of equality at this q
  REQUIRE(lo.ratio > 1.0 + 1e-3);
}

TEST_CASE("annulus series kernel agrees with the forced Gram route") {
  suita::KernelOptions opt;
  opt.force_numeric = true;
  opt.resolution = 256;
  const auto ann = suita::make_annulus(0.25);
  const auto series = suita::kernel_diag(ann, Complex(0.5));
  const auto gram = suita::kernel_diag(ann, Complex(0.5), opt);
  REQUIRE(gram.method == "gram_numeric");
  REQUIRE(gram.value.real() == Catch::Approx(series.value.real()).epsilon(1e-3));
}

TEST_CASE("disc analytic capacity is the Moebius derivative") {
  REQUIRE(suita::analytic_capacity_disc(1.0, 0.0) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(suita::analytic_capacity_disc(1.0, 0.6) == Catch::Approx(1.0 / 0.64).epsilon(1e-14));
  REQUIRE(suita::analytic_capacity_disc(2.0, 0.0) == Catch::Approx(0.5).margin(1e-15));

  auto err = catch_error([] { suita::analytic_capacity_disc(1.0, Complex(1.0)); });
  REQUIRE(err.threw);
  REQUIRE(err.tag == "not-in-disc");
  err = catch_error([] { suita::analytic_capacity_disc(-1.0, Complex(0.0)); });
  REQUIRE(err.tag == "not-in-disc");

  // on discs the analytic and logarithmic capacities coincide
  for (double R : {0.7, 1.0, 2.0}) {
    for (Complex z0 : {Complex(0.0), Complex(0.3 * R), Complex(-0.2 * R, 0.4 * R)}) {
      const double cb = suita::analytic_capacity_disc(R, z0);
      const double c = suita::log_capacity(suita::make_disc(0.0, R), z0).value;
      REQUIRE(cb == Catch::Approx(c).epsilon(1e-10));
    }
  }
}

TEST_CASE("curvature residual of the capacity metric") {
  const auto disc = suita::make_unit_disc();
  for (Complex z : {Complex(0.0), Complex(0.3), Complex(0.3, 0.4)})
    REQUIRE(suita::curvature_residual(disc, z, 1e-3) < 1e-4);

  const auto ann = suita::make_annulus(0.3);
  REQUIRE(suita::curvature_residual(ann, Complex(std::sqrt(0.3)), 1e-2) < 1e-2);
  REQUIRE(suita::curvature_residual(ann, Complex(0.0, -0.7), 1e-2) < 1e-2);

  auto err = catch_error([&] { suita::curvature_residual(disc, Complex(0.995), 1e-2); });
  REQUIRE(err.tag == "stencil-outside");
  err = catch_error([&] { suita::curvature_residual(disc, Complex(0.0), 0.0); });
  REQUIRE(err.tag == "invalid-step");

  const auto chk = suita::curvature_check(disc, Complex(0.4));
  REQUIRE(chk.step == Catch::Approx(5e-4));  // half the disc default
  REQUIRE(chk.residual < 1e-4);
  REQUIRE(chk.error_estimate < 1e-4);
}

TEST_CASE("kernel times volume respects the lower bound") {
  const auto disc = suita::make_unit_disc();
  const auto grid = suita::build_quadrature(disc, 256, 1);

  const auto center = suita::volume_bound_check(disc, Complex(0.0), grid);
  REQUIRE(center.equality_case);
  REQUIRE(center.pass);
  REQUIRE(center.product == Catch::Approx(1.0).margin(1e-3));

  const auto off = suita::volume_bound_check(disc, Complex(0.5), grid);
  REQUIRE_FALSE(off.equality_case);
  REQUIRE(off.product == Catch::Approx(1.0 / suita::sq(1.0 - 0.25)).epsilon(1e-3));

  const auto ann = suita::make_annulus(0.25);
  const auto agrid = suita::build_quadrature(ann, 256, 1);
  const auto hole = suita::volume_bound_check(ann, Complex(0.5), agrid);
  REQUIRE_FALSE(hole.equality_case);
  REQUIRE(hole.product > 1.0 + 1e-3);

  const auto shifted = suita::make_disc(Complex(0.4), 2.0);
  const auto sgrid = suita::build_quadrature(shifted, 256, 1);
  const auto eq = suita::volume_bound_check(shifted, Complex(0.4), sgrid);
  REQUIRE(eq.equality_case);
  REQUIRE(eq.product == Catch::Approx(1.0).margin(1e-3));

  auto err = catch_error([&] { suita::volume_bound_check(disc, Complex(2.0), grid); });
  REQUIRE(err.tag == "not-in-domain");
}

TEST_CASE("scan preserves input order and surfaces the first failure") {
  const auto disc = suita::make_unit_disc();
  const std::vector<Complex> pts = {Complex(0.0), Complex(0.5), Complex(0.2, -0.3)};
  const auto recs = suita::suita_scan(disc, pts);
  REQUIRE(recs.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto solo = suita::suita_ratio(disc, pts[i]);
    REQUIRE(recs[i].z0 == pts[i]);
    REQUIRE(recs[i].K == Catch::Approx(solo.K).epsilon(1e-14));
    REQUIRE(recs[i].c == Catch::Approx(solo.c).epsilon(1e-14));
  }

  REQUIRE(suita::suita_scan(disc, {}).empty());

  auto err = catch_error([&] {
    suita::suita_scan(disc, {Complex(0.1), Complex(3.0), Complex(0.2)});
  });
  REQUIRE(err.threw);
  REQUIRE(err.tag == "not-in-domain");
}

TEST_CASE("small punctures barely perturb the ratio") {
  const auto d = suita::puncture(suita::make_unit_disc(), {Complex(0.3)}, 1e-3);
  suita::KernelOptions opt;
  opt.resolution = 256;
  const auto rec = suita::suita_ratio(d, Complex(0.0), opt);
  REQUIRE(rec.method_K == "gram_numeric");
  REQUIRE(rec.ratio >= 1.0 - 1e-3);
  REQUIRE(rec.ratio == Catch::Approx(1.0).margin(1e-2));
}
