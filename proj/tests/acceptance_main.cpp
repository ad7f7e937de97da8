// Acceptance sweep: thirteen end-to-end checks, one pass/fail line each,
// exit code = number of failures. Tolerances are pinned here, next to the
// check they gate, and every line prints the measured values so a failure
// is a data point rather than a mystery.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <suita/cli.hpp>
#include <suita/io.hpp>

namespace {

using clk = std::chrono::steady_clock;

double secs(clk::time_point a) { return std::chrono::duration<double>(clk::now() - a).count(); }

int failures = 0;

void line(int id, bool pass, const std::string& detail) {
  std::printf("criterion %02d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string g(double x) { return suita::format_g(x); }

}  // namespace

int main() {
  using namespace suita;
  // results are thread-count independent (fixed chunking), so default the
  // worker budget to the hardware when the caller did not choose one
  if (!std::getenv("SUITA_LAB_THREADS")) {
    const auto n = std::to_string(std::max(1u, std::thread::hardware_concurrency()));
    setenv("SUITA_LAB_THREADS", n.c_str(), 1);
  }

  const auto disc = make_unit_disc();
  const std::vector<Complex> disc_poles = {Complex(0.0), Complex(0.3), Complex(0.6),
                                           Complex(0.3, 0.4)};
  const double root_pi = std::sqrt(pi);

  {  // 1: ratio = 1 on the disc, closed routes and the forced numeric route
    const auto t0 = clk::now();
    double closed_worst = 0.0, numeric_worst = 0.0;
    KernelOptions numeric;
    numeric.force_numeric = true;
    numeric.resolution = 512;
    numeric.max_pos = 16;
    for (Complex z0 : disc_poles) {
      closed_worst = std::max(closed_worst, std::abs(suita_ratio(disc, z0).ratio - 1.0));
      numeric_worst = std::max(numeric_worst, std::abs(suita_ratio(disc, z0, numeric).ratio - 1.0));
    }
    const double el = secs(t0);
    line(1, closed_worst < 1e-8 && numeric_worst < 1e-3 && el < 10.0,
         "disc equality: closed max|ratio-1| " + g(closed_worst) + " (tol 1e-8), numeric " +
             g(numeric_worst) + " (tol 1e-3, grid 512 deg 16), " + g(el) + "s (budget 10s)");
  }

  {  // 2: strict excess above 1 + 1e-3 on annuli, with route agreement
    const auto t0 = clk::now();
    KernelOptions gram;
    gram.force_numeric = true;
    gram.resolution = 256;
    double min_excess = 1e30, max_rel = 0.0;
    double min_q = 0.0;
    for (double q : {0.1, 0.25, 0.5}) {
      const auto ann = make_annulus(q);
      for (double e : {0.45, 0.5, 0.55}) {
        const double r = std::pow(q, e);
        const auto a = suita_ratio(ann, Complex(r));
        const auto b = suita_ratio(ann, Complex(r), gram);
        if (a.ratio - 1.0 < min_excess) {
          min_excess = a.ratio - 1.0;
          min_q = q;
        }
        max_rel = std::max(max_rel, std::abs(a.K - b.K) / a.K);
      }
    }
    const double el = secs(t0);
    line(2, min_excess > 1e-3 && max_rel < 1e-3 && el < 60.0,
         "annulus excess: min ratio-1 " + g(min_excess) + " at q=" + g(min_q) +
             " (threshold 1e-3), route agreement max " + g(max_rel) + " rel (tol 1e-3), " +
             g(el) + "s (budget 60s)");
  }

  {  // 3: curvature of c^2|dz|^2 equals -4 * ratio
    double disc_worst = 0.0, ann_worst = 0.0;
    for (Complex z : {Complex(0.0), Complex(0.3), Complex(0.6), Complex(0.3, 0.4), Complex(-0.5)})
      disc_worst = std::max(disc_worst, curvature_residual(disc, z, 1e-3));
    const auto ann = make_annulus(0.3);
    for (Complex z : {Complex(std::sqrt(0.3)), Complex(0.45), Complex(0.7), Complex(0.0, 0.6),
                      Complex(-0.4, 0.4)})
      ann_worst = std::max(ann_worst, curvature_residual(ann, z, 1e-2));
    line(3, disc_worst < 1e-4 && ann_worst < 1e-2,
         "curvature identity: disc max residual " + g(disc_worst) + " (tol 1e-4), annulus max " +
             g(ann_worst) + " (tol 1e-2), 5 points each");
  }

  // shared traces for 4-7: 12-point geometric grids on every base domain
  const auto grid12 = default_s_grid();
  const auto punctured = make_punctured(disc, {Complex(0.3)}, 1e-3);
  const VariationTrace tr_disc = variation_trace(disc, Complex(0.3), grid12);
  const VariationTrace tr_q10 = variation_trace(make_annulus(0.1), Complex(std::sqrt(0.1)), grid12);
  const VariationTrace tr_q25 = variation_trace(make_annulus(0.25), Complex(0.5), grid12);
  const VariationTrace tr_q50 = variation_trace(make_annulus(0.5), Complex(std::sqrt(0.5)), grid12);
  const VariationTrace tr_punc = variation_trace(punctured, Complex(0.0), grid12);
  const std::vector<const VariationTrace*> traces = {&tr_disc, &tr_q10, &tr_q25, &tr_q50,
                                                     &tr_punc};

  {  // 4: convexity of logK + 2s along every trace
    double worst = 1e30;
    for (const auto* tr : traces) worst = std::min(worst, convexity_report(*tr, 1e-3).min_second_diff);
    line(4, worst >= -1e-3,
         "trace convexity: min second difference " + g(worst) +
             " over disc, annuli q in {0.1,0.25,0.5}, punctured disc (tol -1e-3)");
  }

  {  // 5: harmonic trace exactly on the equality domains
    const double h_disc = harmonicity_residual(tr_disc);
    const double h10 = harmonicity_residual(tr_q10);
    const double h25 = harmonicity_residual(tr_q25);
    const double h50 = harmonicity_residual(tr_q50);
    const bool direct = h_disc < 1e-6 && h10 > 1e-2 && h25 > 1e-2 && h50 > 1e-2;
    // classifier: residual < 1e-4 must flag exactly the equality domains
    const bool classifier = (h_disc < 1e-4) && !(h10 < 1e-4) && !(h25 < 1e-4) && !(h50 < 1e-4);
    line(5, direct && classifier,
         "harmonicity vs equality: disc " + g(h_disc) + " (tol 1e-6), annuli " + g(h10) + " / " +
             g(h25) + " / " + g(h50) + " (each must exceed 1e-2), classifier at 1e-4 " +
             (classifier ? "labels all four correctly" : "mislabels") +
             " (q=0.25/0.5 margins rest on the ~2e-4 trace noise floor; true signals 1e-5, 7e-12)");
  }

  {  // 6: logK + 2s non-decreasing, terminal value logK(0) on disc traces
    double worst = 0.0;
    for (const auto* tr : traces) worst = std::max(worst, monotone_report(*tr, 1e-3).max_violation);
    const double logK0 = std::log(kernel_diag(disc, Complex(0.3)).value.real());
    const auto mono = monotone_report(tr_disc, 1e-3, logK0);
    line(6, worst <= 1e-3 && mono.has_terminal && std::abs(mono.terminal_gap) <= 1e-3,
         "monotone budget: max decrease " + g(worst) + " over all five traces (tol 1e-3), disc terminal gap " +
             g(mono.terminal_gap) + " (tol 1e-3)");
  }

  {  // 7: deep sublevels shrink like discs, slope of logK in s is -2
    double worst = 0.0;
    for (const auto* tr : traces) worst = std::max(worst, std::abs(tail_slope(*tr) + 2.0));
    line(7, worst <= 0.05,
         "tail slope: max |slope + 2| " + g(worst) + " over all five base domains (tol 0.05)");
  }

  {  // 8: pointwise kernel law on sublevels, with a wide-annulus control
    double key_worst = 0.0, pde_worst = 0.0;
    for (Complex t : {Complex(0.1), Complex(0.0, 0.2), Complex(-0.15)})
      for (double s : {-0.5, -1.0, -1.5}) {
        key_worst = std::max(key_worst, key_lemma_residual(disc, Complex(0.0), t, s));
        pde_worst = std::max(pde_worst, pde_residual(disc, Complex(0.0), t, s, 1e-3));
      }
    const double control =
        key_lemma_residual(make_annulus(0.01), Complex(0.1), Complex(0.12), -0.2);
    line(8, key_worst < 1e-6 && pde_worst < 1e-4 && control > 1e-2,
         "kernel law on sublevels: disc 3x3 max " + g(key_worst) + " (tol 1e-6), pde max " +
             g(pde_worst) + " (tol 1e-4, h 1e-3), wide-annulus control " + g(control) +
             " (must exceed 1e-2)");
  }

  {  // 9: minimal extension norms and the equality flag
    double closed_worst = 0.0;
    bool flags = true;
    for (Complex z0 : disc_poles) {
      closed_worst = std::max(closed_worst,
                              std::abs(minimal_extension_closed(disc, z0).norm - root_pi));
      flags = flags && extension_bound_check(disc, z0).equality;
    }
    KernelOptions opt;
    opt.resolution = 256;
    const auto grid = build_quadrature(disc, opt.resolution, opt.seed);
    const auto basis = numeric_basis(disc, opt.max_pos, 0, grid);
    const auto qp = minimal_extension_numeric(basis, grid, Complex(0.3),
                                              log_capacity(disc, Complex(0.3)).value);
    const double qp_err = std::abs(qp.norm - root_pi);
    const Complex ann_pole(std::sqrt(0.1));
    const auto ann_check = extension_bound_check(make_annulus(0.1), ann_pole);
    const double gap = root_pi - ann_check.norm;
    flags = flags && !ann_check.equality;
    line(9, closed_worst < 1e-8 && qp_err < 1e-3 && gap > 1e-3 && flags,
         "minimal extension: disc norm err closed " + g(closed_worst) + " (tol 1e-8), qp " +
             g(qp_err) + " (tol 1e-3), annulus q=0.1 gap below sqrt(pi) " + g(gap) +
             " (must exceed 1e-3), equality flags " + (flags ? "exact" : "wrong"));
  }

  {  // 10: sampled Riemann map against the Moebius oracle
    const Complex z0(0.3);
    const double s = -0.7;
    const auto sub = sublevel_domain(disc, z0, s);
    const auto eq = equivalent_disc(flatten_punctures(sub).clean);
    std::vector<Complex> pts;
    for (int k = 0; k < 50; ++k) {
      const double theta = 2.0 * pi * k / 50.0 + 0.3;
      pts.push_back(eq->center + eq->radius * (0.08 + 0.9 * k / 50.0) *
                                     Complex{std::cos(theta), std::sin(theta)});
    }
    const auto map = riemann_map_from_kernel(disc, z0, s, pts);
    const auto rep = map_validation(map, disc, z0, s);
    const auto m = local_uniformizer_disc(1.0, z0);
    double sup = 0.0;
    for (const auto& smp : map.samples) sup = std::max(sup, std::abs(smp.f0 - m(smp.t)));
    line(10, sup < 1e-5 && rep.green_residual < 1e-5 && rep.corollary_residual < 1e-6,
         "riemann map: sup|f0 - moebius| " + g(sup) + " over 50 samples (tol 1e-5), max|log|f0| - G| " +
             g(rep.green_residual) + " (tol 1e-5), derivative identity residual " +
             g(rep.corollary_residual) + " (tol 1e-6)");
  }

  {  // 11: point removals are invisible in the limit; volume lower bound
    KernelOptions opt;
    opt.resolution = 512;
    std::vector<double> devs;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto dom = make_punctured(disc, {Complex(0.3)}, eps);
      devs.push_back(std::abs(suita_ratio(dom, Complex(0.0), opt).ratio - 1.0));
    }
    const bool shrinking = devs[0] > devs[1] && devs[1] > devs[2] && devs[2] < 1e-2;
    const auto grid = build_quadrature(disc, 256, 1);
    const auto at_center = volume_bound_check(disc, Complex(0.0), grid);
    const auto off_center = volume_bound_check(disc, Complex(0.5), grid);
    const auto ann = make_annulus(0.25);
    const auto on_annulus = volume_bound_check(ann, Complex(0.5), build_quadrature(ann, 256, 1));
    const bool volume = std::abs(at_center.product - 1.0) < 1e-3 &&
                        off_center.product > 1.0 + 1e-3 && on_annulus.product > 1.0 + 1e-3;
    line(11, shrinking && volume,
         "polar negligibility: |ratio-1| " + g(devs[0]) + " > " + g(devs[1]) + " > " + g(devs[2]) +
             " (eps 1e-2,1e-3,1e-4; last tol 1e-2), K*Vol at center " + g(at_center.product) +
             " (tol 1e-3), off-center " + g(off_center.product) + ", annulus " +
             g(on_annulus.product) + " (both must exceed 1)");
  }

  {  // 12: reproducing property of the numeric kernels
    const double rd = reproducing_residual(disc, Complex(0.3), build_quadrature(disc, 512, 1));
    const auto ann = make_annulus(0.25);
    const double ra = reproducing_residual(ann, Complex(0.5), build_quadrature(ann, 512, 1));
    line(12, rd < 1e-3 && ra < 1e-2,
         "reproducing property: disc residual " + g(rd) + " (tol 1e-3), annulus " + g(ra) +
             " (tol 1e-2), grid 512");
  }

  {  // 13: the invariant sweep is deterministic and fast
    const auto t0 = clk::now();
    std::ostringstream a, b;
    const int ca = cli::run({"selftest"}, a);
    const int cb = cli::run({"selftest"}, b);
    const double el = secs(t0);
    line(13, ca == 0 && cb == 0 && a.str() == b.str() && el < 300.0,
         std::string("determinism: selftest twice -> ") +
             (a.str() == b.str() ? "byte-identical" : "DIFFERENT") + ", exit " + std::to_string(ca) +
             "/" + std::to_string(cb) + ", " + g(el) + "s (budget 300s)");
  }

  std::printf("acceptance: %d/13 passed\n", 13 - failures);
  return failures;
}
