#pragma once

// Command-line front end: one subcommand per experiment, CSV/JSON payloads
// on stdout or --out, exit 0 on success, 2 on validation errors, 3 on
// numerical failures (both as JSON error reports), 1 for selftest findings.
// Identical argv and seed produce byte-identical output.

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"

namespace suita::cli {

struct RunConfig {
  std::string domain_text;
  std::vector<double> z0_parts;
  std::vector<double> t_parts;
  double s = -1.0;
  bool got_s = false;
  std::vector<double> s_geom;
  int grid = 0;  // scan/map: sample count; kernel/extension: quadrature resolution
  std::uint64_t seed = 1;
  double tol = 1e-3;
  std::string out_path;
  bool force_numeric = false;
  bool qp = false;
  std::string gram_path;
};

namespace detail {

inline Complex point_from(const std::vector<double>& parts, const char* flag) {
  if (parts.size() != 2)
    fail_validation("invalid-arguments", std::string(flag) + " needs RE IM");
  return {parts[0], parts[1]};
}

inline DomainSpec domain_from(const RunConfig& cfg) {
  if (cfg.domain_text.empty())
    fail_validation("invalid-arguments", "--domain is required for this command");
  std::string text = cfg.domain_text;
  if (text.front() == '@') {
    std::ifstream in(text.substr(1));
    if (!in) fail_validation("invalid-arguments", "cannot read domain file " + text.substr(1));
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail_validation("invalid-domain", "domain is not valid JSON");
  return domain_from_json(j);
}

inline KernelOptions kernel_options(const RunConfig& cfg) {
  KernelOptions opt;
  if (cfg.grid > 0) opt.resolution = cfg.grid;
  opt.seed = cfg.seed;
  opt.tol = cfg.tol;
  opt.force_numeric = cfg.force_numeric;
  return opt;
}

inline void deliver(const RunConfig& cfg, const std::string& payload, std::ostream& out) {
  if (cfg.out_path.empty())
    out << payload;
  else
    write_text(cfg.out_path, payload);
}

inline std::string json_line(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

inline BergmanBasis qp_basis(const DomainSpec& d, const KernelOptions& opt,
                             QuadratureGrid& grid_out) {
  grid_out = build_quadrature(flatten_punctures(d).clean, opt.resolution, opt.seed);
  const int mn = hole_point(flatten_punctures(d).clean) ? opt.max_neg : 0;
  return numeric_basis(d, opt.max_pos, mn, grid_out);
}

}  // namespace detail

inline int cmd_kernel(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  const KernelOptions opt = detail::kernel_options(cfg);
  const KernelEstimate est = cfg.t_parts.empty()
                                 ? kernel_diag(d, z0, opt)
                                 : kernel_offdiag(d, detail::point_from(cfg.t_parts, "--t"), z0, opt);
  if (!cfg.gram_path.empty()) {
    QuadratureGrid grid;
    write_text(cfg.gram_path, gram_csv(detail::qp_basis(d, opt, grid)));
  }
  detail::deliver(cfg, detail::json_line(kernel_json(est)), out);
  return 0;
}

inline int cmd_green(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  const Complex t = detail::point_from(cfg.t_parts, "--t");
  detail::deliver(cfg, detail::json_line(green_json(green_value(d, t, z0))), out);
  return 0;
}

inline int cmd_capacity(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  detail::deliver(cfg, detail::json_line(capacity_json(log_capacity(d, z0))), out);
  return 0;
}

inline int cmd_ratio(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  detail::deliver(cfg, detail::json_line(record_json(suita_ratio(d, z0, detail::kernel_options(cfg)))),
                  out);
  return 0;
}

inline int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const QuadratureGrid probe = build_quadrature(d, 64, cfg.seed);
  const std::size_t want = cfg.grid > 0 ? std::size_t(cfg.grid) : 12;
  std::vector<Complex> points;
  const std::size_t stride = std::max<std::size_t>(1, probe.nodes.size() / want);
  for (std::size_t i = 0; i < probe.nodes.size() && points.size() < want; i += stride)
    points.push_back(probe.nodes[i]);
  detail::deliver(cfg, scan_csv(suita_scan(d, points)), out);
  return 0;
}

inline int cmd_variation(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  std::vector<double> grid;
  if (cfg.s_geom.empty()) {
    grid = default_s_grid();
  } else {
    if (cfg.s_geom.size() != 3)
      fail_validation("invalid-arguments", "--s-geom needs MIN MAX N");
    grid = default_s_grid(int(cfg.s_geom[2]), cfg.s_geom[0], cfg.s_geom[1]);
  }
  grid.push_back(0.0);  // terminal sample anchors the monotone bound
  const VariationTrace trace = variation_trace(d, z0, grid, detail::kernel_options(cfg));
  detail::deliver(cfg, trace_csv(trace), out);
  out << detail::json_line(trace_report_json(trace_report(trace)));
  return 0;
}

inline int cmd_extension(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  const KernelOptions opt = detail::kernel_options(cfg);
  ExtensionSolution sol;
  if (cfg.qp) {
    QuadratureGrid grid;
    const BergmanBasis basis = detail::qp_basis(d, opt, grid);
    sol = minimal_extension_numeric(basis, grid, z0, log_capacity(d, z0).value);
  } else {
    sol = minimal_extension_closed(d, z0, opt);
  }
  detail::deliver(cfg, detail::json_line(extension_json(sol)), out);
  return 0;
}

inline int cmd_map(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec d = detail::domain_from(cfg);
  const Complex z0 = detail::point_from(cfg.z0_parts, "--z0");
  if (!cfg.got_s) fail_validation("invalid-arguments", "--s is required for map");
  const DomainSpec sub = sublevel_domain(d, z0, cfg.s);
  std::vector<Complex> samples = {z0};
  if (auto eq = equivalent_disc(flatten_punctures(sub).clean)) {
    const int n = cfg.grid > 0 ? cfg.grid : 16;
    for (int k = 1; k <= n; ++k) {
      const double theta = 2.0 * pi * k / n;
      samples.push_back(eq->center + eq->radius * (double(k) / (n + 1)) *
                                         Complex{std::cos(theta), std::sin(theta)});
    }
  } else {
    samples.clear();  // let the reconstruction raise its own route error
  }
  const SampledMap map = riemann_map_from_kernel(d, z0, cfg.s, samples);
  detail::deliver(cfg, map_csv(map), out);
  out << detail::json_line([&] {
    const MapReport rep = map_validation(map, d, z0, cfg.s);
    nlohmann::ordered_json j;
    j["green_residual"] = rep.green_residual;
    j["pole_gap"] = rep.pole_gap;
    j["derivative_positive"] = rep.derivative_positive;
    j["corollary_residual"] = rep.corollary_residual;
    j["pass"] = rep.pass;
    return j;
  }());
  return 0;
}

namespace detail {

struct Check {
  std::string label;
  double value = 0.0;
  bool ok = false;
};

inline void report(std::ostream& out, std::vector<Check>& acc, const std::string& label,
                   double value, bool ok) {
  out << (ok ? "ok   " : "FAIL ") << label << " value=" << format_g(value) << "\n";
  acc.push_back({label, value, ok});
}

}  // namespace detail

/// Fixed invariant sweep across every module; prints one line per check.
/// Deterministic by construction, so two runs emit identical bytes.
inline bool selftest(std::ostream& out) {
  std::vector<detail::Check> checks;
  auto line = [&](const std::string& label, double value, bool ok) {
    detail::report(out, checks, label, value, ok);
  };

  const auto disc = make_unit_disc();
  const auto ann25 = make_annulus(0.25);

  {  // geometry: JSON round trip and membership
    const DomainSpec back = domain_from_json(domain_to_json(ann25));
    const bool ok = back.is<Annulus>() && back.as<Annulus>().q == 0.25 &&
                    contains(back, Complex(0.5)) && !contains(back, Complex(0.1));
    line("geometry/json-roundtrip", back.as<Annulus>().q, ok);
  }
  {  // green: probe extraction agrees with the closed form
    const double probe = capacity_via_probes(disc, Complex(0.3)).value;
    const double closed = log_capacity(disc, Complex(0.3)).value;
    line("green/probe-vs-closed", std::abs(probe - closed), std::abs(probe - closed) < 1e-6);
  }
  {  // bergman: series vs forced Gram route, and the reproducing property
    KernelOptions opt;
    opt.force_numeric = true;
    opt.resolution = 256;
    const double series = kernel_diag(ann25, Complex(0.5)).value.real();
    const double gram = kernel_diag(ann25, Complex(0.5), opt).value.real();
    const double rel = std::abs(series - gram) / series;
    line("bergman/route-cross", rel, rel < 1e-3);
    const double rep = reproducing_residual(disc, Complex(0.3), build_quadrature(disc, 256, 1));
    line("bergman/reproducing", rep, rep < 1e-3);
  }
  {  // suita: equality on discs, strict excess on the wide annulus
    double worst = 0.0;
    for (Complex z0 : {Complex(0.0), Complex(0.3), Complex(0.6), Complex(0.3, 0.4)})
      worst = std::max(worst, std::abs(suita_ratio(disc, z0).ratio - 1.0));
    line("suita/disc-equality", worst, worst < 1e-12);
    const double wide = suita_ratio(make_annulus(0.1), Complex(std::sqrt(0.1))).ratio;
    line("suita/annulus-excess", wide - 1.0, wide > 1.0 + 1e-3);
    const double curv_d = curvature_residual(disc, Complex(0.3), 1e-3);
    line("suita/curvature-disc", curv_d, curv_d < 1e-4);
    const double curv_a = curvature_residual(make_annulus(0.3), Complex(std::sqrt(0.3)), 1e-2);
    line("suita/curvature-annulus", curv_a, curv_a < 1e-2);
    const auto vol = volume_bound_check(disc, Complex(0.0), build_quadrature(disc, 256, 1));
    line("suita/volume-equality", vol.product, std::abs(vol.product - 1.0) < 1e-3);
    const double cb = analytic_capacity_disc(1.0, Complex(0.6));
    line("suita/analytic-capacity", cb, std::abs(cb - 1.0 / 0.64) < 1e-12);
  }
  {  // variation: harmonic trace on discs, convex and monotone on annuli
    const auto dtrace = variation_trace(disc, Complex(0.4), default_s_grid());
    const double harm = harmonicity_residual(dtrace);
    line("variation/disc-harmonic", harm, harm < 1e-8);
    auto grid = default_s_grid();
    grid.push_back(0.0);
    const auto atrace = variation_trace(ann25, Complex(0.5), grid);
    const auto conv = convexity_report(atrace);
    line("variation/annulus-convex", conv.min_second_diff, conv.pass);
    const auto mono = monotone_report(atrace);
    line("variation/annulus-monotone", mono.max_violation, mono.pass);
    const double slope = tail_slope(atrace);
    line("variation/tail-slope", slope, std::abs(slope + 2.0) < 0.05);
    const double lemma = key_lemma_residual(disc, Complex(0.0), Complex(0.2), -1.0);
    line("variation/key-lemma-disc", lemma, lemma < 1e-8);
    const double pde = pde_residual(disc, Complex(0.0), Complex(0.1), -1.0, 1e-3);
    line("variation/pde-disc", pde, pde < 1e-5);
    const double scal = capacity_scaling_check(disc, Complex(0.0), -0.5);
    line("variation/capacity-scaling", scal, scal < 1e-6);
  }
  {  // extension: sqrt(pi) saturation, qp agreement, bound co-occurrence
    const double root_pi = std::sqrt(pi);
    const auto closed = minimal_extension_closed(disc, Complex(0.5));
    line("extension/disc-saturation", closed.norm, std::abs(closed.norm - root_pi) < 1e-12);
    KernelOptions opt;
    opt.resolution = 256;
    QuadratureGrid grid;
    const BergmanBasis basis = detail::qp_basis(disc, opt, grid);
    const auto qp = minimal_extension_numeric(basis, grid, Complex(0.3),
                                              log_capacity(disc, Complex(0.3)).value);
    line("extension/qp-route", qp.norm, std::abs(qp.norm - root_pi) < 1e-3 * root_pi);
    const auto eq_disc = extension_bound_check(disc, Complex(0.3));
    const auto eq_ann = extension_bound_check(make_annulus(0.1), Complex(std::sqrt(0.1)));
    line("extension/equality-cooccurrence", eq_ann.norm,
         eq_disc.equality && eq_disc.pass && eq_ann.pass && !eq_ann.equality);
    const double btau = btau_residual(disc, Complex(0.0), Complex(0.1), -0.7);
    line("extension/btau-vs-ftau", btau, btau < 1e-4);
    const auto ft = ftau_check(disc, Complex(0.0), -0.7);
    line("extension/ftau-norm", ft.norm,
         std::abs(ft.norm - root_pi * std::exp(-0.7)) < 1e-4 * root_pi);
  }
  {  // mapping: identity reconstruction, Moebius case, tamper detection
    const std::vector<Complex> pts = {Complex(0.1), Complex(0.2, -0.1), Complex(0.0, 0.3)};
    const auto idmap = riemann_map_from_kernel(disc, Complex(0.0), -1.0, pts);
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      worst = std::max(worst, std::abs(idmap.samples[i].f0 - pts[i]));
    line("mapping/identity", worst, worst < 1e-8);
    const auto m = local_uniformizer_disc(1.0, Complex(0.3));
    const std::vector<Complex> opts = {Complex(0.3), Complex(0.5), Complex(0.3, 0.3)};
    const auto offmap = riemann_map_from_kernel(disc, Complex(0.3), -0.7, opts);
    double moeb = 0.0;
    for (const auto& smp : offmap.samples) moeb = std::max(moeb, std::abs(smp.f0 - m(smp.t)));
    line("mapping/moebius", moeb, moeb < 1e-8);
    const auto rep = map_validation(offmap, disc, Complex(0.3), -0.7);
    line("mapping/validation", rep.corollary_residual, rep.pass);
    auto tampered = offmap;
    for (auto& smp : tampered.samples) smp.f0 *= std::polar(1.0, pi / 4.0);
    const auto bad = map_validation(tampered, disc, Complex(0.3), -0.7);
    line("mapping/tamper-detection", 0.0, !bad.derivative_positive && !bad.pass);
  }
  {  // io/cli: repeated serialization is byte-identical
    const auto recs = suita_scan(disc, {Complex(0.0), Complex(0.4), Complex(0.1, 0.2)});
    const bool same_scan = scan_csv(recs) == scan_csv(suita_scan(disc, {Complex(0.0), Complex(0.4), Complex(0.1, 0.2)}));
    const auto tr = variation_trace(disc, Complex(0.2), default_s_grid());
    const bool same_trace = trace_csv(tr) == trace_csv(variation_trace(disc, Complex(0.2), default_s_grid()));
    line("io/determinism", 0.0, same_scan && same_trace);
  }

  std::size_t failed = 0;
  for (const auto& c : checks) failed += c.ok ? 0 : 1;
  out << (failed == 0 ? "selftest: all " : "selftest: FAILED ") << checks.size() - failed << "/"
      << checks.size() << " checks passed\n";
  return failed == 0;
}

inline int cmd_selftest(const RunConfig&, std::ostream& out) { return selftest(out) ? 0 : 1; }

struct CommandEntry {
  const char* name;
  const char* help;
  int (*handler)(const RunConfig&, std::ostream&);
};

inline constexpr std::array<CommandEntry, 9> command_table = {{
    {"kernel", "Bergman kernel value at --z0 (diagonal) or --t vs --z0", cmd_kernel},
    {"green", "Green function G(t, z0)", cmd_green},
    {"capacity", "logarithmic capacity c(z0)", cmd_capacity},
    {"ratio", "pi K / c^2 with curvature and methods", cmd_ratio},
    {"scan", "ratio table over interior probe points", cmd_scan},
    {"variation", "sublevel kernel trace with convexity/monotone report", cmd_variation},
    {"extension", "minimal point-constrained extension (closed or --qp)", cmd_extension},
    {"map", "Riemann map samples of a sublevel with validation report", cmd_map},
    {"selftest", "full invariant sweep, nonzero exit on any failure", cmd_selftest},
}};

inline int run(const std::vector<std::string>& args, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"Bergman kernels, capacities and the pi K >= c^2 experiments"};
  app.require_subcommand(1);
  std::array<CLI::App*, command_table.size()> subs{};
  for (std::size_t i = 0; i < command_table.size(); ++i) {
    CLI::App* sub = app.add_subcommand(command_table[i].name, command_table[i].help);
    sub->add_option("--domain", cfg.domain_text, "domain JSON or @file");
    sub->add_option("--z0", cfg.z0_parts, "pole RE IM")->expected(2);
    sub->add_option("--t", cfg.t_parts, "evaluation point RE IM")->expected(2);
    sub->add_option("--s", cfg.s, "sublevel value (< 0)")->each([&](const std::string&) {
      cfg.got_s = true;
    });
    sub->add_option("--s-geom", cfg.s_geom, "geometric level grid MIN MAX N")->expected(3);
    sub->add_option("--grid", cfg.grid, "resolution or sample count");
    sub->add_option("--seed", cfg.seed, "grid seed");
    sub->add_option("--tol", cfg.tol, "relative tolerance");
    sub->add_option("--out", cfg.out_path, "output file (default stdout)");
    sub->add_flag("--force-numeric", cfg.force_numeric, "skip analytic kernel routes");
    sub->add_flag("--qp", cfg.qp, "solve the constrained quadratic program");
    sub->add_option("--dump-gram", cfg.gram_path, "write the Gram matrix CSV here");
    subs[i] = sub;
  }

  std::vector<const char*> argv;
  argv.push_back("suita-lab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    out << detail::json_line(
        error_json(Error(ErrorKind::validation, "invalid-arguments", e.what())));
    return 2;
  }

  try {
    for (std::size_t i = 0; i < command_table.size(); ++i)
      if (subs[i]->parsed()) return command_table[i].handler(cfg, out);
    fail_validation("invalid-arguments", "no subcommand given");
  } catch (const Error& e) {
    out << detail::json_line(error_json(e));
    return e.kind == ErrorKind::validation ? 2 : 3;
  } catch (const std::exception& e) {
    out << detail::json_line(error_json(Error(ErrorKind::numerical, "internal", e.what())));
    return 3;
  }
  return 0;
}

}  // namespace suita::cli
