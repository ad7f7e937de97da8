#pragma once

// Serialization of results: CSV tables for scans, traces and maps (%.12g,
// C locale, so reruns are byte-identical), JSON for scalar reports. Failed
// trace samples keep their row with the error tag in the method column and
// empty numeric fields: gaps, not drops.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "bergman.hpp"
#include "domain.hpp"
#include "extension.hpp"
#include "green.hpp"
#include "mapping.hpp"
#include "ratio.hpp"
#include "variation.hpp"

namespace suita {

inline std::string format_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

inline std::string scan_csv(const std::vector<SuitaRecord>& records) {
  std::string out = "z0_re,z0_im,K,c,ratio,curvature,method_K,method_c\n";
  for (const auto& r : records) {
    out += format_g(r.z0.real()) + "," + format_g(r.z0.imag()) + "," + format_g(r.K) + "," +
           format_g(r.c) + "," + format_g(r.ratio) + "," + format_g(r.curvature) + "," +
           r.method_K + "," + r.method_c + "\n";
  }
  return out;
}

inline std::string trace_csv(const VariationTrace& trace) {
  std::string out = "re_tau,logK,c_tau,logK_plus_2tau,method\n";
  for (const auto& s : trace.samples) {
    out += format_g(s.re_tau) + ",";
    out += (s.ok ? format_g(s.logK) : std::string()) + ",";
    out += (s.ok ? format_g(s.c_tau) : std::string()) + ",";
    out += (s.ok ? format_g(s.logK_plus_2tau) : std::string()) + ",";
    out += (s.ok ? s.kernel_method : s.error_tag) + "\n";
  }
  return out;
}

inline std::string map_csv(const SampledMap& map) {
  std::string out = "t_re,t_im,f0_re,f0_im\n";
  for (const auto& s : map.samples) {
    out += format_g(s.t.real()) + "," + format_g(s.t.imag()) + "," + format_g(s.f0.real()) +
           "," + format_g(s.f0.imag()) + "\n";
  }
  return out;
}

inline std::string gram_csv(const BergmanBasis& basis) {
  std::string out;
  for (int i = 0; i < basis.gram.rows(); ++i) {
    for (int j = 0; j < basis.gram.cols(); ++j) {
      if (j) out += ",";
      out += format_g(basis.gram(i, j).real()) + "+" + format_g(basis.gram(i, j).imag()) + "i";
    }
    out += "\n";
  }
  return out;
}

inline nlohmann::ordered_json kernel_json(const KernelEstimate& k) {
  nlohmann::ordered_json j;
  j["K"] = detail::complex_json(k.value);
  j["method"] = k.method;
  j["err"] = k.error_estimate;
  j["condition"] = k.condition;
  return j;
}

inline nlohmann::ordered_json green_json(double g) { return {{"G", g}}; }

inline nlohmann::ordered_json capacity_json(const CapacityValue& c) {
  nlohmann::ordered_json j;
  j["capacity"] = c.value;
  j["err"] = c.extrapolation_error;
  j["method"] = c.method;
  return j;
}

inline nlohmann::ordered_json record_json(const SuitaRecord& r) {
  nlohmann::ordered_json j;
  j["z0"] = detail::complex_json(r.z0);
  j["K"] = r.K;
  j["c"] = r.c;
  j["ratio"] = r.ratio;
  j["curvature"] = r.curvature;
  j["method_K"] = r.method_K;
  j["method_c"] = r.method_c;
  return j;
}

inline nlohmann::ordered_json trace_report_json(const TraceReport& rep) {
  nlohmann::ordered_json j;
  j["min_second_diff"] = rep.min_second_diff;
  j["max_abs_second_diff"] = rep.max_abs_second_diff;
  j["slope_tail"] = rep.slope_tail;
  j["pass"] = rep.pass;
  return j;
}

inline nlohmann::ordered_json extension_json(const ExtensionSolution& sol,
                                             bool include_coefficients = true) {
  nlohmann::ordered_json j;
  j["norm"] = sol.norm;
  j["value_at_pole"] = detail::complex_json(sol.value_at_pole);
  j["route"] = sol.route;
  if (include_coefficients && !sol.coefficients.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (Complex c : sol.coefficients) arr.push_back(detail::complex_json(c));
    j["coefficients"] = arr;
  }
  return j;
}

inline nlohmann::ordered_json error_json(const Error& e) {
  nlohmann::ordered_json j;
  j["error"] = e.tag;
  j["kind"] = e.kind == ErrorKind::validation ? "validation" : "numerical";
  j["message"] = e.what();
  return j;
}

inline void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_validation("invalid-output", "cannot open output path " + path);
  out << content;
}

}  // namespace suita
