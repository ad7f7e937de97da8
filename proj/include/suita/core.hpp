#pragma once

#include <complex>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace suita {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

enum class ErrorKind { validation, numerical };

/// Tagged failure. `tag` is a stable machine-readable identifier
/// (e.g. "empty-domain", "series-diverged"); `kind` drives CLI exit codes.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string tag, const std::string& msg)
      : std::runtime_error(tag + ": " + msg), kind(kind), tag(std::move(tag)) {}
  ErrorKind kind;
  std::string tag;
};

[[noreturn]] inline void fail_validation(const std::string& tag, const std::string& msg) {
  throw Error(ErrorKind::validation, tag, msg);
}
[[noreturn]] inline void fail_numeric(const std::string& tag, const std::string& msg) {
  throw Error(ErrorKind::numerical, tag, msg);
}

inline double sq(double x) { return x * x; }
inline Complex sq_c(Complex z) { return z * z; }

/// splitmix64, used to derive per-ring angular offsets from a grid seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Uniform double in [0,1) from a seed/index pair.
inline double seeded_unit(std::uint64_t seed, std::uint64_t idx) {
  return double(splitmix64(seed ^ (0x517cc1b727220a95ull * (idx + 1))) >> 11) * 0x1.0p-53;
}

inline int thread_budget() {
  if (const char* env = std::getenv("SUITA_LAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Runs fn(i) for i in [0,n). Each index writes only its own output slot, so
/// results are bitwise identical for any thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  int threads = thread_budget();
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t chunk = (n + threads - 1) / std::size_t(threads);
  std::vector<std::future<void>> work;
  for (std::size_t lo = 0; lo < n; lo += chunk) {
    std::size_t hi = std::min(n, lo + chunk);
    work.push_back(std::async(std::launch::async, [lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    }));
  }
  for (auto& w : work) w.get();
}

}  // namespace suita
