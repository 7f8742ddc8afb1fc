#ifndef ASDLAB_UTIL_HPP
#define ASDLAB_UTIL_HPP

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace asdlab {

// Worker count: min(hardware, ASDLAB_THREADS). Loops fall back to serial
// when the count is 1 so single-core runs carry no thread overhead.
inline int worker_count() {
  static int n = [] {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("ASDLAB_THREADS")) {
      int cap = std::atoi(env);
      if (cap >= 1 && cap < hw) hw = cap;
    }
    return hw;
  }();
  return n;
}

inline void parallel_for(std::int64_t n, const std::function<void(std::int64_t, std::int64_t)>& body) {
  int nw = worker_count();
  if (nw <= 1 || n < 4096) {
    body(0, n);
    return;
  }
  std::vector<std::thread> ts;
  std::int64_t chunk = (n + nw - 1) / nw;
  for (int w = 0; w < nw; ++w) {
    std::int64_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    ts.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : ts) t.join();
}

// splitmix64: deterministic seeded stream, stable across platforms.
struct Rng {
  std::uint64_t s;
  explicit Rng(std::uint64_t seed) : s(seed ^ 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * (1.0 / 9007199254740992.0); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int index(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

inline std::uint32_t crc32(const unsigned char* data, std::size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::vector<std::uint32_t> t(256);
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  crc = ~crc;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  return ~crc;
}

struct invalid_argument_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
  explicit precondition_error(const std::string& msg, double measured_ = 0.0)
      : std::runtime_error(msg), measured(measured_) {}
  double measured;
};

}  // namespace asdlab

#endif
