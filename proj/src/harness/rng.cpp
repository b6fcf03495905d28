#include <cmath>
#include <numbers>

#include "oplab/harness.hpp"

namespace oplab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view name,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = mix64(master ^ mix64(h));
  for (std::uint64_t i : indices) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
  return s;
}

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::log_uniform(double lo, double hi) {
  if (lo == hi) return lo;
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

double RngStream::normal() {
  // Box-Muller; 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex RngStream::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::size_t RngStream::index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

}  // namespace oplab
