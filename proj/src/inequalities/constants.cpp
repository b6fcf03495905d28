#include <cmath>

#include "oplab/inequalities.hpp"
#include "oplab/means.hpp"

namespace oplab::constants {

double kantorovich_power(double m, double M, double alpha, double p) {
  return std::pow(std::pow(m, alpha) + std::pow(M, alpha), 2.0 * p / alpha) /
         (16.0 * std::pow(m, p) * std::pow(M, p));
}

double kantorovich_product_norm(double m, double M, double alpha, double p) {
  return std::pow(std::pow(m, alpha) + std::pow(M, alpha), p / alpha) /
         (4.0 * std::pow(m, p / 2.0) * std::pow(M, p / 2.0));
}

double product_sum(double m, double M, double alpha, double p) {
  return std::pow(std::pow(M, alpha) + std::pow(m, alpha), 2.0 * p / alpha) /
         (2.0 * std::pow(M, p) * std::pow(m, p));
}

double mean_power(double m, double M, double alpha, double p) {
  const double k = kantorovich_constant(M / m);
  return std::pow(std::pow(k, alpha / 2.0) * (std::pow(M, alpha) + std::pow(m, alpha)),
                  2.0 * p / alpha) /
         (16.0 * std::pow(M, p) * std::pow(m, p));
}

double wielandt_factor(double m, double M) {
  const double r = (M - m) / (M + m);
  return r * r;
}

double gumus_norm(double m, double M) {
  return (M - m) * (M - m) / (2.0 * (M + m) * std::sqrt(M * m));
}

double gumus_squared(double m, double M) {
  return std::pow(M - m, 4) / (4.0 * (M + m) * (M + m) * M * m);
}

double zhang_first(double m, double M, double p) {
  return 0.25 * std::pow(wielandt_factor(m, M) * M + 1.0 / m, p);
}

double zhang_second(double m, double M, double p) {
  return std::pow((M - m) / (M + m), p) * std::pow(M / m, p / 2.0);
}

double wielandt_power(double m, double M, double alpha, double p) {
  return std::pow(M - m, p) * std::pow(std::pow(M, alpha) + std::pow(m, alpha), p / alpha) /
         (std::pow(2.0, 2.0 + p / 2.0) * std::pow(M, 0.75 * p) * std::pow(m, 0.75 * p) *
          std::pow(M + m, p / 2.0));
}

}  // namespace oplab::constants
