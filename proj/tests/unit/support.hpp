#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "mcfa/tensor_model.hpp"

namespace testing_support {

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols,
                                     double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = z(rng);
  return m;
}

inline Eigen::VectorXd random_unit(std::mt19937_64& rng, int size) {
  std::normal_distribution<double> z;
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = z(rng);
  return v.normalized();
}

/// Largest singular value by full dense SVD.
inline double dense_sigma_max(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()[0];
}

inline double dense_nuclear(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().sum();
}

/// Uniformly drawn records on an m1 x m2 grid with labels in 1..K.
inline mcfa::ObservationSet random_observations(std::mt19937_64& rng, std::size_t m1,
                                                std::size_t m2, int classes,
                                                std::size_t n) {
  std::uniform_int_distribution<std::uint32_t> row(0, static_cast<std::uint32_t>(m1 - 1));
  std::uniform_int_distribution<std::uint32_t> col(0, static_cast<std::uint32_t>(m2 - 1));
  std::uniform_int_distribution<std::uint32_t> label(1, static_cast<std::uint32_t>(classes));
  std::vector<mcfa::Observation> recs(n);
  for (auto& r : recs) r = {row(rng), col(rng), label(rng)};
  return mcfa::ObservationSet(m1, m2, classes, std::move(recs));
}

/// Every cell observed `reps` times with labels drawn from `probs(r, c)`.
template <typename Probs>
mcfa::ObservationSet full_observations(std::mt19937_64& rng, std::size_t m1,
                                       std::size_t m2, int classes, int reps,
                                       Probs probs) {
  std::vector<mcfa::Observation> recs;
  for (std::size_t r = 0; r < m1; ++r)
    for (std::size_t c = 0; c < m2; ++c) {
      const std::vector<double> p = probs(r, c);
      std::discrete_distribution<int> d(p.begin(), p.end());
      for (int k = 0; k < reps; ++k)
        recs.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c),
                        static_cast<std::uint32_t>(d(rng) + 1)});
    }
  return mcfa::ObservationSet(m1, m2, classes, std::move(recs));
}

inline double log1pexp(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace testing_support
