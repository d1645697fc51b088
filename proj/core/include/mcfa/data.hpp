#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcfa/link.hpp"
#include "mcfa/tensor_model.hpp"

namespace mcfa {

/// Synthetic low-rank tensor: each slice is
///   X^l = Gamma sqrt(m1 m2) sum_k alpha_k u_k^l (v_k^l)^T + eta^l * ones
/// with (u_k^l, v_k^l) uniform on the unit spheres and eta^l chosen so that
/// f(eta) puts mass 1/K on every class.
struct SyntheticSpec {
  std::size_t m1 = 500;
  std::size_t m2 = 300;
  int classes = 2;
  std::vector<double> alpha{2.0, 1.0, 0.5, 0.25, 0.1};
  double gamma_scale = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

/// eta^l = -log(K - l), the offsets giving every class probability 1/K.
std::vector<double> calibrated_offsets(int classes);

ParameterTensor generate_truth(const SyntheticSpec& spec);

/// Distribution Pi of the revealed coordinates.
class SamplingDistribution {
 public:
  enum class Kind { uniform, row_column_product };

  static SamplingDistribution uniform(std::size_t m1, std::size_t m2);
  /// pi ~ r_k c_k' with weights log-uniform in [1, 3], floored so that
  /// min pi >= min_mu / (m1 m2), then renormalized.
  static SamplingDistribution row_column(std::size_t m1, std::size_t m2,
                                         std::uint64_t seed,
                                         double min_mu = 0.3);

  Kind kind() const noexcept { return kind_; }
  std::size_t rows() const noexcept { return m1_; }
  std::size_t cols() const noexcept { return m2_; }
  /// pi_{k,k'}.
  double probability(std::size_t row, std::size_t col) const;
  /// m1 m2 min pi.
  double mu() const noexcept { return mu_; }
  /// (m1 ^ m2) max(R_k, C_k').
  double nu() const noexcept { return nu_; }

  EntryIndex draw(std::mt19937_64& rng) const;

 private:
  SamplingDistribution() = default;
  void finalize();

  Kind kind_ = Kind::uniform;
  std::size_t m1_ = 0, m2_ = 0;
  std::vector<double> pi_;   // row-major, only for the product kind
  std::vector<double> cdf_;  // cumulative pi_
  double mu_ = 1.0;
  double nu_ = 1.0;
};

/// n i.i.d. draws omega_i ~ Pi with labels Y_i ~ f(X_{omega_i}).
ObservationSet sample_observations(const ParameterTensor& truth,
                                   const SamplingDistribution& dist,
                                   const LinkModel& link, std::size_t n,
                                   std::uint64_t seed);

/// MovieLens u.data: "user<TAB>item<TAB>rating<TAB>timestamp", ids 1-based,
/// ratings 1..5.
ObservationSet load_movielens(const std::filesystem::path& path);
ObservationSet parse_movielens(std::istream& in);

struct Split {
  ObservationSet train;
  ObservationSet validation;
  ObservationSet test;
};

/// Record-level split: test_frac of the draws become the test set, then
/// val_frac of the remainder become the validation set (may be 0).
Split split(const ObservationSet& obs, double test_frac, double val_frac,
            std::uint64_t seed);

/// Fold index in [0, folds) for every record; a seeded permutation dealt
/// round-robin, so fold sizes differ by at most one.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

/// Target rating -> class 1, all others -> class 2.
ObservationSet binarize_one_vs_rest(const ObservationSet& obs, int target);

// Dataset container:
//   bytes 0..7   magic "MCFADS01"
//   bytes 8..11  u32 LE header length H
//   next H bytes JSON header {"rows","cols","classes","count", "meta"}
//   count * 12 bytes of u32 LE (row, col, label), row/col 0-based.
void write_dataset(const std::filesystem::path& path, const ObservationSet& obs,
                   const nlohmann::json& meta = nlohmann::json::object());
ObservationSet read_dataset(const std::filesystem::path& path,
                            nlohmann::json* meta = nullptr);

// Dense tensor container:
//   magic "MCFATN01", u32 LE header length, JSON {"rows","cols","slices"},
//   then slices * rows * cols float64 LE values, slice-major then row-major.
void write_tensor(const std::filesystem::path& path, const ParameterTensor& t);
ParameterTensor read_tensor(const std::filesystem::path& path);

}  // namespace mcfa
