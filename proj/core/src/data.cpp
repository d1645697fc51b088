#include "mcfa/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "mcfa/errors.hpp"

namespace mcfa {

void SyntheticSpec::validate() const {
  if (m1 == 0 || m2 == 0) throw DomainError("SyntheticSpec: empty dimensions");
  if (m1 > UINT32_MAX || m2 > UINT32_MAX)
    throw DomainError("SyntheticSpec: dimensions exceed 32-bit indices");
  if (classes < 2) throw DomainError("SyntheticSpec: need at least 2 classes");
  if (!(gamma_scale > 0)) throw DomainError("SyntheticSpec: Gamma must be > 0");
  if (alpha.empty()) throw DomainError("SyntheticSpec: no rank components");
}

nlohmann::json to_json(const SyntheticSpec& s) {
  return {{"m1", s.m1},       {"m2", s.m2},
          {"classes", s.classes}, {"alpha", s.alpha},
          {"gamma_scale", s.gamma_scale}, {"seed", s.seed}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  s.m1 = j.at("m1").get<std::size_t>();
  s.m2 = j.at("m2").get<std::size_t>();
  s.classes = j.at("classes").get<int>();
  s.alpha = j.at("alpha").get<std::vector<double>>();
  s.gamma_scale = j.at("gamma_scale").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

std::vector<double> calibrated_offsets(int classes) {
  if (classes < 2) throw DomainError("calibrated_offsets: need at least 2 classes");
  // P(Y = l | Y >= l) = 1 / (K - l + 1)  <=>  sigma(eta_l) = 1/(K - l + 1).
  std::vector<double> eta;
  for (int l = 1; l < classes; ++l)
    eta.push_back(-std::log(static_cast<double>(classes - l)));
  return eta;
}

ParameterTensor generate_truth(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal;
  const auto m1 = static_cast<Eigen::Index>(spec.m1);
  const auto m2 = static_cast<Eigen::Index>(spec.m2);
  const double scale = spec.gamma_scale * std::sqrt(static_cast<double>(spec.m1) *
                                                    static_cast<double>(spec.m2));
  const auto eta = calibrated_offsets(spec.classes);
  std::vector<DenseMatrix> slices;
  for (int l = 0; l + 1 < spec.classes; ++l) {
    DenseMatrix x = DenseMatrix::Constant(m1, m2, eta[static_cast<std::size_t>(l)]);
    for (double a : spec.alpha) {
      Vector u(m1), v(m2);
      for (auto& c : u) c = normal(rng);
      for (auto& c : v) c = normal(rng);
      u.normalize();
      v.normalize();
      x.noalias() += (scale * a) * u * v.transpose();
    }
    slices.push_back(std::move(x));
  }
  return ParameterTensor(std::move(slices));
}

SamplingDistribution SamplingDistribution::uniform(std::size_t m1, std::size_t m2) {
  if (m1 == 0 || m2 == 0) throw DomainError("SamplingDistribution: empty shape");
  SamplingDistribution d;
  d.kind_ = Kind::uniform;
  d.m1_ = m1;
  d.m2_ = m2;
  d.mu_ = 1.0;
  d.nu_ = 1.0;
  return d;
}

SamplingDistribution SamplingDistribution::row_column(std::size_t m1,
                                                      std::size_t m2,
                                                      std::uint64_t seed,
                                                      double min_mu) {
  if (m1 == 0 || m2 == 0) throw DomainError("SamplingDistribution: empty shape");
  if (!(min_mu > 0) || min_mu > 1)
    throw DomainError("SamplingDistribution: min_mu must lie in (0, 1]");
  SamplingDistribution d;
  d.kind_ = Kind::row_column_product;
  d.m1_ = m1;
  d.m2_ = m2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, std::log(3.0));
  std::vector<double> r(m1), c(m2);
  for (auto& x : r) x = std::exp(unif(rng));
  for (auto& x : c) x = std::exp(unif(rng));
  const double total = std::accumulate(r.begin(), r.end(), 0.0) *
                       std::accumulate(c.begin(), c.end(), 0.0);
  const double cells = static_cast<double>(m1) * static_cast<double>(m2);
  d.pi_.resize(m1 * m2);
  for (std::size_t k = 0; k < m1; ++k)
    for (std::size_t kp = 0; kp < m2; ++kp)
      d.pi_[k * m2 + kp] = r[k] * c[kp] / total;
  // Raising small cells to the floor and renormalizing by the new mass Z
  // shrinks the floor to floor/Z, so solve for the floor that lands on min_mu.
  double floor = min_mu / cells;
  for (int it = 0; it < 100; ++it) {
    double mass = 0.0;
    for (double p : d.pi_) mass += std::max(p, floor);
    const double achieved = floor / mass * cells;
    if (achieved >= min_mu) break;
    floor *= min_mu / achieved * (1 + 1e-12);
  }
  double mass = 0.0;
  for (double& p : d.pi_) {
    p = std::max(p, floor);
    mass += p;
  }
  for (double& p : d.pi_) p /= mass;
  d.finalize();
  return d;
}

void SamplingDistribution::finalize() {
  cdf_.resize(pi_.size());
  std::partial_sum(pi_.begin(), pi_.end(), cdf_.begin());
  std::vector<double> rows(m1_, 0.0), cols(m2_, 0.0);
  double mn = 1.0;
  for (std::size_t k = 0; k < m1_; ++k)
    for (std::size_t kp = 0; kp < m2_; ++kp) {
      const double p = pi_[k * m2_ + kp];
      rows[k] += p;
      cols[kp] += p;
      mn = std::min(mn, p);
    }
  mu_ = mn * static_cast<double>(m1_) * static_cast<double>(m2_);
  const double mx = std::max(*std::max_element(rows.begin(), rows.end()),
                             *std::max_element(cols.begin(), cols.end()));
  nu_ = mx * static_cast<double>(std::min(m1_, m2_));
}

double SamplingDistribution::probability(std::size_t row, std::size_t col) const {
  if (row >= m1_ || col >= m2_) throw StructuralError("probability: index out of range");
  if (kind_ == Kind::uniform)
    return 1.0 / (static_cast<double>(m1_) * static_cast<double>(m2_));
  return pi_[row * m2_ + col];
}

EntryIndex SamplingDistribution::draw(std::mt19937_64& rng) const {
  if (kind_ == Kind::uniform) {
    std::uniform_int_distribution<std::uint32_t> rd(0, static_cast<std::uint32_t>(m1_ - 1));
    std::uniform_int_distribution<std::uint32_t> cd(0, static_cast<std::uint32_t>(m2_ - 1));
    const auto r = rd(rng);
    return {r, cd(rng)};
  }
  std::uniform_real_distribution<double> unif(0.0, cdf_.back());
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), unif(rng));
  auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(
      it - cdf_.begin(), static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  return {static_cast<std::uint32_t>(idx / m2_), static_cast<std::uint32_t>(idx % m2_)};
}

ObservationSet sample_observations(const ParameterTensor& truth,
                                   const SamplingDistribution& dist,
                                   const LinkModel& link, std::size_t n,
                                   std::uint64_t seed) {
  if (n == 0) throw DomainError("sample_observations: n must be >= 1");
  if (truth.rows() != dist.rows() || truth.cols() != dist.cols())
    throw StructuralError("sample_observations: distribution shape differs from truth");
  if (truth.slice_count() != link.slice_count())
    throw StructuralError("sample_observations: slice count differs from the link");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto q = static_cast<std::size_t>(link.slice_count());
  std::vector<double> x(q), p(q + 1);
  std::vector<Observation> records;
  records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = dist.draw(rng);
    truth.entry(e.row, e.col, x);
    link.class_probabilities(x, p);
    const double u = unif(rng);
    double acc = 0.0;
    std::uint32_t label = static_cast<std::uint32_t>(p.size());
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      acc += p[j];
      if (u < acc) {
        label = static_cast<std::uint32_t>(j + 1);
        break;
      }
    }
    records.push_back({e.row, e.col, label});
  }
  return ObservationSet(truth.rows(), truth.cols(), link.classes(), std::move(records));
}

ObservationSet parse_movielens(std::istream& in) {
  std::vector<Observation> records;
  std::uint32_t max_user = 0, max_item = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    long long user = 0, item = 0, rating = 0, timestamp = 0;
    std::string extra;
    if (!(fields >> user >> item >> rating >> timestamp) || (fields >> extra))
      throw ParseError("MovieLens: expected user, item, rating, timestamp", line_no);
    if (user < 1 || item < 1 || user > UINT32_MAX || item > UINT32_MAX)
      throw ParseError("MovieLens: ids must be positive 32-bit integers", line_no);
    if (rating < 1 || rating > 5)
      throw DataError("MovieLens: rating " + std::to_string(rating) +
                      " outside 1..5 (line " + std::to_string(line_no) + ")");
    records.push_back({static_cast<std::uint32_t>(user - 1),
                       static_cast<std::uint32_t>(item - 1),
                       static_cast<std::uint32_t>(rating)});
    max_user = std::max(max_user, static_cast<std::uint32_t>(user));
    max_item = std::max(max_item, static_cast<std::uint32_t>(item));
  }
  if (records.empty()) throw DataError("MovieLens: no ratings found");
  return ObservationSet(max_user, max_item, 5, std::move(records));
}

ObservationSet load_movielens(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open MovieLens file " + path.string());
  return parse_movielens(in);
}

Split split(const ObservationSet& obs, double test_frac, double val_frac,
            std::uint64_t seed) {
  if (!(test_frac > 0 && test_frac < 1) || !(val_frac >= 0 && val_frac < 1))
    throw DomainError("split: test fraction must lie in (0, 1), validation in [0, 1)");
  const std::size_t n = obs.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::llround(test_frac * static_cast<double>(n)));
  const auto n_val =
      static_cast<std::size_t>(std::llround(val_frac * static_cast<double>(n - n_test)));
  if (n_test == 0 || (val_frac > 0 && n_val == 0) || n_test + n_val >= n)
    throw DomainError("split: a part would be empty");
  std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> val(perm.begin() + static_cast<std::ptrdiff_t>(n_test),
                               perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_val));
  std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_val),
                                 perm.end());
  for (auto* part : {&test, &val, &train}) std::sort(part->begin(), part->end());
  return {obs.subset(train), obs.subset(val), obs.subset(test)};
}

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("fold_assignment: need at least 2 folds");
  if (n < static_cast<std::size_t>(folds))
    throw DomainError("fold_assignment: fewer observations than folds");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(n);
  for (std::size_t i = 0; i < n; ++i)
    fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  return fold;
}

ObservationSet binarize_one_vs_rest(const ObservationSet& obs, int target) {
  if (target < 1 || target > obs.classes())
    throw DomainError("binarize_one_vs_rest: target outside the label range");
  std::vector<Observation> records(obs.records().begin(), obs.records().end());
  for (auto& r : records) r.label = r.label == static_cast<std::uint32_t>(target) ? 1 : 2;
  return ObservationSet(obs.rows(), obs.cols(), 2, std::move(records));
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8 & 0xff),
                     static_cast<char>(v >> 16 & 0xff), static_cast<char>(v >> 24 & 0xff)};
  out.write(b, 4);
}

std::uint32_t get_u32(const unsigned char* b) {
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void write_header(std::ostream& out, const char* magic, const nlohmann::json& header) {
  const std::string text = header.dump();
  out.write(magic, 8);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

nlohmann::json read_header(std::istream& in, const char* magic,
                           const std::filesystem::path& path) {
  char got[8];
  unsigned char len[4];
  if (!in.read(got, 8) || std::memcmp(got, magic, 8) != 0)
    throw DataError("not a " + std::string(magic, 8) + " file: " + path.string());
  if (!in.read(reinterpret_cast<char*>(len), 4))
    throw DataError("truncated header: " + path.string());
  std::string text(get_u32(len), '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(text.size())))
    throw DataError("truncated header: " + path.string());
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad header in " + path.string() + ": " + e.what());
  }
}

}  // namespace

void write_dataset(const std::filesystem::path& path, const ObservationSet& obs,
                   const nlohmann::json& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_header(out, "MCFADS01",
               {{"rows", obs.rows()},
                {"cols", obs.cols()},
                {"classes", obs.classes()},
                {"count", obs.size()},
                {"meta", meta}});
  for (const auto& r : obs.records()) {
    put_u32(out, r.row);
    put_u32(out, r.col);
    put_u32(out, r.label);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ObservationSet read_dataset(const std::filesystem::path& path, nlohmann::json* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto header = read_header(in, "MCFADS01", path);
  const auto count = header.at("count").get<std::size_t>();
  std::vector<unsigned char> raw(count * 12);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw DataError("truncated records: " + path.string());
  std::vector<Observation> records(count);
  for (std::size_t i = 0; i < count; ++i)
    records[i] = {get_u32(&raw[12 * i]), get_u32(&raw[12 * i + 4]), get_u32(&raw[12 * i + 8])};
  if (meta) *meta = header.value("meta", nlohmann::json::object());
  try {
    return ObservationSet(header.at("rows").get<std::size_t>(),
                          header.at("cols").get<std::size_t>(),
                          header.at("classes").get<int>(), std::move(records));
  } catch (const StructuralError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_tensor(const std::filesystem::path& path, const ParameterTensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_header(out, "MCFATN01",
               {{"rows", t.rows()}, {"cols", t.cols()}, {"slices", t.slice_count()}});
  for (const auto& s : t.slices()) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      std::uint64_t bits;
      const double v = s.data()[i];
      std::memcpy(&bits, &v, 8);
      put_u32(out, static_cast<std::uint32_t>(bits & 0xffffffffu));
      put_u32(out, static_cast<std::uint32_t>(bits >> 32));
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

ParameterTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const auto header = read_header(in, "MCFATN01", path);
  const auto rows = header.at("rows").get<Eigen::Index>();
  const auto cols = header.at("cols").get<Eigen::Index>();
  const auto slices = header.at("slices").get<int>();
  std::vector<DenseMatrix> out;
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows * cols) * 8);
  for (int l = 0; l < slices; ++l) {
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
      throw DataError("truncated tensor: " + path.string());
    DenseMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const auto* b = &raw[static_cast<std::size_t>(i) * 8];
      const std::uint64_t bits = get_u32(b) | static_cast<std::uint64_t>(get_u32(b + 4)) << 32;
      std::memcpy(m.data() + i, &bits, 8);
    }
    out.push_back(std::move(m));
  }
  return ParameterTensor(std::move(out));
}

}  // namespace mcfa
