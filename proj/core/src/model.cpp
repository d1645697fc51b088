#include "mcfa/model.hpp"

#include <fstream>

#include "mcfa/errors.hpp"
#include "mcfa/gaussian.hpp"
#include "mcfa/link.hpp"

namespace mcfa {

std::string to_string(ModelKind kind) {
  return kind == ModelKind::logistic ? "logistic" : "gaussian";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "logistic") return ModelKind::logistic;
  if (s == "gaussian") return ModelKind::gaussian;
  throw DomainError("unknown model '" + s + "' (expected logistic or gaussian)");
}

namespace {

std::vector<EntryIndex> all_cells(std::size_t rows, std::size_t cols) {
  std::vector<EntryIndex> all;
  all.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      all.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c)});
  return all;
}

void check_shape(const FittedModel& m) {
  const std::size_t want = m.kind == ModelKind::logistic
                               ? static_cast<std::size_t>(m.classes - 1)
                               : 1;
  if (m.slices.size() != want)
    throw StructuralError("FittedModel: wrong number of slice decompositions");
}

}  // namespace

std::vector<double> FittedModel::probabilities(
    std::span<const EntryIndex> entries) const {
  check_shape(*this);
  const auto k = static_cast<std::size_t>(classes);
  std::vector<std::vector<double>> values;
  for (const auto& s : slices) values.push_back(entry_values(s, entries));
  std::vector<double> out(entries.size() * k);
  if (kind == ModelKind::logistic) {
    const LinkModel link(classes);
    std::vector<double> x(k - 1);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::size_t l = 0; l + 1 < k; ++l) x[l] = values[l][i];
      link.class_probabilities(x, {out.data() + i * k, k});
    }
  } else {
    for (std::size_t i = 0; i < entries.size(); ++i)
      gaussian_class_probs(values[0][i], sigma_hat, classes, {out.data() + i * k, k});
  }
  return out;
}

std::vector<double> FittedModel::log_probabilities(
    std::span<const EntryIndex> entries) const {
  check_shape(*this);
  const auto k = static_cast<std::size_t>(classes);
  std::vector<std::vector<double>> values;
  for (const auto& s : slices) values.push_back(entry_values(s, entries));
  std::vector<double> out(entries.size() * k);
  if (kind == ModelKind::logistic) {
    const LinkModel link(classes);
    std::vector<double> x(k - 1);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      for (std::size_t l = 0; l + 1 < k; ++l) x[l] = values[l][i];
      link.class_log_probabilities(x, {out.data() + i * k, k});
    }
  } else {
    for (std::size_t i = 0; i < entries.size(); ++i)
      gaussian_class_log_probs(values[0][i], sigma_hat, classes, {out.data() + i * k, k});
  }
  return out;
}

std::vector<double> FittedModel::dense_log_probabilities() const {
  return log_probabilities(all_cells(rows, cols));
}

std::vector<double> FittedModel::dense_probabilities() const {
  return probabilities(all_cells(rows, cols));
}

nlohmann::json to_json(const FittedModel& m) {
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : m.slices) {
    nlohmann::json atoms = nlohmann::json::array();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto& a = s.atoms()[k];
      atoms.push_back({{"weight", s.weights()[k]},
                       {"u", std::vector<double>(a.u().begin(), a.u().end())},
                       {"v", std::vector<double>(a.v().begin(), a.v().end())}});
    }
    slices.push_back({{"atoms", atoms}});
  }
  return {{"format", "mcfa-model-1"},
          {"model", to_string(m.kind)},
          {"classes", m.classes},
          {"rows", m.rows},
          {"cols", m.cols},
          {"lambda", m.lambda},
          {"sigma_hat", m.sigma_hat},
          {"slices", slices}};
}

FittedModel fitted_model_from_json(const nlohmann::json& j) {
  FittedModel m;
  try {
    m.kind = model_kind_from_string(j.at("model").get<std::string>());
    m.classes = j.at("classes").get<int>();
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.lambda = j.at("lambda").get<double>();
    m.sigma_hat = j.at("sigma_hat").get<double>();
    for (const auto& s : j.at("slices")) {
      AtomicDecomposition d(m.rows, m.cols);
      for (const auto& a : s.at("atoms")) {
        const auto u = a.at("u").get<std::vector<double>>();
        const auto v = a.at("v").get<std::vector<double>>();
        d.add(Atom(Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size())),
                   Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()))),
              a.at("weight").get<double>());
      }
      m.slices.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
  check_shape(m);
  return m;
}

void save_model(const std::filesystem::path& path, const FittedModel& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json(m).dump() << '\n';
}

FittedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return fitted_model_from_json(j);
}

}  // namespace mcfa
