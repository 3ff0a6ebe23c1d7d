#include "sepc/model_io.hpp"

#include <chrono>
#include <fstream>

#include <json.hpp>

#include "sepc/errors.hpp"

namespace sepc {

namespace {

using nlohmann::json;

json config_to_json(const Config& c) {
  return json{{"n_imp", c.n_imp},
              {"tol_fit", c.tol_fit},
              {"tol_qp", c.tol_qp},
              {"tol_membership", c.tol_membership},
              {"abstain_band", c.abstain_band},
              {"jitter_radius_frac", c.jitter_radius_frac},
              {"seed", c.seed},
              {"folds", c.folds},
              {"test_fraction", c.test_fraction}};
}

Config config_from_json(const json& j) {
  Config c;
  c.n_imp = j.at("n_imp").get<int>();
  c.tol_fit = j.at("tol_fit").get<double>();
  c.tol_qp = j.at("tol_qp").get<double>();
  c.tol_membership = j.at("tol_membership").get<double>();
  c.abstain_band = j.at("abstain_band").get<double>();
  c.jitter_radius_frac = j.at("jitter_radius_frac").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.folds = j.at("folds").get<int>();
  c.test_fraction = j.at("test_fraction").get<double>();
  return c;
}

json ellipsoid_entry_to_json(const PartitionEllipsoid& pe) {
  const Eigen::Index n = pe.e.dim();
  std::vector<double> a(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a[static_cast<std::size_t>(i * n + j)] = pe.e.shape(i, j);
    }
  }
  std::vector<double> b(pe.e.offset.data(), pe.e.offset.data() + n);
  json out{{"label", pe.label},
           {"A", a},
           {"b", b},
           {"count_pos", pe.count_pos},
           {"count_neg", pe.count_neg},
           {"created_iteration", pe.created_iteration},
           {"terminal", pe.terminal},
           {"impure_at_creation", pe.impure_at_creation}};
  if (pe.e.degenerate_radius) {
    out["degenerate_radius"] = *pe.e.degenerate_radius;
  } else {
    out["degenerate_radius"] = nullptr;
  }
  return out;
}

PartitionEllipsoid ellipsoid_entry_from_json(const json& j, Eigen::Index n) {
  PartitionEllipsoid pe;
  const auto a = j.at("A").get<std::vector<double>>();
  const auto b = j.at("b").get<std::vector<double>>();
  if (a.size() != static_cast<std::size_t>(n * n) ||
      b.size() != static_cast<std::size_t>(n)) {
    throw CorruptModel("ellipsoid coefficient block has wrong size");
  }
  pe.e.shape.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) {
      pe.e.shape(i, k) = a[static_cast<std::size_t>(i * n + k)];
    }
  }
  pe.e.offset = Eigen::Map<const Eigen::VectorXd>(b.data(), n);
  if (!j.at("degenerate_radius").is_null()) {
    pe.e.degenerate_radius = j.at("degenerate_radius").get<double>();
  }
  pe.e.validate();
  pe.label = j.at("label").get<int>();
  if (pe.label != 1 && pe.label != -1) {
    throw CorruptModel("ellipsoid label must be +1 or -1");
  }
  pe.count_pos = j.at("count_pos").get<Eigen::Index>();
  pe.count_neg = j.at("count_neg").get<Eigen::Index>();
  pe.created_iteration = j.at("created_iteration").get<int>();
  pe.terminal = j.at("terminal").get<bool>();
  pe.impure_at_creation = j.at("impure_at_creation").get<Eigen::Index>();
  return pe;
}

json model_to_json(const PartitionModel& m) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["dimension"] = m.dim;
  j["totals"] = {{"positive", m.total_pos}, {"negative", m.total_neg}};
  j["config"] = config_to_json(m.config);
  j["iterations"] = m.iterations;
  j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();

  json ellipsoids = json::array();
  for (const auto& pe : m.positive) ellipsoids.push_back(ellipsoid_entry_to_json(pe));
  for (const auto& pe : m.negative) ellipsoids.push_back(ellipsoid_entry_to_json(pe));
  j["ellipsoids"] = std::move(ellipsoids);

  json leftovers = json::array();
  for (const auto& [p, label] : m.leftovers) {
    leftovers.push_back(
        {{"point", std::vector<double>(p.data(), p.data() + p.size())},
         {"label", label}});
  }
  j["leftovers"] = std::move(leftovers);

  json train;
  train["labels"] = m.train_labels;
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.train_points.rows(); ++r) {
    const Eigen::VectorXd row = m.train_points.row(r);
    rows.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  train["points"] = std::move(rows);
  j["train"] = std::move(train);
  return j;
}

PartitionModel model_from_json(const json& j) {
  const int version = j.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw VersionMismatch("file format " + std::to_string(version) +
                          ", expected " + std::to_string(kModelFormatVersion));
  }
  PartitionModel m;
  m.dim = j.at("dimension").get<Eigen::Index>();
  if (m.dim < 1) throw CorruptModel("dimension must be positive");
  m.total_pos = j.at("totals").at("positive").get<Eigen::Index>();
  m.total_neg = j.at("totals").at("negative").get<Eigen::Index>();
  m.config = config_from_json(j.at("config"));
  m.iterations = j.at("iterations").get<int>();

  for (const auto& je : j.at("ellipsoids")) {
    PartitionEllipsoid pe = ellipsoid_entry_from_json(je, m.dim);
    (pe.label > 0 ? m.positive : m.negative).push_back(std::move(pe));
  }

  for (const auto& jl : j.at("leftovers")) {
    const auto p = jl.at("point").get<std::vector<double>>();
    if (p.size() != static_cast<std::size_t>(m.dim)) {
      throw CorruptModel("leftover point has wrong dimension");
    }
    m.leftovers.emplace_back(
        Eigen::Map<const Eigen::VectorXd>(p.data(), m.dim),
        jl.at("label").get<int>());
  }

  const auto& train = j.at("train");
  m.train_labels = train.at("labels").get<std::vector<int>>();
  const auto& rows = train.at("points");
  m.train_points.resize(static_cast<Eigen::Index>(rows.size()), m.dim);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    const auto vals = row.get<std::vector<double>>();
    if (vals.size() != static_cast<std::size_t>(m.dim)) {
      throw CorruptModel("training row has wrong dimension");
    }
    m.train_points.row(r++) = Eigen::Map<const Eigen::VectorXd>(
        vals.data(), m.dim);
  }
  if (m.train_labels.size() != static_cast<std::size_t>(m.train_points.rows())) {
    throw CorruptModel("training labels and points disagree in length");
  }
  return m;
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
  if (bundle.models.empty()) throw EmptyModel("nothing to save");
  json j;
  if (bundle.binary()) {
    j = model_to_json(bundle.models[0]);
    j["kind"] = "binary";
  } else {
    j["format_version"] = kModelFormatVersion;
    j["kind"] = "one_vs_all";
    json models = json::array();
    for (const auto& m : bundle.models) models.push_back(model_to_json(m));
    j["models"] = std::move(models);
  }
  j["class_values"] = bundle.class_values;

  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write to " + path + " failed");
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CorruptModel(std::string("json parse: ") + e.what());
  }

  try {
    ModelBundle bundle;
    const std::string kind = j.value("kind", "binary");
    if (kind == "one_vs_all") {
      const int version = j.at("format_version").get<int>();
      if (version != kModelFormatVersion) {
        throw VersionMismatch("file format " + std::to_string(version) +
                              ", expected " +
                              std::to_string(kModelFormatVersion));
      }
      for (const auto& jm : j.at("models")) {
        bundle.models.push_back(model_from_json(jm));
      }
    } else {
      bundle.models.push_back(model_from_json(j));
    }
    if (j.contains("class_values")) {
      bundle.class_values = j.at("class_values").get<std::vector<std::string>>();
    }
    if (bundle.class_values.empty()) {
      bundle.class_values = {"0", "1"};
    }
    return bundle;
  } catch (const json::exception& e) {
    throw CorruptModel(std::string("model structure: ") + e.what());
  }
}

}  // namespace sepc
