#include "rtann/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rtann/rng.hpp"

namespace rtann {

const std::vector<DatasetDescriptor>& dataset_registry() {
  static const std::vector<DatasetDescriptor> registry = {
      {"vehicle", "data/vehicle.csv", "class", 18, 4, 846},
      {"diabetes", "data/diabetes.csv", "class", 8, 2, 768},
      {"german-credit", "data/german-credit.csv", "class", 24, 2, 1000},
  };
  return registry;
}

const DatasetDescriptor* find_descriptor(const std::string& name) {
  for (const DatasetDescriptor& d : dataset_registry()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv_dataset(const DatasetDescriptor& desc) {
  std::ifstream in(desc.path);
  if (!in) {
    throw std::runtime_error("dataset '" + desc.name + "': cannot open file " + desc.path);
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("dataset '" + desc.name + "': file is empty, expected a header row");
  }
  const std::vector<std::string> header_cells = split_line(line);
  std::vector<std::string> header;
  header.reserve(header_cells.size());
  for (const std::string& h : header_cells) header.push_back(trimmed(h));

  int label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == desc.label_column) {
      label_col = static_cast<int>(c);
      break;
    }
  }
  if (label_col < 0) {
    throw std::runtime_error("dataset '" + desc.name + "': header has no label column '" +
                             desc.label_column + "'");
  }

  Dataset ds;
  ds.name = desc.name;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) != label_col) ds.feature_names.push_back(header[c]);
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int row_no = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row_no;
    if (trimmed(line).empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << "dataset '" << desc.name << "': row " << row_no << " has " << cells.size()
         << " cells, header has " << header.size();
      throw std::runtime_error(os.str());
    }
    std::vector<double> feats;
    feats.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const std::string cell = trimmed(cells[c]);
      if (static_cast<int>(c) == label_col) {
        if (cell.empty()) {
          std::ostringstream os;
          os << "dataset '" << desc.name << "': row " << row_no << ", column '"
             << header[c] << "': empty label";
          throw std::runtime_error(os.str());
        }
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), cell);
        if (it == ds.class_names.end()) {
          ds.class_names.push_back(cell);
          labels.push_back(static_cast<int>(ds.class_names.size()) - 1);
        } else {
          labels.push_back(static_cast<int>(it - ds.class_names.begin()));
        }
      } else {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(v)) {
          std::ostringstream os;
          os << "dataset '" << desc.name << "': row " << row_no << ", column '"
             << header[c] << "': non-numeric cell '" << cell << "'";
          throw std::runtime_error(os.str());
        }
        feats.push_back(v);
      }
    }
    rows.push_back(std::move(feats));
  }

  const int n = static_cast<int>(rows.size());
  const int d = static_cast<int>(header.size()) - 1;
  if (desc.n_rows > 0 && n != desc.n_rows) {
    std::ostringstream os;
    os << "dataset '" << desc.name << "': expected " << desc.n_rows << " rows, parsed " << n;
    throw std::runtime_error(os.str());
  }
  if (desc.n_features > 0 && d != desc.n_features) {
    std::ostringstream os;
    os << "dataset '" << desc.name << "': expected " << desc.n_features
       << " feature columns, parsed " << d;
    throw std::runtime_error(os.str());
  }
  if (desc.n_classes > 0 && static_cast<int>(ds.class_names.size()) != desc.n_classes) {
    std::ostringstream os;
    os << "dataset '" << desc.name << "': expected " << desc.n_classes
       << " classes, found " << ds.class_names.size();
    throw std::runtime_error(os.str());
  }

  ds.features.resize(n, d);
  ds.labels.resize(n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < d; ++c) ds.features(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    ds.labels[r] = labels[static_cast<std::size_t>(r)];
  }
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path + " for writing");
  for (int c = 0; c < ds.n_features(); ++c) out << ds.feature_names[static_cast<std::size_t>(c)] << ",";
  out << "class\n";
  char buf[64];
  for (int r = 0; r < ds.n_rows(); ++r) {
    for (int c = 0; c < ds.n_features(); ++c) {
      std::snprintf(buf, sizeof buf, "%.4f", ds.features(r, c));
      out << buf << ",";
    }
    out << ds.class_names[static_cast<std::size_t>(ds.labels[r])] << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write to " + path + " failed");
}

namespace {

// Stand-in recipe: a patchwork of localized regions. Some regions are
// pure (one label up to noise), some are dipoles (two opposite-label
// lobes close together). The dipoles and the region count are what
// separate a per-region specialist ensemble from any single small
// network, mirroring the benchmark behavior the selector exploits.
struct SyntheticRecipe {
  std::uint64_t seed;
  int rows, features, classes;
  int regions;
  double dipole_fraction;
  double center_spread;     // region centers ~ spread * N(0, I), min-separated
  double min_separation;
  double sigma;             // intra-region scatter
  double pole_offset;       // dipole lobe distance from center
  double label_noise;
};

const SyntheticRecipe* recipe_for(const std::string& name) {
  // Tuned against the default experiment configs.
  static const SyntheticRecipe recipes[] = {
      {0x76656831ULL, 846, 18, 4, 30, 0.45, 3.0, 2.6, 0.55, 0.85, 0.030},   // vehicle
      {0x64696131ULL, 768, 8, 2, 22, 0.45, 3.0, 2.2, 0.60, 0.95, 0.085},    // diabetes
      {0x67657231ULL, 1000, 24, 2, 26, 0.50, 3.0, 2.8, 0.60, 0.95, 0.110},  // german-credit
  };
  if (name == "vehicle") return &recipes[0];
  if (name == "diabetes") return &recipes[1];
  if (name == "german-credit") return &recipes[2];
  return nullptr;
}

Vector random_unit(Rng& rng, int d) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  const double norm = v.norm();
  return norm > 0 ? Vector(v / norm) : Vector::Unit(d, 0);
}

}  // namespace

Dataset synthesize_dataset(const std::string& name) {
  const SyntheticRecipe* rc = recipe_for(name);
  if (!rc) {
    throw std::invalid_argument("synthesize_dataset: no stand-in recipe for '" + name + "'");
  }
  Rng rng(rc->seed);
  const int d = rc->features;

  // Region centers with a minimum separation, rejection sampled.
  Matrix centers(rc->regions, d);
  int placed = 0;
  double sep = rc->min_separation;
  int attempts = 0;
  while (placed < rc->regions) {
    Vector cand(d);
    for (int i = 0; i < d; ++i) cand[i] = rc->center_spread * rng.normal();
    bool ok = true;
    for (int j = 0; j < placed; ++j) {
      if ((centers.row(j).transpose() - cand).norm() < sep) {
        ok = false;
        break;
      }
    }
    if (ok) {
      centers.row(placed++) = cand.transpose();
      attempts = 0;
    } else if (++attempts > 200) {
      sep *= 0.95;  // relax; keeps generation total
      attempts = 0;
    }
  }

  // Region labels cycle through the classes in shuffled region order so
  // nearby regions tend to disagree; dipole regions get a second label.
  std::vector<int> region_order(static_cast<std::size_t>(rc->regions));
  for (int z = 0; z < rc->regions; ++z) region_order[static_cast<std::size_t>(z)] = z;
  rng.shuffle(region_order);
  std::vector<int> primary(static_cast<std::size_t>(rc->regions));
  for (int i = 0; i < rc->regions; ++i) {
    primary[static_cast<std::size_t>(region_order[static_cast<std::size_t>(i)])] = i % rc->classes;
  }
  const int n_dipoles = static_cast<int>(std::lround(rc->dipole_fraction * rc->regions));
  std::vector<bool> dipole(static_cast<std::size_t>(rc->regions), false);
  std::vector<int> secondary(static_cast<std::size_t>(rc->regions), 0);
  Matrix pole_dir(rc->regions, d);
  for (int i = 0; i < n_dipoles; ++i) {
    const int z = region_order[static_cast<std::size_t>(i)];
    dipole[static_cast<std::size_t>(z)] = true;
    secondary[static_cast<std::size_t>(z)] =
        (primary[static_cast<std::size_t>(z)] + 1 + rng.index(rc->classes - 1)) % rc->classes;
  }
  for (int z = 0; z < rc->regions; ++z) pole_dir.row(z) = random_unit(rng, d).transpose();

  // Mildly uneven region weights.
  std::vector<double> weight(static_cast<std::size_t>(rc->regions));
  double wsum = 0.0;
  for (int z = 0; z < rc->regions; ++z) {
    weight[static_cast<std::size_t>(z)] = 0.5 + rng.uniform();
    wsum += weight[static_cast<std::size_t>(z)];
  }

  // Per-feature affine de-standardization so the raw table has
  // heterogeneous ranges, like the benchmarks it stands in for.
  Vector feat_scale(d), feat_offset(d);
  for (int i = 0; i < d; ++i) {
    feat_scale[i] = std::exp(0.6 * rng.normal());
    feat_offset[i] = 3.0 * rng.normal();
  }

  Dataset ds;
  ds.name = name;
  ds.features.resize(rc->rows, d);
  ds.labels.resize(rc->rows);
  for (int c = 0; c < d; ++c) ds.feature_names.push_back("f" + std::to_string(c + 1));
  if (name == "vehicle") {
    ds.class_names = {"van", "saab", "bus", "opel"};
  } else if (name == "diabetes") {
    ds.class_names = {"neg", "pos"};
  } else {
    ds.class_names = {"good", "bad"};
  }

  for (int r = 0; r < rc->rows; ++r) {
    // Weighted region pick.
    double t = rng.uniform() * wsum;
    int z = rc->regions - 1;
    for (int j = 0; j < rc->regions; ++j) {
      t -= weight[static_cast<std::size_t>(j)];
      if (t < 0) {
        z = j;
        break;
      }
    }

    Vector mu = centers.row(z).transpose();
    int label = primary[static_cast<std::size_t>(z)];
    if (dipole[static_cast<std::size_t>(z)]) {
      const bool flip_side = rng.uniform() < 0.5;
      mu += (flip_side ? -rc->pole_offset : rc->pole_offset) * pole_dir.row(z).transpose();
      if (flip_side) label = secondary[static_cast<std::size_t>(z)];
    }
    Vector x(d);
    for (int i = 0; i < d; ++i) x[i] = mu[i] + rc->sigma * rng.normal();
    if (rng.uniform() < rc->label_noise) {
      label = (label + 1 + rng.index(rc->classes - 1)) % rc->classes;
    }

    for (int i = 0; i < d; ++i) {
      const double raw = feat_scale[i] * x[i] + feat_offset[i];
      // Snapping to a 1e-4 grid keeps the in-memory table equal to its
      // own CSV round-trip.
      ds.features(r, i) = std::llround(raw * 1e4) / 1e4;
    }
    ds.labels[r] = label;
  }

  // Re-encode labels in first-appearance order so a write/load cycle
  // reproduces the same integer labels.
  std::vector<int> remap(static_cast<std::size_t>(rc->classes), -1);
  std::vector<std::string> ordered_names;
  for (int r = 0; r < rc->rows; ++r) {
    const int old = ds.labels[r];
    if (remap[static_cast<std::size_t>(old)] < 0) {
      remap[static_cast<std::size_t>(old)] = static_cast<int>(ordered_names.size());
      ordered_names.push_back(ds.class_names[static_cast<std::size_t>(old)]);
    }
    ds.labels[r] = remap[static_cast<std::size_t>(old)];
  }
  ds.class_names = ordered_names;
  return ds;
}

}  // namespace rtann
