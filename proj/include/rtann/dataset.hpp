#pragma once

#include <string>
#include <vector>

#include "rtann/types.hpp"

namespace rtann {

// Declared shape of a benchmark table. Loading validates the parsed CSV
// against these dims; provenance of the real files is documented in the
// README rather than fetched over the network.
struct DatasetDescriptor {
  std::string name;
  std::string path;
  std::string label_column = "class";
  int n_features = 0;
  int n_classes = 0;
  int n_rows = 0;
};

struct Dataset {
  std::string name;
  Matrix features;             // n_rows x n_features
  IntVector labels;            // encoded 0..n_classes-1, first-appearance order
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  int n_rows() const { return static_cast<int>(features.rows()); }
  int n_features() const { return static_cast<int>(features.cols()); }
  int n_classes() const { return static_cast<int>(class_names.size()); }
};

// The three benchmark tables: vehicle (846x18, 4 classes),
// diabetes (768x8, 2 classes), german-credit (1000x24, 2 classes).
const std::vector<DatasetDescriptor>& dataset_registry();
const DatasetDescriptor* find_descriptor(const std::string& name);

// Parses a headered CSV, encodes the label column, and validates the
// declared dims. Parse failures name the row and column.
Dataset load_csv_dataset(const DatasetDescriptor& desc);

void write_csv(const Dataset& ds, const std::string& path);

// Deterministic stand-in generator. Each table is a fixed mixture of
// localized regions with region-dependent label rules and noise, shaped
// to the registry dims; the bytes depend only on the dataset name, so
// experiment seeds never change the data. Intended for self-tests and
// demos when the real benchmark files are not on disk.
Dataset synthesize_dataset(const std::string& name);

}  // namespace rtann
