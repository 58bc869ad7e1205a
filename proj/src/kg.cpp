// Copyright 2026 The boxekg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "boxekg/kg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "boxekg/errors.hpp"
#include "boxekg/random.hpp"

namespace boxekg {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> sorted_unique(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

[[noreturn]] void fail_at(const fs::path& path, std::size_t line_no,
                          const std::string& what) {
  throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

// Calls fn(fields, line_no) for every non-empty, non-comment line.
template <typename Fn>
void for_each_record(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    fn(std::string_view(line), line_no);
  }
}

struct RawTriple {
  std::string head, relation, tail;
  std::size_t line;
};

struct RawLabel {
  std::string entity, cls;
  std::size_t line;
};

std::vector<RawTriple> read_raw_edges(const fs::path& path) {
  std::vector<RawTriple> out;
  for_each_record(path, [&](std::string_view line, std::size_t no) {
    auto fields = split(line, '\t');
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        fields[2].empty()) {
      fail_at(path, no, "expected head<TAB>relation<TAB>tail");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]),
                   std::string(fields[2]), no});
  });
  return out;
}

std::vector<RawLabel> read_raw_labels(const fs::path& path) {
  std::vector<RawLabel> out;
  for_each_record(path, [&](std::string_view line, std::size_t no) {
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      fail_at(path, no, "expected entity<TAB>class");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]), no});
  });
  return out;
}

double parse_double(std::string_view text, const fs::path& path, std::size_t no) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail_at(path, no, "bad number '" + std::string(text) + "'");
  }
  return value;
}

struct RawFeatures {
  std::size_t dim = 0;
  std::vector<std::pair<std::string, std::vector<double>>> rows;
};

RawFeatures read_raw_features(const fs::path& path) {
  RawFeatures out;
  bool have_header = false;
  for_each_record(path, [&](std::string_view line, std::size_t no) {
    if (!have_header) {
      if (!line.starts_with("k=")) fail_at(path, no, "expected header k=<int>");
      const auto num = line.substr(2);
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), out.dim);
      if (ec != std::errc() || ptr != num.data() + num.size() || out.dim == 0) {
        fail_at(path, no, "bad feature dimension");
      }
      have_header = true;
      return;
    }
    auto fields = split(line, '\t');
    if (fields.size() != 2 || fields[0].empty()) {
      fail_at(path, no, "expected entity<TAB>v1,...,vk");
    }
    auto values = split(fields[1], ',');
    if (values.size() != out.dim) {
      fail_at(path, no, "expected " + std::to_string(out.dim) + " values, got " +
                            std::to_string(values.size()));
    }
    std::vector<double> row;
    row.reserve(values.size());
    for (auto v : values) row.push_back(parse_double(v, path, no));
    out.rows.emplace_back(std::string(fields[0]), std::move(row));
  });
  if (!have_header) throw DataError(path.string() + ": missing k=<int> header");
  return out;
}

template <typename T>
std::size_t sort_dedup(std::vector<T>& items) {
  std::sort(items.begin(), items.end());
  const auto before = items.size();
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return before - items.size();
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace

// --- Vocabulary --------------------------------------------------------------

Vocabulary Vocabulary::from_names(std::vector<std::string> entities,
                                  std::vector<std::string> classes,
                                  std::vector<std::string> relations) {
  Vocabulary v;
  v.entities_ = sorted_unique(std::move(entities));
  v.classes_ = sorted_unique(std::move(classes));
  v.relations_ = sorted_unique(std::move(relations));
  v.rebuild_index();
  return v;
}

Vocabulary Vocabulary::numbered(std::size_t num_entities, std::size_t num_classes,
                                std::size_t num_relations) {
  auto names = [](char prefix, std::size_t n) {
    const std::size_t width = n <= 1 ? 1 : std::to_string(n - 1).size();
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::string digits = std::to_string(i);
      out.push_back(std::string(1, prefix) + std::string(width - digits.size(), '0') +
                    digits);
    }
    return out;
  };
  return from_names(names('e', num_entities), names('c', num_classes),
                    names('r', num_relations));
}

void Vocabulary::rebuild_index() {
  auto build = [](const std::vector<std::string>& names,
                  std::unordered_map<std::string, std::int32_t>& index) {
    index.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      index.emplace(names[i], static_cast<std::int32_t>(i));
    }
  };
  build(entities_, entity_index_);
  build(classes_, class_index_);
  build(relations_, relation_index_);
}

namespace {
std::optional<std::int32_t> lookup(
    const std::unordered_map<std::string, std::int32_t>& index, std::string_view name) {
  auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}
}  // namespace

std::optional<EntityId> Vocabulary::find_entity(std::string_view name) const {
  return lookup(entity_index_, name);
}
std::optional<ClassId> Vocabulary::find_class(std::string_view name) const {
  return lookup(class_index_, name);
}
std::optional<RelationId> Vocabulary::find_relation(std::string_view name) const {
  return lookup(relation_index_, name);
}

// --- Dataset -----------------------------------------------------------------

std::vector<UnaryFact> LabelSplits::all() const {
  std::vector<UnaryFact> out;
  out.reserve(train.size() + valid.size() + test.size());
  out.insert(out.end(), train.begin(), train.end());
  out.insert(out.end(), valid.begin(), valid.end());
  out.insert(out.end(), test.begin(), test.end());
  std::sort(out.begin(), out.end(), [](const UnaryFact& a, const UnaryFact& b) {
    return std::tie(a.entity, a.cls) < std::tie(b.entity, b.cls);
  });
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  if (!(vocab == other.vocab && edges == other.edges && labels == other.labels &&
        dropped_edges == other.dropped_edges)) {
    return false;
  }
  if (features.has_value() != other.features.has_value()) return false;
  return !features || *features == *other.features;
}

DatasetPaths DatasetPaths::in_directory(const fs::path& dir) {
  DatasetPaths p;
  p.edges = dir / "edges.tsv";
  auto opt = [&](const char* name) -> std::optional<fs::path> {
    fs::path f = dir / name;
    if (fs::exists(f)) return f;
    return std::nullopt;
  };
  p.train_labels = opt("labels_train.tsv");
  p.valid_labels = opt("labels_valid.tsv");
  p.test_labels = opt("labels_test.tsv");
  p.features = opt("features.txt");
  p.dropped_edges = opt("dropped.tsv");
  return p;
}

Dataset load_dataset(const DatasetPaths& paths, std::vector<std::string>* warnings) {
  auto warn = [&](std::string msg) {
    if (warnings) warnings->push_back(std::move(msg));
  };

  const auto raw_edges = read_raw_edges(paths.edges);
  std::vector<RawTriple> raw_dropped;
  if (paths.dropped_edges) raw_dropped = read_raw_edges(*paths.dropped_edges);
  std::vector<RawLabel> raw_labels[3];
  const std::optional<fs::path>* label_paths[3] = {
      &paths.train_labels, &paths.valid_labels, &paths.test_labels};
  for (int s = 0; s < 3; ++s) {
    if (*label_paths[s]) raw_labels[s] = read_raw_labels(**label_paths[s]);
  }
  std::optional<RawFeatures> raw_features;
  if (paths.features) raw_features = read_raw_features(*paths.features);

  std::vector<std::string> entities, classes, relations;
  for (const auto* list : std::initializer_list<const std::vector<RawTriple>*>{&raw_edges, &raw_dropped}) {
    for (const auto& t : *list) {
      entities.push_back(t.head);
      entities.push_back(t.tail);
      relations.push_back(t.relation);
    }
  }
  for (const auto& split_labels : raw_labels) {
    for (const auto& l : split_labels) {
      entities.push_back(l.entity);
      classes.push_back(l.cls);
    }
  }
  if (raw_features) {
    for (const auto& [name, row] : raw_features->rows) entities.push_back(name);
  }

  Dataset ds;
  ds.vocab = Vocabulary::from_names(std::move(entities), std::move(classes),
                                    std::move(relations));
  const auto& vocab = ds.vocab;

  auto map_edges = [&](const std::vector<RawTriple>& raw, const fs::path& path) {
    std::vector<BinaryFact> out;
    out.reserve(raw.size());
    for (const auto& t : raw) {
      out.push_back({*vocab.find_relation(t.relation), *vocab.find_entity(t.head),
                     *vocab.find_entity(t.tail)});
    }
    if (auto dups = sort_dedup(out)) {
      warn(path.string() + ": removed " + std::to_string(dups) + " duplicate edge(s)");
    }
    return out;
  };
  ds.edges = map_edges(raw_edges, paths.edges);
  if (paths.dropped_edges) ds.dropped_edges = map_edges(raw_dropped, *paths.dropped_edges);

  std::map<EntityId, std::pair<ClassId, std::string>> seen_label;
  std::vector<UnaryFact>* splits[3] = {&ds.labels.train, &ds.labels.valid,
                                       &ds.labels.test};
  for (int s = 0; s < 3; ++s) {
    for (const auto& l : raw_labels[s]) {
      const EntityId e = *vocab.find_entity(l.entity);
      const ClassId c = *vocab.find_class(l.cls);
      auto [it, inserted] = seen_label.emplace(e, std::make_pair(c, l.cls));
      if (!inserted && it->second.first != c) {
        fail_at(**label_paths[s], l.line,
                "entity '" + l.entity + "' labeled with conflicting classes '" +
                    it->second.second + "' and '" + l.cls + "'");
      }
      splits[s]->push_back({c, e});
    }
    auto by_entity = [](const UnaryFact& a, const UnaryFact& b) {
      return std::tie(a.entity, a.cls) < std::tie(b.entity, b.cls);
    };
    std::sort(splits[s]->begin(), splits[s]->end(), by_entity);
    const auto before = splits[s]->size();
    splits[s]->erase(std::unique(splits[s]->begin(), splits[s]->end()), splits[s]->end());
    if (before != splits[s]->size()) {
      warn((*label_paths[s])->string() + ": removed " +
           std::to_string(before - splits[s]->size()) + " duplicate label(s)");
    }
  }

  if (raw_features) {
    if (raw_features->rows.size() != vocab.num_entities()) {
      throw DataError(paths.features->string() + ": " +
                      std::to_string(raw_features->rows.size()) +
                      " feature rows for " + std::to_string(vocab.num_entities()) +
                      " entities");
    }
    Matrix x(vocab.num_entities(), raw_features->dim);
    std::vector<bool> filled(vocab.num_entities(), false);
    for (const auto& [name, row] : raw_features->rows) {
      const EntityId e = *vocab.find_entity(name);
      if (filled[e]) {
        throw DataError(paths.features->string() + ": duplicate feature row for '" +
                        name + "'");
      }
      filled[e] = true;
      for (std::size_t j = 0; j < row.size(); ++j) x(e, j) = row[j];
    }
    ds.features = std::move(x);
  }

  const auto report = validate(ds);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw DataError("dataset invalid: " + std::string(to_string(v.kind)) + ": " + v.detail);
  }
  return ds;
}

std::string format_edges(const Vocabulary& vocab, const std::vector<BinaryFact>& edges) {
  std::string out;
  for (const auto& e : edges) {
    out += vocab.entity_name(e.head);
    out += '\t';
    out += vocab.relation_name(e.relation);
    out += '\t';
    out += vocab.entity_name(e.tail);
    out += '\n';
  }
  return out;
}

std::string format_labels(const Vocabulary& vocab, const std::vector<UnaryFact>& labels) {
  std::string out;
  for (const auto& l : labels) {
    out += vocab.entity_name(l.entity);
    out += '\t';
    out += vocab.class_name(l.cls);
    out += '\n';
  }
  return out;
}

std::string format_features(const Vocabulary& vocab, const Matrix& features) {
  std::string out = "k=" + std::to_string(features.cols()) + "\n";
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    out += vocab.entity_name(static_cast<EntityId>(i));
    out += '\t';
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      if (j) out += ',';
      out += format_double(features(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "edges.tsv", format_edges(dataset.vocab, dataset.edges));
  write_file(dir / "labels_train.tsv", format_labels(dataset.vocab, dataset.labels.train));
  write_file(dir / "labels_valid.tsv", format_labels(dataset.vocab, dataset.labels.valid));
  write_file(dir / "labels_test.tsv", format_labels(dataset.vocab, dataset.labels.test));
  if (dataset.features) {
    write_file(dir / "features.txt", format_features(dataset.vocab, *dataset.features));
  } else {
    fs::remove(dir / "features.txt");
  }
  if (!dataset.dropped_edges.empty()) {
    write_file(dir / "dropped.tsv", format_edges(dataset.vocab, dataset.dropped_edges));
  } else {
    fs::remove(dir / "dropped.tsv");
  }
}

std::vector<BinaryFact> load_edges_with_vocab(const fs::path& path,
                                              const Vocabulary& vocab) {
  std::vector<BinaryFact> out;
  for (const auto& t : read_raw_edges(path)) {
    auto h = vocab.find_entity(t.head);
    auto r = vocab.find_relation(t.relation);
    auto tl = vocab.find_entity(t.tail);
    if (!h || !r || !tl) fail_at(path, t.line, "name not in vocabulary");
    out.push_back({*r, *h, *tl});
  }
  sort_dedup(out);
  return out;
}

std::vector<UnaryFact> load_labels_with_vocab(const fs::path& path,
                                              const Vocabulary& vocab) {
  std::vector<UnaryFact> out;
  for (const auto& l : read_raw_labels(path)) {
    auto e = vocab.find_entity(l.entity);
    auto c = vocab.find_class(l.cls);
    if (!e || !c) fail_at(path, l.line, "name not in vocabulary");
    out.push_back({*c, *e});
  }
  return out;
}

// --- validation ----------------------------------------------------------------

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kIndexOutOfBounds: return "index_out_of_bounds";
    case ViolationKind::kDuplicateFact: return "duplicate_fact";
    case ViolationKind::kLabelSplitOverlap: return "label_split_overlap";
    case ViolationKind::kConflictingLabel: return "conflicting_label";
    case ViolationKind::kNonFiniteFeature: return "non_finite_feature";
    case ViolationKind::kFeatureShape: return "feature_shape";
    case ViolationKind::kDroppedOverlap: return "dropped_overlap";
  }
  return "unknown";
}

ValidationReport validate(const Dataset& ds) {
  ValidationReport report;
  auto add = [&](ViolationKind k, std::string detail) {
    report.violations.push_back({k, std::move(detail)});
  };
  const auto n_e = static_cast<std::int64_t>(ds.vocab.num_entities());
  const auto n_c = static_cast<std::int64_t>(ds.vocab.num_classes());
  const auto n_r = static_cast<std::int64_t>(ds.vocab.num_relations());
  auto entity_label = [&](EntityId e) {
    return (e >= 0 && e < n_e) ? ds.vocab.entity_name(e) : "#" + std::to_string(e);
  };

  auto check_edges = [&](const std::vector<BinaryFact>& edges, const char* which) {
    std::set<BinaryFact> seen;
    for (const auto& f : edges) {
      if (f.head < 0 || f.head >= n_e || f.tail < 0 || f.tail >= n_e ||
          f.relation < 0 || f.relation >= n_r) {
        add(ViolationKind::kIndexOutOfBounds,
            std::string(which) + " (" + std::to_string(f.head) + "," +
                std::to_string(f.relation) + "," + std::to_string(f.tail) + ")");
        continue;
      }
      if (!seen.insert(f).second) {
        add(ViolationKind::kDuplicateFact,
            std::string(which) + " " + entity_label(f.head) + " " +
                ds.vocab.relation_name(f.relation) + " " + entity_label(f.tail));
      }
    }
    return seen;
  };
  const auto kept = check_edges(ds.edges, "edge");
  const auto dropped = check_edges(ds.dropped_edges, "dropped edge");
  for (const auto& f : dropped) {
    if (kept.count(f)) {
      add(ViolationKind::kDroppedOverlap,
          entity_label(f.head) + " " + ds.vocab.relation_name(f.relation) + " " +
              entity_label(f.tail));
    }
  }

  const std::vector<UnaryFact>* splits[3] = {&ds.labels.train, &ds.labels.valid,
                                             &ds.labels.test};
  const char* split_names[3] = {"train", "valid", "test"};
  std::map<EntityId, std::pair<int, ClassId>> first_seen;
  for (int s = 0; s < 3; ++s) {
    std::set<UnaryFact> seen;
    for (const auto& l : *splits[s]) {
      if (l.entity < 0 || l.entity >= n_e || l.cls < 0 || l.cls >= n_c) {
        add(ViolationKind::kIndexOutOfBounds,
            std::string("label in ") + split_names[s] + " (" + std::to_string(l.entity) +
                "," + std::to_string(l.cls) + ")");
        continue;
      }
      if (!seen.insert(l).second) {
        add(ViolationKind::kDuplicateFact,
            std::string("label in ") + split_names[s] + " " + entity_label(l.entity));
        continue;
      }
      auto [it, inserted] = first_seen.emplace(l.entity, std::make_pair(s, l.cls));
      if (inserted) continue;
      if (it->second.second != l.cls) {
        add(ViolationKind::kConflictingLabel,
            entity_label(l.entity) + " has classes " +
                ds.vocab.class_name(it->second.second) + " and " +
                ds.vocab.class_name(l.cls));
      }
      if (it->second.first != s) {
        add(ViolationKind::kLabelSplitOverlap,
            entity_label(l.entity) + " in " + split_names[it->second.first] + " and " +
                split_names[s]);
      }
    }
  }

  if (ds.features) {
    const Matrix& x = *ds.features;
    if (x.rows() != n_e) {
      add(ViolationKind::kFeatureShape, std::to_string(x.rows()) + " rows for " +
                                            std::to_string(n_e) + " entities");
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (!std::isfinite(x(i, j))) {
          add(ViolationKind::kNonFiniteFeature,
              "row " + std::to_string(i) + " column " + std::to_string(j));
        }
      }
    }
  }

  std::vector<bool> touched(static_cast<std::size_t>(n_e), false);
  for (const auto& f : kept) {
    touched[f.head] = true;
    touched[f.tail] = true;
  }
  for (EntityId e = 0; e < n_e; ++e) {
    if (!touched[e]) report.isolated_entities.push_back(e);
  }
  return report;
}

std::string ValidationReport::to_records() const {
  std::ostringstream os;
  os << "valid: " << (ok() ? "true" : "false") << "\n";
  os << "violations: " << violations.size() << "\n";
  for (const auto& v : violations) {
    os << "violation: " << to_string(v.kind) << " " << v.detail << "\n";
  }
  os << "isolated_entities: " << isolated_entities.size() << "\n";
  return os.str();
}

std::string dataset_stats(const Dataset& ds) {
  std::ostringstream os;
  os << "entities: " << ds.vocab.num_entities() << "\n"
     << "classes: " << ds.vocab.num_classes() << "\n"
     << "relations: " << ds.vocab.num_relations() << "\n"
     << "edges: " << ds.edges.size() << "\n"
     << "dropped_edges: " << ds.dropped_edges.size() << "\n"
     << "train_labels: " << ds.labels.train.size() << "\n"
     << "valid_labels: " << ds.labels.valid.size() << "\n"
     << "test_labels: " << ds.labels.test.size() << "\n"
     << "feature_dim: " << (ds.features ? ds.features->cols() : 0) << "\n";
  return os.str();
}

// --- edge dropping -------------------------------------------------------------

DropResult drop_edges(const Dataset& dataset, const DropSpec& spec) {
  if (!(spec.fraction >= 0.0 && spec.fraction < 1.0)) {
    throw UsageError("drop fraction must lie in [0, 1)");
  }
  if (dataset.edges.empty()) throw UsageError("cannot drop edges from an empty edge set");

  const std::size_t n_edges = dataset.edges.size();
  DropReport report;
  report.requested = static_cast<std::size_t>(
      std::floor(spec.fraction * static_cast<double>(n_edges)));

  // Undirected incidence count; a self-loop counts once.
  std::vector<std::size_t> degree(dataset.vocab.num_entities(), 0);
  for (const auto& f : dataset.edges) {
    ++degree[f.head];
    if (f.tail != f.head) ++degree[f.tail];
  }

  std::vector<std::size_t> order(n_edges);
  for (std::size_t i = 0; i < n_edges; ++i) order[i] = i;
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<bool> removed(n_edges, false);
  for (std::size_t idx : order) {
    if (report.removed == report.requested) break;
    const auto& f = dataset.edges[idx];
    if (degree[f.head] < 2 || degree[f.tail] < 2) continue;
    --degree[f.head];
    if (f.tail != f.head) --degree[f.tail];
    removed[idx] = true;
    ++report.removed;
  }
  report.target_reached = report.removed == report.requested;

  DropResult result{dataset, report};
  result.dataset.edges.clear();
  for (std::size_t i = 0; i < n_edges; ++i) {
    (removed[i] ? result.dataset.dropped_edges : result.dataset.edges)
        .push_back(dataset.edges[i]);
  }
  std::sort(result.dataset.dropped_edges.begin(), result.dataset.dropped_edges.end());
  return result;
}

// --- synthetic data --------------------------------------------------------------

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.num_entities < 1 || cfg.num_classes < 1 || cfg.num_relations < 1) {
    throw UsageError("synthetic counts must be >= 1");
  }
  if (cfg.num_classes > cfg.num_entities) {
    throw UsageError("more classes than entities");
  }
  if (cfg.train_fraction < 0 || cfg.valid_fraction < 0 ||
      cfg.train_fraction + cfg.valid_fraction > 1.0) {
    throw UsageError("label split fractions must be non-negative and sum to <= 1");
  }
  for (const auto& r : cfg.rules) {
    if (r.head_class < 0 || static_cast<std::size_t>(r.head_class) >= cfg.num_classes ||
        r.tail_class < 0 || static_cast<std::size_t>(r.tail_class) >= cfg.num_classes ||
        r.relation < 0 || static_cast<std::size_t>(r.relation) >= cfg.num_relations) {
      throw UsageError("planted rule refers to an unknown class or relation");
    }
  }

  Rng rng(cfg.seed);
  const std::size_t n = cfg.num_entities;
  Dataset ds;
  ds.vocab = Vocabulary::numbered(n, cfg.num_classes, cfg.num_relations);

  // Balanced class assignment in random order.
  std::vector<ClassId> cls(n);
  for (std::size_t i = 0; i < n; ++i) cls[i] = static_cast<ClassId>(i % cfg.num_classes);
  rng.shuffle(std::span<ClassId>(cls));

  std::vector<std::vector<EntityId>> members(cfg.num_classes);
  for (std::size_t i = 0; i < n; ++i) members[cls[i]].push_back(static_cast<EntityId>(i));

  std::vector<PlantedRule> rules = cfg.rules;
  if (rules.empty()) {
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
      rules.push_back({static_cast<ClassId>(c),
                       static_cast<RelationId>(c % cfg.num_relations),
                       static_cast<ClassId>(c), cfg.default_rule_probability});
    }
  }
  for (const auto& rule : rules) {
    for (EntityId h : members[rule.head_class]) {
      for (EntityId t : members[rule.tail_class]) {
        if (h == t) continue;
        if (rng.bernoulli(rule.probability)) ds.edges.push_back({rule.relation, h, t});
      }
    }
  }
  for (std::size_t i = 0; i < cfg.noise_edges; ++i) {
    const auto h = static_cast<EntityId>(rng.uniform_index(n));
    const auto t = static_cast<EntityId>(rng.uniform_index(n));
    const auto r = static_cast<RelationId>(rng.uniform_index(cfg.num_relations));
    ds.edges.push_back({r, h, t});
  }
  sort_dedup(ds.edges);

  if (cfg.feature_dim > 0) {
    const std::size_t k = cfg.feature_dim;
    Matrix means(cfg.num_classes, k);
    for (std::size_t c = 0; c < cfg.num_classes; ++c) {
      double norm = 0.0;
      do {
        for (std::size_t j = 0; j < k; ++j) means(c, j) = rng.normal();
        norm = means.row(c).norm();
      } while (norm == 0.0);
      means.row(c) *= cfg.feature_radius / norm;
    }
    Matrix x(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      const bool informative = rng.bernoulli(cfg.informative_feature_fraction);
      for (std::size_t j = 0; j < k; ++j) {
        x(i, j) = (informative ? means(cls[i], j) : 0.0) + rng.normal();
      }
    }
    ds.features = std::move(x);
  }

  std::vector<EntityId> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<EntityId>(i);
  rng.shuffle(std::span<EntityId>(order));
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * n));
  const auto n_valid = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(cfg.valid_fraction * n)));
  for (std::size_t i = 0; i < n; ++i) {
    const UnaryFact label{cls[order[i]], order[i]};
    if (i < n_train) {
      ds.labels.train.push_back(label);
    } else if (i < n_train + n_valid) {
      ds.labels.valid.push_back(label);
    } else {
      ds.labels.test.push_back(label);
    }
  }
  auto by_entity = [](const UnaryFact& a, const UnaryFact& b) { return a.entity < b.entity; };
  std::sort(ds.labels.train.begin(), ds.labels.train.end(), by_entity);
  std::sort(ds.labels.valid.begin(), ds.labels.valid.end(), by_entity);
  std::sort(ds.labels.test.begin(), ds.labels.test.end(), by_entity);
  return ds;
}

std::vector<ClassId> label_vector(const Dataset& dataset) {
  std::vector<ClassId> out(dataset.vocab.num_entities(), -1);
  for (const auto& l : dataset.labels.all()) out[l.entity] = l.cls;
  return out;
}

}  // namespace boxekg
