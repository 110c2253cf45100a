#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lblab/csv.hpp"
#include "lblab/dataset.hpp"
#include "lblab/errors.hpp"
#include "lblab/io_util.hpp"
#include "lblab/synth.hpp"
#include "lblab/trainer.hpp"

namespace lblab {

// Experiment manifest format "lbman/1": ini-style key=value sections.
// Full-line '#' comments and blank lines are ignored. One [experiment]
// section, one [dataset] section, and one [run NAME] section per config;
// all runs share the dataset, so their sample ids align by construction.
//
//   [experiment]
//   version = lbman/1
//   output_dir = out
//
//   [dataset]
//   kind = blobs            # blobs | csv | preset
//   classes = 4
//   dim = 8
//   per_class = 500
//   spread = 0.6
//   label_noise = 0.08
//   seed = 7
//
//   [run small-mlp]
//   layers = 8,16,4         # input dim, hidden..., class count
//   optimizer = sgd         # sgd | adam | rmsprop
//   epochs = 50
//   runs = 3
//
// Run-section defaults: activation=relu, init=he, optimizer=sgd,
// learning_rate per optimizer (0.01 sgd, 0.001 adam/rmsprop), runs=5,
// batch_size=32, base_seed=0, shuffle=true. `layers` and `epochs` are
// required. Relative paths (output_dir, csv path) resolve against the
// manifest's directory.

inline constexpr std::string_view kManifestFormatTag = "lbman/1";

struct DatasetRef {
  enum class Kind { blobs, csv, preset } kind = Kind::blobs;
  BlobParams blobs;
  std::filesystem::path csv_path;  // resolved
  CsvSchema csv_schema;
  std::string preset_name;

  std::string describe() const {
    switch (kind) {
      case Kind::blobs:
        return "blobs(classes=" + std::to_string(blobs.classes) +
               ",dim=" + std::to_string(blobs.dim) +
               ",per_class=" + std::to_string(blobs.per_class) +
               ",spread=" + fmt_double(blobs.spread) +
               ",label_noise=" + fmt_double(blobs.label_noise) +
               ",seed=" + std::to_string(blobs.seed) + ")";
      case Kind::csv:
        return "csv(" + csv_path.string() + ")";
      case Kind::preset:
        return "preset(" + preset_name + ")";
    }
    return "?";
  }

  Dataset load() const {
    switch (kind) {
      case Kind::blobs: return make_blobs(blobs);
      case Kind::csv: return load_csv(csv_path, csv_schema);
      case Kind::preset: return preset_dataset(preset_name);
    }
    throw InvalidInputError("dataset: unknown kind");
  }
};

struct ManifestRun {
  std::string name;
  RunConfig config;
};

struct ExperimentManifest {
  std::filesystem::path output_dir;  // resolved against the manifest directory
  DatasetRef dataset;
  std::vector<ManifestRun> runs;
};

namespace detail {

struct ManifestSection {
  std::string name;  // "experiment", "dataset", or "run <NAME>"
  std::size_t line = 0;
  std::map<std::string, std::pair<std::string, std::size_t>> entries;  // key -> (value, line)
};

inline bool valid_name_token(std::string_view s) {
  if (s.empty()) return false;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

/// Syntax phase: sections and key=value pairs, nothing interpreted yet.
inline std::vector<ManifestSection> tokenize_manifest(const std::string& text,
                                                      const std::string& origin) {
  std::vector<ManifestSection> sections;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = (nl == std::string_view::npos)
                               ? std::string_view(text).substr(pos)
                               : std::string_view(text).substr(pos, nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(origin + ": line " + std::to_string(line_no) +
                         ": unterminated section header");
      ManifestSection s;
      s.name = std::string(trim(line.substr(1, line.size() - 2)));
      s.line = line_no;
      if (s.name.empty())
        throw ParseError(origin + ": line " + std::to_string(line_no) + ": empty section name");
      sections.push_back(std::move(s));
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(origin + ": line " + std::to_string(line_no) +
                       ": expected 'key = value' or a [section] header");
    if (sections.empty())
      throw ParseError(origin + ": line " + std::to_string(line_no) +
                       ": key=value before any section header");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ParseError(origin + ": line " + std::to_string(line_no) + ": empty key");
    auto& entries = sections.back().entries;
    if (entries.count(key))
      throw InvalidInputError(origin + ": line " + std::to_string(line_no) +
                              ": duplicate key '" + key + "' in section [" +
                              sections.back().name + "]");
    entries[key] = {value, line_no};
  }
  return sections;
}

/// Typed accessors over one section; flags every consumed key so unknown
/// keys can be rejected afterwards.
class SectionReader {
 public:
  SectionReader(const ManifestSection& s, const std::string& origin)
      : section_(s), origin_(origin) {}

  std::optional<std::string> get(const std::string& key) {
    const auto it = section_.entries.find(key);
    if (it == section_.entries.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second.first;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v)
      throw InvalidInputError(origin_ + ": section [" + section_.name +
                              "] is missing required key '" + key + "'");
    return *v;
  }

  long long require_int(const std::string& key) { return to_int(key, require(key)); }
  double require_double(const std::string& key) { return to_double(key, require(key)); }

  long long get_int(const std::string& key, long long fallback) {
    auto v = get(key);
    return v ? to_int(key, *v) : fallback;
  }
  double get_double(const std::string& key, double fallback) {
    auto v = get(key);
    return v ? to_double(key, *v) : fallback;
  }
  bool get_bool(const std::string& key, bool fallback) {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw InvalidInputError(bad_value(key, *v, "'true' or 'false'"));
  }

  void reject_unknown_keys() const {
    for (const auto& [key, value] : section_.entries)
      if (!consumed_.count(key))
        throw InvalidInputError(origin_ + ": line " + std::to_string(value.second) +
                                ": unknown key '" + key + "' in section [" + section_.name +
                                "]");
  }

  std::string bad_value(const std::string& key, const std::string& got,
                        const std::string& expected) const {
    return origin_ + ": section [" + section_.name + "], key '" + key + "': expected " +
           expected + ", got '" + got + "'";
  }

 private:
  long long to_int(const std::string& key, const std::string& v) {
    const auto parsed = parse_int(v);
    if (!parsed) throw InvalidInputError(bad_value(key, v, "an integer"));
    return *parsed;
  }
  double to_double(const std::string& key, const std::string& v) {
    const auto parsed = parse_double(v);
    if (!parsed) throw InvalidInputError(bad_value(key, v, "a number"));
    return *parsed;
  }

  const ManifestSection& section_;
  const std::string& origin_;
  std::unordered_set<std::string> consumed_;
};

inline std::vector<std::string> split_comma_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = (comma == std::string_view::npos) ? s.substr(start)
                                                         : s.substr(start, comma - start);
    out.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline DatasetRef read_dataset_section(const ManifestSection& section,
                                       const std::string& origin,
                                       const std::filesystem::path& base_dir) {
  SectionReader r(section, origin);
  DatasetRef ref;
  const std::string kind = r.require("kind");
  if (kind == "blobs") {
    ref.kind = DatasetRef::Kind::blobs;
    ref.blobs.classes = static_cast<int>(r.require_int("classes"));
    ref.blobs.dim = static_cast<int>(r.require_int("dim"));
    ref.blobs.per_class = static_cast<int>(r.require_int("per_class"));
    ref.blobs.spread = r.require_double("spread");
    ref.blobs.label_noise = r.get_double("label_noise", 0.0);
    ref.blobs.seed = static_cast<std::uint64_t>(r.get_int("seed", 0));
  } else if (kind == "csv") {
    ref.kind = DatasetRef::Kind::csv;
    ref.csv_path = base_dir / std::filesystem::path(r.require("path"));
    ref.csv_schema.feature_columns = split_comma_list(r.require("features"));
    ref.csv_schema.label_column = r.require("label");
    if (auto id = r.get("id")) ref.csv_schema.id_column = *id;
  } else if (kind == "preset") {
    ref.kind = DatasetRef::Kind::preset;
    ref.preset_name = r.require("name");
  } else {
    throw InvalidInputError(r.bad_value("kind", kind, "'blobs', 'csv' or 'preset'"));
  }
  r.reject_unknown_keys();
  return ref;
}

inline RunConfig read_run_section(const ManifestSection& section, const std::string& origin) {
  SectionReader r(section, origin);
  RunConfig cfg;

  for (const auto& piece : split_comma_list(r.require("layers"))) {
    const auto v = parse_int(piece);
    if (!v || *v < 1)
      throw InvalidInputError(r.bad_value("layers", piece, "positive layer sizes"));
    cfg.model.layer_sizes.push_back(static_cast<int>(*v));
  }

  if (auto act = r.get("activation")) {
    if (*act == "relu") cfg.model.activation = Activation::relu;
    else if (*act == "tanh") cfg.model.activation = Activation::tanh;
    else throw InvalidInputError(r.bad_value("activation", *act, "'relu' or 'tanh'"));
  }
  if (auto init = r.get("init")) {
    if (*init == "he") cfg.model.init_scheme = InitScheme::he;
    else if (*init == "xavier") cfg.model.init_scheme = InitScheme::xavier;
    else throw InvalidInputError(r.bad_value("init", *init, "'he' or 'xavier'"));
  }

  OptimizerKind kind = OptimizerKind::sgd;
  if (auto opt = r.get("optimizer")) {
    if (*opt == "sgd") kind = OptimizerKind::sgd;
    else if (*opt == "adam") kind = OptimizerKind::adam;
    else if (*opt == "rmsprop") kind = OptimizerKind::rmsprop;
    else throw InvalidInputError(r.bad_value("optimizer", *opt, "'sgd', 'adam' or 'rmsprop'"));
  }
  cfg.optimizer = OptimizerSpec::defaults(kind);
  cfg.optimizer.learning_rate = r.get_double("learning_rate", cfg.optimizer.learning_rate);
  cfg.optimizer.momentum = r.get_double("momentum", cfg.optimizer.momentum);
  cfg.optimizer.beta1 = r.get_double("beta1", cfg.optimizer.beta1);
  cfg.optimizer.beta2 = r.get_double("beta2", cfg.optimizer.beta2);
  cfg.optimizer.rho = r.get_double("rho", cfg.optimizer.rho);
  cfg.optimizer.epsilon = r.get_double("epsilon", cfg.optimizer.epsilon);

  cfg.epochs = static_cast<std::size_t>(r.require_int("epochs"));
  cfg.runs = static_cast<std::size_t>(r.get_int("runs", 5));
  cfg.batch_size = static_cast<std::size_t>(r.get_int("batch_size", 32));
  cfg.base_seed = static_cast<std::uint64_t>(r.get_int("base_seed", 0));
  cfg.shuffle_each_epoch = r.get_bool("shuffle", true);

  r.reject_unknown_keys();
  cfg.validate();
  return cfg;
}

}  // namespace detail

inline ExperimentManifest parse_manifest(const std::filesystem::path& path) {
  const std::string origin = path.string();
  const std::string text = read_text_file(path);
  const auto base_dir = path.has_parent_path() ? path.parent_path()
                                               : std::filesystem::path(".");
  const auto sections = detail::tokenize_manifest(text, origin);

  ExperimentManifest manifest;
  bool have_experiment = false, have_dataset = false;
  std::unordered_set<std::string> run_names;

  for (const auto& section : sections) {
    if (section.name == "experiment") {
      if (have_experiment)
        throw InvalidInputError(origin + ": more than one [experiment] section");
      have_experiment = true;
      detail::SectionReader r(section, origin);
      const std::string version = r.require("version");
      if (version != kManifestFormatTag)
        throw InvalidInputError(r.bad_value("version", version,
                                            "'" + std::string(kManifestFormatTag) + "'"));
      manifest.output_dir = base_dir / std::filesystem::path(r.require("output_dir"));
      r.reject_unknown_keys();
    } else if (section.name == "dataset") {
      if (have_dataset)
        throw InvalidInputError(origin + ": more than one [dataset] section");
      have_dataset = true;
      manifest.dataset = detail::read_dataset_section(section, origin, base_dir);
    } else if (section.name.rfind("run ", 0) == 0) {
      const std::string name(trim(std::string_view(section.name).substr(4)));
      if (!detail::valid_name_token(name))
        throw InvalidInputError(origin + ": line " + std::to_string(section.line) +
                                ": run name '" + name +
                                "' must match [A-Za-z0-9._-]+");
      if (!run_names.insert(name).second)
        throw InvalidInputError(origin + ": duplicate run name '" + name + "'");
      manifest.runs.push_back({name, detail::read_run_section(section, origin)});
    } else {
      throw InvalidInputError(origin + ": line " + std::to_string(section.line) +
                              ": unknown section [" + section.name + "]");
    }
  }

  if (!have_experiment) throw InvalidInputError(origin + ": missing [experiment] section");
  if (!have_dataset) throw InvalidInputError(origin + ": missing [dataset] section");
  if (manifest.runs.empty()) throw InvalidInputError(origin + ": no [run NAME] sections");
  return manifest;
}

}  // namespace lblab
