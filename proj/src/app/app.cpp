#include "normprobe/app.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "normprobe/error.hpp"
#include "normprobe/wordnet.hpp"

namespace normprobe::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Small helpers

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

namespace {

// Shortest representation that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
void append_bytes(std::string& out, const T* data, std::size_t count) {
  out.append(reinterpret_cast<const char*>(data), count * sizeof(T));
}

EmbeddingFormat parse_format(const std::string& name) {
  if (name == "auto") return EmbeddingFormat::automatic;
  if (name == "plain" || name == "plain-text") return EmbeddingFormat::plain_text;
  if (name == "header" || name == "header-text") return EmbeddingFormat::header_text;
  throw ConfigError("unknown embedding format '" + name + "' (expected auto, plain, header)");
}

/// Output directory guarded by a lockfile; every written file gets a sidecar manifest.
class OutputDir {
 public:
  OutputDir(const fs::path& dir, std::string command, std::string hash)
      : dir_(dir), command_(std::move(command)), hash_(std::move(hash)) {
    fs::create_directories(dir_);
    lock_ = dir_ / ".normprobe.lock";
    const int fd = ::open(lock_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) throw Error("output directory " + dir_.string() + " is locked by another run (" + lock_.string() + ")");
    ::close(fd);
  }
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    std::error_code ec;
    fs::remove(lock_, ec);
  }

  fs::path write(const std::string& name, const std::string& content, RunReport& report) {
    const fs::path path = dir_ / name;
    write_file(path, content);
    ordered_json manifest;
    manifest["file"] = name;
    manifest["command"] = command_;
    manifest["config_hash"] = hash_;
    manifest["library_version"] = kVersion;
    write_file(dir_ / (name + ".manifest.json"), manifest.dump(2) + "\n");
    report.outputs.push_back(path);
    return path;
  }

  const fs::path& path() const { return dir_; }

 private:
  static void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
  }

  fs::path dir_;
  fs::path lock_;
  std::string command_;
  std::string hash_;
};

}  // namespace

NamedPath parse_named_path(const std::string& text) {
  const auto eq = text.find('=');
  if (eq != std::string::npos && eq > 0) return {text.substr(0, eq), text.substr(eq + 1)};
  const fs::path p(text);
  return {p.stem().string(), p};
}

// ---------------------------------------------------------------------------
// Configuration

RunConfig validate(RunConfig config, Command command) {
  auto resolve = [&](fs::path& p) {
    if (!p.empty() && p.is_relative() && !config.data_dir.empty()) p = config.data_dir / p;
  };
  auto require = [&](fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("missing required path: ") + what);
    resolve(p);
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  auto optional = [&](fs::path& p, const char* what) {
    if (p.empty()) return;
    resolve(p);
    if (!fs::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };

  if (command == Command::compare) {
    require(config.compare_a, "--a feature CSV");
    require(config.compare_b, "--b feature CSV");
  } else {
    require(config.norms, "--norms");
    optional(config.schema, "--schema");
    optional(config.exclusions, "--exclusions");
    if (config.embeddings.empty()) throw ConfigError("missing required path: --embedding");
    std::set<std::string> names;
    for (auto& e : config.embeddings) {
      require(e.path, "--embedding");
      if (!names.insert(e.name).second) throw ConfigError("duplicate embedding name '" + e.name + "'");
    }
    for (auto& f : config.feature_fit) {
      require(f.path, "--feature-fit");
      if (!names.contains(f.name)) throw ConfigError("--feature-fit names unknown representation '" + f.name + "'");
    }
    parse_format(config.embedding_format);
  }
  if (command == Command::conceptview) {
    require(config.wordnet, "--wordnet");
    require(config.ic_table, "--ic");
    require(config.frequencies, "--frequencies");
  }
  if (command == Command::domains) {
    if (config.domains < 1) throw ConfigError("--domains must be >= 1");
    if (config.alpha < 0) throw ConfigError("--alpha must be >= 0");
    for (const double a : config.alpha_sweep)
      if (a < 0) throw ConfigError("--alpha-sweep values must be >= 0");
    if (!config.representation.empty()) {
      const bool known = std::any_of(config.embeddings.begin(), config.embeddings.end(),
                                     [&](const NamedPath& e) { return e.name == config.representation; });
      if (!known) throw ConfigError("--representation names unknown embedding '" + config.representation + "'");
    }
  }
  for (const double l : config.lambda_grid)
    if (!(l >= 0)) throw ConfigError("lambda grid values must be >= 0");
  if (config.min_concepts < 2) throw ConfigError("--min-concepts must be >= 2");
  if (config.resamples < 100) throw ConfigError("--resamples must be >= 100");
  if (!(config.level > 0 && config.level < 1)) throw ConfigError("--level must be in (0, 1)");
  if (config.lsa_k < 0) throw ConfigError("--lsa-k must be >= 0");
  if (config.f1_mode != "in-sample" && config.f1_mode != "loo")
    throw ConfigError("--f1-mode must be in-sample or loo");
  if (config.threads < 1) config.threads = 1;
  return config;
}

std::string config_hash(const RunConfig& c) {
  std::ostringstream s;
  for (const auto& e : c.embeddings) s << "embedding=" << e.name << ':' << e.path.string() << '\n';
  for (const auto& e : c.feature_fit) s << "feature_fit=" << e.name << ':' << e.path.string() << '\n';
  s << "format=" << c.embedding_format << "\nnorms=" << c.norms.string() << "\nschema=" << c.schema.string()
    << "\nexclusions=" << c.exclusions.string() << "\nic=" << c.ic_table.string()
    << "\nfrequencies=" << c.frequencies.string() << "\nwordnet=" << c.wordnet.string()
    << "\na=" << c.compare_a.string() << "\nb=" << c.compare_b.string() << "\ngrid=";
  for (const double l : c.lambda_grid) s << num(l) << ',';
  s << "\nmin_concepts=" << c.min_concepts << "\nparenthesized=" << c.drop_parenthesized
    << "\nmultiword=" << c.drop_multiword << "\nlsa_k=" << c.lsa_k << "\nalpha=" << num(c.alpha) << "\nsweep=";
  for (const double a : c.alpha_sweep) s << num(a) << ',';
  s << "\ndomains=" << c.domains << "\nrepresentation=" << c.representation << "\nseed=" << c.seed
    << "\nresamples=" << c.resamples << "\nlevel=" << num(c.level) << "\nintercept=" << c.intercept
    << "\nf1_mode=" << c.f1_mode << '\n';
  return fnv1a_hex(s.str());
}

ProbeConfig probe_config(const RunConfig& config) {
  ProbeConfig probe = default_probe_config();
  if (!config.lambda_grid.empty()) probe.lambda_grid = config.lambda_grid;
  probe.logistic.fit_intercept = config.intercept;
  probe.f1_mode = config.f1_mode == "loo" ? F1Mode::leave_one_out : F1Mode::in_sample;
  return probe;
}

// ---------------------------------------------------------------------------
// Feature CSV

namespace {

void write_feature_rows(std::ostream& out, const std::vector<FeatureFitRecord>& records) {
  out << "feature,category,lambda,loocv_objective,f1,positive_count,converged\n";
  for (const auto& r : records)
    out << csv_field(r.feature) << ',' << csv_field(r.category) << ',' << num(r.lambda) << ','
        << num(r.loocv_objective) << ',' << num(r.f1) << ',' << r.positive_count << ',' << (r.converged ? 1 : 0)
        << '\n';
}

std::string feature_csv_text(const std::vector<FeatureFitRecord>& records) {
  std::ostringstream out;
  write_feature_rows(out, records);
  return out.str();
}

}  // namespace

void write_feature_csv(const fs::path& path, const std::vector<FeatureFitRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_feature_rows(out, records);
}

std::vector<FeatureFitRecord> read_feature_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open feature CSV " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty feature CSV");
  const auto header = split_delimited(line, ',');
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto feature = column("feature"), category = column("category"), f1 = column("f1");
  if (!feature || !category || !f1) throw ParseError(path.string() + ": feature CSV needs feature, category, f1 columns");
  const auto lambda = column("lambda"), objective = column("loocv_objective"), positives = column("positive_count"),
             converged = column("converged");

  std::vector<FeatureFitRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_delimited(line, ',');
    if (fields.size() < header.size()) throw ParseError(path.string() + ": short record", line_no);
    try {
      FeatureFitRecord r;
      r.feature = fields[*feature];
      r.category = fields[*category];
      r.f1 = std::stod(fields[*f1]);
      if (lambda) r.lambda = std::stod(fields[*lambda]);
      if (objective) r.loocv_objective = std::stod(fields[*objective]);
      if (positives) r.positive_count = std::stoul(fields[*positives]);
      if (converged) r.converged = fields[*converged] != "0";
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw ParseError(path.string() + ": non-numeric field", line_no);
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Shared loading

namespace {

struct Representation {
  std::string name;
  EmbeddingTable table;
};

struct Workspace {
  NormDataset norms;
  std::vector<Representation> representations;
  Alignment alignment;
};

Workspace load_workspace(const RunConfig& config, RunReport& report) {
  Workspace ws;
  const NormSchema schema = config.schema.empty() ? NormSchema{} : load_norm_schema(config.schema);
  ws.norms = parse_norm_file(config.norms, schema);
  if (ws.norms.merged_rows() > 0)
    report.warnings.push_back(std::to_string(ws.norms.merged_rows()) + " repeated (concept, feature) rows merged");

  VocabularyFilter vocabulary;
  for (const auto& c : ws.norms.concepts()) vocabulary.insert(casefold(c));
  const auto format = parse_format(config.embedding_format);
  for (const auto& e : config.embeddings) {
    auto parsed = parse_embedding_file(e.path, format, &vocabulary);
    if (parsed.report.duplicates > 0)
      report.warnings.push_back(e.name + ": " + std::to_string(parsed.report.duplicates) +
                                " duplicate embedding rows ignored (first occurrence kept)");
    ws.representations.push_back({e.name, std::move(parsed.table)});
  }

  AlignmentPolicy policy;
  if (!config.exclusions.empty()) policy.exclusions = load_exclusions(config.exclusions);
  policy.drop_parenthesized = config.drop_parenthesized;
  policy.drop_multiword = config.drop_multiword;
  policy.min_concepts = config.min_concepts;
  EmbeddingRefs refs;
  for (const auto& r : ws.representations) refs.emplace_back(r.table);
  ws.alignment = filter_and_align(ws.norms, refs, policy);
  if (!ws.alignment.report.missing_vectors.empty()) {
    std::string list;
    for (const auto& c : ws.alignment.report.missing_vectors) list += (list.empty() ? "" : ", ") + c;
    report.warnings.push_back("concepts without vectors dropped: " + list);
  }
  return ws;
}

std::string cache_key(const Matrix<double>& X, const LabelMatrix& labels, const ProbeConfig& probe) {
  std::string bytes;
  for (const auto& c : labels.concepts) bytes += c + '\n';
  append_bytes(bytes, X.data(), static_cast<std::size_t>(X.size()));
  for (std::size_t f = 0; f < labels.features.size(); ++f) bytes += labels.features[f] + '\t' + labels.categories[f] + '\n';
  append_bytes(bytes, labels.Y.data(), static_cast<std::size_t>(labels.Y.size()));
  append_bytes(bytes, probe.lambda_grid.data(), probe.lambda_grid.size());
  bytes += probe.logistic.fit_intercept ? "i1" : "i0";
  bytes += probe.f1_mode == F1Mode::in_sample ? "in" : "loo";
  append_bytes(bytes, &probe.threshold, 1);
  append_bytes(bytes, &probe.logistic.gradient_tolerance, 1);
  append_bytes(bytes, &probe.logistic.max_iterations, 1);
  bytes += kVersion;
  return fnv1a_hex(bytes);
}

/// Feature-fit records for one representation: a supplied CSV, a cache hit, or a fresh sweep.
std::vector<FeatureFitRecord> feature_records(const RunConfig& config, const Workspace& ws, const Representation& rep,
                                              const fs::path& cache_dir, RunReport& report) {
  for (const auto& f : config.feature_fit)
    if (f.name == rep.name) return read_feature_csv(f.path);

  const ProbeConfig probe = probe_config(config);
  const Matrix<double> X = rep.table.matrix_for(ws.alignment.labels.concepts);
  const fs::path cached = cache_dir / ("probes-" + cache_key(X, ws.alignment.labels, probe) + ".csv");
  std::vector<FeatureFitRecord> records;
  if (config.use_cache && fs::exists(cached)) {
    records = read_feature_csv(cached);
  } else {
    records = score_features(ws.alignment.labels, X, probe, config.threads);
    if (config.use_cache) {
      fs::create_directories(cache_dir);
      write_feature_csv(cached, records);
    }
  }
  for (const auto& r : records)
    if (!r.converged) report.warnings.push_back(rep.name + ": probe for '" + r.feature + "' did not converge");
  return records;
}

std::string warnings_json(const RunReport& report) {
  ordered_json j;
  j["library_version"] = kVersion;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

std::string profile_csv(const std::vector<ConceptProfile>& profiles) {
  std::ostringstream out;
  out << "concept,m_norms,m_taxonomy,median_ff,log_frequency,log_feature_count,log_total_reports,sense_count\n";
  for (const auto& p : profiles)
    out << csv_field(p.concept_name) << ',' << num(p.m_norms) << ',' << num(p.m_taxonomy) << ',' << num(p.median_ff)
        << ',' << num(p.log_frequency) << ',' << num(p.log_feature_count) << ',' << num(p.log_total_reports) << ','
        << num(p.sense_count) << '\n';
  return out.str();
}

std::string matrix_csv(const DistanceMatrix& m) {
  std::ostringstream out;
  out << "concept";
  for (const auto& c : m.concepts) out << ',' << csv_field(c);
  out << '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    out << csv_field(m.concepts[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) out << ',' << num(m.values(i, j));
    out << '\n';
  }
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands

RunReport cmd_featfit(const RunConfig& config) {
  RunReport report;
  const std::string hash = config_hash(config);
  Workspace ws = load_workspace(config, report);
  OutputDir out(config.output_dir, "featfit", hash);

  BootstrapOptions bootstrap{config.resamples, config.level, config.seed, config.threads};
  for (const auto& rep : ws.representations) {
    const auto records = feature_records(config, ws, rep, out.path() / ".cache", report);
    out.write(rep.name + ".features.csv", feature_csv_text(records), report);

    ordered_json j;
    j["representation"] = rep.name;
    j["concepts"] = ws.alignment.labels.concepts.size();
    j["features"] = records.size();
    j["excluded_concepts"] = ws.alignment.report.excluded.size();
    j["concepts_without_vectors"] = ws.alignment.report.missing_vectors.size();
    j["features_below_min_concepts"] = ws.alignment.report.features_dropped;
    try {
      const auto summary = summarize_categories(records, default_category_groups(), bootstrap);
      ordered_json cats = ordered_json::object();
      for (const auto& c : summary.categories) cats[c.category] = {{"count", c.scores.size()}, {"median_f1", c.median}};
      j["categories"] = cats;
      j["median_nonperceptual"] = summary.median_nonperceptual;
      j["median_perceptual"] = summary.median_perceptual;
      j["nonperceptual_features"] = summary.nonperceptual_count;
      j["perceptual_features"] = summary.perceptual_count;
      j["median_difference_ci"] = {{"low", summary.difference.low},
                                   {"high", summary.difference.high},
                                   {"level", summary.difference.level},
                                   {"resamples", summary.difference.resamples},
                                   {"seed", summary.difference.seed}};
    } catch (const ArgumentError& e) {
      report.warnings.push_back(rep.name + ": category test skipped: " + e.what());
    }
    out.write(rep.name + ".categories.json", j.dump(2) + "\n", report);
  }
  out.write("warnings.json", warnings_json(report), report);
  return report;
}

RunReport cmd_compare(const RunConfig& config) {
  RunReport report;
  const auto a = read_feature_csv(config.compare_a);
  const auto b = read_feature_csv(config.compare_b);
  const auto cmp = compare_representations(a, b);
  OutputDir out(config.output_dir, "compare", config_hash(config));

  std::ostringstream csv;
  csv << "feature,score_a,score_b\n";
  for (const auto& p : cmp.pairs) csv << csv_field(p.feature) << ',' << num(p.score_a) << ',' << num(p.score_b) << '\n';
  out.write("comparison.csv", csv.str(), report);

  ordered_json j;
  j["a"] = config.compare_a.filename().string();
  j["b"] = config.compare_b.filename().string();
  j["shared_features"] = cmp.pairs.size();
  j["slope"] = cmp.slope;
  j["intercept"] = cmp.intercept;
  j["pearson_r"] = cmp.pearson_r;
  out.write("comparison.json", j.dump(2) + "\n", report);
  return report;
}

RunReport cmd_conceptview(const RunConfig& config) {
  RunReport report;
  const std::string hash = config_hash(config);
  Workspace ws = load_workspace(config, report);
  const Taxonomy wordnet = load_wordnet(config.wordnet);
  const ValueTable ic = load_ic_table(config.ic_table);
  const ValueTable frequencies = load_frequency_table(config.frequencies);
  OutputDir out(config.output_dir, "conceptview", hash);

  const LabelMatrix& labels = ws.alignment.labels;
  std::vector<std::string> concepts;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.concepts.size(); ++i) {
    const auto& c = labels.concepts[i];
    const auto row = static_cast<Eigen::Index>(i);
    if (labels.Y.row(row).sum() == 0) {
      report.warnings.push_back("concept '" + c + "' has no retained features; left out of the concept view");
    } else if (!wordnet.contains_word(c) || wordnet.sense_count(c) == 0) {
      report.warnings.push_back("concept '" + c + "' has no WordNet noun synset; left out of the concept view");
    } else {
      concepts.push_back(c);
      rows.push_back(row);
    }
  }
  if (concepts.size() < 10) throw Error("concept view needs at least 10 concepts, found " + std::to_string(concepts.size()));

  const Eigen::Index k =
      config.lsa_k > 0 ? std::min<Eigen::Index>(config.lsa_k, std::min(labels.Y.rows(), labels.Y.cols()))
                       : default_lsa_rank(labels.Y);
  const Matrix<double> lsa_all = lsa_concept_vectors(labels.Y, k);
  Matrix<double> lsa(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i) lsa.row(static_cast<Eigen::Index>(i)) = lsa_all.row(rows[i]);

  const DistanceMatrix norms_matrix = cosine_matrix(concepts, lsa, Metric::norms_lsa_cosine);
  const DistanceMatrix taxonomy_matrix = resnik_matrix(concepts, wordnet, ic, config.threads);
  if (config.write_matrices) {
    out.write("norms-lsa-cosine.matrix.csv", matrix_csv(norms_matrix), report);
    out.write("wordnet-resnik.matrix.csv", matrix_csv(taxonomy_matrix), report);
  }

  ordered_json stats;
  stats["lsa_k"] = k;
  stats["concepts"] = concepts.size();
  ordered_json per_rep = ordered_json::object();
  for (const auto& rep : ws.representations) {
    const auto records = feature_records(config, ws, rep, out.path() / ".cache", report);
    const DistanceMatrix embedding_matrix = cosine_matrix(concepts, rep.table.matrix_for(concepts), Metric::embedding_cosine);
    if (config.write_matrices) out.write(rep.name + ".embedding-cosine.matrix.csv", matrix_csv(embedding_matrix), report);

    ProfileInputs inputs;
    inputs.embedding = &embedding_matrix;
    inputs.norms = &norms_matrix;
    inputs.taxonomy = &taxonomy_matrix;
    inputs.labels = &labels;
    inputs.feature_fit = &records;
    inputs.norm_data = &ws.norms;
    inputs.frequencies = &frequencies;
    inputs.wordnet = &wordnet;
    const auto build = build_profiles(inputs);
    if (!build.dropped.empty())
      report.warnings.push_back(rep.name + ": " + std::to_string(build.dropped.size()) +
                                " concepts dropped from profiles (undefined correlation or missing covariate)");
    out.write(rep.name + ".profiles.csv", profile_csv(build.profiles), report);

    const auto s = profile_statistics(build.profiles);
    per_rep[rep.name] = {{"profiles", s.profiles},
                         {"dropped", build.dropped.size()},
                         {"r_m_norms_m_taxonomy", s.r_norms_taxonomy},
                         {"r_m_norms_median_ff", s.r_norms_feature_fit},
                         {"f_statistic", s.f_test.f_statistic},
                         {"p_value", s.f_test.p_value},
                         {"df_numerator", s.f_test.df_numerator},
                         {"df_denominator", s.f_test.df_denominator}};
  }
  stats["representations"] = per_rep;
  out.write("statistics.json", stats.dump(2) + "\n", report);
  out.write("warnings.json", warnings_json(report), report);
  return report;
}

RunReport cmd_domains(const RunConfig& config) {
  RunReport report;
  const std::string hash = config_hash(config);
  Workspace ws = load_workspace(config, report);
  OutputDir out(config.output_dir, "domains", hash);

  const Representation* rep = &ws.representations.front();
  for (const auto& r : ws.representations)
    if (r.name == config.representation) rep = &r;
  const auto records = feature_records(config, ws, *rep, out.path() / ".cache", report);

  const LabelMatrix& labels = ws.alignment.labels;
  const Eigen::Index k =
      config.lsa_k > 0 ? std::min<Eigen::Index>(config.lsa_k, std::min(labels.Y.rows(), labels.Y.cols()))
                       : default_lsa_rank(labels.Y);
  const Matrix<double> lsa_all = lsa_concept_vectors(labels.Y, k);

  std::vector<std::string> concepts;
  std::vector<double> ff_values;
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < labels.concepts.size(); ++i) {
    const auto ff = concept_median_ff(labels, records, i);
    if (!ff) {
      report.warnings.push_back("concept '" + labels.concepts[i] + "' has no scored features; not clustered");
      continue;
    }
    concepts.push_back(labels.concepts[i]);
    ff_values.push_back(*ff);
    rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (concepts.size() < config.domains)
    throw ConfigError("--domains " + std::to_string(config.domains) + " exceeds the " +
                      std::to_string(concepts.size()) + " clusterable concepts");
  Matrix<double> lsa(static_cast<Eigen::Index>(rows.size()), k);
  for (std::size_t i = 0; i < rows.size(); ++i) lsa.row(static_cast<Eigen::Index>(i)) = lsa_all.row(rows[i]);
  const Vector<double> ff = Eigen::Map<const Vector<double>>(ff_values.data(), static_cast<Eigen::Index>(ff_values.size()));

  auto domain_csv = [](const std::vector<DomainSummary>& summaries) {
    std::ostringstream csv;
    csv << "domain,size,median_ff,members\n";
    for (const auto& d : summaries) {
      std::string members;
      for (const auto& m : d.members) members += (members.empty() ? "" : ";") + m;
      csv << d.id << ',' << d.size() << ',' << num(d.median_ff) << ',' << csv_field(members) << '\n';
    }
    return csv.str();
  };
  auto concept_csv = [](const DomainClustering& clustering, const Vector<double>& sorted_ff) {
    std::ostringstream csv;
    csv << "concept,domain,median_ff\n";
    for (std::size_t i = 0; i < clustering.concepts.size(); ++i)
      csv << csv_field(clustering.concepts[i]) << ',' << clustering.assignment[i] << ','
          << num(sorted_ff(static_cast<Eigen::Index>(i))) << '\n';
    return csv.str();
  };
  // Feature fit re-ordered to match the clustering's lexicographic concept order.
  auto sorted_ff = [&](const DomainClustering& clustering) {
    std::map<std::string, double> by_name;
    for (std::size_t i = 0; i < concepts.size(); ++i) by_name.emplace(concepts[i], ff_values[i]);
    Vector<double> v(static_cast<Eigen::Index>(clustering.concepts.size()));
    for (std::size_t i = 0; i < clustering.concepts.size(); ++i) v(static_cast<Eigen::Index>(i)) = by_name.at(clustering.concepts[i]);
    return v;
  };

  if (config.alpha_sweep.empty()) {
    const auto clustering = agglomerate(concepts, lsa, ff, config.alpha, config.domains);
    const Vector<double> cff = sorted_ff(clustering);
    out.write("domains.csv", domain_csv(domain_summary(clustering, cff)), report);
    out.write("concept_domains.csv", concept_csv(clustering, cff), report);
  } else {
    std::ostringstream sweep;
    sweep << "alpha,domains,within_domain_variance_ratio,largest_domain\n";
    for (const double alpha : config.alpha_sweep) {
      const auto clustering = agglomerate(concepts, lsa, ff, alpha, config.domains);
      const Vector<double> cff = sorted_ff(clustering);
      const auto summaries = domain_summary(clustering, cff);
      std::size_t largest = 0;
      for (const auto& d : summaries) largest = std::max(largest, d.size());
      sweep << num(alpha) << ',' << clustering.domains << ',' << num(within_domain_variance_ratio(clustering, cff))
            << ',' << largest << '\n';
      out.write("domains_alpha_" + num(alpha) + ".csv", domain_csv(summaries), report);
    }
    out.write("sweep.csv", sweep.str(), report);
  }
  out.write("warnings.json", warnings_json(report), report);
  return report;
}

}  // namespace normprobe::app
