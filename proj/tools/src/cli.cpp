#include "cli.hpp"

#include <charconv>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbrkit/analysis.hpp"
#include "mbrkit/mbr.hpp"
#include "mbrkit/noise.hpp"
#include "mbrkit/parallel.hpp"
#include "mbrkit/random.hpp"
#include "pool_io.hpp"

namespace mbrkit::cli {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kSeedDerivation =
    "derive_seed(seed, label, index) = splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(label)) ^ index)";

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::size_t parse_size(std::string_view text, std::string_view what) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
    throw UsageError("bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    out.push_back(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
    if (comma == std::string_view::npos) return out;
    pos = comma + 1;
  }
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::vector<std::size_t> parse_grid(std::string_view text) {
  std::vector<std::size_t> grid;
  for (auto piece : split_commas(text)) {
    const auto c1 = piece.find(':');
    if (c1 == std::string_view::npos) {
      grid.push_back(parse_size(piece, "grid value"));
      continue;
    }
    const auto c2 = piece.find(':', c1 + 1);
    const std::size_t start = parse_size(piece.substr(0, c1), "grid start");
    const std::size_t stop =
        parse_size(piece.substr(c1 + 1, c2 == piece.npos ? piece.npos : c2 - c1 - 1), "grid stop");
    const std::size_t step = c2 == piece.npos ? 1 : parse_size(piece.substr(c2 + 1), "grid step");
    if (step == 0 || start > stop) throw UsageError("bad grid range '" + std::string(piece) + "'");
    for (std::size_t v = start; v <= stop; v += step) grid.push_back(v);
  }
  for (auto v : grid) {
    if (v == 0) throw UsageError("grid sizes must be at least 1");
  }
  return grid;
}

std::vector<double> parse_probabilities(std::string_view text) {
  std::vector<double> out;
  for (auto piece : split_commas(text)) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (piece.empty() || ec != std::errc{} || end != piece.data() + piece.size()) {
      throw UsageError("bad probability '" + std::string(piece) + "'");
    }
    out.push_back(v);
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Shared option handling

struct UtilityArgs {
  std::string utility = "chrf-1";
  bool symmetric = false;
  std::string function_words;
  bool exclude_self = false;
};

void add_utility_options(CLI::App* app, UtilityArgs& args) {
  app->add_option("--utility", args.utility, "Utility preset, e.g. chrf-1, bleu-floor, meteor-0.5")
      ->capture_default_str();
  app->add_flag("--symmetric", args.symmetric, "Symmetrize the utility with the harmonic mean");
  app->add_option("--function-words", args.function_words, "Function-word lexicon for METEOR");
  app->add_flag("--exclude-self", args.exclude_self, "Leave u(s_i, s_i) out of expected utilities");
}

UtilityConfig resolve_utility(const std::string& name, bool symmetric, const std::string& fw_path) {
  UtilityConfig config = utility_preset(name);
  if (symmetric) config.symmetric = true;
  if (!fw_path.empty()) {
    config.function_words = std::make_shared<const FunctionWords>(FunctionWords::load(fw_path));
  }
  return config;
}

UtilityConfig resolve_utility(const UtilityArgs& args) {
  return resolve_utility(args.utility, args.symmetric, args.function_words);
}

std::vector<CorpusMetric> parse_metrics(const std::string& text) {
  std::vector<CorpusMetric> out;
  for (auto piece : split_commas(text)) out.push_back(parse_corpus_metric(piece));
  return out;
}

std::string join_metrics(const std::vector<CorpusMetric>& metrics) {
  std::string out;
  for (auto m : metrics) out += (out.empty() ? "" : ",") + std::string(to_string(m));
  return out;
}

/// Key/value pairs written as "# key=value" TSV header lines and as a JSON object.
using ConfigList = std::vector<std::pair<std::string, std::string>>;

void write_header(std::ostream& out, const ConfigList& config) {
  for (const auto& [k, v] : config) out << "# " << k << '=' << v << '\n';
}

ojson config_json(const ConfigList& config) {
  ojson obj = ojson::object();
  for (const auto& [k, v] : config) obj[k] = v;
  return obj;
}

void write_json(const fs::path& path, const ojson& value) {
  auto out = io::open_output(path);
  out << value.dump(1) << '\n';
}

ConfigList utility_config(const UtilityConfig& config, bool include_self) {
  return {{"utility", config.name()},
          {"utility_params", config.describe()},
          {"include_self", include_self ? "true" : "false"},
          {"tie_break", "lowest-index, relative tolerance 1e-12"}};
}

ConfigList rng_config(std::uint64_t seed) {
  return {{"seed", std::to_string(seed)},
          {"rng", std::string(Rng::kAlgorithm)},
          {"seed_derivation", kSeedDerivation}};
}

void append(ConfigList& a, const ConfigList& b) { a.insert(a.end(), b.begin(), b.end()); }

std::vector<std::string> references_of(const std::vector<SamplePool>& pools, bool required) {
  std::vector<std::string> refs;
  for (const auto& p : pools) {
    if (!p.reference) {
      if (required) throw UsageError("pool '" + p.id + "' has no reference but evaluation was requested");
      return {};
    }
    refs.push_back(*p.reference);
  }
  return refs;
}

// ---------------------------------------------------------------------------
// decode

struct DecodeArgs {
  std::string pools;
  std::string output;
  std::string summary;
  UtilityArgs utility;
  std::size_t num_samples = 100;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool evaluate = false;
  std::string metrics = "bleu,chrf1,chrf2,chrf3";
  unsigned threads = 0;
};

int cmd_decode(const DecodeArgs& args, std::ostream& out, std::ostream& err) {
  const auto pools = io::read_pools(args.pools);
  const auto config = resolve_utility(args.utility);
  const bool include_self = !args.utility.exclude_self;
  if (args.num_samples == 0) throw UsageError("--num-samples must be at least 1");

  for (const auto& p : pools) {
    if (p.samples.size() > args.num_samples && !args.seed_given) {
      throw UsageError("--seed is required: pool '" + p.id + "' has " +
                       std::to_string(p.samples.size()) + " samples, more than --num-samples " +
                       std::to_string(args.num_samples));
    }
  }
  const auto metrics = parse_metrics(args.metrics);
  const auto refs = references_of(pools, args.evaluate);

  std::vector<DecodeResult> results(pools.size());
  std::vector<std::size_t> degenerate(pools.size(), 0);
  parallel_for(pools.size(), args.threads, [&](std::size_t k) {
    const auto& pool = pools[k];
    DecodeOptions opts;
    opts.include_self = include_self;
    opts.threads = 1;
    if (pool.samples.size() > args.num_samples) {
      opts.subsample = args.num_samples;
      opts.seed = derive_seed(args.seed, "decode", k);
    } else {
      opts.seed = args.seed;
    }
    results[k] = decode(pool, config, opts);
    for (auto i : results[k].sample_indices) degenerate[k] += is_degenerate(config, pool.samples[i]) ? 1 : 0;
  });

  {
    auto file = io::open_output(args.output);
    for (std::size_t k = 0; k < pools.size(); ++k) io::write_decode_record(file, pools[k].id, results[k]);
  }

  std::size_t degenerate_total = 0;
  for (auto d : degenerate) degenerate_total += d;
  if (degenerate_total > 0) {
    err << "warning: " << degenerate_total << " degenerate samples scored 0 against every peer\n";
  }

  ConfigList config_list{{"command", "decode"}, {"pools", args.pools}};
  append(config_list, utility_config(config, include_self));
  config_list.emplace_back("num_samples", std::to_string(args.num_samples));
  append(config_list, rng_config(args.seed));

  ojson summary;
  summary["config"] = config_json(config_list);
  summary["records"] = pools.size();
  summary["degenerate_samples"] = degenerate_total;
  out << "decoded " << pools.size() << " records with " << config.name() << '\n';
  if (!refs.empty()) {
    std::vector<std::string> hyps;
    for (const auto& r : results) hyps.push_back(r.selected_text);
    ojson eval = ojson::array();
    for (const auto& s : corpus_scores(hyps, refs, metrics)) {
      eval.push_back({{"metric", s.name}, {"signature", s.signature}, {"score", s.value}});
      out << s.name << '\t' << s.signature << '\t' << format_double(s.value) << '\n';
    }
    summary["evaluation"] = eval;
  }
  if (!args.summary.empty()) write_json(args.summary, summary);
  return 0;
}

// ---------------------------------------------------------------------------
// curve

struct CurveArgs {
  std::string pools;
  std::string output;
  std::string summary;
  std::string json;
  UtilityArgs utility;
  std::string grid = "5:100:5";
  std::size_t reps = 2;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string metrics = "bleu,chrf1,chrf2,chrf3";
  unsigned threads = 0;
};

constexpr const char* kUtilityMetric = "expected_utility";

int cmd_curve(const CurveArgs& args, std::ostream& out, std::ostream&) {
  if (!args.seed_given) throw UsageError("--seed is required for curve");
  const auto pools = io::read_pools(args.pools);
  const auto config = resolve_utility(args.utility);
  const auto refs = references_of(pools, false);

  CurveOptions opts;
  opts.grid = parse_grid(args.grid);
  opts.repetitions = args.reps;
  opts.seed = args.seed;
  opts.include_self = !args.utility.exclude_self;
  opts.threads = args.threads;
  opts.metrics = refs.empty() ? std::vector<CorpusMetric>{} : parse_metrics(args.metrics);
  const auto report = decode_curve(pools, config, opts);

  ConfigList config_list{{"command", "curve"}, {"pools", args.pools}};
  append(config_list, utility_config(config, opts.include_self));
  std::string grid_text;
  for (auto g : opts.grid) grid_text += (grid_text.empty() ? "" : ",") + std::to_string(g);
  config_list.emplace_back("grid", grid_text);
  config_list.emplace_back("reps", std::to_string(opts.repetitions));
  config_list.emplace_back("metrics", std::string(kUtilityMetric) +
                                          (refs.empty() ? "" : "," + join_metrics(opts.metrics)));
  append(config_list, rng_config(args.seed));
  config_list.emplace_back("subsample_seed", "derive_seed(derive_seed(derive_seed(seed, \"pool\", k), "
                                             "\"curve-size\", size), \"curve-rep\", rep)");

  // Mean expected utility of the selections, per (size, rep).
  const std::size_t n_pools = pools.size();
  std::vector<double> eu_cells;
  for (std::size_t base = 0; base < report.points.size(); base += n_pools) {
    double sum = 0.0;
    for (std::size_t p = 0; p < n_pools; ++p) {
      const auto& r = report.points[base + p].result;
      sum += r.expected_utilities[r.selected_index];
    }
    eu_cells.push_back(sum / static_cast<double>(n_pools));
  }

  struct Row {
    std::size_t size;
    std::string metric;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  std::size_t summary_index = 0;
  for (std::size_t g = 0; g < opts.grid.size(); ++g) {
    Row eu{opts.grid[g], kUtilityMetric, {}};
    for (std::size_t rep = 0; rep < opts.repetitions; ++rep) eu.values.push_back(eu_cells[g * opts.repetitions + rep]);
    rows.push_back(std::move(eu));
    for (std::size_t m = 0; m < opts.metrics.size(); ++m) {
      const auto& s = report.summaries[summary_index++];
      rows.push_back({s.size, s.metric, s.values});
    }
  }

  {
    auto file = io::open_output(args.output);
    write_header(file, config_list);
    file << "size\trep\tmetric\tvalue\n";
    for (const auto& row : rows) {
      for (std::size_t rep = 0; rep < row.values.size(); ++rep) {
        file << row.size << '\t' << rep << '\t' << row.metric << '\t' << format_double(row.values[rep]) << '\n';
      }
    }
  }
  if (!args.summary.empty()) {
    auto file = io::open_output(args.summary);
    write_header(file, config_list);
    file << "size\tmetric\tmean\tsd\n";
    for (const auto& row : rows) {
      file << row.size << '\t' << row.metric << '\t' << format_double(mean(row.values)) << '\t'
           << format_double(sample_stddev(row.values)) << '\n';
    }
  }
  if (!args.json.empty()) {
    ojson doc;
    doc["config"] = config_json(config_list);
    ojson summaries = ojson::array();
    for (const auto& row : rows) {
      summaries.push_back({{"size", row.size},
                           {"metric", row.metric},
                           {"values", row.values},
                           {"mean", mean(row.values)},
                           {"sd", sample_stddev(row.values)}});
    }
    doc["summaries"] = summaries;
    ojson selections = ojson::array();
    for (std::size_t base = 0; base < report.points.size(); base += n_pools) {
      ojson cell;
      cell["size"] = report.points[base].size;
      cell["rep"] = report.points[base].rep;
      ojson picks = ojson::array();
      for (std::size_t p = 0; p < n_pools; ++p) {
        const auto& r = report.points[base + p].result;
        picks.push_back(r.sample_indices[r.selected_index]);
      }
      cell["selected_sample"] = picks;
      selections.push_back(cell);
    }
    doc["pool_ids"] = [&] {
      ojson ids = ojson::array();
      for (const auto& p : pools) ids.push_back(p.id);
      return ids;
    }();
    doc["selections"] = selections;
    write_json(args.json, doc);
  }
  out << "curve: " << opts.grid.size() << " sizes x " << opts.repetitions << " reps over " << n_pools
      << " pools -> " << args.output << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string hyp;
  std::string ref;
  std::string metrics = "bleu,chrf1,chrf2,chrf3";
};

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream&) {
  const auto hyps = io::read_lines(args.hyp);
  const auto refs = io::read_lines(args.ref);
  if (hyps.size() != refs.size()) {
    throw UsageError("line-count mismatch: " + args.hyp + " has " + std::to_string(hyps.size()) +
                     " lines, " + args.ref + " has " + std::to_string(refs.size()));
  }
  const auto metrics = parse_metrics(args.metrics);
  out << "metric\tsignature\tscore\n";
  for (const auto& s : corpus_scores(hyps, refs, metrics)) {
    out << s.name << '\t' << s.signature << '\t' << format_double(s.value) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

std::pair<std::string, std::string> named_path(const std::string& entry) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
    throw UsageError("expected name=path, got '" + entry + "'");
  }
  return {entry.substr(0, eq), entry.substr(eq + 1)};
}

struct LengthArgs {
  std::vector<std::string> corpora;
  std::string pools;
  std::vector<std::string> decoded;
  std::string output;
  std::string json;
};

int cmd_length(const LengthArgs& args, std::ostream& out, std::ostream&) {
  std::vector<NamedCorpus> corpora;
  if (!args.pools.empty()) {
    const auto pools = io::read_pools(args.pools);
    const auto refs = references_of(pools, false);
    if (!refs.empty()) corpora.push_back({"reference", refs});
    NamedCorpus samples{"samples", {}};
    NamedCorpus beam{"beam", {}};
    bool have_beam = true;
    for (const auto& p : pools) {
      samples.sentences.insert(samples.sentences.end(), p.samples.begin(), p.samples.end());
      if (p.beam && !p.beam->empty()) {
        beam.sentences.push_back(p.beam->front());
      } else {
        have_beam = false;
      }
    }
    corpora.push_back(std::move(samples));
    if (have_beam) corpora.push_back(std::move(beam));
  }
  for (const auto& entry : args.decoded) {
    const auto [name, path] = named_path(entry);
    NamedCorpus c{name, {}};
    for (const auto& rec : io::read_decode_records(path)) c.sentences.push_back(rec.result.selected_text);
    corpora.push_back(std::move(c));
  }
  for (const auto& entry : args.corpora) {
    const auto [name, path] = named_path(entry);
    corpora.push_back({name, io::read_lines(path)});
  }
  if (corpora.empty()) throw UsageError("missing required input: give --corpus, --pools or --decoded");

  const auto table = length_stats(corpora);
  const ConfigList config{{"command", "analyze length"}, {"tokenizer", "13a"}, {"statistic", "mean tokens"}};
  {
    auto file = io::open_output(args.output);
    write_header(file, config);
    file << "system\tsentences\tmean_tokens\n";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      file << table.rows[i].first << '\t' << corpora[i].sentences.size() << '\t'
           << format_double(table.rows[i].second) << '\n';
    }
  }
  if (!args.json.empty()) {
    ojson doc;
    doc["config"] = config_json(config);
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      rows.push_back({{"system", table.rows[i].first},
                      {"sentences", corpora[i].sentences.size()},
                      {"mean_tokens", table.rows[i].second}});
    }
    doc["rows"] = rows;
    write_json(args.json, doc);
  }
  for (const auto& [name, value] : table.rows) out << name << '\t' << format_double(value) << '\n';
  return 0;
}

struct FreqArgs {
  std::string train;
  std::vector<std::string> corpora;
  std::string buckets = "log10";
  std::string output;
  std::string json;
};

int cmd_freq(const FreqArgs& args, std::ostream& out, std::ostream&) {
  const auto scheme = BucketScheme::parse(args.buckets);
  const auto train_tokens = tokenize_corpus(io::read_lines(args.train));
  const auto table = build_frequency_table(train_tokens, scheme);

  std::vector<std::pair<std::string, BucketDistribution>> dists;
  dists.emplace_back("training", training_distribution(table));
  for (const auto& entry : args.corpora) {
    const auto [name, path] = named_path(entry);
    const auto tokens = tokenize_corpus(io::read_lines(path));
    if (tokens.empty()) throw UsageError("corpus '" + name + "' has no tokens");
    dists.emplace_back(name, token_probability_by_bucket(table, tokens));
  }

  const ConfigList config{{"command", "analyze freq"},
                          {"train", args.train},
                          {"tokenizer", "13a"},
                          {"buckets", scheme.describe()},
                          {"normalization", "share of all corpus tokens, buckets sum to 1"}};
  {
    auto file = io::open_output(args.output);
    write_header(file, config);
    file << "system\tbucket\trange\tcount\tprobability\n";
    for (const auto& [name, d] : dists) {
      for (std::size_t b = 0; b < d.counts.size(); ++b) {
        file << name << '\t' << b << '\t' << table.bucket_label(b) << '\t' << d.counts[b] << '\t'
             << format_double(d.probability[b]) << '\n';
      }
    }
  }
  if (!args.json.empty()) {
    ojson doc;
    doc["config"] = config_json(config);
    ojson labels = ojson::array();
    for (std::size_t b = 0; b <= table.oov_bucket(); ++b) labels.push_back(table.bucket_label(b));
    doc["buckets"] = labels;
    ojson systems = ojson::array();
    for (const auto& [name, d] : dists) {
      systems.push_back({{"system", name}, {"total", d.total}, {"counts", d.counts}, {"probability", d.probability}});
    }
    doc["systems"] = systems;
    write_json(args.json, doc);
  }
  out << "bucketed " << dists.size() << " systems into " << table.oov_bucket() + 1 << " buckets\n";
  return 0;
}

struct PathologyArgs {
  std::string pools;
  std::string decoded;
  std::string utility;
  bool symmetric = false;
  std::string function_words;
  bool exclude_self = false;
  std::string copy_anchor = "reference";
  double copy_threshold = kCopyThreshold;
  std::string overlap = "jaccard";
  double halluc_threshold = kHallucinationThreshold;
  std::string output;
  std::string json;
  unsigned threads = 0;
};

int cmd_pathology(const PathologyArgs& args, PathologyKind kind, std::ostream& out, std::ostream&) {
  const auto pools = io::read_pools(args.pools);
  const auto records = io::read_decode_records(args.decoded);

  std::map<std::string, const io::DecodeRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::vector<DecodeResult> results;
  for (const auto& p : pools) {
    const auto it = by_id.find(p.id);
    if (it == by_id.end()) throw UsageError(args.decoded + " has no decode record for pool '" + p.id + "'");
    results.push_back(it->second->result);
  }

  std::string utility = args.utility;
  if (utility.empty()) {
    utility = records.front().result.utility_name;
    for (const auto& r : records) {
      if (r.result.utility_name != utility) {
        throw UsageError("decode records mix utilities; pass --utility explicitly");
      }
    }
  }
  const auto config = resolve_utility(utility, args.symmetric, args.function_words);

  std::vector<UtilityMatrix> matrices(pools.size());
  parallel_for(pools.size(), args.threads, [&](std::size_t k) {
    std::vector<std::string> drawn;
    for (auto i : results[k].sample_indices) {
      if (i >= pools[k].samples.size()) {
        throw UsageError("decode record for pool '" + pools[k].id + "' indexes past its samples");
      }
      drawn.push_back(pools[k].samples[i]);
    }
    matrices[k] = utility_matrix(drawn, config, {1});
  });

  PathologyOptions opts;
  opts.copy_anchor = parse_copy_anchor(args.copy_anchor);
  opts.copy_threshold = args.copy_threshold;
  opts.overlap = parse_overlap_mode(args.overlap);
  opts.hallucination_threshold = args.halluc_threshold;
  opts.include_self = !args.exclude_self;
  const auto report = pathology_report(pools, results, matrices, kind, opts);

  ConfigList config_list{{"command", "analyze " + std::string(kind == PathologyKind::copy ? "copies" : "hallucinations")},
                         {"pools", args.pools},
                         {"decoded", args.decoded}};
  append(config_list, utility_config(config, opts.include_self));
  if (kind == PathologyKind::copy) {
    config_list.emplace_back("copy_anchor", std::string(to_string(opts.copy_anchor)));
    config_list.emplace_back("copy_threshold", format_double(opts.copy_threshold));
    config_list.emplace_back("overlap", std::string(to_string(opts.overlap)));
    config_list.emplace_back("copy_rule", "overlap > threshold over 13a token sets");
  } else {
    config_list.emplace_back("halluc_threshold", format_double(opts.hallucination_threshold));
    config_list.emplace_back("halluc_rule", "sentence chrF2 vs reference < threshold");
  }

  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  {
    auto file = io::open_output(args.output);
    write_header(file, config_list);
    file << "kind\tpools\tsamples\tflagged_samples\tflagged_selections\tmean_utility_flagged\t"
            "mean_utility_all\tflagged_rate_in_pools\tflagged_rate_in_selections\tflagged_rate_in_beam\n";
    file << to_string(kind) << '\t' << report.pools << '\t' << report.samples << '\t'
         << report.flagged_samples << '\t' << report.flagged_selections << '\t'
         << opt(report.mean_utility_flagged) << '\t' << format_double(report.mean_utility_all) << '\t'
         << format_double(report.flagged_rate_in_pools) << '\t'
         << format_double(report.flagged_rate_in_selections) << '\t' << opt(report.flagged_rate_in_beam)
         << '\n';
  }
  if (!args.json.empty()) {
    ojson doc;
    doc["config"] = config_json(config_list);
    ojson r;
    r["kind"] = std::string(to_string(kind));
    r["pools"] = report.pools;
    r["samples"] = report.samples;
    r["flagged_samples"] = report.flagged_samples;
    r["flagged_selections"] = report.flagged_selections;
    r["mean_utility_flagged"] = report.mean_utility_flagged ? ojson(*report.mean_utility_flagged) : ojson(nullptr);
    r["mean_utility_all"] = report.mean_utility_all;
    r["flagged_rate_in_pools"] = report.flagged_rate_in_pools;
    r["flagged_rate_in_selections"] = report.flagged_rate_in_selections;
    r["flagged_rate_in_beam"] = report.flagged_rate_in_beam ? ojson(*report.flagged_rate_in_beam) : ojson(nullptr);
    doc["report"] = r;
    write_json(args.json, doc);
  }
  out << to_string(kind) << ": flagged " << report.flagged_samples << " of " << report.samples
      << " samples, " << report.flagged_selections << " of " << report.pools << " selections\n";
  return 0;
}

// ---------------------------------------------------------------------------
// noise / split

struct CorpusArgs {
  std::string src;
  std::string tgt;
  std::string tsv;
};

void add_corpus_options(CLI::App* app, CorpusArgs& args) {
  app->add_option("--src", args.src, "Source side, one sentence per line");
  app->add_option("--tgt", args.tgt, "Target side, aligned with --src");
  app->add_option("--tsv", args.tsv, "Tab-separated source/target pairs instead of --src/--tgt");
}

ParallelCorpus load_corpus(const CorpusArgs& args) {
  if (!args.tsv.empty()) {
    if (!args.src.empty() || !args.tgt.empty()) throw UsageError("use either --tsv or --src/--tgt");
    return io::read_corpus_tsv(args.tsv);
  }
  if (args.src.empty()) throw UsageError("missing required input --src (or --tsv)");
  if (args.tgt.empty()) throw UsageError("missing required input --tgt (or --tsv)");
  return io::read_corpus(args.src, args.tgt);
}

std::string corpus_origin(const CorpusArgs& args) {
  return args.tsv.empty() ? args.src + " | " + args.tgt : args.tsv;
}

void write_corpus(const std::string& prefix, const ParallelCorpus& corpus, bool tags) {
  auto src = io::open_output(prefix + ".src");
  auto tgt = io::open_output(prefix + ".tgt");
  for (const auto& p : corpus.pairs) {
    src << p.source << '\n';
    tgt << p.target << '\n';
  }
  if (tags) {
    auto out = io::open_output(prefix + ".tags");
    for (auto t : corpus.provenance) out << (t == Provenance::copy_injected ? '1' : '0') << '\n';
  }
}

struct NoiseArgs {
  CorpusArgs corpus;
  std::string p;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string mode = "bernoulli";
  std::string prefix;
  unsigned threads = 0;
};

int cmd_noise(const NoiseArgs& args, std::ostream& out, std::ostream&) {
  if (!args.seed_given) throw UsageError("--seed is required for noise");
  const auto corpus = load_corpus(args.corpus);
  const auto grid = args.p.empty() ? default_noise_grid() : parse_probabilities(args.p);
  const auto mode = parse_noise_mode(args.mode);
  for (double p : grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw UsageError("noise probability " + format_double(p) + " outside [0, 1]");
  }
  for (double p : grid) {
    const auto noised = inject_copy_noise(corpus, p, args.seed, mode, args.threads);
    const std::string prefix = args.prefix + ".p" + format_double(p);
    write_corpus(prefix, noised, true);
    std::size_t tagged = 0;
    for (auto t : noised.provenance) tagged += t == Provenance::copy_injected ? 1 : 0;
    ConfigList config{{"command", "noise"},
                      {"input", corpus_origin(args.corpus)},
                      {"p", format_double(p)},
                      {"mode", std::string(to_string(mode))},
                      {"chunk_size", std::to_string(kNoiseChunk)},
                      {"chunk_seed", "derive_seed(seed, \"copy-noise\", chunk)"}};
    append(config, rng_config(args.seed));
    ojson doc;
    doc["config"] = config_json(config);
    doc["generator"] = std::string(Rng::kAlgorithm);
    doc["pairs"] = noised.size();
    doc["copy_injected"] = tagged;
    write_json(prefix + ".json", doc);
    out << "p=" << format_double(p) << '\t' << tagged << " of " << noised.size() << " pairs copied\n";
  }
  return 0;
}

struct SplitArgs {
  CorpusArgs corpus;
  std::size_t size = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string prefix;
};

int cmd_split(const SplitArgs& args, std::ostream& out, std::ostream&) {
  if (!args.seed_given) throw UsageError("--seed is required for split");
  const auto corpus = load_corpus(args.corpus);
  const auto [train, held] = split_holdout(corpus, args.size, args.seed);
  write_corpus(args.prefix + ".train", train, false);
  write_corpus(args.prefix + ".heldout", held, false);
  ConfigList config{{"command", "split"},
                    {"input", corpus_origin(args.corpus)},
                    {"heldout_size", std::to_string(args.size)},
                    {"split_seed", "derive_seed(seed, \"holdout\", 0)"}};
  append(config, rng_config(args.seed));
  ojson doc;
  doc["config"] = config_json(config);
  doc["generator"] = std::string(Rng::kAlgorithm);
  doc["train"] = train.size();
  doc["heldout"] = held.size();
  write_json(args.prefix + ".split.json", doc);
  out << "train " << train.size() << ", heldout " << held.size() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample-based minimum Bayes risk decoding and bias diagnostics", "mbrkit"};
  app.require_subcommand(1);
  app.failure_message([](const CLI::App*, const CLI::Error& e) {
    return "error: " + std::string(e.what()) + "\nRun with --help for more information.\n";
  });

  DecodeArgs decode_args;
  auto* decode_cmd = app.add_subcommand("decode", "MBR-decode every pool of a JSONL pool file");
  decode_cmd->add_option("pools", decode_args.pools, "Pool file (JSONL)")->required();
  decode_cmd->add_option("-o,--output", decode_args.output, "Decode results (JSONL)")->required();
  decode_cmd->add_option("--summary", decode_args.summary, "Summary with configuration and evaluation (JSON)");
  add_utility_options(decode_cmd, decode_args.utility);
  decode_cmd->add_option("--num-samples", decode_args.num_samples, "Pools larger than this are subsampled")
      ->capture_default_str();
  auto* decode_seed = decode_cmd->add_option("--seed", decode_args.seed, "Seed for subsampling");
  decode_cmd->add_flag("--evaluate", decode_args.evaluate, "Require references and score the selections");
  decode_cmd->add_option("--metrics", decode_args.metrics, "Corpus metrics for evaluation")->capture_default_str();
  decode_cmd->add_option("--threads", decode_args.threads, "Worker threads (0 = all cores)");

  CurveArgs curve_args;
  auto* curve_cmd = app.add_subcommand("curve", "Quality as a function of the number of samples");
  curve_cmd->add_option("pools", curve_args.pools, "Pool file (JSONL)")->required();
  curve_cmd->add_option("-o,--output", curve_args.output, "Per-repetition TSV (size, rep, metric, value)")->required();
  curve_cmd->add_option("--summary", curve_args.summary, "Per-size TSV (size, metric, mean, sd)");
  curve_cmd->add_option("--json", curve_args.json, "Full report (JSON)");
  add_utility_options(curve_cmd, curve_args.utility);
  curve_cmd->add_option("--grid", curve_args.grid, "Sample counts: start:stop:step and/or a list")->capture_default_str();
  curve_cmd->add_option("--reps", curve_args.reps, "Repetitions per size")->capture_default_str();
  auto* curve_seed_opt = curve_cmd->add_option("--seed", curve_args.seed, "Seed for subsampling");
  curve_cmd->add_option("--metrics", curve_args.metrics, "Corpus metrics")->capture_default_str();
  curve_cmd->add_option("--threads", curve_args.threads, "Worker threads (0 = all cores)");

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Corpus-level BLEU / chrF with signatures");
  score_cmd->add_option("--hyp", score_args.hyp, "Hypotheses, one per line")->required();
  score_cmd->add_option("--ref", score_args.ref, "References, one per line")->required();
  score_cmd->add_option("--metric,--metrics", score_args.metrics, "bleu, chrf1, chrf2, chrf3")->capture_default_str();

  auto* analyze_cmd = app.add_subcommand("analyze", "Bias diagnostics");
  analyze_cmd->require_subcommand(1);

  LengthArgs length_args;
  auto* length_cmd = analyze_cmd->add_subcommand("length", "Mean 13a token counts per system");
  length_cmd->add_option("--corpus", length_args.corpora, "name=path of a plain-text corpus (repeatable)");
  length_cmd->add_option("--pools", length_args.pools, "Pool file: adds reference, samples and beam rows");
  length_cmd->add_option("--decoded", length_args.decoded, "name=path of decode results (repeatable)");
  length_cmd->add_option("-o,--output", length_args.output, "TSV report")->required();
  length_cmd->add_option("--json", length_args.json, "JSON report");

  FreqArgs freq_args;
  auto* freq_cmd = analyze_cmd->add_subcommand("freq", "Token probability by training-frequency bucket");
  freq_cmd->add_option("--train", freq_args.train, "Training target corpus")->required();
  freq_cmd->add_option("--corpus", freq_args.corpora, "name=path of a translation corpus (repeatable)");
  freq_cmd->add_option("--buckets", freq_args.buckets, "'log10' or lower bounds like 1,10,100")->capture_default_str();
  freq_cmd->add_option("-o,--output", freq_args.output, "TSV report")->required();
  freq_cmd->add_option("--json", freq_args.json, "JSON report");

  PathologyArgs copies_args;
  PathologyArgs halluc_args;
  auto add_pathology = [&](const char* name, const char* help, PathologyArgs& a) {
    auto* cmd = analyze_cmd->add_subcommand(name, help);
    cmd->add_option("--pools", a.pools, "Pool file (JSONL)")->required();
    cmd->add_option("--decoded", a.decoded, "Decode results for the same pools")->required();
    cmd->add_option("--utility", a.utility, "Utility for expected utilities (default: from --decoded)");
    cmd->add_flag("--symmetric", a.symmetric, "Symmetrize the utility");
    cmd->add_option("--function-words", a.function_words, "Function-word lexicon for METEOR");
    cmd->add_flag("--exclude-self", a.exclude_self, "Leave the self term out of expected utilities");
    cmd->add_option("--copy-anchor", a.copy_anchor, "reference or source")->capture_default_str();
    cmd->add_option("--copy-threshold", a.copy_threshold, "Copy if overlap exceeds this")->capture_default_str();
    cmd->add_option("--overlap", a.overlap, "jaccard or anchor-coverage")->capture_default_str();
    cmd->add_option("--halluc-threshold", a.halluc_threshold, "Hallucination if chrF2 is below this")
        ->capture_default_str();
    cmd->add_option("-o,--output", a.output, "TSV report")->required();
    cmd->add_option("--json", a.json, "JSON report");
    cmd->add_option("--threads", a.threads, "Worker threads (0 = all cores)");
    return cmd;
  };
  auto* copies_cmd = add_pathology("copies", "Copy rates and utilities", copies_args);
  auto* halluc_cmd = add_pathology("hallucinations", "Hallucination rates and utilities", halluc_args);

  NoiseArgs noise_args;
  auto* noise_cmd = app.add_subcommand("noise", "Inject source-copy noise into a parallel corpus");
  add_corpus_options(noise_cmd, noise_args.corpus);
  noise_cmd->add_option("--p", noise_args.p, "Comma-separated probabilities (default 0.001,...,0.5)");
  auto* noise_seed = noise_cmd->add_option("--seed", noise_args.seed, "Seed");
  noise_cmd->add_option("--mode", noise_args.mode, "bernoulli or exact-count")->capture_default_str();
  noise_cmd->add_option("--out-prefix", noise_args.prefix, "Output prefix")->required();
  noise_cmd->add_option("--threads", noise_args.threads, "Worker threads (0 = all cores)");

  SplitArgs split_args;
  auto* split_cmd = app.add_subcommand("split", "Hold out a random sample of a parallel corpus");
  add_corpus_options(split_cmd, split_args.corpus);
  split_cmd->add_option("--size", split_args.size, "Held-out pairs")->required();
  auto* split_seed = split_cmd->add_option("--seed", split_args.seed, "Seed");
  split_cmd->add_option("--out-prefix", split_args.prefix, "Output prefix")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (decode_cmd->parsed()) {
      decode_args.seed_given = decode_seed->count() > 0;
      return cmd_decode(decode_args, out, err);
    }
    if (curve_cmd->parsed()) {
      curve_args.seed_given = curve_seed_opt->count() > 0;
      return cmd_curve(curve_args, out, err);
    }
    if (score_cmd->parsed()) return cmd_score(score_args, out, err);
    if (length_cmd->parsed()) return cmd_length(length_args, out, err);
    if (freq_cmd->parsed()) return cmd_freq(freq_args, out, err);
    if (copies_cmd->parsed()) return cmd_pathology(copies_args, PathologyKind::copy, out, err);
    if (halluc_cmd->parsed()) return cmd_pathology(halluc_args, PathologyKind::hallucination, out, err);
    if (noise_cmd->parsed()) {
      noise_args.seed_given = noise_seed->count() > 0;
      return cmd_noise(noise_args, out, err);
    }
    if (split_cmd->parsed()) {
      split_args.seed_given = split_seed->count() > 0;
      return cmd_split(split_args, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  err << "error: no command given\n";
  return 1;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace mbrkit::cli
