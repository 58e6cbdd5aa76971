#include "pool_io.hpp"

#include <fstream>
#include <istream>
#include <unordered_set>

#include "json.hpp"

namespace mbrkit::io {

using nlohmann::json;

namespace {

std::string where(const std::string& name, std::size_t line) {
  return name + ":" + std::to_string(line);
}

std::vector<std::string> string_list(const json& value, const char* field, const std::string& at) {
  if (!value.is_array()) throw InputError(at + ": field '" + field + "' must be a list of strings");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const auto& v : value) {
    if (!v.is_string()) throw InputError(at + ": field '" + field + "' must be a list of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string required_string(const json& obj, const char* field, const std::string& at) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw InputError(at + ": missing field '" + field + "'");
  if (!it->is_string()) throw InputError(at + ": field '" + field + "' must be a string");
  return it->get<std::string>();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<SamplePool> read_pools(std::istream& in, const std::string& name) {
  std::vector<SamplePool> pools;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = where(name, line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(at + ": malformed record: " + e.what());
    }
    if (!obj.is_object()) throw InputError(at + ": malformed record: expected a JSON object");

    SamplePool pool;
    pool.id = required_string(obj, "id", at);
    pool.source = required_string(obj, "source", at);
    if (auto it = obj.find("reference"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw InputError(at + ": field 'reference' must be a string");
      pool.reference = it->get<std::string>();
    }
    const auto samples = obj.find("samples");
    if (samples == obj.end()) throw InputError(at + ": missing field 'samples'");
    pool.samples = string_list(*samples, "samples", at);
    if (pool.samples.empty()) throw InputError(at + ": record '" + pool.id + "' has no samples");
    if (auto it = obj.find("beam"); it != obj.end() && !it->is_null()) {
      pool.beam = string_list(*it, "beam", at);
    }
    if (!ids.insert(pool.id).second) throw InputError(at + ": duplicate id '" + pool.id + "'");
    pools.push_back(std::move(pool));
  }
  if (pools.empty()) throw InputError(name + ": no records");
  return pools;
}

std::vector<SamplePool> read_pools(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_pools(in, path.string());
}

void write_pool(std::ostream& out, const SamplePool& pool) {
  json obj = {{"id", pool.id}, {"source", pool.source}};
  if (pool.reference) obj["reference"] = *pool.reference;
  obj["samples"] = pool.samples;
  if (pool.beam) obj["beam"] = *pool.beam;
  out << obj.dump() << '\n';
}

void write_pools(const std::filesystem::path& path, const std::vector<SamplePool>& pools) {
  auto out = open_output(path);
  for (const auto& p : pools) write_pool(out, p);
}

void write_decode_record(std::ostream& out, const std::string& id, const DecodeResult& r) {
  const json obj = {{"id", id},
                    {"selected_index", r.selected_index},
                    {"selected_text", r.selected_text},
                    {"expected_utilities", r.expected_utilities},
                    {"num_samples_used", r.num_samples_used},
                    {"utility", r.utility_name},
                    {"seed", r.seed},
                    {"sample_indices", r.sample_indices}};
  out << obj.dump() << '\n';
}

std::vector<DecodeRecord> read_decode_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<DecodeRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = where(path.string(), line_no);
    try {
      const json obj = json::parse(line);
      DecodeRecord rec;
      rec.id = obj.at("id").get<std::string>();
      rec.result.selected_index = obj.at("selected_index").get<std::size_t>();
      rec.result.selected_text = obj.at("selected_text").get<std::string>();
      rec.result.expected_utilities = obj.at("expected_utilities").get<std::vector<double>>();
      rec.result.num_samples_used = obj.at("num_samples_used").get<std::size_t>();
      rec.result.utility_name = obj.at("utility").get<std::string>();
      rec.result.seed = obj.at("seed").get<std::uint64_t>();
      rec.result.sample_indices = obj.at("sample_indices").get<std::vector<std::size_t>>();
      records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      throw InputError(at + ": malformed decode record: " + e.what());
    }
  }
  if (records.empty()) throw InputError(path.string() + ": no records");
  return records;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  auto out = open_output(path);
  for (const auto& l : lines) out << l << '\n';
}

ParallelCorpus read_corpus(const std::filesystem::path& source, const std::filesystem::path& target) {
  auto src = read_lines(source);
  auto tgt = read_lines(target);
  if (src.size() != tgt.size()) {
    throw InputError(source.string() + " has " + std::to_string(src.size()) + " lines but " +
                     target.string() + " has " + std::to_string(tgt.size()));
  }
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i].empty()) throw InputError(where(source.string(), i + 1) + ": empty source sentence");
  }
  return make_corpus(std::move(src), std::move(tgt));
}

ParallelCorpus read_corpus_tsv(const std::filesystem::path& path) {
  std::vector<std::string> src;
  std::vector<std::string> tgt;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos || lines[i].find('\t', tab + 1) != std::string::npos) {
      throw InputError(where(path.string(), i + 1) + ": expected exactly one tab");
    }
    src.push_back(lines[i].substr(0, tab));
    tgt.push_back(lines[i].substr(tab + 1));
    if (src.back().empty()) throw InputError(where(path.string(), i + 1) + ": empty source sentence");
  }
  return make_corpus(std::move(src), std::move(tgt));
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace mbrkit::io
