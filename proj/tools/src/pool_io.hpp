#pragma once

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbrkit/mbr.hpp"
#include "mbrkit/noise.hpp"

namespace mbrkit::io {

/// Raised for unreadable or malformed input files. The message names the file
/// and, where it applies, the 1-based line.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One JSON object per line: id, source, optional reference, samples, optional beam.
std::vector<SamplePool> read_pools(std::istream& in, const std::string& name = "<input>");
std::vector<SamplePool> read_pools(const std::filesystem::path& path);

void write_pool(std::ostream& out, const SamplePool& pool);
void write_pools(const std::filesystem::path& path, const std::vector<SamplePool>& pools);

struct DecodeRecord {
  std::string id;
  DecodeResult result;
};

void write_decode_record(std::ostream& out, const std::string& id, const DecodeResult& result);
std::vector<DecodeRecord> read_decode_records(const std::filesystem::path& path);

/// Lines of a UTF-8 text file without their newline (a trailing "\r" is kept).
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

ParallelCorpus read_corpus(const std::filesystem::path& source, const std::filesystem::path& target);
/// Tab-separated source and target on each line.
ParallelCorpus read_corpus_tsv(const std::filesystem::path& path);

std::ofstream open_output(const std::filesystem::path& path);

}  // namespace mbrkit::io
