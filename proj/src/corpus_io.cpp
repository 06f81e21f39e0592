#include "corpuseng/corpus_io.hpp"

#include <sstream>
#include <stdexcept>

#include "corpuseng/util.hpp"
#include "json.hpp"

namespace corpuseng {

namespace {

// Strips a trailing \r so CRLF input round-trips to LF output.
bool getline_lf(std::ifstream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

Sentence::Sentence(std::string t) : text(std::move(t)) {
  if (text.find('\n') != std::string::npos) {
    throw std::runtime_error("sentence text contains a newline");
  }
  validate_utf8(text, "sentence");
  tokens = split_whitespace(text);
}

void FilterStats::merge(const FilterStats& other) {
  input_count += other.input_count;
  kept_count += other.kept_count;
  for (const auto& [rule, n] : other.dropped_by_rule) {
    dropped_by_rule[rule] += n;
  }
}

bool FilterStats::consistent() const {
  std::uint64_t dropped = 0;
  for (const auto& [rule, n] : dropped_by_rule) dropped += n;
  return input_count == kept_count + dropped;
}

std::string FilterStats::to_json() const {
  nlohmann::json j;
  j["input_count"] = input_count;
  j["kept_count"] = kept_count;
  j["dropped_by_rule"] = dropped_by_rule;
  return j.dump(2);
}

MonoReader::MonoReader(const std::string& path) : path_(path), in_(path) {
  if (!in_) throw std::runtime_error("cannot open " + path);
}

bool MonoReader::next(Sentence& out) {
  std::string line;
  while (getline_lf(in_, line)) {
    ++lines_read_;
    if (line.empty()) {
      ++empty_skipped_;
      continue;
    }
    validate_utf8(line, path_ + " line " + std::to_string(lines_read_));
    out = Sentence(std::move(line));
    return true;
  }
  return false;
}

ParallelReader::ParallelReader(const std::string& src_path,
                               const std::string& tgt_path)
    : src_path_(src_path), tgt_path_(tgt_path), src_(src_path),
      tgt_(tgt_path) {
  if (!src_) throw std::runtime_error("cannot open " + src_path);
  if (!tgt_) throw std::runtime_error("cannot open " + tgt_path);
}

bool ParallelReader::next(SentencePair& out) {
  std::string src_line, tgt_line;
  const bool has_src = getline_lf(src_, src_line);
  const bool has_tgt = getline_lf(tgt_, tgt_line);
  if (has_src != has_tgt) {
    // Drain the longer side so the error can report both totals.
    std::uint64_t src_count = index_ + (has_src ? 1 : 0);
    std::uint64_t tgt_count = index_ + (has_tgt ? 1 : 0);
    std::string line;
    while (getline_lf(src_, line)) ++src_count;
    while (getline_lf(tgt_, line)) ++tgt_count;
    throw std::runtime_error("line-count mismatch " +
                             std::to_string(src_count) + " vs " +
                             std::to_string(tgt_count) + " (" + src_path_ +
                             " vs " + tgt_path_ + ")");
  }
  if (!has_src) return false;
  validate_utf8(src_line, src_path_ + " line " + std::to_string(index_ + 1));
  validate_utf8(tgt_line, tgt_path_ + " line " + std::to_string(index_ + 1));
  out.source = Sentence(std::move(src_line));
  out.target = Sentence(std::move(tgt_line));
  out.line_index = index_++;
  return true;
}

MonoWriter::MonoWriter(const std::string& path) : path_(path), out_(path) {
  if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
}

void MonoWriter::write(const Sentence& s) {
  out_ << s.text << '\n';
  if (!out_) throw std::runtime_error("write failed on " + path_);
}

void MonoWriter::close() {
  out_.close();
  if (out_.fail()) throw std::runtime_error("close failed on " + path_);
}

ParallelWriter::ParallelWriter(const std::string& src_path,
                               const std::string& tgt_path)
    : src_(src_path), tgt_(tgt_path) {}

void ParallelWriter::write(const SentencePair& pair) {
  src_.write(pair.source);
  tgt_.write(pair.target);
}

void ParallelWriter::close() {
  src_.close();
  tgt_.close();
}

std::vector<Sentence> read_mono(const std::string& path) {
  MonoReader reader(path);
  std::vector<Sentence> out;
  Sentence s;
  while (reader.next(s)) out.push_back(std::move(s));
  return out;
}

std::vector<SentencePair> read_parallel(const std::string& src_path,
                                        const std::string& tgt_path) {
  ParallelReader reader(src_path, tgt_path);
  std::vector<SentencePair> out;
  SentencePair p;
  while (reader.next(p)) out.push_back(std::move(p));
  return out;
}

void write_mono(std::span<const Sentence> sentences, const std::string& path) {
  MonoWriter writer(path);
  for (const Sentence& s : sentences) writer.write(s);
  writer.close();
}

void write_parallel(std::span<const SentencePair> pairs,
                    const std::string& src_path, const std::string& tgt_path) {
  ParallelWriter writer(src_path, tgt_path);
  for (const SentencePair& p : pairs) writer.write(p);
  writer.close();
}

}  // namespace corpuseng
