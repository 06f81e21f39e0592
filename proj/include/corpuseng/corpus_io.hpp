#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace corpuseng {

struct Sentence {
  std::string text;
  std::vector<std::string> tokens;

  Sentence() = default;
  // Throws if text contains a newline or is not valid UTF-8.
  explicit Sentence(std::string t);
};

struct SentencePair {
  Sentence source;
  Sentence target;
  std::uint64_t line_index = 0;
};

struct FilterStats {
  std::uint64_t input_count = 0;
  std::uint64_t kept_count = 0;
  std::map<std::string, std::uint64_t> dropped_by_rule;

  void drop(const std::string& rule) {
    ++input_count;
    ++dropped_by_rule[rule];
  }
  void keep() {
    ++input_count;
    ++kept_count;
  }
  void merge(const FilterStats& other);
  // input_count == kept_count + sum of drops
  bool consistent() const;
  std::string to_json() const;
};

// Streaming line reader for monolingual corpora. Empty lines are skipped
// and counted. Holds one line in memory at a time.
class MonoReader {
 public:
  explicit MonoReader(const std::string& path);
  bool next(Sentence& out);
  std::uint64_t lines_read() const { return lines_read_; }
  std::uint64_t empty_skipped() const { return empty_skipped_; }

 private:
  std::string path_;
  std::ifstream in_;
  std::uint64_t lines_read_ = 0;
  std::uint64_t empty_skipped_ = 0;
};

// Zips two aligned files line by line. Empty lines become empty sentences so
// alignment is never broken. Throws on line-count mismatch once either file
// is exhausted.
class ParallelReader {
 public:
  ParallelReader(const std::string& src_path, const std::string& tgt_path);
  bool next(SentencePair& out);

 private:
  std::string src_path_, tgt_path_;
  std::ifstream src_, tgt_;
  std::uint64_t index_ = 0;
};

class MonoWriter {
 public:
  explicit MonoWriter(const std::string& path);
  void write(const Sentence& s);
  void close();

 private:
  std::string path_;
  std::ofstream out_;
};

class ParallelWriter {
 public:
  ParallelWriter(const std::string& src_path, const std::string& tgt_path);
  void write(const SentencePair& pair);
  void close();

 private:
  MonoWriter src_, tgt_;
};

std::vector<Sentence> read_mono(const std::string& path);
std::vector<SentencePair> read_parallel(const std::string& src_path,
                                        const std::string& tgt_path);
void write_mono(std::span<const Sentence> sentences, const std::string& path);
void write_parallel(std::span<const SentencePair> pairs,
                    const std::string& src_path, const std::string& tgt_path);

}  // namespace corpuseng
