#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace corank::corpus {

// Token-keyed embedding source. Out-of-vocabulary tokens map to the zero
// vector for file-backed tables; hashed tables cover every token.
class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  virtual int dim() const = 0;
  virtual std::vector<double> get(const std::string& token) const = 0;
};

// Text file with lines "token v1 v2 ... vd".
class StaticEmbeddings : public EmbeddingSource {
 public:
  static StaticEmbeddings load(const std::string& path);
  static StaticEmbeddings parse(std::istream& is, const std::string& origin);

  int dim() const override { return dim_; }
  std::vector<double> get(const std::string& token) const override;
  int vocab_size() const { return static_cast<int>(table_.size()); }

 private:
  int dim_ = 0;
  std::map<std::string, std::vector<double>> table_;
};

// Deterministic pseudo-random unit vectors derived from a seeded hash of the
// token, so every run and process sees identical values.
class HashedEmbeddings : public EmbeddingSource {
 public:
  HashedEmbeddings(int dim, uint64_t seed) : dim_(dim), seed_(seed) {}
  int dim() const override { return dim_; }
  std::vector<double> get(const std::string& token) const override;

 private:
  int dim_ = 0;
  uint64_t seed_ = 0;
};

// Precomputed contextual vectors keyed by (doc_key, token index). Each token
// carries a fixed number of layers which are combined by the reducer:
// "concat" (default) concatenates them, "mean" averages them.
class ContextualStore {
 public:
  static ContextualStore load(const std::string& path, const std::string& reducer);
  static ContextualStore parse(std::istream& is, const std::string& reducer, const std::string& origin);

  int dim() const { return dim_; }
  // Hard error when the document or token has no vector.
  const std::vector<double>& get(const std::string& doc_key, int token) const;
  bool has_doc(const std::string& doc_key) const { return docs_.count(doc_key) > 0; }

 private:
  int dim_ = 0;
  std::map<std::string, std::vector<std::vector<double>>> docs_;
};

uint64_t fnv1a64(const std::string& s);

}  // namespace corank::corpus
