#include "corank/corpus/embeddings.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace corank::corpus {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

StaticEmbeddings StaticEmbeddings::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open embedding file: " + path);
  return parse(is, path);
}

StaticEmbeddings StaticEmbeddings::parse(std::istream& is, const std::string& origin) {
  StaticEmbeddings e;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    ls >> token;
    std::vector<double> vec;
    double x;
    while (ls >> x) vec.push_back(x);
    if (vec.empty())
      throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": no values for token '" + token + "'");
    if (e.dim_ == 0)
      e.dim_ = static_cast<int>(vec.size());
    else if (static_cast<int>(vec.size()) != e.dim_)
      throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": expected " + std::to_string(e.dim_) +
                               " values, got " + std::to_string(vec.size()));
    e.table_[token] = std::move(vec);
  }
  if (e.dim_ == 0) throw std::runtime_error(origin + ": empty embedding file");
  return e;
}

std::vector<double> StaticEmbeddings::get(const std::string& token) const {
  auto it = table_.find(token);
  if (it == table_.end()) return std::vector<double>(dim_, 0.0);
  return it->second;
}

std::vector<double> HashedEmbeddings::get(const std::string& token) const {
  std::mt19937_64 rng(fnv1a64(token) ^ seed_);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> v(dim_);
  double norm = 0.0;
  for (double& x : v) {
    x = dist(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

ContextualStore ContextualStore::load(const std::string& path, const std::string& reducer) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open contextual embedding file: " + path);
  return parse(is, reducer, path);
}

// One json object per line: {"doc_key": ..., "vectors": [token][layer][dim]}.
ContextualStore ContextualStore::parse(std::istream& is, const std::string& reducer,
                                       const std::string& origin) {
  if (reducer != "concat" && reducer != "mean")
    throw std::invalid_argument("unknown contextual reducer: " + reducer);
  ContextualStore store;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": invalid json: " + ex.what());
    }
    std::string key = j.at("doc_key").get<std::string>();
    std::vector<std::vector<double>> toks;
    for (const auto& tok : j.at("vectors")) {
      std::vector<std::vector<double>> layers = tok.get<std::vector<std::vector<double>>>();
      if (layers.empty())
        throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": token with no layers");
      size_t layer_dim = layers[0].size();
      for (const auto& l : layers)
        if (l.size() != layer_dim)
          throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": ragged layer dimensions");
      std::vector<double> combined;
      if (reducer == "concat") {
        for (const auto& l : layers) combined.insert(combined.end(), l.begin(), l.end());
      } else {
        combined.assign(layer_dim, 0.0);
        for (const auto& l : layers)
          for (size_t i = 0; i < layer_dim; ++i) combined[i] += l[i];
        for (double& x : combined) x /= static_cast<double>(layers.size());
      }
      if (store.dim_ == 0)
        store.dim_ = static_cast<int>(combined.size());
      else if (static_cast<int>(combined.size()) != store.dim_)
        throw std::runtime_error(origin + " line " + std::to_string(line_no) + ": expected dim " +
                                 std::to_string(store.dim_) + ", got " + std::to_string(combined.size()));
      toks.push_back(std::move(combined));
    }
    store.docs_[key] = std::move(toks);
  }
  return store;
}

const std::vector<double>& ContextualStore::get(const std::string& doc_key, int token) const {
  auto it = docs_.find(doc_key);
  if (it == docs_.end())
    throw std::runtime_error("no contextual vectors for document " + doc_key);
  if (token < 0 || token >= static_cast<int>(it->second.size()))
    throw std::runtime_error("no contextual vector for document " + doc_key + " token " + std::to_string(token));
  return it->second[token];
}

}  // namespace corank::corpus
