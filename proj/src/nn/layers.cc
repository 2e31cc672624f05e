#include "corank/nn/layers.h"

#include <algorithm>
#include <stdexcept>

namespace corank::nn {

int Ffnn::apply(Graph& g, int x) const {
  if (g.value(x).size() != in)
    throw std::invalid_argument("ffnn input shape " + g.value(x).shape_str() + " does not match first layer [" +
                                std::to_string(width) + "," + std::to_string(in) + "]");
  int h = x;
  for (int l = 0; l < depth; ++l) {
    h = g.relu(g.affine(g.param(*w[l]), h, g.param(*b[l])));
    h = g.dropout(h, dropout);
  }
  return g.affine(g.param(*wo), h, g.param(*bo));
}

Ffnn make_ffnn(ParamStore& ps, const std::string& name, int in, int depth, int width, int out,
               double dropout, std::mt19937_64& rng) {
  if (depth < 1) throw std::invalid_argument("ffnn depth must be >= 1");
  if (in < 1 || width < 1 || out < 1) throw std::invalid_argument("ffnn dims must be positive");
  Ffnn f;
  f.in = in;
  f.depth = depth;
  f.width = width;
  f.out = out;
  f.dropout = dropout;
  int prev = in;
  for (int l = 0; l < depth; ++l) {
    f.w.push_back(&ps.create_glorot(name + "/w" + std::to_string(l), {width, prev}, rng));
    f.b.push_back(&ps.create(name + "/b" + std::to_string(l), {width}));
    prev = width;
  }
  f.wo = &ps.create_glorot(name + "/wo", {out, prev}, rng);
  f.bo = &ps.create(name + "/bo", {out});
  return f;
}

int CharCnn::apply(Graph& g, const std::string& token) const {
  int max_w = widths.back();
  int len = std::max(static_cast<int>(token.size()), max_w);
  std::vector<int> chars(len);
  for (int i = 0; i < len; ++i)
    chars[i] = i < static_cast<int>(token.size()) ? static_cast<unsigned char>(token[i]) : 256;
  std::vector<int> embs(len);
  for (int i = 0; i < len; ++i) embs[i] = g.lookup(*emb, chars[i]);

  std::vector<int> pooled;
  for (size_t k = 0; k < widths.size(); ++k) {
    int w = widths[k];
    std::vector<int> responses;
    for (int p = 0; p + w <= len; ++p) {
      std::vector<int> window(embs.begin() + p, embs.begin() + p + w);
      responses.push_back(g.affine(g.param(*filter_w[k]), g.concat(window), g.param(*filter_b[k])));
    }
    pooled.push_back(g.relu(g.vmax(responses)));
  }
  return g.concat(pooled);
}

CharCnn make_char_cnn(ParamStore& ps, const std::string& name, int char_dim,
                      const std::vector<int>& widths, int filters, std::mt19937_64& rng) {
  if (widths.empty() || filters < 1 || char_dim < 1) throw std::invalid_argument("bad char cnn configuration");
  for (size_t i = 1; i < widths.size(); ++i)
    if (widths[i] <= widths[i - 1]) throw std::invalid_argument("char cnn widths must be increasing");
  CharCnn c;
  c.widths = widths;
  c.filters = filters;
  c.char_dim = char_dim;
  c.emb = &ps.create_glorot(name + "/chars", {257, char_dim}, rng);
  for (int w : widths) {
    c.filter_w.push_back(&ps.create_glorot(name + "/conv" + std::to_string(w) + "/w", {filters, w * char_dim}, rng));
    c.filter_b.push_back(&ps.create(name + "/conv" + std::to_string(w) + "/b", {filters}));
  }
  return c;
}

std::pair<int, int> LstmCell::step(Graph& g, int x, int h, int c) const {
  int z = g.affine(g.param(*w), g.concat({x, h}), g.param(*b));
  int i = g.sigmoid(g.slice(z, 0, hidden));
  int f = g.sigmoid(g.slice(z, hidden, hidden));
  int cand = g.tanh(g.slice(z, 2 * hidden, hidden));
  int o = g.sigmoid(g.slice(z, 3 * hidden, hidden));
  int c2 = g.add(g.cmul(f, c), g.cmul(i, cand));
  int h2 = g.cmul(o, g.tanh(c2));
  return {h2, c2};
}

LstmCell make_lstm(ParamStore& ps, const std::string& name, int in, int hidden, std::mt19937_64& rng) {
  LstmCell cell;
  cell.in = in;
  cell.hidden = hidden;
  cell.w = &ps.create_glorot(name + "/w", {4 * hidden, in + hidden}, rng);
  cell.b = &ps.create(name + "/b", {4 * hidden});
  for (int i = hidden; i < 2 * hidden; ++i) cell.b->value.at(i) = 1.0;  // forget gate bias
  return cell;
}

std::vector<int> BiLstm::apply(Graph& g, const std::vector<int>& xs) const {
  if (xs.empty()) return {};
  int n = static_cast<int>(xs.size());
  std::vector<int> layer_in = xs;
  for (size_t l = 0; l < fwd.size(); ++l) {
    const LstmCell& fc = fwd[l];
    const LstmCell& bc = bwd[l];
    std::vector<int> hf(n), hb(n);
    int h = g.constant(Tensor::zeros({fc.hidden}));
    int c = g.constant(Tensor::zeros({fc.hidden}));
    for (int t = 0; t < n; ++t) {
      auto [h2, c2] = fc.step(g, layer_in[t], h, c);
      hf[t] = h2;
      h = h2;
      c = c2;
    }
    h = g.constant(Tensor::zeros({bc.hidden}));
    c = g.constant(Tensor::zeros({bc.hidden}));
    for (int t = n - 1; t >= 0; --t) {
      auto [h2, c2] = bc.step(g, layer_in[t], h, c);
      hb[t] = h2;
      h = h2;
      c = c2;
    }
    std::vector<int> out(n);
    for (int t = 0; t < n; ++t) out[t] = g.dropout(g.concat({hf[t], hb[t]}), dropout);
    layer_in = out;
  }
  return layer_in;
}

BiLstm make_bilstm(ParamStore& ps, const std::string& name, int in, int hidden, int layers,
                   double dropout, std::mt19937_64& rng) {
  if (layers < 1) throw std::invalid_argument("bilstm needs at least one layer");
  BiLstm b;
  b.dropout = dropout;
  int prev = in;
  for (int l = 0; l < layers; ++l) {
    b.fwd.push_back(make_lstm(ps, name + "/l" + std::to_string(l) + "/fwd", prev, hidden, rng));
    b.bwd.push_back(make_lstm(ps, name + "/l" + std::to_string(l) + "/bwd", prev, hidden, rng));
    prev = 2 * hidden;
  }
  return b;
}

}  // namespace corank::nn
