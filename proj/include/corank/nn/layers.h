#pragma once

#include <string>
#include <vector>

#include "corank/nn/graph.h"
#include "corank/nn/params.h"

namespace corank::nn {

// Feedforward net: `depth` hidden layers of `width` rectified units followed
// by a linear output layer. Dropout is applied to hidden activations only.
struct Ffnn {
  std::vector<Param*> w;  // hidden weights, each [width, prev]
  std::vector<Param*> b;  // hidden biases
  Param* wo = nullptr;    // output weights [out, width]
  Param* bo = nullptr;
  int in = 0, depth = 0, width = 0, out = 0;
  double dropout = 0.0;

  int apply(Graph& g, int x) const;
};

Ffnn make_ffnn(ParamStore& ps, const std::string& name, int in, int depth, int width, int out,
               double dropout, std::mt19937_64& rng);

// Character convolution: embeds the bytes of a token, runs one convolution
// per filter width, max-pools over positions and rectifies, then concatenates
// the pooled filter responses. Tokens shorter than the largest width are
// padded with a reserved pad row.
struct CharCnn {
  Param* emb = nullptr;          // [257, char_dim], row 256 is padding
  std::vector<Param*> filter_w;  // per width: [filters, width*char_dim]
  std::vector<Param*> filter_b;
  std::vector<int> widths;
  int filters = 0, char_dim = 0;

  int out_dim() const { return filters * static_cast<int>(widths.size()); }
  int apply(Graph& g, const std::string& token) const;
};

CharCnn make_char_cnn(ParamStore& ps, const std::string& name, int char_dim,
                      const std::vector<int>& widths, int filters, std::mt19937_64& rng);

// One LSTM direction. Gate order inside the packed weight is i, f, g, o;
// state starts at zero at the beginning of each sentence.
struct LstmCell {
  Param* w = nullptr;  // [4*hidden, in+hidden]
  Param* b = nullptr;  // [4*hidden], forget slice initialised to 1
  int in = 0, hidden = 0;

  // returns (h', c')
  std::pair<int, int> step(Graph& g, int x, int h, int c) const;
};

LstmCell make_lstm(ParamStore& ps, const std::string& name, int in, int hidden, std::mt19937_64& rng);

// Stacked bidirectional LSTM over one sentence. Layer k consumes the
// concatenated forward/backward outputs of layer k-1; dropout is applied to
// each layer's concatenated output during training. Output dim per token is
// 2 * hidden of the top layer.
struct BiLstm {
  std::vector<LstmCell> fwd, bwd;
  double dropout = 0.0;

  std::vector<int> apply(Graph& g, const std::vector<int>& xs) const;
};

BiLstm make_bilstm(ParamStore& ps, const std::string& name, int in, int hidden, int layers,
                   double dropout, std::mt19937_64& rng);

}  // namespace corank::nn
