#include "corank/corpus/conll.h"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace corank::corpus {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

struct DocBuilder {
  Document doc;
  // entity id -> stack of open mention starts (same-entity nesting is LIFO)
  std::map<int, std::vector<int>> open;
  std::map<int, std::vector<Span>> entities;
  int sentence = 0;
  bool pending_break = false;
  int first_line = 0;

  void finish(int line_no) {
    for (const auto& [ent, starts] : open)
      if (!starts.empty())
        throw std::runtime_error("document " + doc.doc_key + ": entity " + std::to_string(ent) +
                                 " left open at line " + std::to_string(line_no));
    for (auto& [ent, spans] : entities) doc.clusters.push_back(std::move(spans));
    doc.validate();
  }
};

void parse_coref_cell(DocBuilder& b, const std::string& cell, int token, int line_no) {
  if (cell == "-") return;
  size_t pos = 0;
  while (pos < cell.size()) {
    size_t bar = cell.find('|', pos);
    std::string item = cell.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
    pos = bar == std::string::npos ? cell.size() : bar + 1;
    if (item.empty())
      throw std::runtime_error("document " + b.doc.doc_key + ": empty coreference item at line " +
                               std::to_string(line_no));
    bool opens = item.front() == '(';
    bool closes = item.back() == ')';
    std::string digits = item.substr(opens ? 1 : 0, item.size() - (opens ? 1 : 0) - (closes ? 1 : 0));
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos || (!opens && !closes))
      throw std::runtime_error("document " + b.doc.doc_key + ": malformed coreference item '" + item +
                               "' at line " + std::to_string(line_no));
    int ent = std::stoi(digits);
    if (opens) b.open[ent].push_back(token);
    if (closes) {
      auto& stack = b.open[ent];
      if (stack.empty())
        throw std::runtime_error("document " + b.doc.doc_key + ": entity " + std::to_string(ent) +
                                 " closed without open at line " + std::to_string(line_no));
      int start = stack.back();
      stack.pop_back();
      b.entities[ent].push_back({start, token});
    }
  }
}

}  // namespace

std::vector<Document> read_conll(std::istream& is) {
  std::vector<Document> docs;
  std::string line;
  int line_no = 0;
  DocBuilder* cur = nullptr;
  DocBuilder builder;

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("#begin document", 0) == 0) {
      if (cur) throw std::runtime_error("nested #begin document at line " + std::to_string(line_no));
      size_t lp = line.find('('), rp = line.find(')');
      size_t part_at = line.find("part ");
      if (lp == std::string::npos || rp == std::string::npos || part_at == std::string::npos)
        throw std::runtime_error("malformed #begin document at line " + std::to_string(line_no));
      std::string id = line.substr(lp + 1, rp - lp - 1);
      int part = std::stoi(line.substr(part_at + 5));
      builder = DocBuilder();
      builder.doc.doc_key = id + "#" + std::to_string(part);
      size_t slash = id.find('/');
      builder.doc.genre = slash == std::string::npos ? id : id.substr(0, slash);
      builder.first_line = line_no;
      cur = &builder;
      continue;
    }
    if (line.rfind("#end document", 0) == 0) {
      if (!cur) throw std::runtime_error("#end document without begin at line " + std::to_string(line_no));
      cur->finish(line_no);
      docs.push_back(std::move(cur->doc));
      cur = nullptr;
      continue;
    }
    if (!cur) {
      if (line.empty() || line[0] == '#') continue;
      throw std::runtime_error("content outside document at line " + std::to_string(line_no));
    }
    if (line.empty()) {  // sentence break
      if (!cur->doc.tokens.empty()) cur->pending_break = true;
      continue;
    }
    auto cols = split_ws(line);
    if (cols.size() < 12)
      throw std::runtime_error("document " + cur->doc.doc_key + ": expected at least 12 columns, got " +
                               std::to_string(cols.size()) + " at line " + std::to_string(line_no));
    if (cur->pending_break) {
      ++cur->sentence;
      cur->pending_break = false;
    }
    Token tok;
    tok.text = cols[3];
    tok.speaker = speaker_id(cur->doc, cols[9]);
    tok.sentence = cur->sentence;
    cur->doc.tokens.push_back(tok);
    parse_coref_cell(*cur, cols.back(), cur->doc.num_tokens() - 1, line_no);
  }
  if (cur) throw std::runtime_error("document " + cur->doc.doc_key + " not closed by #end document");
  return docs;
}

std::vector<Document> read_conll_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open corpus file: " + path);
  return read_conll(is);
}

void write_conll(std::ostream& os, const Document& doc) {
  if (!doc.nonreferring.empty())
    throw std::runtime_error("document " + doc.doc_key +
                             ": the column format cannot carry non-referring markables");
  std::string id = doc.doc_key;
  int part = 0;
  if (size_t hash = id.rfind('#'); hash != std::string::npos) {
    part = std::stoi(id.substr(hash + 1));
    id = id.substr(0, hash);
  }
  std::vector<std::string> cells(doc.num_tokens());
  for (size_t c = 0; c < doc.clusters.size(); ++c) {
    for (const Span& s : doc.clusters[c]) {
      std::string ent = std::to_string(c);
      if (s.start == s.end) {
        cells[s.start] += (cells[s.start].empty() ? "" : "|") + ("(" + ent + ")");
      } else {
        cells[s.start] += (cells[s.start].empty() ? "" : "|") + ("(" + ent);
        cells[s.end] += (cells[s.end].empty() ? "" : "|") + (ent + ")");
      }
    }
  }
  os << "#begin document (" << id << "); part " << part << "\n";
  int word_no = 0;
  for (int t = 0; t < doc.num_tokens(); ++t) {
    if (t > 0 && doc.tokens[t].sentence != doc.tokens[t - 1].sentence) {
      os << "\n";
      word_no = 0;
    }
    os << id << " " << part << " " << word_no++ << " " << doc.tokens[t].text << " - - - - - "
       << doc.speakers[doc.tokens[t].speaker] << " - " << (cells[t].empty() ? "-" : cells[t]) << "\n";
  }
  os << "#end document\n";
}

}  // namespace corank::corpus
