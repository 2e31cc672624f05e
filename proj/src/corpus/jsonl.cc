#include "corank/corpus/jsonl.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace corank::corpus {

namespace {

using nlohmann::json;

Document parse_doc(const json& j, int line_no) {
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + msg);
  };
  if (!j.is_object()) fail("expected a json object");
  for (const char* field : {"doc_key", "genre", "sentences", "speakers", "clusters"})
    if (!j.contains(field)) fail(std::string("missing field '") + field + "'");

  Document doc;
  doc.doc_key = j.at("doc_key").get<std::string>();
  doc.genre = j.at("genre").get<std::string>();

  const json& sents = j.at("sentences");
  const json& speakers = j.at("speakers");
  if (!sents.is_array() || !speakers.is_array() || sents.size() != speakers.size())
    fail("document " + doc.doc_key + ": sentences and speakers must be parallel arrays");
  for (size_t s = 0; s < sents.size(); ++s) {
    if (sents[s].size() != speakers[s].size())
      fail("document " + doc.doc_key + ": sentence " + std::to_string(s) +
           " has mismatched token and speaker counts");
    for (size_t t = 0; t < sents[s].size(); ++t) {
      Token tok;
      tok.text = sents[s][t].get<std::string>();
      tok.sentence = static_cast<int>(s);
      tok.speaker = speaker_id(doc, speakers[s][t].get<std::string>());
      doc.tokens.push_back(tok);
    }
  }

  for (const json& cl : j.at("clusters")) {
    std::vector<Span> spans;
    for (const json& sp : cl) {
      if (!sp.is_array() || sp.size() != 2) fail("document " + doc.doc_key + ": cluster span must be [start,end]");
      spans.push_back({sp[0].get<int>(), sp[1].get<int>()});
    }
    doc.clusters.push_back(std::move(spans));
  }
  if (j.contains("nonreferring")) {
    for (const json& nr : j.at("nonreferring")) {
      if (!nr.is_array() || nr.size() != 3)
        fail("document " + doc.doc_key + ": nonreferring entry must be [start,end,type]");
      doc.nonreferring.emplace_back(Span{nr[0].get<int>(), nr[1].get<int>()},
                                    nr_type_from_name(nr[2].get<std::string>()));
    }
  }
  doc.validate();
  return doc;
}

}  // namespace

std::vector<Document> read_jsonl(std::istream& is) {
  std::vector<Document> docs;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": invalid json: " + e.what());
    }
    docs.push_back(parse_doc(j, line_no));
  }
  return docs;
}

std::vector<Document> read_jsonl_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open corpus file: " + path);
  return read_jsonl(is);
}

void write_jsonl(std::ostream& os, const Document& doc) {
  json j;
  j["doc_key"] = doc.doc_key;
  j["genre"] = doc.genre;
  auto sents = doc.sentence_tokens();
  j["sentences"] = sents;
  std::vector<std::vector<std::string>> spk(doc.num_sentences());
  for (const Token& t : doc.tokens) spk[t.sentence].push_back(doc.speakers[t.speaker]);
  j["speakers"] = spk;
  j["clusters"] = json::array();
  for (const auto& cl : doc.clusters) {
    json jc = json::array();
    for (const Span& s : cl) jc.push_back({s.start, s.end});
    j["clusters"].push_back(jc);
  }
  j["nonreferring"] = json::array();
  for (const auto& [s, type] : doc.nonreferring)
    j["nonreferring"].push_back({json(s.start), json(s.end), json(nr_type_name(type))});
  os << j.dump() << "\n";
}

void write_jsonl_file(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  for (const Document& d : docs) write_jsonl(os, d);
}

}  // namespace corank::corpus
