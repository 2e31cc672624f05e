#pragma once

#include <iosfwd>
#include <vector>

#include "corank/corpus/document.h"

namespace corank::corpus {

// One document per line as a json object with fields doc_key, genre,
// sentences (arrays of token strings), speakers (same nesting), clusters
// (arrays of [start, end] token spans, singletons allowed) and nonreferring
// (arrays of [start, end, type]). Token indices are document-wide.
std::vector<Document> read_jsonl(std::istream& is);
std::vector<Document> read_jsonl_file(const std::string& path);

void write_jsonl(std::ostream& os, const Document& doc);
void write_jsonl_file(const std::string& path, const std::vector<Document>& docs);

}  // namespace corank::corpus
