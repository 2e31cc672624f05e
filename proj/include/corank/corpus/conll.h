#pragma once

#include <iosfwd>
#include <vector>

#include "corank/corpus/document.h"

namespace corank::corpus {

// CoNLL-2012 column format. Documents are delimited by
// "#begin document (<id>); part <n>" / "#end document"; a blank line ends a
// sentence. The word is column 4 (1-based), the speaker column 10 and the
// coreference column is the last one. Each document part becomes its own
// Document keyed "<id>#<part>"; the genre is the id prefix before the first
// '/'. The format cannot carry non-referring markables.
std::vector<Document> read_conll(std::istream& is);
std::vector<Document> read_conll_file(const std::string& path);

void write_conll(std::ostream& os, const Document& doc);

}  // namespace corank::corpus
