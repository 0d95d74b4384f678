#pragma once

#include <iosfwd>
#include <string>
#include <unordered_set>

namespace polya {

// The SMART system stopword list (570 words), fixed so that preprocessing is
// reproducible. The same list ships as core/data/smart_stopwords.txt.
const std::unordered_set<std::string>& smart_stopwords();

// One word per line; '#' starts a comment, blank lines ignored.
std::unordered_set<std::string> load_stopwords(std::istream& in);

}  // namespace polya
