#pragma once

#include <string>
#include <string_view>

namespace polya {

// Porter's suffix-stripping algorithm (the original 1980 rule set).
// Expects a lowercase word; words of length <= 2 are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace polya
