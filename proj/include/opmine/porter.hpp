#pragma once

#include <string>
#include <string_view>

namespace opmine::preprocess {

// Classic Porter suffix-stripping stemmer (the 1980 algorithm, steps 1a-5b).
// Expects a lowercase ASCII word; words of length <= 2 and words containing
// non-ASCII bytes are returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace opmine::preprocess
