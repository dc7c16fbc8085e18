#pragma once

#include <string>

namespace segbench {

// Porter's suffix-stripping algorithm, the original 1980 rule set.  Input
// is expected lowercased; bytes outside a-z pass through untouched, which
// leaves non-Latin scripts and digit-bearing tokens alone in practice
// (callers keep entity identifiers away from the stemmer anyway).
std::string porter_stem(const std::string& word);

} // namespace segbench
