#ifndef WAZOBIA_POSTPROCESS_H_
#define WAZOBIA_POSTPROCESS_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wazobia/gazetteer.h"
#include "wazobia/text.h"

namespace wazobia {

// Spelling-variant key: dotted letters mapped to their base letter (see
// kDottedLetterMap in postprocess.cc), canonical decomposition, combining
// marks removed, lowercased. Idempotent; ASCII passes through lowercased.
std::string fold_diacritics(std::string_view text);

// Gazetteer-driven correction of decoded spans.
//
//  1. A span strictly contained in a longer gazetteer phrase occurrence is
//     widened to the longest such occurrence and takes the gazetteer type
//     (first type in PER, ORG, LOC order when the phrase is listed under
//     several).
//  2. Otherwise, a span whose surface is listed under exactly one type
//     different from its own is retyped.
//
// Widened spans absorb any span they cover. Conflicts between widenings are
// resolved longest first, then leftmost. Output is sorted and non-overlapping.
std::vector<EntitySpan> disambiguate(std::span<const EntitySpan> spans,
                                     const Sentence& sentence,
                                     const Gazetteer& gazetteer);

}  // namespace wazobia

#endif  // WAZOBIA_POSTPROCESS_H_
