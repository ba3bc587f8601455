#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mednlu/types.hpp"

namespace mednlu {

/// Recovers mentions from a line-per-label answer. Lines must start with a
/// known "<label>: " prefix (EAE uses "<event> - <label>: "); the remainder
/// is either "None" or spans joined by " ... ". Mentions come back text-only
/// in line order; labels missing from the answer yield no mentions.
/// Throws UnknownLabel for unrecognized lines and MalformedRecord for
/// duplicate label lines or empty spans.
std::vector<EntityMention> parse_token_output(const std::string& raw, const NluInstance& inst);

/// Assigns code-point offsets by greedy left-to-right search: the cursor
/// starts at 0, each found span advances it past the match, a miss retries
/// once from the start, and a second miss leaves the offsets empty.
std::vector<EntityMention> align_spans(std::vector<EntityMention> mentions,
                                       const std::string& source_text);

/// Distinct option letters of `cs` found in the answer, in first-appearance
/// order. Throws NoChoiceFound when no marker of this set occurs.
std::vector<std::string> parse_choice_output(const std::string& raw, const ChoiceSet& cs);

/// Exactly one letter -> its canonical integer score. Throws NoChoiceFound
/// on zero or several letters, InvalidArgument when the option's canonical
/// value is not an integer.
std::int64_t choice_to_score(const std::vector<std::string>& letters, const ChoiceSet& cs);

/// Raw model text -> typed prediction for this instance. For choice tasks
/// pass the choice set the prompt actually showed (after reduction and
/// shuffling) as `effective`; defaults to the instance's own set. Token
/// mentions are aligned against source_text. Throws on unusable output;
/// callers that must not stop catch and record.
Prediction parse_prediction(const std::string& raw, const NluInstance& inst,
                            const ChoiceSet* effective = nullptr);

} // namespace mednlu
