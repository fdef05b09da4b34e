#pragma once

#include <string>
#include <vector>

#include "convrec/metrics.hpp"

namespace convrec {

// Corpus readers normalizing external transcript formats to role + text.
//
//   native      engine output (dialogue records)
//   transcript  JSONL, one turn per line: {dialogue_id, role, text}
//   redial      JSONL, one conversation per line with messages[] and
//               sender/initiator worker ids
//   inspired    TSV: dialog_id <TAB> speaker <TAB> text
enum class CorpusFormat { kNative, kTranscript, kRedial, kInspired };

CorpusFormat corpus_format_from_string(const std::string& name);

std::vector<TranscriptDialogue> load_corpus(const std::string& path,
                                            CorpusFormat format);

// Ranked-recommendation episodes for recall:
// JSONL {"target": id, "ranking": [ids...]}.
std::vector<RankedEpisode> load_episodes(const std::string& path);

}  // namespace convrec
