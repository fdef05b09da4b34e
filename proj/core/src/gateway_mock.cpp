#include "convrec/gateway_mock.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "convrec/text.hpp"

namespace convrec {

namespace {

// Markers from the default prompt templates; the mock is built to pair with
// them.
constexpr std::string_view kUserReviewMarker = "summarize what you liked and disliked";
constexpr std::string_view kItemReviewsMarker = "describe what people liked and disliked";
constexpr std::string_view kSeekerMarker = "You are a Seeker";
constexpr std::string_view kRecommenderMarker = "You are a Recommender";

std::string section_between(const std::string& s, std::string_view begin,
                            std::string_view end) {
  std::size_t b = s.find(begin);
  if (b == std::string::npos) return {};
  b += begin.size();
  std::size_t e = end.empty() ? std::string::npos : s.find(end, b);
  if (e == std::string::npos) return text::trim(s.substr(b));
  return text::trim(s.substr(b, e - b));
}

// The first "[Like]" section line of a rendered abstract that is not the
// "None." marker.
std::string first_like_line(const std::string& block) {
  auto lines = text::split_lines(block);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    if (text::trim(lines[i]) == "[Like]") {
      std::string value = text::trim(lines[i + 1]);
      if (text::to_lower(value) != "none." && text::to_lower(value) != "none") {
        return value;
      }
    }
  }
  return {};
}

std::vector<std::string> all_like_lines(const std::string& block) {
  std::vector<std::string> out;
  auto lines = text::split_lines(block);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    if (text::trim(lines[i]) == "[Like]") {
      std::string value = text::trim(lines[i + 1]);
      if (text::to_lower(value) != "none." && text::to_lower(value) != "none") {
        out.push_back(value);
      }
    }
  }
  return out;
}

std::string quoted_span(const std::string& s) {
  std::size_t open = s.find('\'');
  if (open == std::string::npos) return {};
  std::size_t close = s.find('\'', open + 1);
  if (close == std::string::npos) return {};
  return s.substr(open + 1, close - open - 1);
}

struct ContextView {
  std::vector<std::string> seeker_lines;
  std::vector<std::string> recommender_lines;
  std::string last_line;
};

ContextView parse_context(const std::string& context) {
  ContextView view;
  for (const std::string& raw : text::split_lines(context)) {
    std::string line = text::trim(raw);
    if (line.starts_with("Seeker: ")) {
      view.seeker_lines.push_back(line.substr(8));
      view.last_line = line;
    } else if (line.starts_with("Recommender: ")) {
      view.recommender_lines.push_back(line.substr(13));
      view.last_line = line;
    }
  }
  return view;
}

// --- summarization ---------------------------------------------------------

// Fixture reviews follow "Loved <features>. Disliked <features>." prose;
// the mock distills exactly those sentences.
std::string summarize_review_text(const std::string& body) {
  std::vector<std::string> likes;
  std::vector<std::string> dislikes;
  std::string sentence;
  auto flush = [&] {
    std::string s = text::trim(sentence);
    sentence.clear();
    if (s.starts_with("Loved ")) {
      std::string v = s.substr(6);
      if (std::find(likes.begin(), likes.end(), v) == likes.end()) likes.push_back(v);
    } else if (s.starts_with("Disliked ")) {
      std::string v = s.substr(9);
      if (std::find(dislikes.begin(), dislikes.end(), v) == dislikes.end()) {
        dislikes.push_back(v);
      }
    }
  };
  for (char c : body) {
    if (c == '.' || c == '!' || c == '?' || c == '\n') {
      flush();
    } else {
      sentence.push_back(c);
    }
  }
  flush();

  std::string like = likes.empty() ? "None." : text::join(likes, "; ");
  std::string dislike = dislikes.empty() ? "None." : text::join(dislikes, "; ");
  return "[Like]\n" + like + "\n[Dislike]\n" + dislike;
}

// --- seeker ----------------------------------------------------------------

struct SeekerPromptView {
  std::string gt_title;
  std::vector<std::string> persona_likes;
  std::string gt_like;
  ContextView context;
};

SeekerPromptView parse_seeker_prompt(const ChatRequest& request) {
  SeekerPromptView view;
  view.gt_title = section_between(request.system_prompt, "which is not ",
                                  ", you should reject");
  std::string persona = section_between(
      request.user_prompt, "Here are your reviews about movies you have watched before:",
      "Some features of the movie you should be recommended:");
  view.persona_likes = all_like_lines(persona);
  std::string features = section_between(
      request.user_prompt, "Some features of the movie you should be recommended:",
      "\nHere is");
  view.gt_like = first_like_line(features);
  view.context = parse_context(
      section_between(request.user_prompt, "Here is the dialogue context:", ""));
  return view;
}

std::string seeker_reply(const SeekerPromptView& v, MockDefect defect) {
  const std::size_t seeker_count = v.context.seeker_lines.size();
  const bool last_is_rec = v.context.last_line.starts_with("Recommender: ");
  const std::string quoted =
      last_is_rec ? quoted_span(v.context.last_line) : std::string();
  const bool recommended_target =
      !quoted.empty() &&
      text::normalize_title(quoted) == text::normalize_title(v.gt_title);

  if (recommended_target && defect != MockDefect::kWrongAcceptance) {
    return "That sounds perfect! I'll give '" + quoted +
           "' a watch. Thanks for the recommendation! [EOD]";
  }

  switch (defect) {
    case MockDefect::kRepetition:
      if (seeker_count >= 2) return v.context.seeker_lines.back();
      break;
    case MockDefect::kTargetLeak:
      if (seeker_count == 2) {
        return "I want something exactly like '" + v.gt_title +
               "', that's the mood I'm in.";
      }
      break;
    case MockDefect::kWrongAcceptance:
      if (!quoted.empty()) {
        return "You know what, '" + quoted +
               "' works for me. I'll watch it tonight. [EOD]";
      }
      if (seeker_count >= 2 && v.persona_likes.size() >= 2) {
        // Steer clear of the target features so the first pick misses.
        return "Mostly I want more of the " + v.persona_likes[1] +
               " kind of thing.";
      }
      break;
    case MockDefect::kPersonaContradiction:
      if (seeker_count == 2 && !v.persona_likes.empty()) {
        return "Honestly, I hate " + v.persona_likes.front() + ".";
      }
      break;
    default:
      break;
  }

  if (seeker_count <= 1) {
    // Opening preference statement grounded in the persona reviews.
    std::vector<std::string> phrases = v.persona_likes;
    if (phrases.empty()) phrases.push_back("well-made movies");
    std::string out = "I generally enjoy " + phrases[0];
    if (phrases.size() >= 2) out += ", " + phrases[1];
    if (phrases.size() >= 3) out += ", and " + phrases[2];
    out += ".";
    return out;
  }

  const std::string want = v.gt_like.empty() ? "something memorable" : v.gt_like;
  if (quoted.empty()) {
    static const char* kAnswerForms[] = {
        "I'd really enjoy something with %.",
        "Ideally I'd love something with %.",
        "I really like movies with %.",
    };
    std::string form = kAnswerForms[seeker_count % 3];
    return text::replace_all(form, "%", want);
  }

  static const char* kTails[] = {"to be honest", "ideally", "truly",
                                 "all things considered", "preferably"};
  return "Thanks, but '" + quoted +
         "' isn't quite what I'm looking for. I'd still love something "
         "with " +
         want + ", " + kTails[seeker_count % 5] + ".";
}

// --- recommender -----------------------------------------------------------

struct CandidateBlock {
  std::string title;
  std::string like_line;
  std::set<std::string> tokens;
};

struct RecommenderPromptView {
  std::vector<CandidateBlock> candidates;
  ContextView context;
};

RecommenderPromptView parse_recommender_prompt(const ChatRequest& request) {
  RecommenderPromptView view;
  std::string cands = section_between(request.user_prompt,
                                      "Here are the three movie candidates:",
                                      "\nHere is the dialogue context:");
  std::string context = section_between(
      request.user_prompt, "Here is the dialogue context:", "\nThink:");
  view.context = parse_context(context);

  // Candidate blocks are separated by blank lines.
  std::string current;
  auto flush = [&] {
    std::string block = text::trim(current);
    current.clear();
    if (block.empty()) return;
    CandidateBlock cb;
    for (const std::string& line : text::split_lines(block)) {
      if (line.starts_with("Movie Title: ")) cb.title = text::trim(line.substr(13));
    }
    cb.like_line = first_like_line(block);
    for (auto& tok : text::tokenize(block)) cb.tokens.insert(tok);
    if (!cb.title.empty()) view.candidates.push_back(std::move(cb));
  };
  for (const std::string& line : text::split_lines(cands)) {
    if (text::trim(line).empty()) {
      flush();
    } else {
      current += line;
      current.push_back('\n');
    }
  }
  flush();
  return view;
}

double token_overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& t : a) inter += b.count(t);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

std::string recommender_reply(const RecommenderPromptView& v, MockDefect defect) {
  const std::size_t seeker_count = v.context.seeker_lines.size();
  if (seeker_count <= 2 || v.candidates.empty()) {
    return "Think: I should find out what the Seeker is in the mood for.\n"
           "Recommender: What are you in the mood for today? Anything "
           "specific you'd want the movie to have?";
  }

  const std::string& last_seeker = v.context.seeker_lines.back();
  std::set<std::string> seeker_tokens;
  for (auto& tok : text::tokenize(last_seeker)) seeker_tokens.insert(tok);

  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < v.candidates.size(); ++i) {
    double score = token_overlap(seeker_tokens, v.candidates[i].tokens);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  const CandidateBlock& pick = v.candidates[best];

  std::string think;
  if (defect == MockDefect::kGuessContradiction) {
    auto phrases = text::extract_polarity_phrases(last_seeker);
    std::string liked;
    for (const auto& p : phrases) {
      if (p.positive) {
        liked = p.phrase;
        break;
      }
    }
    if (liked.empty() && !pick.like_line.empty()) liked = pick.like_line;
    think = "The Seeker clearly hates " + liked + ".";
  } else {
    think = "The Seeker seems to want " +
            (pick.like_line.empty() ? "a strong match" : pick.like_line) +
            " based on the conversation so far.";
  }

  std::string reason = pick.like_line.empty()
                           ? "it lines up with what you described"
                           : "it features " + pick.like_line;
  return "Think: " + think + "\nMovie: " + pick.title + "\nRecommender: How "
         "about '" + pick.title + "'? I think you'd enjoy it because " +
         reason + ".";
}

}  // namespace

MockDefect mock_defect_for_seed(std::uint64_t seed, int adversarial_period) {
  if (adversarial_period <= 0) return MockDefect::kNone;
  if (seed % static_cast<std::uint64_t>(adversarial_period) != 0) {
    return MockDefect::kNone;
  }
  switch ((seed / static_cast<std::uint64_t>(adversarial_period)) % 5) {
    case 0: return MockDefect::kRepetition;
    case 1: return MockDefect::kTargetLeak;
    case 2: return MockDefect::kWrongAcceptance;
    case 3: return MockDefect::kPersonaContradiction;
    default: return MockDefect::kGuessContradiction;
  }
}

ChatResult MockChatBackend::complete(const ChatRequest& request) {
  auto scripted = options_.script.find(request.user_prompt);
  if (scripted != options_.script.end()) {
    return {scripted->second, 0, 0};
  }

  const MockDefect defect =
      mock_defect_for_seed(request.seed.value_or(0), options_.adversarial_period);

  std::string reply;
  if (request.system_prompt.find(kUserReviewMarker) != std::string::npos) {
    reply = summarize_review_text(section_between(
        request.user_prompt, "Here is the movie review written by you:", ""));
  } else if (request.system_prompt.find(kItemReviewsMarker) != std::string::npos) {
    reply = summarize_review_text(
        section_between(request.user_prompt, "Reviews:", ""));
  } else if (request.system_prompt.find(kSeekerMarker) != std::string::npos) {
    reply = seeker_reply(parse_seeker_prompt(request), defect);
  } else if (request.system_prompt.find(kRecommenderMarker) != std::string::npos) {
    reply = recommender_reply(parse_recommender_prompt(request), defect);
  } else {
    reply = "Understood.";
  }
  return {reply, 0, 0};
}

EmbeddingVector MockEmbeddingBackend::embed(const std::string& input) {
  std::vector<std::string> tokens = text::tokenize(input);
  if (tokens.empty()) tokens.push_back(input);

  std::vector<double> sum(static_cast<std::size_t>(dim_), 0.0);
  for (const std::string& token : tokens) {
    Rng rng(fnv1a(token, fnv1a_mix(seed_)));
    std::vector<double> v(static_cast<std::size_t>(dim_));
    double norm = 0.0;
    for (double& x : v) {
      x = rng.gaussian();
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i] / norm;
  }

  double norm = 0.0;
  for (double x : sum) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    sum[0] = 1.0;
    norm = 1.0;
  }
  for (double& x : sum) x /= norm;
  return {std::move(sum), tag()};
}

NliScores MockNliBackend::score(const std::string& premise,
                                const std::string& hypothesis) {
  if (premise == hypothesis) return {0.9, 0.05, 0.05};

  auto premise_phrases = text::extract_polarity_phrases(premise);
  auto hypothesis_phrases = text::extract_polarity_phrases(hypothesis);
  for (const auto& p : premise_phrases) {
    for (const auto& h : hypothesis_phrases) {
      if (p.positive == h.positive) continue;
      if (text::contains_phrase(h.phrase, p.phrase) ||
          text::contains_phrase(p.phrase, h.phrase)) {
        return {0.05, 0.05, 0.9};
      }
    }
  }
  return {0.05, 0.9, 0.05};
}

}  // namespace convrec
