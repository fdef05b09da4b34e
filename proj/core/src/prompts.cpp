#include "convrec/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "convrec/text.hpp"
#include "convrec/util.hpp"

namespace convrec {

namespace {

constexpr const char* kUserPartMarker = "=== user ===";

const char* kUserReviewSystem =
    "Given a review written by you, summarize what you liked and disliked "
    "about the movie, under [Like] and [Dislike] respectively. If there is "
    "nothing to mention about like/dislike, simply write \"None.\" under the "
    "corresponding tag.";

const char* kUserReviewUser =
    "Here is the movie review written by you:\n"
    "{review}";

const char* kItemReviewsSystem =
    "Given some popular reviews about {movie_title}, describe what people "
    "liked and disliked about the movie, under [Like] and [Dislike] "
    "respectively. If there is nothing to mention about like/dislike, simply "
    "write \"None.\" under the corresponding tag.";

const char* kItemReviewsUser =
    "Here are some basic information about the movie and reviews about it:\n"
    "Movie Title: {movie_title}\n"
    "Genre: {genre}\n"
    "Director: {director}\n"
    "Cast: {cast}\n"
    "Reviews:\n"
    "{reviews}";

const char* kSeekerSystem =
    "You are a Seeker who interacts with a Recommender to get a movie "
    "recommendation that suits your preferences well. You will be given a "
    "dialogue context, and you must follow the instructions below to "
    "interact with the Recommender:\n"
    "\n"
    "- The recommender may ask for your preference or recommend a movie to "
    "you.\n"
    "- In the beginning, express your general preference on movies based on "
    "your past reviews about movies you have watched before.\n"
    "- If you are recommended a movie which is not {gt_movie_title}, you "
    "should reject it with a reason based on your thought about the "
    "recommended movie. Also, express some common features of the movies "
    "you have watched before and you should be recommended (DO NOT "
    "explicitly mention the movie title!).\n"
    "- If you are recommended {gt_movie_title}, you should accept it as if "
    "you haven't watched it before, and end the conversation by generating "
    "[EOD] token.\n"
    "- Continue the conversation for at least six turns.";

const char* kSeekerUser =
    "Here are your reviews about movies you have watched before:\n"
    "{user_persona}\n"
    "\n"
    "Some features of the movie you should be recommended:\n"
    "{gt_abstract}\n"
    "\n"
    "{rec_movie_abstract}\n"
    "\n"
    "Here is the dialogue context:\n"
    "{dialogue_context}";

const char* kRecommenderSystem =
    "You are a Recommender who recommends a Seeker a movie that he/she will "
    "enjoy, among the three candidates and based on the dialogue context "
    "given. Follow the instructions below to complete the task:\n"
    "\n"
    "- In the beginning of the conversation, engage with the Seeker to "
    "discover his/her movie preferences (regardless of the given three "
    "candidates). Follow this format:\n"
    "  Think: (think about which question to ask the seeker)\n"
    "  Recommender: (utterance that asks for the seeker's movie preference)\n"
    "- After some interactions, choose and suggest a movie from the three "
    "candidates and make the recommendation in the specified format:\n"
    "  Think: (think about the seeker's movie preference based on the "
    "context)\n"
    "  Movie: (Movie title (Year))\n"
    "  Recommender: (response to the seeker's utterance)\n"
    "- Do not recommend a movie that has been mentioned before in the "
    "dialogue context.";

const char* kRecommenderUser =
    "Here are the three movie candidates:\n"
    "{k_movies_info}\n"
    "\n"
    "Here is the dialogue context:\n"
    "{dialogue_context}\n"
    "\n"
    "Think:";

const char* kSeedSeeker =
    "Hi! I'm looking for a movie to watch tonight. Can you recommend "
    "something?";

const char* kSeedRecommender =
    "Of course! What kind of movies do you usually enjoy? Any particular "
    "genre or theme you're in the mood for?";

std::string join_list(const std::vector<std::string>& values) {
  return text::join(values, ", ");
}

}  // namespace

PromptPair load_prompt_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) {
    throw ConfigError("cannot open prompt template '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string content = buffer.str();

  PromptPair pair;
  std::size_t marker = std::string::npos;
  std::size_t search = 0;
  while (search < content.size()) {
    std::size_t pos = content.find(kUserPartMarker, search);
    if (pos == std::string::npos) break;
    bool line_start = pos == 0 || content[pos - 1] == '\n';
    std::size_t end = pos + std::string(kUserPartMarker).size();
    bool line_end = end == content.size() || content[end] == '\n';
    if (line_start && line_end) {
      marker = pos;
      break;
    }
    search = pos + 1;
  }
  if (marker == std::string::npos) {
    throw ConfigError("prompt template '" + path + "' lacks the '" +
                      kUserPartMarker + "' separator line");
  }
  pair.system_part = text::trim(content.substr(0, marker));
  pair.user_part = text::trim(
      content.substr(marker + std::string(kUserPartMarker).size()));
  if (pair.system_part.empty() || pair.user_part.empty()) {
    throw ConfigError("prompt template '" + path + "' has an empty part");
  }
  return pair;
}

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.user_review = {kUserReviewSystem, kUserReviewUser};
  t.item_reviews = {kItemReviewsSystem, kItemReviewsUser};
  t.seeker = {kSeekerSystem, kSeekerUser};
  t.recommender = {kRecommenderSystem, kRecommenderUser};
  t.seed_seeker = kSeedSeeker;
  t.seed_recommender = kSeedRecommender;
  return t;
}

std::string fill_template(const std::string& tpl,
                          const std::map<std::string, std::string>& values) {
  std::string out = tpl;
  for (const auto& [key, value] : values) {
    out = text::replace_all(std::move(out), "{" + key + "}", value);
  }
  // Catch typos in overridden templates: any {lower_snake} left is an error.
  std::size_t pos = 0;
  while ((pos = out.find('{', pos)) != std::string::npos) {
    std::size_t end = pos + 1;
    while (end < out.size() &&
           (std::islower(static_cast<unsigned char>(out[end])) || out[end] == '_')) {
      ++end;
    }
    if (end < out.size() && out[end] == '}' && end > pos + 1) {
      throw ConfigError("unresolved placeholder '" +
                        out.substr(pos, end - pos + 1) + "' in prompt template");
    }
    ++pos;
  }
  return out;
}

std::string render_dialogue_context(const std::vector<TurnText>& turns) {
  std::vector<std::string> lines;
  lines.reserve(turns.size());
  for (const TurnText& t : turns) {
    lines.push_back((t.seeker ? "Seeker: " : "Recommender: ") + t.text);
  }
  return text::join(lines, "\n");
}

std::string render_user_persona(const std::vector<PersonaEntryView>& entries) {
  std::vector<std::string> blocks;
  blocks.reserve(entries.size());
  for (const PersonaEntryView& e : entries) {
    std::string block = "Review of '" + e.title + "':\n";
    block += render_abstract(*e.abstract);
    blocks.push_back(std::move(block));
  }
  return text::join(blocks, "\n\n");
}

std::string render_item_knowledge(const ItemRecord& record,
                                  const Abstract& knowledge) {
  std::string out;
  out += "Movie Title: " + record.title + "\n";
  out += "Genre: " + join_list(record.genre) + "\n";
  out += "Director: " + join_list(record.director) + "\n";
  out += "Cast: " + join_list(record.cast) + "\n";
  out += render_abstract(knowledge);
  return out;
}

std::string render_responsive_section(const std::string& title,
                                      const Abstract& abstract) {
  std::string out = "Here is your review of '" + title +
                    "', the movie that was just recommended:\n";
  out += render_abstract(abstract);
  return out;
}

}  // namespace convrec
