#include "lgplan/instruction.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "lgplan/error.hpp"

namespace lgplan {

namespace {

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words{
      "a",    "an",  "the",  "in",   "of",      "to",   "into", "on",  "at", "and",
      "put",  "place", "set", "make", "form",   "all",  "them", "please", "with",
      "be",   "it",  "is",   "its",  "objects", "object", "shape", "pattern"};
  return words;
}

std::vector<std::string> tokens(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream ss(normalize_key(text));
  for (std::string w; ss >> w;)
    if (!stopwords().count(w)) out.push_back(w);
  return out;
}

}  // namespace

std::string normalize_key(std::string_view key) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : key) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out += ' ';
      pending_space = false;
      out += static_cast<char>(std::tolower(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

double token_overlap_score(std::string_view query, const PatternPrior& prior) {
  std::set<std::string> vocabulary;
  for (const std::string& k : prior.keys)
    for (std::string& t : tokens(k)) vocabulary.insert(std::move(t));
  const auto q = tokens(query);
  const std::set<std::string> unique(q.begin(), q.end());
  return static_cast<double>(std::count_if(unique.begin(), unique.end(),
                                           [&](const std::string& t) { return vocabulary.count(t); }));
}

const PatternPrior& resolve_pattern_key(std::string_view key, const PatternDb& db,
                                        const KeyScorer& scorer) {
  const auto priors = db.priors();
  if (priors.empty()) throw Error("unknown_pattern", "pattern database is empty");

  // Candidates in lexicographic name order so every stage breaks ties alike.
  std::vector<const PatternPrior*> sorted;
  for (const PatternPrior& p : priors) sorted.push_back(&p);
  std::sort(sorted.begin(), sorted.end(),
            [](const PatternPrior* a, const PatternPrior* b) { return a->name < b->name; });

  for (const PatternPrior* p : sorted) {
    if (p->name == key) return *p;
    if (std::find(p->keys.begin(), p->keys.end(), key) != p->keys.end()) return *p;
  }
  const std::string norm_key = normalize_key(key);
  for (const PatternPrior* p : sorted) {
    if (normalize_key(p->name) == norm_key) return *p;
    for (const std::string& k : p->keys)
      if (normalize_key(k) == norm_key) return *p;
  }
  const PatternPrior* best = nullptr;
  double best_score = 0.0;
  for (const PatternPrior* p : sorted) {
    const double s = scorer(key, *p);
    if (s > best_score) {
      best_score = s;
      best = p;
    }
  }
  if (!best) throw Error("unknown_pattern", "unknown pattern: " + std::string(key));
  return *best;
}

// --- DSL -------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind { word, lparen, rparen, comma, bar, semicolon, end } kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        out.push_back({Token::end, "end of input", line_, col_});
        return out;
      }
      const char c = text_[pos_];
      const int line = line_, col = col_;
      auto single = [&](Token::Kind k) {
        advance();
        out.push_back({k, std::string(1, c), line, col});
      };
      switch (c) {
        case '(': single(Token::lparen); continue;
        case ')': single(Token::rparen); continue;
        case ',': single(Token::comma); continue;
        case '|': single(Token::bar); continue;
        case ';': single(Token::semicolon); continue;
        default: break;
      }
      if (!is_word_char(c))
        throw ParseError("syntax_error", std::string("unexpected character '") + c + "'", line,
                         col);
      std::string word;
      while (pos_ < text_.size() && is_word_char(text_[pos_])) {
        word += text_[pos_];
        advance();
      }
      out.push_back({Token::word, word, line, col});
    }
  }

 private:
  static bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':';
  }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
      advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const PatternDb& db, const Scene* scene,
         const KeyScorer& scorer)
      : toks_(std::move(toks)), db_(db), scene_(scene), scorer_(scorer) {}

  GoalSpec run() {
    GoalSpec goal;
    std::vector<const Token*> starts;
    starts.push_back(&peek());
    goal.subgoals.push_back(clause());
    while (peek().kind == Token::semicolon) {
      next();
      starts.push_back(&peek());
      goal.subgoals.push_back(clause());
    }
    if (peek().kind != Token::end) fail(peek(), "expected ';' or end of input");

    try {
      validate_goal(goal, db_);
    } catch (const Error& e) {
      // Point at the clause that introduced the problem where we can tell.
      const Token* where = starts.front();
      if (auto idx = failing_clause(goal); idx) where = starts[*idx];
      throw ParseError(e.code(), e.what(), where->line, where->column);
    }
    return goal;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError("syntax_error", msg + " (found '" + t.text + "')", t.line, t.column);
  }

  const Token& expect(Token::Kind k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return next();
  }

  SubGoal clause() {
    const Token& ident = expect(Token::word, "pattern name");
    if (!std::isalpha(static_cast<unsigned char>(ident.text[0])))
      fail(ident, "pattern names start with a letter");
    SubGoal sg;
    try {
      sg.pattern = resolve_pattern_key(lower(ident.text), db_, scorer_).name;
    } catch (const Error& e) {
      throw ParseError(e.code(), e.what(), ident.line, ident.column);
    }
    expect(Token::lparen, "'('");
    sg.objects.push_back(object_ref());
    while (peek().kind == Token::comma) {
      next();
      sg.objects.push_back(object_ref());
    }
    if (peek().kind == Token::bar) {
      next();
      sg.anchor = object_ref();
    }
    expect(Token::rparen, "')'");
    return sg;
  }

  int object_ref() {
    const Token& t = expect(Token::word, "object reference");
    const std::string s = t.text;
    if (s.size() < 2 || (s[0] != 'o' && s[0] != 'O')) fail(t, "object references look like o3");
    if (s[1] == '_') {
      const std::string name = lower(s.substr(2));
      if (name.empty()) fail(t, "empty object name");
      if (!scene_)
        throw ParseError("unknown_object", "unknown object reference " + s +
                                               " (named references need a scene)",
                         t.line, t.column);
      std::optional<int> found;
      for (const SceneObject& o : scene_->objects()) {
        if (lower(o.name) == name) {
          if (found)
            throw ParseError("ambiguous_object", "ambiguous object reference " + s, t.line,
                             t.column);
          found = o.id;
        }
      }
      if (!found)
        throw ParseError("unknown_object", "unknown object reference " + s, t.line, t.column);
      return *found;
    }
    const std::string digits = s.substr(1);
    if (!std::all_of(digits.begin(), digits.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        digits.size() > 9)
      fail(t, "object references look like o3");
    const int id = std::stoi(digits);
    if (scene_ && !scene_->contains(id))
      throw ParseError("unknown_object", "unknown object reference " + s, t.line, t.column);
    return id;
  }

  std::optional<std::size_t> failing_clause(const GoalSpec& goal) const {
    for (std::size_t n = 1; n <= goal.subgoals.size(); ++n) {
      GoalSpec prefix{{goal.subgoals.begin(), goal.subgoals.begin() + static_cast<long>(n)}};
      try {
        validate_goal(prefix, db_);
      } catch (const Error&) {
        return n - 1;
      }
    }
    return std::nullopt;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const PatternDb& db_;
  const Scene* scene_;
  const KeyScorer& scorer_;
};

}  // namespace

GoalSpec parse_dsl(std::string_view text, const PatternDb& db, const Scene* scene,
                   const KeyScorer& scorer) {
  return Parser(Lexer(text).run(), db, scene, scorer).run();
}

std::string render_dsl(const GoalSpec& goal) {
  std::string out;
  for (std::size_t i = 0; i < goal.subgoals.size(); ++i) {
    const SubGoal& sg = goal.subgoals[i];
    if (i) out += "; ";
    out += sg.pattern + "(";
    for (std::size_t k = 0; k < sg.objects.size(); ++k) {
      if (k) out += ",";
      out += "o" + std::to_string(sg.objects[k]);
    }
    if (sg.anchor) out += "|o" + std::to_string(*sg.anchor);
    out += ")";
  }
  return out;
}

void validate_goal(const GoalSpec& goal, const PatternDb& db) {
  if (goal.subgoals.empty()) throw Error("invalid_goal", "goal has no sub-goals");
  std::map<int, std::size_t> owner;
  for (std::size_t i = 0; i < goal.subgoals.size(); ++i) {
    const SubGoal& sg = goal.subgoals[i];
    const PatternPrior& prior = db.get(sg.pattern);
    if (sg.objects.empty()) throw Error("invalid_goal", "sub-goal " + sg.pattern + " has no objects");
    if (prior.is_spatial() != sg.anchor.has_value())
      throw Error("invalid_goal", prior.is_spatial()
                                      ? "spatial sub-goal " + sg.pattern + " needs an anchor"
                                      : "only spatial sub-goals take an anchor");
    if (sg.anchor && std::find(sg.objects.begin(), sg.objects.end(), *sg.anchor) != sg.objects.end())
      throw Error("invalid_goal", "anchor o" + std::to_string(*sg.anchor) +
                                      " cannot be one of its own sub-goal's objects");
    for (int id : sg.objects) {
      if (!owner.emplace(id, i).second)
        throw Error("invalid_goal", "object o" + std::to_string(id) +
                                        " appears in more than one sub-goal position");
    }
  }
  // Anchor dependency: spatial sub-goal i waits for the sub-goal owning its anchor.
  const std::size_t n = goal.subgoals.size();
  std::vector<int> depends(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (const auto& a = goal.subgoals[i].anchor) {
      if (auto it = owner.find(*a); it != owner.end()) depends[i] = static_cast<int>(it->second);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t steps = 0;
    for (int cur = depends[i]; cur >= 0; cur = depends[static_cast<std::size_t>(cur)]) {
      if (static_cast<std::size_t>(cur) == i || ++steps > n)
        throw Error("cyclic_goal", "cyclic goal: anchors depend on each other");
    }
  }
}

void validate_goal(const GoalSpec& goal, const PatternDb& db, const Scene& scene) {
  validate_goal(goal, db);
  for (const SubGoal& sg : goal.subgoals) {
    for (int id : sg.objects)
      if (!scene.contains(id))
        throw Error("unknown_object", "unknown object reference o" + std::to_string(id));
    if (sg.anchor && !scene.contains(*sg.anchor))
      throw Error("unknown_object", "unknown object reference o" + std::to_string(*sg.anchor));
  }
}

Json goal_to_json(const GoalSpec& goal) {
  Json subgoals = Json::array();
  for (const SubGoal& sg : goal.subgoals) {
    Json j{{"pattern", sg.pattern}, {"objects", sg.objects}};
    if (sg.anchor) j["anchor"] = *sg.anchor;
    subgoals.push_back(std::move(j));
  }
  return Json{{"subgoals", subgoals}};
}

GoalSpec goal_from_json(const Json& j, const PatternDb& db) {
  GoalSpec goal;
  try {
    for (const Json& s : j.at("subgoals")) {
      for (const auto& [key, value] : s.items())
        if (key != "pattern" && key != "objects" && key != "anchor")
          throw Error("invalid_goal", "unknown sub-goal field \"" + key + "\"");
      SubGoal sg;
      sg.pattern = resolve_pattern_key(s.at("pattern").get<std::string>(), db).name;
      sg.objects = s.at("objects").get<std::vector<int>>();
      if (s.contains("anchor")) sg.anchor = s["anchor"].get<int>();
      goal.subgoals.push_back(std::move(sg));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid_goal", std::string("malformed goal JSON: ") + e.what());
  }
  validate_goal(goal, db);
  return goal;
}

}  // namespace lgplan
