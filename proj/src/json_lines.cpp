#include "lgplan/json_lines.hpp"

#include <algorithm>
#include <iterator>
#include <vector>

#include "lgplan/error.hpp"

namespace lgplan {

namespace {

// Forward iterator over the text that publishes how far the lexer has read.
struct CountingIterator {
  using iterator_category = std::forward_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  const char* begin = nullptr;
  std::size_t* consumed = nullptr;

  reference operator*() const { return *p; }
  CountingIterator& operator++() {
    ++p;
    *consumed = static_cast<std::size_t>(p - begin);
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator t = *this;
    ++*this;
    return t;
  }
  bool operator==(const CountingIterator& o) const { return p == o.p; }
  bool operator!=(const CountingIterator& o) const { return p != o.p; }
};

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class LineSax : public nlohmann::json_sax<Json> {
 public:
  LineSax(std::string_view text, const std::size_t& consumed, LinedJson& out)
      : text_(text), consumed_(consumed), out_(out) {}

  bool null() override { return add(Json(nullptr)); }
  bool boolean(bool v) override { return add(Json(v)); }
  bool number_integer(number_integer_t v) override { return add(Json(v)); }
  bool number_unsigned(number_unsigned_t v) override { return add(Json(v)); }
  bool number_float(number_float_t v, const string_t&) override { return add(Json(v)); }
  bool string(string_t& v) override { return add(Json(v)); }
  bool binary(binary_t&) override { return false; }

  bool start_object(std::size_t) override { return open(Json::object()); }
  bool start_array(std::size_t) override { return open(Json::array()); }
  bool key(string_t& k) override {
    key_ = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool end_array() override { return close(); }

  bool parse_error(std::size_t position, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    const auto [line, col] = line_col(position == 0 ? 0 : position - 1);
    std::string msg = ex.what();
    // Drop the library's own "[json.exception...] parse error at line..:" prefix.
    if (auto pos = msg.rfind(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ParseError("json_syntax", msg, line, col);
  }

 private:
  std::pair<int, int> line_col(std::size_t offset) const {
    offset = std::min(offset, text_.size());
    int line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < offset; ++i) {
      if (text_[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    return {line, static_cast<int>(offset - line_start) + 1};
  }

  // Places `v` at the current insertion point; returns its address and pointer.
  std::pair<Json*, std::string> insert(Json v) {
    if (stack_.empty()) {
      out_.value = std::move(v);
      return {&out_.value, ""};
    }
    auto& [parent, parent_ptr] = stack_.back();
    if (parent->is_array()) {
      parent->push_back(std::move(v));
      return {&parent->back(), parent_ptr + "/" + std::to_string(parent->size() - 1)};
    }
    Json& slot = (*parent)[key_];
    slot = std::move(v);
    return {&slot, parent_ptr + "/" + escape_pointer_token(key_)};
  }

  void record(const std::string& ptr) {
    out_.lines[ptr] = line_col(consumed_ == 0 ? 0 : consumed_ - 1).first;
  }

  bool add(Json v) {
    record(insert(std::move(v)).second);
    return true;
  }
  bool open(Json v) {
    auto [slot, ptr] = insert(std::move(v));
    record(ptr);
    stack_.emplace_back(slot, ptr);
    return true;
  }
  bool close() {
    stack_.pop_back();
    return true;
  }

  std::string_view text_;
  const std::size_t& consumed_;
  LinedJson& out_;
  std::vector<std::pair<Json*, std::string>> stack_;
  std::string key_;
};

}  // namespace

int LinedJson::line_of(std::string pointer) const {
  while (true) {
    if (auto it = lines.find(pointer); it != lines.end()) return it->second;
    if (pointer.empty()) return 1;
    pointer.erase(pointer.rfind('/'));
  }
}

LinedJson parse_json_with_lines(std::string_view text) {
  LinedJson out;
  std::size_t consumed = 0;
  CountingIterator first{text.data(), text.data(), &consumed};
  CountingIterator last{text.data() + text.size(), text.data(), &consumed};
  LineSax sax(text, consumed, out);
  Json::sax_parse(first, last, &sax);
  return out;
}

}  // namespace lgplan
