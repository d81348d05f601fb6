#pragma once

#include <string>
#include <string_view>

namespace vrp {

/// Identifier pattern: literal text with `*` wildcards matching any
/// (possibly empty) run of characters.
class IdPattern {
 public:
  IdPattern() = default;
  explicit IdPattern(std::string text) : text_(std::move(text)) {}

  const std::string& text() const noexcept { return text_; }

  bool has_wildcard() const noexcept { return text_.find('*') != std::string::npos; }

  // Patterns made only of digits, dots and `*` address dotted ids; anything
  // else may also address an element by name.
  bool targets_names() const noexcept {
    for (char c : text_) {
      bool id_char = (c >= '0' && c <= '9') || c == '.' || c == '*';
      if (!id_char) return true;
    }
    return false;
  }

  /// Greedy glob match with single-star backtracking; linear in practice.
  bool matches(std::string_view s) const noexcept {
    std::string_view p = text_;
    std::size_t pi = 0, si = 0;
    std::size_t star = std::string_view::npos, mark = 0;
    while (si < s.size()) {
      if (pi < p.size() && p[pi] != '*' && p[pi] == s[si]) {
        ++pi;
        ++si;
      } else if (pi < p.size() && p[pi] == '*') {
        star = pi++;
        mark = si;
      } else if (star != std::string_view::npos) {
        pi = star + 1;
        si = ++mark;
      } else {
        return false;
      }
    }
    while (pi < p.size() && p[pi] == '*') ++pi;
    return pi == p.size();
  }

  /// Id first; name as a fallback when the pattern reads like a name.
  bool matches(std::string_view id, std::string_view name) const noexcept {
    if (matches(id)) return true;
    return targets_names() && matches(name);
  }

  bool operator==(const IdPattern&) const = default;

 private:
  std::string text_;
};

}  // namespace vrp
