#pragma once

// Line/statement splitting shared by the algebra, square and curve formats.
// Statements end at a newline or ';'.  '#' starts a comment.

#include "khh/error.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace khh {

struct Statement {
  std::string keyword;
  std::string rest;
  int line = 0;
  int keyword_column = 0;  // 1-based
  int rest_offset = 0;     // 0-based column where `rest` starts
};

inline std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t semi = line.find(';', start);
      if (semi == std::string_view::npos) semi = line.size();
      std::string_view stmt = line.substr(start, semi - start);
      std::size_t k = 0;
      while (k < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[k]))) ++k;
      if (k < stmt.size()) {
        std::size_t ke = k;
        while (ke < stmt.size() && !std::isspace(static_cast<unsigned char>(stmt[ke]))) ++ke;
        Statement s;
        s.keyword = std::string(stmt.substr(k, ke - k));
        s.rest = std::string(stmt.substr(ke));
        s.line = line_no;
        s.keyword_column = static_cast<int>(start + k) + 1;
        s.rest_offset = static_cast<int>(start + ke);
        out.push_back(std::move(s));
      }
      if (semi == line.size()) break;
      start = semi + 1;
    }
    if (eol == text.size()) break;
    pos = eol + 1;
  }
  return out;
}

/// Whitespace-separated words of `rest`, with their 0-based column offsets.
inline std::vector<std::pair<std::string, int>> split_words(const Statement& s) {
  std::vector<std::pair<std::string, int>> words;
  const std::string& r = s.rest;
  std::size_t i = 0;
  while (i < r.size()) {
    while (i < r.size() && std::isspace(static_cast<unsigned char>(r[i]))) ++i;
    if (i >= r.size()) break;
    std::size_t j = i;
    while (j < r.size() && !std::isspace(static_cast<unsigned char>(r[j]))) ++j;
    words.emplace_back(r.substr(i, j - i), s.rest_offset + static_cast<int>(i));
    i = j;
  }
  return words;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Precondition, "cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace khh
