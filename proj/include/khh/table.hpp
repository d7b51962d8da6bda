#pragma once

// Integer tables over a declared rectangle of named axes, with canonical
// JSON, CSV and aligned-text renderings.
//
// Canonical JSON: object keys sorted (nlohmann's default std::map), cells as
// [k1, ..., kr, value] rows in lexicographic key order, integers only.  The
// same table always dumps to the same bytes.

#include "khh/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace khh {

struct Axis {
  std::string name;
  int lo = 0;
  int hi = 0;
  friend bool operator==(const Axis&, const Axis&) = default;
};

class DimensionTable {
 public:
  using Key = std::vector<int>;

  DimensionTable() = default;
  DimensionTable(std::string label, std::vector<Axis> axes) : label_(std::move(label)), axes_(std::move(axes)) {
    for (const auto& a : axes_)
      if (a.hi < a.lo) throw Error(ErrorCode::Precondition, "axis '" + a.name + "' has an empty range");
  }

  const std::string& label() const { return label_; }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::map<std::string, std::string>& metadata() const { return meta_; }
  const std::map<Key, long long>& cells() const { return cells_; }

  void set_meta(const std::string& k, const std::string& v) { meta_[k] = v; }

  void set(const Key& k, long long v) {
    check_key(k);
    cells_[k] = v;
  }
  void add(const Key& k, long long v) {
    check_key(k);
    cells_[k] += v;
  }
  bool has(const Key& k) const { return cells_.count(k) != 0; }
  long long at(const Key& k) const {
    auto it = cells_.find(k);
    if (it == cells_.end()) throw Error(ErrorCode::Precondition, "table '" + label_ + "' has no cell " + key_str(k));
    return it->second;
  }
  long long get(const Key& k, long long dflt = 0) const {
    auto it = cells_.find(k);
    return it == cells_.end() ? dflt : it->second;
  }

  std::vector<Key> rectangle() const {
    std::vector<Key> out;
    if (axes_.empty()) return {Key{}};
    Key k;
    for (const auto& a : axes_) k.push_back(a.lo);
    for (;;) {
      out.push_back(k);
      std::size_t i = axes_.size();
      while (i > 0) {
        --i;
        if (k[i] < axes_[i].hi) {
          ++k[i];
          break;
        }
        k[i] = axes_[i].lo;
        if (i == 0) return out;
      }
    }
  }

  std::vector<Key> missing() const {
    std::vector<Key> out;
    for (auto& k : rectangle())
      if (!has(k)) out.push_back(k);
    return out;
  }
  bool complete() const { return missing().empty(); }
  void fill(long long v = 0) {
    for (auto& k : missing()) cells_[k] = v;
  }

  long long total() const {
    long long s = 0;
    for (const auto& [k, v] : cells_) s += v;
    return s;
  }
  bool all_zero() const {
    return std::all_of(cells_.begin(), cells_.end(), [](const auto& kv) { return kv.second == 0; });
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["label"] = label_;
    j["axes"] = nlohmann::json::array();
    for (const auto& a : axes_) j["axes"].push_back({{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}});
    j["cells"] = nlohmann::json::array();
    for (const auto& [k, v] : cells_) {
      nlohmann::json row = nlohmann::json::array();
      for (int x : k) row.push_back(x);
      row.push_back(v);
      j["cells"].push_back(std::move(row));
    }
    j["metadata"] = nlohmann::json::object();
    for (const auto& [k, v] : meta_) j["metadata"][k] = v;
    return j;
  }

  static DimensionTable from_json(const nlohmann::json& j) {
    try {
      std::vector<Axis> axes;
      for (const auto& a : j.at("axes")) axes.push_back({a.at("name").get<std::string>(), a.at("lo").get<int>(), a.at("hi").get<int>()});
      DimensionTable t(j.at("label").get<std::string>(), std::move(axes));
      for (const auto& row : j.at("cells")) {
        if (row.size() != t.axes_.size() + 1) throw Error(ErrorCode::ParseError, "cell row has the wrong arity");
        Key k;
        for (std::size_t i = 0; i < t.axes_.size(); ++i) k.push_back(row[i].get<int>());
        t.set(k, row.back().get<long long>());
      }
      for (const auto& [k, v] : j.at("metadata").items()) t.meta_[k] = v.get<std::string>();
      return t;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("table json: ") + e.what());
    }
  }

  std::string dump() const { return to_json().dump(2); }

  std::string to_csv() const {
    std::ostringstream os;
    for (const auto& a : axes_) os << a.name << ',';
    os << "value\n";
    for (const auto& [k, v] : cells_) {
      for (int x : k) os << x << ',';
      os << v << '\n';
    }
    return os.str();
  }

  /// Aligned text.  Two-axis tables print as a grid (first axis down,
  /// second across); anything else prints one row per cell.
  std::string to_text() const {
    std::ostringstream os;
    os << label_ << '\n';
    for (const auto& [k, v] : meta_) os << "  " << k << ": " << v << '\n';
    if (axes_.size() == 2) {
      const Axis& r = axes_[0];
      const Axis& c = axes_[1];
      std::vector<std::vector<std::string>> grid;
      std::vector<std::string> head{r.name + "\\" + c.name};
      for (int x = c.lo; x <= c.hi; ++x) head.push_back(std::to_string(x));
      grid.push_back(head);
      for (int y = r.lo; y <= r.hi; ++y) {
        std::vector<std::string> row{std::to_string(y)};
        for (int x = c.lo; x <= c.hi; ++x) {
          auto it = cells_.find({y, x});
          row.push_back(it == cells_.end() ? "." : std::to_string(it->second));
        }
        grid.push_back(row);
      }
      print_grid(os, grid);
    } else {
      std::vector<std::vector<std::string>> grid;
      std::vector<std::string> head;
      for (const auto& a : axes_) head.push_back(a.name);
      head.push_back("value");
      grid.push_back(head);
      for (const auto& [k, v] : cells_) {
        std::vector<std::string> row;
        for (int x : k) row.push_back(std::to_string(x));
        row.push_back(std::to_string(v));
        grid.push_back(row);
      }
      print_grid(os, grid);
    }
    return os.str();
  }

  friend bool operator==(const DimensionTable& a, const DimensionTable& b) {
    return a.label_ == b.label_ && a.axes_ == b.axes_ && a.cells_ == b.cells_ && a.meta_ == b.meta_;
  }

 private:
  std::string label_;
  std::vector<Axis> axes_;
  std::map<Key, long long> cells_;
  std::map<std::string, std::string> meta_;

  void check_key(const Key& k) const {
    if (k.size() != axes_.size()) throw Error(ErrorCode::Precondition, "table '" + label_ + "': key arity mismatch");
    for (std::size_t i = 0; i < k.size(); ++i)
      if (k[i] < axes_[i].lo || k[i] > axes_[i].hi)
        throw Error(ErrorCode::Precondition, "table '" + label_ + "': " + key_str(k) + " outside the declared rectangle");
  }

  static std::string key_str(const Key& k) {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
    return s + ")";
  }

  static void print_grid(std::ostream& os, const std::vector<std::vector<std::string>>& grid) {
    std::vector<std::size_t> width;
    for (const auto& row : grid)
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (width.size() <= i) width.push_back(0);
        width[i] = std::max(width[i], row[i].size());
      }
    for (const auto& row : grid) {
      os << ' ';
      for (std::size_t i = 0; i < row.size(); ++i) os << ' ' << std::string(width[i] - row[i].size(), ' ') << row[i];
      os << '\n';
    }
  }
};

/// A command's output: tables plus free-form findings and pass/fail checks.
struct Report {
  std::string command;
  std::map<std::string, std::string> metadata;
  std::vector<DimensionTable> tables;
  std::vector<std::string> findings;
  std::map<std::string, bool> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second; });
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["metadata"] = nlohmann::json::object();
    for (const auto& [k, v] : metadata) j["metadata"][k] = v;
    j["tables"] = nlohmann::json::array();
    for (const auto& t : tables) j["tables"].push_back(t.to_json());
    j["findings"] = findings;
    j["checks"] = nlohmann::json::object();
    for (const auto& [k, v] : checks) j["checks"][k] = v ? 1 : 0;
    return j;
  }

  static Report from_json(const nlohmann::json& j) {
    try {
      Report r;
      r.command = j.at("command").get<std::string>();
      for (const auto& [k, v] : j.at("metadata").items()) r.metadata[k] = v.get<std::string>();
      for (const auto& t : j.at("tables")) r.tables.push_back(DimensionTable::from_json(t));
      r.findings = j.at("findings").get<std::vector<std::string>>();
      for (const auto& [k, v] : j.at("checks").items()) r.checks[k] = v.get<int>() != 0;
      return r;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("report json: ") + e.what());
    }
  }

  std::string dump() const { return to_json().dump(2) + "\n"; }

  std::string to_text() const {
    std::ostringstream os;
    os << command << '\n';
    for (const auto& [k, v] : metadata) os << "  " << k << ": " << v << '\n';
    for (const auto& t : tables) os << '\n' << t.to_text();
    if (!checks.empty()) os << '\n';
    for (const auto& [k, v] : checks) os << (v ? "PASS " : "FAIL ") << k << '\n';
    if (!findings.empty()) os << '\n';
    for (const auto& f : findings) os << "finding: " << f << '\n';
    return os.str();
  }

  std::string to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      if (i) os << '\n';
      os << "# " << tables[i].label() << '\n' << tables[i].to_csv();
    }
    return os.str();
  }

  bool operator==(const Report&) const = default;
};

}  // namespace khh
