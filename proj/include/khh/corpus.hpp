#pragma once

// Corpus members: corpus/<name>/{algebra.alg, square.sq, curve.crv, expected.json}.
//
// expected.json lists values as
//   {"quantity": "hh", "args": [1, 5], "value": 2, "provenance": "DERIVED", "oracle": "bar-complex"}
// Every value carries a provenance tag; DERIVED values are the only ones
// regeneration may rewrite.  Quantities marked dual-path below are computed
// two independent ways and raise ORACLE_DISAGREEMENT when the ways differ.

#include "khh/cdh_fiber.hpp"
#include "khh/elliptic.hpp"
#include "khh/kahler.hpp"
#include "khh/table.hpp"
#include "khh/text_format.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace khh {

struct ExpectedValue {
  std::string quantity;
  std::vector<int> args;
  long long value = 0;
  std::string provenance;  // PAPER, TRIVIAL or DERIVED
  std::string note;        // oracle name, claim or reason

  std::string key() const {
    std::string s = quantity + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + std::to_string(args[i]);
    return s + ")";
  }
};

struct CorpusEntry {
  std::string name;
  std::filesystem::path dir;
  AlgebraPtr algebra;
  SquarePtr square;
  std::optional<CurveFile> curve;
  std::vector<ExpectedValue> values;
  int smooth_w_max = 8;  // weight cutoff for the smoothness suite
  nlohmann::json raw;
};

namespace corpus_detail {

inline const char* note_field(const std::string& provenance) {
  if (provenance == "DERIVED") return "oracle";
  if (provenance == "PAPER") return "claim";
  return "reason";
}

}  // namespace corpus_detail

inline CorpusEntry load_entry(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  CorpusEntry e;
  e.dir = dir;
  e.name = dir.filename().string();
  if (fs::exists(dir / "algebra.alg")) e.algebra = GradedAlgebra::build(read_file((dir / "algebra.alg").string()));
  if (fs::exists(dir / "square.sq"))
    e.square = std::make_shared<ResolutionSquare>(ResolutionSquare::parse(read_file((dir / "square.sq").string())));
  if (fs::exists(dir / "curve.crv")) e.curve = CurveFile::parse(read_file((dir / "curve.crv").string()));
  if (e.algebra && e.square && e.algebra->canonical_text() != e.square->a->canonical_text())
    throw Error(ErrorCode::ParseError, e.name + ": square.sq presents a different algebra than algebra.alg");
  if (!e.algebra && !e.curve) throw Error(ErrorCode::ParseError, e.name + ": no algebra.alg or curve.crv");
  if (fs::exists(dir / "expected.json")) {
    try {
      e.raw = nlohmann::json::parse(read_file((dir / "expected.json").string()));
      if (e.raw.contains("smooth_w_max")) e.smooth_w_max = e.raw.at("smooth_w_max").get<int>();
      for (const auto& v : e.raw.at("values")) {
        ExpectedValue x;
        x.quantity = v.at("quantity").get<std::string>();
        x.args = v.at("args").get<std::vector<int>>();
        x.value = v.at("value").get<long long>();
        x.provenance = v.at("provenance").get<std::string>();
        if (x.provenance != "PAPER" && x.provenance != "TRIVIAL" && x.provenance != "DERIVED")
          throw Error(ErrorCode::ParseError, e.name + ": unknown provenance '" + x.provenance + "'");
        const char* f = corpus_detail::note_field(x.provenance);
        if (!v.contains(f) || v.at(f).get<std::string>().empty())
          throw Error(ErrorCode::ParseError, e.name + ": " + x.key() + " has no " + f);
        x.note = v.at(f).get<std::string>();
        e.values.push_back(std::move(x));
      }
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::ParseError, e.name + "/expected.json: " + ex.what());
    }
  }
  return e;
}

inline std::vector<CorpusEntry> load_corpus(const std::filesystem::path& root) {
  std::vector<std::filesystem::path> dirs;
  for (const auto& d : std::filesystem::directory_iterator(root))
    if (d.is_directory()) dirs.push_back(d.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<CorpusEntry> out;
  for (const auto& d : dirs) out.push_back(load_entry(d));
  return out;
}

/// Computes corpus quantities for one member; engines are built lazily.
class Evaluator {
 public:
  explicit Evaluator(const CorpusEntry& e, EngineOptions opt = {}) : e_(e), opt_(std::move(opt)) {}

  long long eval(const std::string& q, const std::vector<int>& a) {
    auto need = [&](std::size_t n) {
      if (a.size() != n) throw Error(ErrorCode::Precondition, e_.name + ": " + q + " takes " + std::to_string(n) + " arguments");
    };
    auto z = [](std::size_t v) { return static_cast<long long>(v); };
    if (q == "hh") return need(2), z(engine().hh_dim(a[0], a[1]));
    if (q == "hc") return need(2), z(engine().hc_dim(a[0], a[1]));
    if (q == "omega") return need(2), z(omega_dims(alg(), a[0], a[1]));
    if (q == "hodge") {  // dual-path: Eulerian idempotents and Adams eigenspaces
      need(3);
      auto idem = engine().hodge_dims(a[0], a[1], HodgeRoute::Idempotent);
      auto adams = engine().hodge_dims(a[0], a[1], HodgeRoute::Adams);
      if (idem != adams) throw disagreement("Hodge idempotent vs Adams", q, a);
      return a[2] >= 0 && a[2] < static_cast<int>(idem.size()) ? z(idem[a[2]]) : 0;
    }
    if (q == "tk") return need(2), z(fiber().tk(a[0], a[1]));
    if (q == "tk_hodge") return need(3), z(fiber().tk_hodge(a[0], a[1], a[2]));
    if (q == "tk2_torsion") {  // dual-path: fiber long exact sequence vs torsion of Omega^1
      need(1);
      auto lhs = fiber().tk(2, a[0]);
      auto rhs = torsion_dims(*square().nu, 1, a[0]);
      if (lhs != rhs) throw disagreement("fiber vs Kahler torsion", q, a);
      return z(lhs);
    }
    if (q == "kunneth") {  // dual-sided: 1 when both sides agree on every cell
      need(3);
      return verify_kunneth(alg(), a[2], a[0], a[1], Convention::Standard, opt_).passed() ? 1 : 0;
    }
    if (q == "pic") return need(2), z(pic_conductor(square(), a[0], a[1]).by_degree.at(a[1]));
    if (q == "nk0_gap") return need(0), z(nk0_crosscheck(square(), 1).gap);
    if (q == "nk0_pass") return need(1), nk0_crosscheck(square(), a[0]).passed() ? 1 : 0;
    if (q == "smooth") return need(0), jacobian_smooth(alg()).verdict == Smoothness::Smooth ? 1 : 0;
    if (q == "krull_dim") return need(0), jacobian_smooth(alg()).krull_dim;
    if (q == "torsion_order") {  // 0 encodes INFINITE
      need(1);
      auto t = is_torsion(*curve().curve, curve().points.at(a[0]));
      return t.order.value_or(0);
    }
    if (q == "twist_h") {  // (sign, j, p)
      need(3);
      auto r = bundle(a[1], 0, 1, 0);
      return r.twisted.at({a[0], a[1], a[2]});
    }
    if (q == "ktilde_zero") {  // (n_lo, n_hi, m_max, j_cutoff)
      need(4);
      return bundle(a[3], a[0], a[1], a[2]).k_regular ? 1 : 0;
    }
    throw Error(ErrorCode::Precondition, e_.name + ": unknown quantity '" + q + "'");
  }

  const HochschildEngine& engine() {
    if (!engine_) engine_ = std::make_unique<HochschildEngine>(alg(), Convention::Standard, opt_);
    return *engine_;
  }
  const CdhFiber& fiber() {
    if (!fiber_) {
      square();
      fiber_ = std::make_unique<CdhFiber>(e_.square, opt_);
    }
    return *fiber_;
  }

 private:
  const CorpusEntry& e_;
  EngineOptions opt_;
  std::unique_ptr<HochschildEngine> engine_;
  std::unique_ptr<CdhFiber> fiber_;

  void missing(const char* what) const { throw Error(ErrorCode::Precondition, e_.name + ": no " + what); }
  const AlgebraPtr& alg() const {
    if (!e_.algebra) missing("algebra.alg");
    return e_.algebra;
  }
  const ResolutionSquare& square() const {
    if (!e_.square) missing("square.sq");
    return *e_.square;
  }
  const CurveFile& curve() const {
    if (!e_.curve) missing("curve.crv");
    return *e_.curve;
  }

  CuspBundleReport bundle(int j_cutoff, int n_lo, int n_hi, int m_max) const {
    const auto& c = curve();
    return cusp_bundle_tables(*c.curve, c.p(), c.q(), n_lo, n_hi, m_max, j_cutoff);
  }

  Error disagreement(const std::string& paths, const std::string& q, const std::vector<int>& a) const {
    ExpectedValue v{q, a, 0, "", ""};
    return Error(ErrorCode::OracleDisagreement, e_.name + ": " + v.key() + ": " + paths + " differ");
  }
};

struct CorpusDiff {
  std::string entry;
  std::string key;
  std::string provenance;
  long long expected = 0, actual = 0;
};

struct RegenerateReport {
  std::size_t checked = 0;
  std::vector<CorpusDiff> diffs;         // any provenance
  std::vector<std::string> disagreements;
  bool clean() const { return diffs.empty() && disagreements.empty(); }
};

/// Recomputes every expected value.  With `write`, DERIVED values are updated
/// in expected.json; PAPER and TRIVIAL mismatches are only reported.
inline RegenerateReport regenerate_derived(std::vector<CorpusEntry>& entries, bool write = false, EngineOptions opt = {}) {
  RegenerateReport rep;
  for (auto& e : entries) {
    Evaluator ev(e, opt);
    bool dirty = false;
    for (std::size_t i = 0; i < e.values.size(); ++i) {
      auto& v = e.values[i];
      ++rep.checked;
      long long actual;
      try {
        actual = ev.eval(v.quantity, v.args);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::OracleDisagreement) throw;
        rep.disagreements.push_back(err.what());
        continue;
      }
      if (actual == v.value) continue;
      rep.diffs.push_back({e.name, v.key(), v.provenance, v.value, actual});
      if (write && v.provenance == "DERIVED") {
        v.value = actual;
        e.raw["values"][i]["value"] = actual;
        dirty = true;
      }
    }
    if (dirty) std::ofstream(e.dir / "expected.json") << e.raw.dump(2) << '\n';
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Smoothness property suite: vanishing of tk(i, .) for i <= d + 1 forces
// Jacobian smoothness, and every singular member has a witness.

struct SmoothnessRow {
  std::string name;
  Smoothness verdict = Smoothness::Indeterminate;
  int d = 0;
  int w_max = 0;
  std::optional<std::pair<int, int>> witness;  // minimal (i, w)
  DimensionTable tk;                           // (i, w) over i <= d + 1, w <= w_max
  bool violation() const { return !witness && verdict != Smoothness::Smooth; }
};

struct SmoothnessSuite {
  std::vector<SmoothnessRow> rows;
  std::size_t violations() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SmoothnessRow& r) { return r.violation(); }));
  }
  bool singular_members_witnessed() const {
    for (const auto& r : rows)
      if (r.verdict == Smoothness::Singular && !r.witness) return false;
    return true;
  }
};

inline SmoothnessRow smoothness_row(const CorpusEntry& e, EngineOptions opt = {}) {
  if (!e.square) throw Error(ErrorCode::Precondition, e.name + ": the smoothness suite needs square.sq");
  SmoothnessRow r;
  r.name = e.name;
  auto v = jacobian_smooth(e.algebra);
  r.verdict = v.verdict;
  r.d = v.krull_dim;
  r.w_max = e.smooth_w_max;
  r.tk = DimensionTable("tk " + e.name, {{"i", 0, r.d + 1}, {"w", 0, r.w_max}});
  r.tk.set_meta("verdict", to_string(v.verdict));
  CdhFiber f(e.square, opt);
  for (int i = 0; i <= r.d + 1; ++i)
    for (int w = 0; w <= r.w_max; ++w) {
      auto t = f.tk(i, w);
      r.tk.set({i, w}, static_cast<long long>(t));
      if (t != 0 && !r.witness) r.witness = std::pair{i, w};
    }
  return r;
}

inline SmoothnessSuite smoothness_suite(const std::vector<CorpusEntry>& entries, EngineOptions opt = {}) {
  SmoothnessSuite s;
  for (const auto& e : entries) {
    if (!e.square) continue;
    try {
      s.rows.push_back(smoothness_row(e, opt));
    } catch (const Error& err) {
      throw Error(err.code(), e.name + ": " + err.what());
    }
  }
  return s;
}

}  // namespace khh
