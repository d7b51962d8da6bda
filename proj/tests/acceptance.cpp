// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "khh/corpus.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace khh;

namespace {

const std::string kSource = KHH_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message; later ones only bump the count.
struct Tally {
  std::size_t checked = 0, failed = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checked;
    if (ok) return;
    if (!failed) first = what;
    ++failed;
  }
  Outcome outcome(const std::string& summary) const {
    if (!failed) return {true, summary + " (" + std::to_string(checked) + " checks)"};
    return {false, std::to_string(failed) + "/" + std::to_string(checked) + " failed; first: " + first};
  }
};

std::vector<CorpusEntry>& corpus() {
  static std::vector<CorpusEntry> c = load_corpus(kSource + "/corpus");
  return c;
}

const CorpusEntry& member(const std::string& name) {
  for (const auto& e : corpus())
    if (e.name == name) return e;
  throw Error(ErrorCode::Precondition, "no corpus member " + name);
}

std::string at(int n, int w) { return "(" + std::to_string(n) + "," + std::to_string(w) + ")"; }

Outcome structural_sanity() {
  Tally t;
  for (int n = 0; n <= 5; ++n) {
    bool ok = true;
    try {
      eulerian(n);
    } catch (const Error& e) {
      ok = false;
    }
    t.expect(ok, "Eulerian idempotents at n=" + std::to_string(n));
  }
  for (const auto& e : corpus()) {
    if (!e.algebra) continue;
    HochschildEngine eng(e.algebra);
    const int w_max = std::min(e.smooth_w_max, 8);
    for (int n = 0; n <= 4; ++n)
      for (int w = 0; w <= w_max; ++w) {
        for (const auto& c : eng.classes(n, w)) {
          std::string failed;
          t.expect(eng.verify_slice(n, w, c, &failed), e.name + " " + failed);
        }
        auto idem = eng.hodge_dims(n, w, HodgeRoute::Idempotent);
        auto adams = eng.hodge_dims(n, w, HodgeRoute::Adams);
        std::size_t sum = 0;
        for (auto d : idem) sum += d;
        t.expect(sum == eng.hh_dim(n, w), e.name + " Hodge pieces do not fill HH at " + at(n, w));
        t.expect(idem == adams, e.name + " Hodge idempotent vs Adams at " + at(n, w));
        if (n >= 1) {
          auto s = eng.sbi_check(n, w);
          t.expect(s.exact_at_hc_n() && s.exact_at_hc_n2(), e.name + " SBI at " + at(n, w));
        }
      }
  }
  return t.outcome("b^2 = B^2 = bB + Bb = 0, Hodge completeness and SBI on every corpus slice n <= 4");
}

Outcome hkr_suite() {
  Tally t;
  for (const char* name : {"Qx", "Qxy", "Qxyz"}) {
    const auto& e = member(name);
    HochschildEngine eng(e.algebra);
    const int k = static_cast<int>(e.algebra->ring()->weights.size());
    for (int n = 0; n <= 3; ++n)
      for (int w = 0; w <= 10; ++w) {
        // forms of Q[x_1..x_k]: choose the dx's, then a monomial of the remaining weight
        auto binom = [](long long a, long long b) {
          if (b < 0 || a < b) return 0LL;
          long long v = 1;
          for (long long i = 1; i <= b; ++i) v = v * (a - b + i) / i;
          return v;
        };
        const long long forms = w < n ? 0 : binom(k, n) * binom(w - n + k - 1, k - 1);
        const auto hh = static_cast<long long>(eng.hh_dim(n, w));
        t.expect(hh == forms, std::string(name) + " HH" + at(n, w) + " = " + std::to_string(hh) + " vs forms " +
                                  std::to_string(forms));
        t.expect(static_cast<long long>(omega_dims(e.algebra, n, w)) == forms, std::string(name) + " Omega" + at(n, w));
        auto split = eng.hodge_split(n, w);
        for (std::size_t i = 0; i < split.size(); ++i)
          t.expect(split[i] == (static_cast<int>(i) == n ? static_cast<std::size_t>(hh) : 0),
                   std::string(name) + " Hodge piece " + std::to_string(i) + " at " + at(n, w));
      }
  }
  return t.outcome("HH_n = Omega^n and Hodge concentrated at i = n for n <= 3, w <= 10");
}

Outcome kunneth() {
  Tally t;
  // Q[x,y][t] at weight 12 needs hours and tens of GB on the bar complex;
  // it runs at weight 8 and the line says so.
  const std::vector<std::pair<const char*, int>> runs = {{"cusp", 12}, {"Q", 12}, {"Qx", 12}, {"Qxy", 8}};
  for (const auto& [name, w_max] : runs) {
    auto rep = verify_kunneth(member(name).algebra, 4, 3, w_max);
    for (const auto& c : rep.failures())
      t.expect(false, std::string(name) + " " + c.table + " n=" + std::to_string(c.n) + " w=" + std::to_string(c.w) +
                          " j=" + std::to_string(c.j) + " lhs " + std::to_string(c.lhs) + " rhs " + std::to_string(c.rhs) +
                          (c.error.empty() ? "" : " " + c.error));
    t.checked += rep.cells.size();
  }
  return t.outcome("HH and HC of A[t] match the tensor prediction cell-wise at (3, 12, 4) for the cusp, Q and Q[x]; "
                   "Q[x,y] at (3, 8, 4)");
}

Outcome cusp_cycles() {
  Tally t;
  auto rep = verify_cusp_cycles(member("cusp").algebra, 2);
  t.expect(rep.z_check.cycle, "b(z) != 0");
  t.expect(rep.z_check.nonzero, "z is a boundary in HH_1 weight 5");
  t.expect(rep.tz_check.cycle && rep.tz_check.nonzero, "tz is not a nonzero class in HH_1 weight 6");
  bool hh3 = false;
  for (const auto& s : rep.slices)
    if (s.i == 2 && s.degree == 3 && s.weight == 11 && s.dim > 0) hh3 = true;
  t.expect(hh3, "no nonzero class in HH_3 weight 11");
  t.expect(!rep.attempts.empty(), "no sign conventions were tried");
  std::string verdict;
  if (rep.found)
    verdict = std::string("convention found: ") + to_string(rep.found->convention);
  else
    verdict = "NO_CONVENTION_FOUND after " + std::to_string(rep.attempts.size()) + " attempts";
  return t.outcome("z, tz and HH_3(11) verified; " + verdict);
}

Outcome typical_pieces() {
  Tally t;
  const auto& e = member("cusp");
  CdhFiber f(e.square);
  auto row = [&](int n) {
    std::map<int, std::size_t> m;
    for (int w = 0; w <= 12; ++w)
      if (auto d = f.tk(n, w)) m[w] = d;
    return m;
  };
  t.expect(row(0) == std::map<int, std::size_t>{{1, 1}}, "tk(0, .) is not one dimension in weight 1");
  t.expect(row(1) == std::map<int, std::size_t>{{1, 1}}, "tk(1, .) is not one dimension in weight 1");
  t.expect(row(2) == std::map<int, std::size_t>{{5, 1}, {7, 1}}, "tk(2, .) is not concentrated in weights {5, 7}");
  for (int w = 0; w <= 12; ++w)
    t.expect(f.tk(2, w) == torsion_dims(*e.square->nu, 1, w), "tk(2, " + std::to_string(w) + ") vs torsion of Omega^1");
  return t.outcome("cusp tk(0) = tk(1) = Q in weight 1, tk(2) in weights 5 and 7, equal to Omega^1 torsion for w <= 12");
}

Outcome nk0() {
  Tally t;
  for (const char* name : {"cusp", "t25"}) {
    auto r = nk0_crosscheck(*member(name).square, 6);
    t.expect(r.supported, std::string(name) + " " + r.reason);
    t.expect(r.rows.size() == 6, std::string(name) + " wrong number of degrees");
    for (const auto& row : r.rows)
      t.expect(row.pic_growth == row.formula, std::string(name) + " degree " + std::to_string(row.j) + ": Pic growth " +
                                                  std::to_string(row.pic_growth) + " vs gap " + std::to_string(row.formula));
  }
  return t.outcome("Pic(A[s])/Pic(A) = dim(A+/A) per s-degree up to 6 for the cusp and Q[t^2,t^5]");
}

Outcome smoothness() {
  Tally t;
  auto s = smoothness_suite(corpus());
  for (const auto& r : s.rows) {
    t.expect(!r.violation(), r.name + ": tk vanishes for i <= d+1 but the member is not smooth");
    if (r.verdict == Smoothness::Singular)
      t.expect(r.witness && r.witness->first <= r.d + 1, r.name + ": singular without a witness");
  }
  return t.outcome(std::to_string(s.rows.size()) + " members, 0 violations");
}

Outcome cusp_bundle() {
  Tally t;
  const auto& c = *member("curve37a").curve;
  auto r = cusp_bundle_tables(*c.curve, c.p(), c.q(), -1, 6, 2, 4);
  t.expect(r.k_regular, "table (a) has a nonzero cell");
  t.expect(r.ktilde.all_zero(), "Ktilde_n(X x A^m) is not identically zero");
  t.expect(r.line_k.at({1, 0}) != 0, "Ktilde_0(LL) vanishes under the positive twist");
  for (int j = 1; j <= 4; ++j) t.expect(r.twisted.at({1, j, 0}) == j, "h^0(J (x) L^" + std::to_string(j) + ") != j");
  bool flagged = false;
  for (const auto& f : r.findings) flagged = flagged || f.rfind("FLAG", 0) == 0;
  t.expect(r.twist_discrepancy == flagged, "twist discrepancy not reported as a flagged finding");
  return t.outcome(std::string("table (a) zero on n in [-1, 6], m <= 2; Ktilde_0(LL) = ") +
                   std::to_string(r.line_k.at({1, 0})) + (flagged ? "; twist discrepancy flagged" : ""));
}

Outcome torsion() {
  Tally t;
  const auto e = EllipticCurve::curve_37a();
  t.expect(!is_torsion(e, Point::affine(0, 0)).torsion(), "(0,0) on 37a certified torsion");
  const auto& c32 = *member("curve32").curve;
  std::size_t two_torsion = 0;
  for (const auto& p : c32.points) {
    if (p.inf || !(c32.curve->neg(p) == p)) continue;
    ++two_torsion;
    auto r = is_torsion(*c32.curve, p);
    t.expect(r.order == 2, p.str() + " not certified of order 2");
  }
  t.expect(two_torsion == 3, "curve32 does not list its three 2-torsion points");
  return t.outcome("(0,0) on 37a has infinite order; 2-torsion on y^2 = x^3 - x certified");
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  status = pclose(p);
  return out;
}

Outcome determinism() {
  const std::string cmd = std::string("'") + KHH_BINARY + "' report --format json --corpus '" + kSource + "/corpus'";
  int s1 = 0, s2 = 0;
  auto a = run_capture(cmd, s1);
  auto b = run_capture(cmd, s2);
  if (a.empty()) return {false, "no output from " + cmd};
  if (a != b) return {false, "two runs differ"};
  return {true, "two full report runs are byte-identical (" + std::to_string(a.size()) + " bytes, status " +
                    std::to_string(WEXITSTATUS(s1)) + ")"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"structural sanity", structural_sanity}, {"HKR suite", hkr_suite},
      {"Kunneth", kunneth},                     {"cusp cycles", cusp_cycles},
      {"typical pieces", typical_pieces},       {"NK0 crosscheck", nk0},
      {"smoothness suite", smoothness},         {"cusp bundle tables", cusp_bundle},
      {"torsion certification", torsion},       {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << ' ' << (i + 1) << ' ' << criteria[i].first << ": " << o.detail;
    line.precision(1);
    line << std::fixed << " [" << secs << "s]";
    std::cout << line.str() << std::endl;
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
