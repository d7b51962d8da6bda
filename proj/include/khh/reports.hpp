#pragma once

// Report builders shared by the command-line tool and the acceptance run.
// Each returns a Report whose JSON form is canonical.

#include "khh/corpus.hpp"
#include "khh/table.hpp"

#include <string>

namespace khh {

/// Exit-code contract: 0 success, 2 parse, 3 precondition, 4 hypothesis failure, 5 internal sanity.
inline int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return 2;
    case ErrorCode::TorsionPoint:
    case ErrorCode::NoConventionFound:
    case ErrorCode::Mismatch:
    case ErrorCode::Indeterminate: return 4;
    case ErrorCode::SanityFail:
    case ErrorCode::CompositionNonzero:
    case ErrorCode::IdempotentSanityFail:
    case ErrorCode::OracleDisagreement:
    case ErrorCode::NotSquare: return 5;
    default: return 3;
  }
}

struct RunOptions {
  Convention convention = Convention::Standard;
  int twist_sign = 1;  // L^{+j} or L^{-j} as the primary reading of cusp bundle tables
  EngineOptions engine;

  std::string convention_str() const {
    return std::string(to_string(convention)) + (twist_sign > 0 ? ",twist+" : ",twist-");
  }
};

namespace report_detail {

inline Report start(const std::string& cmd, const RunOptions& ro) {
  Report r;
  r.command = cmd;
  r.metadata["convention"] = ro.convention_str();
  return r;
}

inline DimensionTable homology_table(const std::string& label, const AlgebraPtr& a, int n, int w_max,
                                     const std::function<std::size_t(int, int)>& f) {
  DimensionTable t(label, {{"n", n, n}, {"w", 0, w_max}});
  t.set_meta("algebra", a->name());
  for (int w = 0; w <= w_max; ++w) t.set({n, w}, static_cast<long long>(f(n, w)));
  return t;
}

}  // namespace report_detail

inline Report hh_report(const AlgebraPtr& a, int n, int w_max, const RunOptions& ro) {
  HochschildEngine e(a, ro.convention, ro.engine);
  Report r = report_detail::start("hh", ro);
  r.metadata["algebra"] = a->canonical_text();
  r.tables.push_back(report_detail::homology_table("HH", a, n, w_max, [&](int k, int w) { return e.hh_dim(k, w); }));
  return r;
}

inline Report hc_report(const AlgebraPtr& a, int n, int w_max, const RunOptions& ro) {
  HochschildEngine e(a, ro.convention, ro.engine);
  Report r = report_detail::start("hc", ro);
  r.metadata["algebra"] = a->canonical_text();
  r.tables.push_back(report_detail::homology_table("HC", a, n, w_max, [&](int k, int w) { return e.hc_dim(k, w); }));
  DimensionTable sbi("SBI exactness", {{"n", n, n}, {"w", 0, w_max}});
  bool ok = true;
  for (int w = 0; w <= w_max; ++w) {
    auto s = e.sbi_check(n, w);
    bool cell = s.exact_at_hc_n() && s.exact_at_hc_n2();
    ok = ok && cell;
    sbi.set({n, w}, cell ? 1 : 0);
  }
  r.tables.push_back(sbi);
  r.checks["sbi"] = ok;
  return r;
}

inline Report hodge_report(const AlgebraPtr& a, int n, int w_max, const RunOptions& ro) {
  HochschildEngine e(a, ro.convention, ro.engine);
  Report r = report_detail::start("hodge", ro);
  r.metadata["algebra"] = a->canonical_text();
  r.metadata["n"] = std::to_string(n);
  DimensionTable t("HH_n^(i)", {{"w", 0, w_max}, {"i", 0, std::max(n, 0)}});
  t.set_meta("n", std::to_string(n));
  bool agree = true;
  for (int w = 0; w <= w_max; ++w) {
    auto idem = e.hodge_dims(n, w, HodgeRoute::Idempotent);
    auto adams = e.hodge_dims(n, w, HodgeRoute::Adams);
    if (idem != adams) {
      agree = false;
      r.findings.push_back("ORACLE_DISAGREEMENT at w=" + std::to_string(w));
    }
    for (int i = 0; i <= std::max(n, 0); ++i)
      t.set({w, i}, i < static_cast<int>(idem.size()) ? static_cast<long long>(idem[i]) : 0);
  }
  r.tables.push_back(t);
  r.checks["idempotent_equals_adams"] = agree;
  return r;
}

inline Report kunneth_report(const AlgebraPtr& a, int n_max, int w_max, int j_max, const RunOptions& ro) {
  auto k = verify_kunneth(a, j_max, n_max, w_max, ro.convention, ro.engine);
  Report r = report_detail::start("kunneth", ro);
  r.metadata["algebra"] = a->canonical_text();
  for (const char* name : {"HH", "HC"}) {
    DimensionTable lhs(std::string(name) + "(A[t]) t-degree j", {{"n", 0, n_max}, {"w", 0, w_max}, {"j", 0, j_max}});
    DimensionTable bad(std::string(name) + " mismatch", {{"n", 0, n_max}, {"w", 0, w_max}, {"j", 0, j_max}});
    for (const auto& c : k.cells) {
      if (c.table != name) continue;
      lhs.set({c.n, c.w, c.j}, c.lhs);
      bad.set({c.n, c.w, c.j}, c.ok() ? 0 : 1);
      if (!c.ok())
        r.findings.push_back("MISMATCH " + c.table + " n=" + std::to_string(c.n) + " w=" + std::to_string(c.w) +
                             " j=" + std::to_string(c.j) + ": lhs " + std::to_string(c.lhs) + " rhs " +
                             std::to_string(c.rhs) + (c.error.empty() ? "" : " (" + c.error + ")"));
    }
    r.tables.push_back(lhs);
    r.tables.push_back(bad);
  }
  r.checks["kunneth"] = k.passed();
  return r;
}

inline Report cycles_report(const AlgebraPtr& a, int i_max, const RunOptions& ro) {
  auto c = verify_cusp_cycles(a, i_max, ro.engine);
  Report r = report_detail::start("cycles", ro);
  r.metadata["z"] = c.z;
  r.metadata["tz"] = c.tz;
  DimensionTable slices("HH_{2i-1} at weight 5+6(i-1)", {{"i", 1, i_max}});
  for (const auto& s : c.slices) {
    slices.set({s.i}, static_cast<long long>(s.dim));
    if (!s.representative.empty())
      r.findings.push_back("i=" + std::to_string(s.i) + " degree " + std::to_string(s.degree) + " weight " +
                           std::to_string(s.weight) + " representative " + s.representative);
  }
  r.tables.push_back(slices);
  DimensionTable att("sign attempts: b(w) vs tz, products nonzero", {{"convention", 0, 1}, {"mask", 0, 7}, {"field", 0, 1}});
  for (std::size_t k = 0; k < c.attempts.size(); ++k) {
    const auto& at = c.attempts[k];
    int conv = at.convention == Convention::Standard ? 0 : 1;
    int mask = static_cast<int>(k % 8);
    att.set({conv, mask, 0}, at.bw_vs_tz);
    att.set({conv, mask, 1}, at.success() ? 1 : 0);
  }
  r.tables.push_back(att);
  r.findings.push_back("b(w) for w = " + c.attempts.front().w + " is " + c.attempts.front().bw);
  r.checks["z_is_cycle"] = c.z_check.cycle;
  r.checks["z_nonzero"] = c.z_check.nonzero;
  r.checks["tz_nonzero"] = c.tz_check.nonzero;
  bool slices_nonzero = true;
  for (const auto& s : c.slices) slices_nonzero = slices_nonzero && s.dim > 0;
  r.checks["slices_nonzero"] = slices_nonzero;
  if (c.found) {
    r.findings.push_back("convention realizing z w^(i-1): " + std::string(to_string(c.found->convention)) + " w = " + c.found->w);
  } else {
    r.findings.push_back("NO_CONVENTION_FOUND: no sign choice on the three terms of w under either bar convention makes z w^(i-1) a nonzero cycle");
  }
  r.metadata["convention_found"] = c.found ? "yes" : "NO_CONVENTION_FOUND";
  return r;
}

inline Report tk_report(const SquarePtr& sq, int n_max, int w_max, const RunOptions& ro) {
  CdhFiber f(sq, ro.engine);
  Report r = report_detail::start("tk", ro);
  r.metadata["square"] = sq->name;
  r.metadata["kind"] = to_string(sq->kind);
  DimensionTable tk("TK_n", {{"n", 0, n_max}, {"w", 0, w_max}});
  for (int n = 0; n <= n_max; ++n)
    for (int w = 0; w <= w_max; ++w) tk.set({n, w}, static_cast<long long>(f.tk(n, w)));
  r.tables.push_back(tk);

  if (sq->kind == SquareKind::Resolution || sq->kind == SquareKind::Identity) {
    DimensionTable tor("TK_2 vs torsion of Omega^1", {{"w", 0, w_max}, {"path", 0, 1}});
    bool eq = true;
    for (int w = 0; w <= w_max; ++w) {
      auto a = static_cast<long long>(f.tk(2, w));
      auto b = static_cast<long long>(torsion_dims(*sq->nu, 1, w));
      tor.set({w, 0}, a);
      tor.set({w, 1}, b);
      eq = eq && a == b;
    }
    r.tables.push_back(tor);
    r.checks["tk2_equals_torsion"] = eq;
  }

  if (n_max >= 2) {
    auto fc = f.tk_formula_check(n_max, w_max);
    DimensionTable cells("TK_n^(i) vs HH_{n-1}^(i-1)", {{"n", 2, n_max}, {"i", 1, n_max - 1}, {"w", 0, w_max}, {"side", 0, 1}});
    for (const auto& c : fc.cells) {
      cells.set({c.n, c.i, c.w, 0}, static_cast<long long>(c.tk));
      cells.set({c.n, c.i, c.w, 1}, static_cast<long long>(c.hh));
    }
    cells.fill();
    r.tables.push_back(cells);
    r.findings.push_back(std::string("Hodge formula for i < n: cell-wise ") + (fc.cellwise_equal() ? "equal" : "NOT equal") +
                         ", aggregate " + (fc.aggregate_equal() ? "equal" : "NOT equal"));
  }

  auto nk = nk0_crosscheck(*sq, 6);
  if (nk.supported) {
    DimensionTable t("NK_0: Pic growth vs seminormal gap", {{"j", 1, 6}, {"side", 0, 1}});
    for (const auto& row : nk.rows) {
      t.set({row.j, 0}, static_cast<long long>(row.pic_growth));
      t.set({row.j, 1}, static_cast<long long>(row.formula));
    }
    t.set_meta("gap", std::to_string(nk.gap));
    r.tables.push_back(t);
    r.checks["nk0"] = nk.passed();
  } else {
    r.findings.push_back("nk0 crosscheck UNSUPPORTED: " + nk.reason);
  }
  return r;
}

inline Report pic_report(const SquarePtr& sq, int m, int j_max, const RunOptions& ro) {
  auto p = pic_conductor(*sq, m, j_max);
  Report r = report_detail::start("pic", ro);
  r.metadata["square"] = sq->name;
  DimensionTable t("Pic(A[s_1..s_m])/Pic(A) by s-degree", {{"j", 0, j_max}});
  for (int j = 0; j <= j_max; ++j) t.set({j}, static_cast<long long>(p.by_degree[j]));
  t.set_meta("m", std::to_string(m));
  t.set_meta("per_monomial", std::to_string(p.per_monomial));
  r.tables.push_back(t);
  return r;
}

inline Report cdh_omega_report(const SquarePtr& sq, int w_max, const RunOptions& ro) {
  Report r = report_detail::start("cdh-omega", ro);
  r.metadata["square"] = sq->name;
  DimensionTable t("H^q_cdh(Omega^p)", {{"p", 0, 2}, {"q", 0, 1}, {"w", 0, w_max}});
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 1; ++q)
      for (int w = 0; w <= w_max; ++w) t.set({p, q, w}, static_cast<long long>(cdh_omega(*sq, p, q, w)));
  r.tables.push_back(t);
  return r;
}

inline Report curve_report(const CurveFile& cf, int j_cutoff, const RunOptions& ro) {
  const auto& e = *cf.curve;
  Report r = report_detail::start("curve", ro);
  r.metadata["curve"] = cf.name + " " + e.str();
  r.metadata["discriminant"] = e.discriminant().str();
  DimensionTable pts("torsion order (0 = INFINITE)", {{"point", 0, static_cast<int>(cf.points.size()) - 1}});
  for (std::size_t i = 0; i < cf.points.size(); ++i) {
    auto t = is_torsion(e, cf.points[i]);
    pts.set({static_cast<int>(i)}, t.order.value_or(0));
    pts.set_meta("point " + std::to_string(i), cf.points[i].str());
  }
  if (!cf.points.empty()) r.tables.push_back(pts);
  Point p = cf.p(), q = cf.q();
  DivisorClass J = DivisorClass::of(e, {{1, p}, {-1, q}});
  DivisorClass L = DivisorClass::point(q);
  DimensionTable rr("h^p(J^r)", {{"r", -j_cutoff, j_cutoff}, {"p", 0, 1}});
  DimensionTable serre("Serre threshold N0 for J^r twisted by O(Q)", {{"r", -j_cutoff, j_cutoff}});
  for (int k = -j_cutoff; k <= j_cutoff; ++k) {
    auto c = rr_dims(e, scale(e, k, J));
    rr.set({k, 0}, c.h0);
    rr.set({k, 1}, c.h1);
    serre.set({k}, serre_twist_check(e, scale(e, k, J), L));
  }
  r.tables.push_back(rr);
  r.tables.push_back(serre);
  return r;
}

inline Report cuspbundle_report(const CurveFile& cf, int n_lo, int n_hi, int m_max, int j_cutoff, const RunOptions& ro) {
  auto b = cusp_bundle_tables(*cf.curve, cf.p(), cf.q(), n_lo, n_hi, m_max, j_cutoff);
  Report r = report_detail::start("cuspbundle", ro);
  r.metadata["curve"] = cf.name + " " + cf.curve->str();
  r.metadata["primary_twist"] = ro.twist_sign > 0 ? "+" : "-";
  r.tables = b.tables();
  r.findings = b.findings;
  r.checks["table_a_zero"] = b.k_regular;
  bool h0 = true;
  for (int j = 1; j <= j_cutoff; ++j) h0 = h0 && b.twisted.at({1, j, 0}) == j;
  r.checks["plus_twist_h0_equals_j"] = h0;
  r.checks["plus_twist_k0_nonzero"] = b.line_k.at({1, 0}) != 0;
  r.metadata["primary_k0"] = std::to_string(b.line_k.at({ro.twist_sign, 0}));
  r.metadata["primary_k-1"] = std::to_string(b.line_k.at({ro.twist_sign, -1}));
  r.metadata["twist_discrepancy"] = b.twist_discrepancy ? "FLAGGED" : "none";
  return r;
}

inline Report smoothness_report(const std::vector<CorpusEntry>& entries, const RunOptions& ro) {
  auto s = smoothness_suite(entries, ro.engine);
  Report r = report_detail::start("smoothness", ro);
  const int rows = static_cast<int>(s.rows.size());
  DimensionTable sum("members: jacobian smooth, d, witness i, witness w (-1 = NONE)",
                     {{"member", 0, std::max(rows - 1, 0)}, {"field", 0, 3}});
  for (int k = 0; k < rows; ++k) {
    const auto& row = s.rows[k];
    sum.set_meta("member " + std::to_string(k), row.name);
    sum.set({k, 0}, row.verdict == Smoothness::Smooth ? 1 : 0);
    sum.set({k, 1}, row.d);
    sum.set({k, 2}, row.witness ? row.witness->first : -1);
    sum.set({k, 3}, row.witness ? row.witness->second : -1);
    r.findings.push_back(row.name + ": " + to_string(row.verdict) + ", " +
                         (row.witness ? "witness i=" + std::to_string(row.witness->first) + " w=" + std::to_string(row.witness->second)
                                      : std::string("NONE")) +
                         " (w <= " + std::to_string(row.w_max) + ")");
  }
  r.tables.push_back(sum);
  for (const auto& row : s.rows) r.tables.push_back(row.tk);
  r.checks["implication"] = s.violations() == 0;
  r.checks["singular_members_witnessed"] = s.singular_members_witnessed();
  return r;
}

/// TK_n of the cusp next to two copies of the local Ktilde_n decomposition,
/// with J^a read as weight a.  Reported only; the two are not asserted equal.
inline Report cusp_comparison_report(const SquarePtr& cusp, int n_max, int w_max, const RunOptions& ro) {
  CdhFiber f(cusp, ro.engine);
  Report r = report_detail::start("cusp-comparison", ro);
  DimensionTable tk("TK_n(cusp)", {{"n", 0, n_max}, {"w", 0, w_max}});
  DimensionTable kk("2 x Ktilde_n(cusp), J^a in weight a", {{"n", 0, n_max}, {"w", 0, w_max}});
  for (int n = 0; n <= n_max; ++n) {
    for (int w = 0; w <= w_max; ++w) {
      tk.set({n, w}, static_cast<long long>(f.tk(n, w)));
      kk.set({n, w}, 0);
    }
    for (const auto& s : cusp_ktilde_local(n).items())
      if (s.j_power <= w_max) kk.set({n, s.j_power}, 2 * s.multiplicity);
  }
  r.tables.push_back(tk);
  r.tables.push_back(kk);
  bool same = tk.cells() == kk.cells();
  long long t_tot = tk.total(), k_tot = kk.total();
  r.findings.push_back(std::string("side by side: ") + (same ? "identical" : "different") + "; totals " +
                       std::to_string(t_tot) + " vs " + std::to_string(k_tot));
  return r;
}

}  // namespace khh
