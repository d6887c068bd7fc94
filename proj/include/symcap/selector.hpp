#pragma once

// Approximate action selector by spectral continuation.  The value sigma(H)
// is tracked as the continuous spectral branch of tau -> tau H starting at
// sigma(0) = 0, pinned to max(tau H) while tau H is a certified admissible
// simple Hamiltonian (where the selector value is forced), and constrained
// from above by E^+ and by Hofer norms of certified displacers.  Branch
// decisions that cannot be made unambiguously are reported as such, never
// silently resolved.

#include "symcap/common.hpp"
#include "symcap/hamiltonian.hpp"
#include "symcap/orbits.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace symcap {

// Spectra of the ray tau * H, plus the structural facts the continuation
// uses for pinning.
struct SpectrumSource {
  std::function<ActionSpectrum(double)> at;  // spectrum of tau * H
  double max_value = 0.0;                    // max H (0 normalized minimum)
  // sup of tau such that tau*H has no non-constant 1-periodic orbit; 0 when
  // unknown.  For radial H this is 1 / sup|h'|.
  double admissible_until = 0.0;
  bool simple = false;  // classify_simple verdict for H itself
  bool oracle = false;  // spectra are closed-form certified
};

inline SpectrumSource radial_source(const HamPtr& h, double cluster_tol = 1e-7) {
  auto curve = h->radial_profile();
  require(curve != nullptr, "radial source needs a radial Hamiltonian");
  SpectrumSource src;
  auto rep = classify_simple(*h);
  src.simple = rep.is_simple;
  src.max_value = rep.max_value;
  auto adm = is_admissible_radial(*curve);
  src.admissible_until =
      adm.sup_slope > 0.0 ? 1.0 / adm.sup_slope
                          : std::numeric_limits<double>::infinity();
  if (auto* pc = dynamic_cast<const PiecewiseCubic*>(curve.get())) {
    PiecewiseCubic base = *pc;
    src.oracle = true;
    src.at = [base, cluster_tol](double tau) {
      return radial_spectrum_oracle(scaled_profile(base, tau), cluster_tol);
    };
  } else {
    // dense-scan oracle on the scaled generic curve
    auto generic = curve;
    src.at = [generic, cluster_tol](double tau) {
      struct Scaled final : Curve1D {
        std::shared_ptr<const Curve1D> c;
        double f;
        double value(double s) const override { return f * c->value(s); }
        double deriv(double s) const override { return f * c->deriv(s); }
        double second(double s) const override { return f * c->second(s); }
        double support_end() const override { return c->support_end(); }
      };
      Scaled sc;
      sc.c = generic;
      sc.f = tau;
      return radial_spectrum_oracle(sc, cluster_tol);
    };
  }
  return src;
}

inline SpectrumSource search_source(const HamPtr& h,
                                    OrbitSearchOptions opts = {}) {
  SpectrumSource src;
  if (h->autonomous()) {
    auto rep = classify_simple(*h);
    src.simple = rep.is_simple;
    src.max_value = rep.max_value;
  } else {
    src.max_value = e_plus(*h);
  }
  HamPtr held = h;
  src.at = [held, opts](double tau) {
    if (tau == 0.0) {
      ActionSpectrum sp;
      SpectrumEntry e;
      e.action = 0.0;
      sp.entries.push_back(e);
      return sp;
    }
    return spectrum(*scale(tau, held), opts);
  };
  return src;
}

inline SpectrumSource make_source(const HamPtr& h) {
  if (h->radial_profile()) return radial_source(h);
  return search_source(h);
}

// upper bound on sigma with a provenance label, e.g. the Hofer norm of a
// Hamiltonian whose time-1 map was certified to displace supp H
struct SelectorCap {
  double value;
  std::string label;
};

struct SelectorOptions {
  int coarse_steps = 48;
  double min_step = 1e-6;
  double match_frac = 0.45;   // accepted move as a fraction of the local gap
  double spectral_tol = 1e-9;
  double cluster_tol = 1e-7;
  std::vector<SelectorCap> caps;
};

enum class SelectorEventCode { Pin, Match, CapSwitch, TieLookahead, Ambiguous };

inline const char* to_string(SelectorEventCode c) {
  switch (c) {
    case SelectorEventCode::Pin: return "pin";
    case SelectorEventCode::Match: return "match";
    case SelectorEventCode::CapSwitch: return "cap-switch";
    case SelectorEventCode::TieLookahead: return "tie-lookahead";
    case SelectorEventCode::Ambiguous: return "ambiguous";
  }
  return "?";
}

struct SelectorTracePoint {
  double tau = 0.0;
  std::vector<double> spectrum;
  double selected = 0.0;
  SelectorEventCode event = SelectorEventCode::Match;
  std::string note;
};

struct SelectorTrace {
  std::vector<SelectorTracePoint> points;
};

struct SelectorResult {
  double value = 0.0;
  bool ambiguous = false;
  double candidate_lo = 0.0, candidate_hi = 0.0;  // set when ambiguous
  SelectorTrace trace;

  double upper() const { return ambiguous ? candidate_hi : value; }
  double lower() const { return ambiguous ? candidate_lo : value; }
};

namespace detail {

inline double effective_cap(const SelectorOptions& opts, double tau,
                            double e_plus_h, std::string* label = nullptr) {
  double cap = tau * e_plus_h + 1e-12;
  if (label) *label = "E+";
  for (const auto& c : opts.caps)
    if (c.value < cap) {
      cap = c.value;
      if (label) *label = c.label;
    }
  return cap;
}

enum class ForkOutcome { Survived, Dead, Unknown };

struct ForkResult {
  ForkOutcome outcome = ForkOutcome::Unknown;
  double endpoint = 0.0;
};

// Follow one branch from (tau, value) to tau = 1 with the caps as hard
// filters.  A branch that would need to leave the cap window cannot be the
// selector (Dead); losing the branch is Unknown.
inline ForkResult follow_branch(const SpectrumSource& src, double e_plus_h,
                                const SelectorOptions& opts, double tau,
                                double value, double coarse) {
  double step = coarse;
  int guard = 0;
  while (tau < 1.0 - 1e-15 && guard++ < 100000) {
    double tnext = std::min(1.0, tau + step);
    ActionSpectrum sp = src.at(tnext);
    double cap = effective_cap(opts, tnext, e_plus_h);
    if (value > cap + opts.spectral_tol) return {ForkOutcome::Dead, value};
    std::vector<double> vals;
    for (const auto& e : sp.entries)
      if (e.action <= cap + opts.spectral_tol) vals.push_back(e.action);
    if (vals.empty()) return {ForkOutcome::Dead, value};
    std::sort(vals.begin(), vals.end(), [&](double a, double b) {
      return std::fabs(a - value) < std::fabs(b - value);
    });
    double best = vals[0];
    double sep = vals.size() > 1 ? std::fabs(vals[1] - best)
                                 : std::numeric_limits<double>::infinity();
    double move = std::fabs(best - value);
    double budget = step * (e_plus_h + src.max_value) + 10.0 * opts.spectral_tol;
    if (move <= std::min(budget, opts.match_frac * sep)) {
      value = best;
      tau = tnext;
      step = std::min(step * 2.0, coarse);
      continue;
    }
    if (step > opts.min_step) {
      step *= 0.5;
      continue;
    }
    return {ForkOutcome::Unknown, value};
  }
  // the branch must end at (or above) cap-compliant territory
  double final_cap = effective_cap(opts, 1.0, e_plus_h);
  if (value > final_cap + opts.spectral_tol) return {ForkOutcome::Dead, value};
  return {ForkOutcome::Survived, value};
}

}  // namespace detail

// Continuation along tau -> tau H.  `e_plus_h` is E^+(H); E^+(tau H) scales
// linearly for tau >= 0.
inline SelectorResult select_from_source(const SpectrumSource& src,
                                         double e_plus_h,
                                         const SelectorOptions& opts = {}) {
  SelectorResult out;

  auto record = [&](double tau, const ActionSpectrum& sp, double sel,
                    SelectorEventCode code, const std::string& note = "") {
    SelectorTracePoint pt;
    pt.tau = tau;
    pt.spectrum = sp.values();
    pt.selected = sel;
    pt.event = code;
    pt.note = note;
    out.trace.points.push_back(pt);
  };

  if (src.max_value == 0.0) {  // H == 0
    ActionSpectrum sp = src.at(1.0);
    record(1.0, sp, 0.0, SelectorEventCode::Pin, "zero Hamiltonian");
    out.value = 0.0;
    return out;
  }

  // pinned segment: tau H certified admissible simple => sigma = tau max H
  double tau0 = std::min(1.0, src.simple ? src.admissible_until * (1.0 - 1e-12)
                                         : 0.0);
  double current = tau0 * src.max_value;
  {
    ActionSpectrum sp0 = src.at(tau0);
    record(tau0, sp0, current, SelectorEventCode::Pin,
           tau0 >= 1.0 ? "admissible simple on the whole ray"
                       : "admissible simple up to this tau");
  }
  if (tau0 >= 1.0) {
    out.value = src.max_value;
    return out;
  }

  // continuation with nearest-branch matching
  double tau = tau0;
  double step = (1.0 - tau0) / opts.coarse_steps;
  int guard = 0;
  while (tau < 1.0 - 1e-15 && guard++ < 100000) {
    double tnext = std::min(1.0, tau + step);
    ActionSpectrum sp = src.at(tnext);
    if (sp.entries.empty()) {
      out.ambiguous = true;
      record(tnext, sp, current, SelectorEventCode::Ambiguous, "empty spectrum");
      out.candidate_lo = out.candidate_hi = current;
      out.value = current;
      return out;
    }
    std::string cap_label;
    double cap = detail::effective_cap(opts, tnext, e_plus_h, &cap_label);

    // candidates below the active cap
    std::vector<double> vals;
    for (const auto& e : sp.entries)
      if (e.action <= cap + opts.spectral_tol) vals.push_back(e.action);
    if (vals.empty()) {
      out.ambiguous = true;
      record(tnext, sp, current, SelectorEventCode::Ambiguous,
             "no spectrum value below cap " + cap_label);
      out.candidate_lo = out.candidate_hi = current;
      out.value = current;
      return out;
    }
    std::sort(vals.begin(), vals.end(),
              [&](double a, double b) {
                return std::fabs(a - current) < std::fabs(b - current);
              });
    double best = vals[0];
    double sep = vals.size() > 1 ? std::fabs(vals[1] - best)
                                 : std::numeric_limits<double>::infinity();
    double move = std::fabs(best - current);

    double move_budget =
        step * (e_plus_h + src.max_value) + 10.0 * opts.spectral_tol;
    // the tracked branch leaves the cap window when its unfiltered
    // continuation sits above the cap
    auto raw_nearest = sp.nearest(current);
    bool cap_hit = current > cap + opts.spectral_tol ||
                   (raw_nearest && *raw_nearest > cap + opts.spectral_tol &&
                    std::fabs(*raw_nearest - current) <= move_budget &&
                    std::fabs(*raw_nearest - current) < move);
    if (cap_hit) {
      // the tracked branch left the admissible window: switch down to the
      // nearest value below the cap and record why
      current = best;
      tau = tnext;
      record(tnext, sp, current, SelectorEventCode::CapSwitch,
             "branch exceeded cap " + cap_label);
      continue;
    }

    if (move <= std::min(move_budget, opts.match_frac * sep)) {
      current = best;
      tau = tnext;
      record(tnext, sp, current, SelectorEventCode::Match);
      // grow the step back toward the coarse grid
      step = std::min(step * 2.0, (1.0 - tau0) / opts.coarse_steps);
      continue;
    }
    // ambiguous or too fast: halve the step
    if (step > opts.min_step) {
      step *= 0.5;
      continue;
    }
    // crossing at the resolution limit: fork the nearest branches forward
    // and keep one only if the caps kill every alternative
    if (vals.size() > 1) {
      double coarse = (1.0 - tau0) / opts.coarse_steps;
      auto fa = detail::follow_branch(src, e_plus_h, opts, tnext, vals[0], coarse);
      auto fb = detail::follow_branch(src, e_plus_h, opts, tnext, vals[1], coarse);
      const bool a_ok = fa.outcome == detail::ForkOutcome::Survived;
      const bool b_ok = fb.outcome == detail::ForkOutcome::Survived;
      const bool a_dead = fa.outcome == detail::ForkOutcome::Dead;
      const bool b_dead = fb.outcome == detail::ForkOutcome::Dead;
      double chosen = 0.0;
      bool resolved = false;
      if (a_ok && (b_dead || (b_ok && std::fabs(fa.endpoint - fb.endpoint) <=
                                          1e-6))) {
        chosen = vals[0];
        resolved = true;
      } else if (b_ok && a_dead) {
        chosen = vals[1];
        resolved = true;
      }
      if (resolved) {
        current = chosen;
        tau = tnext;
        record(tnext, sp, current, SelectorEventCode::TieLookahead,
               "crossing resolved: the alternative branch violates a cap "
               "downstream");
        step = coarse;
        continue;
      }
    }
    // unresolvable crossing: report both nearest candidates
    out.ambiguous = true;
    out.candidate_lo = std::min(best, vals.size() > 1 ? vals[1] : best);
    out.candidate_hi = std::max(best, vals.size() > 1 ? vals[1] : best);
    record(tnext, sp, current, SelectorEventCode::Ambiguous,
           "branch crossing unresolved at min step");
    out.value = current;
    return out;
  }
  out.value = current;
  return out;
}

inline SelectorResult select(const HamPtr& h, const SelectorOptions& opts = {}) {
  SpectrumSource src = make_source(h);
  return select_from_source(src, e_plus(*h), opts);
}

// --- axiom verification -----------------------------------------------------

struct AxiomCheck {
  std::string axiom;     // spectrality / positivity / normalization /
                         // energy-bound / continuity / composition-bound
  std::string instance;
  std::string status;    // pass / fail / inconclusive
  double margin = 0.0;
};

struct AxiomReport {
  std::vector<AxiomCheck> rows;
  int passes = 0, failures = 0, inconclusive = 0;

  void add(AxiomCheck c) {
    if (c.status == "pass")
      ++passes;
    else if (c.status == "fail")
      ++failures;
    else
      ++inconclusive;
    rows.push_back(std::move(c));
  }
};

// Named suite instance: a radial Hamiltonian plus its metadata.
struct AxiomInstance {
  std::string name;
  HamPtr h;
  bool admissible_simple = false;
};

// Axiom battery over a suite of radial Hamiltonians.  Spectral membership,
// positivity on simple nonzero inputs, the normalization sigma = max H on
// certified admissible simple inputs, the E^+ bound, a sampled C^0
// continuity probe on pairs, and the composition bound
// sigma(H # K) <= sigma(H) + E^+(K) on commuting (radial) pairs where
// H # K = H + K pointwise.
inline AxiomReport verify_axioms(const std::vector<AxiomInstance>& suite,
                                 const SelectorOptions& opts = {},
                                 Rng* rng = nullptr) {
  AxiomReport rep;
  std::vector<SelectorResult> results(suite.size());
  std::vector<double> eplus(suite.size());

  for (std::size_t i = 0; i < suite.size(); ++i) {
    eplus[i] = e_plus(*suite[i].h);
    results[i] = select(suite[i].h, opts);
  }

  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& inst = suite[i];
    const auto& res = results[i];
    if (res.ambiguous) {
      rep.add({"spectrality", inst.name, "inconclusive", 0.0});
      continue;
    }
    // spectrality: membership in the tau = 1 spectrum
    ActionSpectrum sp = make_source(inst.h).at(1.0);
    auto nearest = sp.nearest(res.value);
    double dist = nearest ? std::fabs(*nearest - res.value)
                          : std::numeric_limits<double>::infinity();
    rep.add({"spectrality", inst.name, dist <= 1e-6 ? "pass" : "fail", dist});

    auto simple = classify_simple(*inst.h);
    if (simple.is_simple && simple.max_value > 0.0)
      rep.add({"positivity", inst.name, res.value > 0.0 ? "pass" : "fail",
               res.value});
    if (inst.admissible_simple) {
      double err = std::fabs(res.value - simple.max_value);
      rep.add({"normalization", inst.name, err <= 1e-3 ? "pass" : "fail", err});
    }
    double slack = eplus[i] - res.value;
    rep.add({"energy-bound", inst.name, slack >= -1e-9 ? "pass" : "fail",
             slack});
  }

  // continuity probe on consecutive pairs: |sigma(H) - sigma(H')| bounded by
  // the C^0 distance integral
  for (std::size_t i = 0; i + 1 < suite.size(); ++i) {
    if (results[i].ambiguous || results[i + 1].ambiguous) {
      rep.add({"continuity", suite[i].name + "/" + suite[i + 1].name,
               "inconclusive", 0.0});
      continue;
    }
    double c0 = 0.0;  // integral of max_x |H - H'| dt, sampled
    for (int j = 0; j <= 8; ++j) {
      double t = j / 8.0;
      // coarse bound via max of |H| + |H'| on a shared grid
      double m = 0.0;
      int d = suite[i].h->dim();
      Rng local(7 + j);
      for (int k = 0; k < 200; ++k) {
        Vec x = local.ball_point(
            d, std::max(suite[i].h->support_radius(),
                        suite[i + 1].h->support_radius()));
        m = std::max(m, std::fabs(suite[i].h->value(t, x) -
                                  suite[i + 1].h->value(t, x)));
      }
      c0 = std::max(c0, m);
    }
    double diff = std::fabs(results[i].value - results[i + 1].value);
    rep.add({"continuity", suite[i].name + "/" + suite[i + 1].name,
             diff <= c0 + 1e-6 ? "pass" : "fail", c0 + 1e-6 - diff});
  }

  // composition bound on radial pairs: flows commute, so H # K = H + K
  // pointwise; cross-checked on samples before using the sum descriptor
  Rng fallback(2024);
  Rng& gen = rng ? *rng : fallback;
  for (std::size_t i = 0; i + 1 < suite.size(); i += 2) {
    const auto& hh = suite[i].h;
    const auto& kk = suite[i + 1].h;
    auto ph =
        std::dynamic_pointer_cast<const PiecewiseCubic>(hh->radial_profile());
    auto pk =
        std::dynamic_pointer_cast<const PiecewiseCubic>(kk->radial_profile());
    if (!ph || !pk) continue;
    auto sharp = compose_sharp(hh, kk);
    auto summed = make_radial(hh->dim(), add_profiles(*ph, *pk));
    double worst = 0.0;
    for (int k = 0; k < 12; ++k) {
      Vec x = gen.ball_point(hh->dim(), std::max(hh->support_radius(),
                                                 kk->support_radius()));
      double t = gen.uniform(0.0, 1.0);
      worst = std::max(worst,
                       std::fabs(sharp->value(t, x) - summed->value(t, x)));
    }
    std::string pair_name = suite[i].name + "#" + suite[i + 1].name;
    if (worst > 1e-7) {
      rep.add({"composition-bound", pair_name, "fail", worst});
      continue;
    }
    auto sigma_sharp = select(summed, opts);
    if (sigma_sharp.ambiguous || results[i].ambiguous) {
      rep.add({"composition-bound", pair_name, "inconclusive", 0.0});
      continue;
    }
    double margin = results[i].value + eplus[i + 1] - sigma_sharp.value;
    rep.add({"composition-bound", pair_name, margin >= -1e-9 ? "pass" : "fail",
             margin});
  }
  return rep;
}

// --- displacement bound ------------------------------------------------------

// Time profiles that confine all of the motion to one half of [0,1]; with
// H running late and K early, (tau H) # K = tau H + K pointwise and sharp
// products become cheap sums.
inline TimeProfile early_half_profile() {
  auto s = [](double u) { return u * u * (3.0 - 2.0 * u); };
  auto sp = [](double u) { return 6.0 * u * (1.0 - u); };
  return {[s](double t) { return t < 0.5 ? s(2.0 * t) : 1.0; },
          [sp](double t) { return t < 0.5 ? 2.0 * sp(2.0 * t) : 0.0; },
          "early-half"};
}
inline TimeProfile late_half_profile() {
  auto s = [](double u) { return u * u * (3.0 - 2.0 * u); };
  auto sp = [](double u) { return 6.0 * u * (1.0 - u); };
  return {[s](double t) { return t <= 0.5 ? 0.0 : s(2.0 * t - 1.0); },
          [sp](double t) { return t <= 0.5 ? 0.0 : 2.0 * sp(2.0 * t - 1.0); },
          "late-half"};
}

struct DisplacedInvarianceReport {
  bool precondition_ok = false;      // phi_K certified to displace supp H
  double displacement_distance = 0.0;
  double sharp_vs_sum = 0.0;         // pointwise check of (tau H)#K = tau H + K
  bool orbits_avoid_support = false; // over the sampled tau values
  double spectrum_deviation = 0.0;   // P(tau H # K) vs P(K), action Hausdorff
  double sigma_h = 0.0;
  double hofer_k = 0.0;
  double margin = 0.0;  // |K| - sigma(H)
  bool sigma_ambiguous = false;
  bool pass = false;
};

// Verifies the mechanism and the conclusion of the displacement bound:
// when phi_K displaces supp H, no 1-periodic orbit of tau H # K meets
// supp H, the spectra agree with those of K, and sigma(H) <= |K|.
inline DisplacedInvarianceReport displaced_invariance_check(
    const HamPtr& h, const HamPtr& k, const SampleCloud& supp_h_cloud,
    double margin, const SelectorOptions& sel_opts = {},
    const OrbitSearchOptions& search_opts = {}) {
  DisplacedInvarianceReport rep;
  auto disp = displacement_check(*k, supp_h_cloud, margin);
  rep.precondition_ok = disp.displaced;
  rep.displacement_distance = disp.min_distance;
  if (!rep.precondition_ok) return rep;

  auto h_late = reparametrize(h, late_half_profile());
  auto k_early = reparametrize(k, early_half_profile());

  Rng rng(424242);
  double r_h = h->support_radius();
  rep.orbits_avoid_support = true;
  ActionSpectrum base;
  for (double tau : {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}) {
    HamPtr e_tau = tau == 0.0
                       ? k_early
                       : sum(scale(tau, h_late), k_early);
    if (tau > 0.0) {
      auto sharp = compose_sharp(scale(tau, h_late), k_early);
      for (int i = 0; i < 8; ++i) {
        Vec x = rng.ball_point(h->dim(), std::max(r_h, k->support_radius()));
        double t = rng.uniform(0.0, 1.0);
        rep.sharp_vs_sum = std::max(
            rep.sharp_vs_sum,
            std::fabs(sharp->value(t, x) - e_tau->value(t, x)));
      }
    }
    auto found = find_orbits(*e_tau, search_opts);
    ActionSpectrum sp;
    {
      std::vector<SpectrumEntry> raw;
      for (const auto& o : found.orbits) {
        SpectrumEntry e;
        e.action = o.action;
        raw.push_back(e);
        if (tau > 0.0 && !o.constant) {
          for (int j = 0; j < 16; ++j) {
            Vec x = o.loop.evaluate(j / 16.0);
            if (x.norm() < r_h) rep.orbits_avoid_support = false;
          }
        }
      }
      sp = cluster_actions(std::move(raw), sel_opts.cluster_tol);
    }
    if (tau == 0.0) {
      base = sp;
    } else {
      for (const auto& e : sp.entries) {
        auto n = base.nearest(e.action);
        if (n)
          rep.spectrum_deviation =
              std::max(rep.spectrum_deviation, std::fabs(*n - e.action));
        else
          rep.spectrum_deviation = std::numeric_limits<double>::infinity();
      }
    }
  }

  auto sigma = select(h, sel_opts);
  rep.sigma_ambiguous = sigma.ambiguous;
  rep.sigma_h = sigma.upper();
  rep.hofer_k = hofer_norm(*k);
  rep.margin = rep.hofer_k - rep.sigma_h;
  rep.pass = rep.precondition_ok && !rep.sigma_ambiguous &&
             rep.margin >= -1e-6 && rep.orbits_avoid_support;
  return rep;
}

// --- reparametrization invariance --------------------------------------------

struct ReparametrizationReport {
  double sigma_base = 0.0;
  bool base_ambiguous = false;
  // spectra along the deformation lambda_s = (1-s) id + s lambda stay equal
  double max_spectrum_deviation = 0.0;
  double membership_distance = 0.0;  // sigma_base vs the spectrum at lambda
  bool pass = false;
};

// sigma(H^lambda) = sigma(H): the spectra are constant along the linear
// deformation of time profiles and sigma moves continuously inside a fixed
// discrete set.  The deformation spectra are recomputed by orbit search at
// each sampled stage.
inline ReparametrizationReport reparametrization_invariance(
    const HamPtr& h, const TimeProfile& lambda,
    const SelectorOptions& sel_opts = {},
    OrbitSearchOptions search_opts = {}) {
  ReparametrizationReport rep;
  auto sigma = select(h, sel_opts);
  rep.base_ambiguous = sigma.ambiguous;
  rep.sigma_base = sigma.value;
  if (rep.base_ambiguous) return rep;

  ActionSpectrum base_sp;
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    TimeProfile mix{
        [s, &lambda](double t) { return (1.0 - s) * t + s * lambda.value(t); },
        [s, &lambda](double t) { return (1.0 - s) + s * lambda.deriv(t); },
        "mix"};
    auto hs = reparametrize(h, mix);
    auto sp = spectrum(*hs, search_opts);
    if (s == 0.0) {
      base_sp = sp;
      continue;
    }
    for (const auto& e : sp.entries) {
      auto n = base_sp.nearest(e.action);
      rep.max_spectrum_deviation = std::max(
          rep.max_spectrum_deviation,
          n ? std::fabs(*n - e.action) : std::numeric_limits<double>::infinity());
    }
    for (const auto& e : base_sp.entries) {
      auto n = sp.nearest(e.action);
      rep.max_spectrum_deviation = std::max(
          rep.max_spectrum_deviation,
          n ? std::fabs(*n - e.action) : std::numeric_limits<double>::infinity());
    }
    if (s == 1.0) {
      auto n = sp.nearest(rep.sigma_base);
      rep.membership_distance =
          n ? std::fabs(*n - rep.sigma_base)
            : std::numeric_limits<double>::infinity();
    }
  }
  rep.pass = rep.max_spectrum_deviation <= 1e-6 &&
             rep.membership_distance <= 1e-6;
  return rep;
}

}  // namespace symcap
