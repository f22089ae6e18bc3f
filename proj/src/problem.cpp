#include "starpde/problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace starpde {

double ProblemSpec::ham_eff(int edge, double t, double x, double u, double p) const {
  double h = hamiltonian[edge].ham(x, u, p);
  if (forcing) h -= (*forcing)[edge].forcing(t, x);
  return h;
}

void ProblemSpec::check_shape() const {
  const int I = junction.num_edges;
  auto expect = [&](std::size_t got, const char* what) {
    if (static_cast<int>(got) != I)
      throw ConfigError(std::string(what) + " must have one entry per edge");
  };
  expect(sigma.size(), "sigma");
  expect(hamiltonian.size(), "hamiltonian");
  expect(initial.size(), "initial");
  expect(outer_boundary.size(), "outer_boundary");
  if (forcing) expect(forcing->size(), "forcing");
  expect(envelope.root_B.size(), "envelope.root_B");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (envelope.m < 2.0) throw ConfigError("envelope.m must be >= 2");
  if (!(envelope.nu_lower > 0.0) || envelope.nu_upper < envelope.nu_lower)
    throw ConfigError("envelope requires 0 < nu_lower <= nu_upper");
  if (!(envelope.c_h > 0.0)) throw ConfigError("envelope.c_h must be positive");
}

// ---------------------------------------------------------------------------
// Compatibility (P)(v)
// ---------------------------------------------------------------------------

CompatibilityReport compatibility_check(const ProblemSpec& p, double tol) {
  CompatibilityReport rep;
  const int I = p.num_edges();
  rep.g0 = p.initial[0].initial(0.0);
  for (int i = 1; i < I; ++i)
    rep.vertex_mismatch = std::max(rep.vertex_mismatch, std::abs(p.initial[i].initial(0.0) - rep.g0));

  rep.g0_gradient.resize(I);
  for (int i = 0; i < I; ++i) {
    double h = p.junction.lengths[i] / 1024.0;
    const Coefficient& g = p.initial[i];
    rep.g0_gradient[i] = (-3.0 * g.initial(0.0) + 4.0 * g.initial(h) - g.initial(2.0 * h)) / (2.0 * h);
  }
  rep.f_residual = std::abs(p.vertex_condition.vertex(rep.g0, rep.g0_gradient));

  rep.outer_residuals.resize(I);
  for (int i = 0; i < I; ++i) {
    double a = p.junction.lengths[i];
    rep.outer_residuals[i] = std::abs(p.initial[i].initial(a) - p.outer_boundary[i].outer(0.0));
  }

  rep.ok = rep.f_residual <= tol && rep.vertex_mismatch <= tol;
  for (double r : rep.outer_residuals) rep.ok = rep.ok && r <= tol;
  return rep;
}

std::string CompatibilityReport::to_text() const {
  std::ostringstream os;
  os << "compatibility: " << (ok ? "OK" : "VIOLATED") << "\n";
  os << "  |F(g(0), dx g(0))| = " << f_residual << "\n";
  os << "  vertex continuity of g: max mismatch = " << vertex_mismatch << "\n";
  for (std::size_t i = 0; i < outer_residuals.size(); ++i)
    os << "  |g_" << i + 1 << "(a) - phi_" << i + 1 << "(0)| = " << outer_residuals[i] << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Assumption validator
// ---------------------------------------------------------------------------

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Unchecked: return "UNCHECKED";
    case Verdict::SpotChecked: return "SPOT-CHECKED";
  }
  return "?";
}

bool ValidationReport::has_fail() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const AssumptionCheck& c) { return c.verdict == Verdict::Fail; });
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "assumption checks (box: x in [0,a_i], |u| <= " << plan.u_max << ", |p| <= " << plan.p_max
     << ", seed " << plan.seed << "):\n";
  for (const auto& c : checks) {
    os << "  [" << verdict_name(c.verdict) << "] " << c.id << " " << c.description;
    if (c.verdict == Verdict::Fail) os << "\n      witness: " << c.witness;
    os << "\n";
  }
  return os.str();
}

namespace {

std::string point_str(int edge, double x, double u, double q) {
  std::ostringstream os;
  os << "edge " << edge + 1 << ", x=" << x << ", u=" << u << ", p=" << q;
  return os.str();
}

struct PointSampler {
  const ProblemSpec& p;
  const SamplingPlan& plan;

  template <typename Fn>
  void for_each_xup(Fn&& fn) const {
    for (int e = 0; e < p.num_edges(); ++e) {
      double a = p.junction.lengths[e];
      for (int ix = 0; ix < plan.n_x; ++ix) {
        double x = a * ix / (plan.n_x - 1);
        for (int iu = 0; iu < plan.n_u; ++iu) {
          double u = -plan.u_max + 2.0 * plan.u_max * iu / (plan.n_u - 1);
          for (int ip = 0; ip < plan.n_p; ++ip) {
            double q = -plan.p_max + 2.0 * plan.p_max * ip / (plan.n_p - 1);
            try {
              fn(e, x, u, q);
            } catch (const EvalError& err) {
              throw EvalError(point_str(e, x, u, q) + ": " + err.what());
            }
          }
        }
      }
    }
  }
};

// Monotonicity of F on ordered pairs per the componentwise ordering.
struct VertexMonotonicity {
  double worst_u_increase = -1e300;  // max F(u') - F(u) over u < u'
  double worst_p_drop = -1e300;      // max F(q) - F(q') over q < q'
  double min_p_gain = 1e300;         // min F(q') - F(q) over q < q'
  std::string witness_u, witness_p;
};

VertexMonotonicity probe_vertex_monotonicity(const ProblemSpec& p, const SamplingPlan& plan) {
  VertexMonotonicity out;
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> uu(-plan.u_max, plan.u_max);
  std::uniform_real_distribution<double> up(-plan.p_max, plan.p_max);
  std::uniform_real_distribution<double> gap(1e-3, 1.0);
  const int I = p.num_edges();
  std::vector<double> q(I), q2(I);
  for (int s = 0; s < plan.pair_samples; ++s) {
    for (int i = 0; i < I; ++i) q[i] = up(rng);
    double u1 = uu(rng);
    double u2 = u1 + gap(rng);
    double fu1 = p.vertex_condition.vertex(u1, q);
    double fu2 = p.vertex_condition.vertex(u2, q);
    if (fu2 - fu1 > out.worst_u_increase) {
      out.worst_u_increase = fu2 - fu1;
      std::ostringstream os;
      os << "u: " << u1 << " -> " << u2 << " gives F: " << fu1 << " -> " << fu2;
      out.witness_u = os.str();
    }
    q2 = q;
    for (int i = 0; i < I; ++i)
      if (rng() % 2 == 0) q2[i] += gap(rng);
    q2[static_cast<std::size_t>(rng() % I)] += gap(rng);  // at least one strict
    double fq1 = p.vertex_condition.vertex(u1, q);
    double fq2 = p.vertex_condition.vertex(u1, q2);
    if (fq1 - fq2 > out.worst_p_drop) {
      out.worst_p_drop = fq1 - fq2;
      std::ostringstream os;
      os << "p-vector raised componentwise gives F: " << fq1 << " -> " << fq2 << " at u=" << u1;
      out.witness_p = os.str();
    }
    out.min_p_gain = std::min(out.min_p_gain, fq2 - fq1);
  }
  return out;
}

}  // namespace

ValidationReport validate_assumptions(const ProblemSpec& p, const SamplingPlan& plan) {
  p.check_shape();
  ValidationReport rep;
  rep.plan = plan;
  const GrowthEnvelope& env = p.envelope;
  PointSampler sampler{p, plan};
  // evaluation failures during sampling are verdicts, not exceptions
  auto add = [&](AssumptionCheck c) { rep.checks.push_back(std::move(c)); };
  auto guarded = [](AssumptionCheck& c, auto&& body) {
    try {
      body();
    } catch (const EvalError& e) {
      c.verdict = Verdict::Fail;
      c.witness = std::string("evaluation error: ") + e.what();
    }
  };

  // (P)(i) / (E)(i): monotone structure of F plus the root pair.
  {
    AssumptionCheck c;
    c.id = "P.i";
    guarded(c, [&] {
    double f_scale = 1.0 + std::abs(p.vertex_condition.vertex(env.root_b, env.root_B));
    VertexMonotonicity m = probe_vertex_monotonicity(p, plan);
    double root_res = std::abs(p.vertex_condition.vertex(env.root_b, env.root_B));
    double tol = plan.tol * f_scale;
    bool dec_u = m.worst_u_increase < 0.0;
    bool noninc_u = m.worst_u_increase <= tol;
    bool nondec_p = m.worst_p_drop <= tol;
    bool inc_p = m.min_p_gain > 0.0;
    bool root_ok = root_res <= tol;
    bool branch_a = dec_u && nondec_p && root_ok;
    bool branch_b = noninc_u && inc_p && root_ok;
    if (branch_a && branch_b)
      c.description = "F monotone (both branches), F(b,B)=0";
    else if (branch_a)
      c.description = "F decreasing in u, nondecreasing in p, F(b,B)=0";
    else if (branch_b)
      c.description = "F Kirchhoff branch: nonincreasing in u, increasing in p, F(b,B)=0";
    else
      c.description = "F satisfies neither monotonicity branch";
    c.verdict = (branch_a || branch_b) ? Verdict::Pass : Verdict::Fail;
    c.measured = std::max(m.worst_u_increase, m.worst_p_drop);
    c.bound = tol;
    if (c.verdict == Verdict::Fail) {
      if (!root_ok)
        c.witness = "|F(b,B)| = " + std::to_string(root_res);
      else if (!noninc_u)
        c.witness = m.witness_u;
      else
        c.witness = m.witness_p;
    }
    });
    add(std::move(c));
  }

  // (P)(ii): uniform ellipticity envelope.
  {
    AssumptionCheck c;
    c.id = "P.ii";
    guarded(c, [&] {
      c.description = "nu_lower (1+|p|)^(m-2) <= sigma <= nu_upper (1+|p|)^(m-2)";
      c.verdict = Verdict::Pass;
      double slack = 1e-9;
      sampler.for_each_xup([&](int e, double x, double /*u*/, double q) {
        if (c.verdict == Verdict::Fail) return;
        double env_val = std::pow(1.0 + std::abs(q), env.m - 2.0);
        double lo = env.nu_lower * env_val, hi = env.nu_upper * env_val;
        double s = p.sigma[e].sigma(x, q);
        if (s < lo * (1.0 - slack) - slack || s > hi * (1.0 + slack) + slack) {
          c.verdict = Verdict::Fail;
          c.measured = s;
          c.bound = s < lo ? lo : hi;
          c.witness = point_str(e, x, 0.0, q) + ": sigma=" + std::to_string(s) + ", bounds [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]";
        }
      });
    });
    add(std::move(c));
  }

  // (P)(iii): |H| <= mu(|u|) (1+|p|)^m  -- asymptotic, spot-checked only.
  {
    AssumptionCheck c;
    c.id = "P.iii";
    guarded(c, [&] {
      c.description = "|H| <= mu(|u|)(1+|p|)^m (growth, sampled box only)";
      if (!env.mu_bound) {
        c.verdict = Verdict::Unchecked;
        c.description += " -- mu undeclared";
      } else {
        c.verdict = Verdict::SpotChecked;
        sampler.for_each_xup([&](int e, double x, double u, double q) {
          if (c.verdict == Verdict::Fail) return;
          EvalPoint bp;
          bp.u = std::abs(u);
          double bound = env.mu_bound->eval(bp) * std::pow(1.0 + std::abs(q), env.m);
          double h = std::abs(p.hamiltonian[e].ham(x, u, q));
          c.measured = std::max(c.measured, h);
          if (h > bound * (1.0 + plan.tol) + plan.tol) {
            c.verdict = Verdict::Fail;
            c.witness = point_str(e, x, u, q) + ": |H|=" + std::to_string(h) + " > " + std::to_string(bound);
          }
        });
      }
    });
    add(std::move(c));
  }

  // (P)(iv)(a): |dp sigma|(1+|p|)^2 + |dp H| <= gamma(|u|)(1+|p|)^(m-1).
  {
    AssumptionCheck c;
    c.id = "P.iv.a";
    guarded(c, [&] {
      c.description = "p-derivative growth vs gamma(|u|)(1+|p|)^(m-1) (sampled box only)";
      if (!env.gamma_bound) {
        c.verdict = Verdict::Unchecked;
        c.description += " -- gamma undeclared";
      } else {
        c.verdict = Verdict::SpotChecked;
        sampler.for_each_xup([&](int e, double x, double u, double q) {
          if (c.verdict == Verdict::Fail) return;
          double dps = std::abs(p.sigma[e].sigma_grad(x, q).dp);
          double dph = std::abs(p.hamiltonian[e].ham_grad(x, u, q).dp);
          double lhs = dps * std::pow(1.0 + std::abs(q), 2.0) + dph;
          EvalPoint bp;
          bp.u = std::abs(u);
          double bound = env.gamma_bound->eval(bp) * std::pow(1.0 + std::abs(q), env.m - 1.0);
          c.measured = std::max(c.measured, lhs);
          if (lhs > bound * (1.0 + plan.tol) + plan.tol) {
            c.verdict = Verdict::Fail;
            c.witness = point_str(e, x, u, q) + ": lhs=" + std::to_string(lhs) + " > " + std::to_string(bound);
          }
        });
      }
    });
    add(std::move(c));
  }

  // (P)(iv)(b): x-derivative growth vs (eps + P)(1+|p|)^(m+1).
  {
    AssumptionCheck c;
    c.id = "P.iv.b";
    guarded(c, [&] {
      c.description = "x-derivative growth vs (eps(|u|)+P(|u|,|p|))(1+|p|)^(m+1) (sampled box only)";
      if (!env.epsilon_bound || !env.p_bound) {
        c.verdict = Verdict::Unchecked;
        c.description += " -- eps or P undeclared";
      } else {
        c.verdict = Verdict::SpotChecked;
        sampler.for_each_xup([&](int e, double x, double u, double q) {
          if (c.verdict == Verdict::Fail) return;
          double a = p.junction.lengths[e];
          double hx = plan.fd_step * (1.0 + std::abs(x));
          double x0 = std::clamp(x - hx, 0.0, a), x1 = std::clamp(x + hx, 0.0, a);
          if (x1 <= x0) return;
          double dxs = std::abs(p.sigma[e].sigma(x1, q) - p.sigma[e].sigma(x0, q)) / (x1 - x0);
          double dxh =
              std::abs(p.hamiltonian[e].ham(x1, u, q) - p.hamiltonian[e].ham(x0, u, q)) / (x1 - x0);
          double lhs = dxs * std::pow(1.0 + std::abs(q), 2.0) + dxh;
          EvalPoint bp;
          bp.u = std::abs(u);
          bp.p = std::abs(q);
          double bound = (env.epsilon_bound->eval(bp) + env.p_bound->eval(bp)) *
                         std::pow(1.0 + std::abs(q), env.m + 1.0);
          c.measured = std::max(c.measured, lhs);
          if (lhs > bound * (1.0 + plan.tol) + plan.tol) {
            c.verdict = Verdict::Fail;
            c.witness = point_str(e, x, u, q) + ": lhs=" + std::to_string(lhs) + " > " + std::to_string(bound);
          }
        });
      }
    });
    add(std::move(c));
  }

  // (P)(iv)(c) lower: du H >= -C_H, probed by finite differences.
  {
    AssumptionCheck c;
    c.id = "P.iv.c";
    guarded(c, [&] {
      c.description = "du H >= -C_H (finite-difference probe)";
      c.verdict = Verdict::Pass;
      c.bound = -env.c_h;
      c.measured = 1e300;
      sampler.for_each_xup([&](int e, double x, double u, double q) {
        if (c.verdict == Verdict::Fail) return;
        double hu = plan.fd_step * (1.0 + std::abs(u));
        double duh = (p.hamiltonian[e].ham(x, u + hu, q) - p.hamiltonian[e].ham(x, u - hu, q)) / (2.0 * hu);
        c.measured = std::min(c.measured, duh);
        if (duh < -env.c_h - plan.tol * (1.0 + env.c_h)) {
          c.verdict = Verdict::Fail;
          c.witness = point_str(e, x, u, q) + ": du H=" + std::to_string(duh) +
                      " < -C_H=" + std::to_string(-env.c_h);
        }
      });
    });
    add(std::move(c));
  }

  // (E)(iii): strong monotonicity H(x,v,p) - H(x,u,p) >= C_H (v - u), u <= v.
  {
    AssumptionCheck c;
    c.id = "E.iii";
    guarded(c, [&] {
      c.description = "H(x,v,p)-H(x,u,p) >= C_H (v-u) on ordered pairs";
      c.verdict = Verdict::Pass;
      std::mt19937_64 rng(plan.seed + 1);
      std::uniform_real_distribution<double> uu(-plan.u_max, plan.u_max);
      std::uniform_real_distribution<double> up(-plan.p_max, plan.p_max);
      std::uniform_real_distribution<double> gap(1e-3, 1.0);
      for (int s = 0; s < plan.pair_samples && c.verdict == Verdict::Pass; ++s) {
        int e = static_cast<int>(rng() % static_cast<std::uint64_t>(p.num_edges()));
        double x = p.junction.lengths[e] * (static_cast<double>(rng() % 1024) / 1023.0);
        double q = up(rng);
        double u1 = uu(rng);
        double v1 = u1 + gap(rng);
        double lhs = p.hamiltonian[e].ham(x, v1, q) - p.hamiltonian[e].ham(x, u1, q);
        double rhs = env.c_h * (v1 - u1);
        if (lhs < rhs - plan.tol * (1.0 + std::abs(rhs))) {
          c.verdict = Verdict::Fail;
          c.witness = point_str(e, x, u1, q) + ", v=" + std::to_string(v1) + ": H-diff=" +
                      std::to_string(lhs) + " < C_H*(v-u)=" + std::to_string(rhs);
        }
      }
    });
    add(std::move(c));
  }

  // (E)(iv): asymptotic ratios under delta_i and bar-delta_i; the delta_i
  // operator carries 1/p and is singular at p = 0, so |p| < p_exclusion is
  // excluded from sampling. Never more than SPOT-CHECKED.
  {
    AssumptionCheck c;
    c.id = "E.iv";
    guarded(c, [&] {
      c.description = "delta/bar-delta growth ratios (|p| < " + std::to_string(plan.p_exclusion) +
                      " excluded; asymptotics not certifiable)";
      c.verdict = Verdict::SpotChecked;
      double worst = 0.0;
      sampler.for_each_xup([&](int e, double x, double u, double q) {
        if (std::abs(q) < plan.p_exclusion) return;
        double a = p.junction.lengths[e];
        double hx = plan.fd_step * (1.0 + std::abs(x));
        double hu = plan.fd_step * (1.0 + std::abs(u));
        double x0 = std::clamp(x - hx, 0.0, a), x1 = std::clamp(x + hx, 0.0, a);
        if (x1 <= x0) return;
        double sig = p.sigma[e].sigma(x, q);
        if (sig == 0.0) return;
        double dxs = (p.sigma[e].sigma(x1, q) - p.sigma[e].sigma(x0, q)) / (x1 - x0);
        double dps = p.sigma[e].sigma_grad(x, q).dp;
        double delta_sigma = dxs / q;      // sigma has no u dependence
        double bar_sigma = q * dps;
        auto hg = p.hamiltonian[e].ham_grad(x, u, q);
        double dxh = (p.hamiltonian[e].ham(x1, u, q) - p.hamiltonian[e].ham(x0, u, q)) / (x1 - x0);
        double duh = (p.hamiltonian[e].ham(x, u + hu, q) - p.hamiltonian[e].ham(x, u - hu, q)) / (2.0 * hu);
        double delta_h = duh + dxh / q;
        double bar_h = q * hg.dp;
        double sp2 = sig * q * q;
        worst = std::max({worst, std::abs(delta_sigma) / sig, std::abs(bar_sigma) / sig,
                          std::abs(p.hamiltonian[e].ham(x, u, q)) / sp2, delta_h / sp2, bar_h / sp2});
      });
      c.measured = worst;
    });
    add(std::move(c));
  }

  return rep;
}

}  // namespace starpde
