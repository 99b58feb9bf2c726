#include "formlab/report.hpp"

namespace formlab {

namespace {

OJson int_array(const std::vector<Int>& v) {
  OJson arr = OJson::array();
  for (const Int& x : v) arr.push_back(to_string(x));
  return arr;
}

OJson json_of_check(const ConditionCheck& c) {
  return OJson{{"verdict", verdict_name(c.verdict)},
               {"lhs", to_string(c.lhs)},
               {"threshold", to_string(c.threshold)},
               {"margin", to_string(c.margin)},
               {"note", c.note}};
}

}  // namespace

OJson json_of(const CountResult& r) {
  return OJson{{"P", to_string(r.P)},
               {"count", to_string(r.count)},
               {"points_enumerated", to_string(r.points_enumerated)},
               {"elapsed_seconds", r.elapsed_seconds}};
}

OJson json_of(const GEstimate& g) {
  OJson samples = OJson::array();
  for (const auto& [P, m] : g.samples) {
    samples.push_back(OJson{{"P", P}, {"M", to_string(m)}});
  }
  return OJson{{"samples", samples},
               {"slope", g.slope},
               {"g_estimate", g.g_estimate},
               {"residual", g.residual}};
}

OJson json_of(const ExpSumResult& s) {
  return OJson{{"re", s.value.real()},
               {"im", s.value.imag()},
               {"abs", std::abs(s.value)},
               {"points", to_string(s.points)},
               {"exact_phase_path", s.exact_phase_path}};
}

OJson json_of(const PsiMatrix& psi) {
  OJson cols = OJson::array();
  for (std::size_t c = 0; c < psi.columns.size(); ++c) {
    OJson tuple = OJson::array();
    for (auto v : psi.labels[c].tuple) tuple.push_back(v);
    cols.push_back(OJson{{"j", psi.labels[c].j},
                         {"tuple", tuple},
                         {"entries", int_array(psi.columns[c])}});
  }
  return OJson{{"rows", psi.r},
               {"near_tuples", psi.near_tuples},
               {"columns", cols}};
}

OJson json_of(const DichotomyOutcome& o) {
  if (const auto* major = std::get_if<MajorArc>(&o)) {
    OJson errors = OJson::array();
    for (const Rat& e : major->errors) errors.push_back(to_string(e));
    OJson minor = OJson::array();
    for (const auto& row : major->minor) minor.push_back(int_array(row));
    OJson labels = OJson::array();
    for (const auto& lab : major->minor_labels) {
      OJson tuple = OJson::array();
      for (auto v : lab.tuple) tuple.push_back(v);
      labels.push_back(OJson{{"j", lab.j}, {"tuple", tuple}});
    }
    OJson out{{"type", "major_arc"},
              {"q", to_string(major->q)},
              {"a", int_array(major->a)},
              {"errors", errors},
              {"log_p_q", major->log_p_q},
              {"minor", minor},
              {"minor_labels", labels}};
    if (major->max_log_p_error) out["max_log_p_error"] = *major->max_log_p_error;
    return out;
  }
  if (const auto* rd = std::get_if<RankDeficient>(&o)) {
    return OJson{{"type", "rank_deficient"},
                 {"b", int_array(rd->b)},
                 {"witness_pencil", rd->witness_pencil.str()},
                 {"near_tuples", rd->near_tuples},
                 {"columns_seen", rd->columns_seen}};
  }
  const auto& ev = std::get<MinorArcEvidence>(o);
  OJson out{{"type", "minor_arc_evidence"},
            {"abs_S", ev.abs_s},
            {"trivial_bound", ev.trivial_bound}};
  if (ev.exponent_bound) out["exponent_bound"] = *ev.exponent_bound;
  return out;
}

OJson json_of(const DichotomyReport& r) {
  OJson out{{"abs_S", r.abs_s},
            {"trivial_bound", r.trivial_bound},
            {"bound_alternative_i", r.bound_alternative_i},
            {"alternative_i_holds", r.alternative_i_holds},
            {"near_count", r.near_count},
            {"bound_alternative_ii", r.bound_alternative_ii},
            {"alternative_ii_holds", r.alternative_ii_holds},
            {"exact_phase_path", r.exact_phase_path},
            {"outcome", json_of(r.outcome)}};
  if (r.g_tilde) out["g_tilde"] = *r.g_tilde;
  if (r.minor_arc_exponent) out["minor_arc_exponent"] = *r.minor_arc_exponent;
  return out;
}

OJson json_of(const FpDimensionEstimate& e) {
  OJson per = OJson::array();
  for (const auto& pc : e.per_prime) {
    per.push_back(OJson{{"p", pc.p},
                        {"exact", pc.exact},
                        {"count", pc.count},
                        {"hits", pc.hits},
                        {"trials", pc.trials},
                        {"log_p_count", pc.log_p_count},
                        {"wilson_log_lo", pc.wilson_log_lo},
                        {"wilson_log_hi", pc.wilson_log_hi}});
  }
  OJson skipped = OJson::array();
  for (auto p : e.skipped_primes) skipped.push_back(p);
  return OJson{{"dim_estimate", e.dim_estimate},
               {"consistent", e.consistent},
               {"method", e.method},
               {"per_prime", per},
               {"skipped_primes", skipped}};
}

OJson json_of(const UInvariantResult& u) {
  OJson probes = OJson::array();
  for (const auto& pr : u.probes) {
    OJson probe{{"b", int_array(pr.b)},
                {"dim_sing", pr.dim_sing},
                {"exact", pr.exact},
                {"zero_member", pr.zero_member},
                {"h_lower", pr.h_lower},
                {"h_upper", pr.h_upper}};
    if (pr.rank) probe["rank"] = *pr.rank;
    probes.push_back(probe);
  }
  return OJson{{"u", u.u},
               {"arg_b", int_array(u.arg_b)},
               {"b_bound", u.b_bound},
               {"consistent", u.consistent},
               {"probes", probes}};
}

OJson json_of(const InvariantReport& r) {
  OJson out{{"u", json_of(r.u)},
            {"h_lower", r.h_lower},
            {"h_upper", r.h_upper},
            {"phi", to_string(r.phi)},
            {"phi_is_bound", r.phi_is_bound},
            {"theorem1", json_of_check(r.theorem1)},
            {"theorem2", json_of_check(r.theorem2)},
            {"theorem2_threshold", to_string(r.theorem2_threshold)},
            {"theorem2a_threshold", to_string(r.theorem2a_threshold)},
            {"corollary1", json_of_check(r.corollary1)},
            {"consistent", r.consistent}};
  if (r.dim_v_star) {
    out["dim_v_star"] = json_of(*r.dim_v_star);
  } else {
    out["dim_v_star"] = nullptr;
  }
  if (r.min_pencil_rank) out["min_pencil_rank"] = *r.min_pencil_rank;
  return out;
}

OJson json_of(const SingularSeriesTruncation& s) {
  OJson partial = OJson::array();
  for (const auto& [q, v] : s.partial_sums) partial.push_back(OJson{{"q", q}, {"sum", v}});
  return OJson{{"q_max", s.q_max},
               {"value", s.value},
               {"tail_estimate", s.tail_estimate},
               {"max_imag", s.max_imag},
               {"partial_sums", partial}};
}

OJson json_of(const SingularIntegralTruncation& s) {
  OJson trace = OJson::array();
  for (const auto& [t, v] : s.convergence_trace) trace.push_back(OJson{{"T", t}, {"value", v}});
  return OJson{{"t_max", s.t_max},
               {"grid", s.grid},
               {"value", s.value},
               {"max_imag", s.max_imag},
               {"converged", s.converged},
               {"convergence_trace", trace}};
}

OJson json_of(const PredictReport& r) {
  OJson rows = OJson::array();
  for (const auto& row : r.rows) {
    rows.push_back(OJson{{"P", to_string(row.P)},
                         {"N", to_string(row.N)},
                         {"prediction", row.prediction},
                         {"ratio", row.ratio}});
  }
  OJson out{{"singular_series", json_of(r.series)},
            {"singular_integral", json_of(r.integral)},
            {"rows", rows},
            {"positive_growth", r.positive_growth},
            {"consistent", r.consistent},
            {"real_obstruction", r.real_obstruction}};
  if (r.hypothesis_pass) {
    out["hypothesis_pass"] = *r.hypothesis_pass;
  } else {
    out["hypothesis_pass"] = nullptr;
  }
  out["hypothesis_note"] = r.hypothesis_note;
  return out;
}

OJson make_report(const std::string& command, OJson config, OJson result, OJson provenance) {
  return OJson{{"tool", "formlab"},
               {"format", 1},
               {"command", command},
               {"config", std::move(config)},
               {"result", std::move(result)},
               {"provenance", std::move(provenance)}};
}

bool validate_report(const OJson& report, std::string* why) {
  auto fail = [&](const std::string& reason) {
    if (why) *why = reason;
    return false;
  };
  for (const char* key : {"tool", "format", "command", "config", "result", "provenance"}) {
    if (!report.contains(key)) return fail(std::string("missing key: ") + key);
  }
  if (report["tool"] != "formlab") return fail("unexpected tool name");
  static const std::vector<std::string> commands = {"count",      "expsum",  "weyl",
                                                    "invariants", "predict", "corpus"};
  if (std::find(commands.begin(), commands.end(),
                report["command"].get<std::string>()) == commands.end()) {
    return fail("unknown command");
  }
  if (!report["config"].is_object()) return fail("config must be an object");
  if (!report["provenance"].is_object() || report["provenance"].empty()) {
    return fail("provenance block must be a non-empty object");
  }
  return true;
}

}  // namespace formlab
