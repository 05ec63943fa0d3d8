#include "inclab/json_io.hpp"

namespace inclab {

Json to_json(const Spread& spread) {
  if (!spread.is_finite()) return Json("inf");
  return Json(spread.value());
}

Spread spread_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return Spread::infinite();
    throw ParseError("spread must be a number or the string \"inf\"");
  }
  return Spread::finite(j.get<double>());
}

Json to_json(const ParamClass& cls) {
  Json j;
  j["support"] = cls.support.indices();
  j["rho"] = cls.rho;
  j["spread"] = to_json(cls.spread);
  return j;
}

ParamClass param_class_from_json(const Json& j, int p) {
  return ParamClass(Support(j.at("support").get<std::vector<int>>(), p),
                    j.at("rho").get<double>(), spread_from_json(j.at("spread")));
}

Json to_json(const MarginRow& row) {
  Json j;
  j["j"] = row.j;
  j["k"] = row.k;
  j["sign"] = row.sign > 0 ? "+" : "-";
  j["lhs"] = row.lhs;
  j["rhs"] = row.rhs;
  j["slack"] = row.slack;
  return j;
}

Json to_json(const IncoherenceReport& report) {
  Json j;
  j["condition_name"] = report.condition_name;
  j["holds"] = report.holds;
  j["slack_param"] = report.slack_param;
  j["margins"] = Json::array();
  for (const auto& row : report.margins) j["margins"].push_back(to_json(row));
  if (report.binding) j["binding"] = to_json(*report.binding);
  return j;
}

Json to_json(const RecoveryVerdict& verdict) {
  Json j;
  j["pass"] = verdict.pass;
  j["method"] = to_string(verdict.method);
  j["exact"] = verdict.exact;
  j["margin"] = verdict.margin;
  if (verdict.violated_pair) {
    j["violated_pair"] = {verdict.violated_pair->first, verdict.violated_pair->second};
  }
  if (verdict.violated_lambda) j["violated_lambda"] = *verdict.violated_lambda;
  if (verdict.witness_beta) {
    j["witness_beta"] = std::vector<double>(
        verdict.witness_beta->beta.data(),
        verdict.witness_beta->beta.data() + verdict.witness_beta->beta.size());
  }
  return j;
}

Json to_json(const Theorem1Summary& summary) {
  Json j;
  j["instances"] = summary.instances;
  j["checks"] = summary.checks;
  j["consistent"] = summary.consistent;
  j["violated"] = summary.violated;
  j["boundary"] = summary.boundary;
  j["offenders"] = Json::array();
  for (const auto& inst : summary.offenders) {
    Json o;
    o["what"] = inst.what;
    o["support"] = inst.support;
    o["rho"] = inst.rho;
    o["spread"] = inst.spread;
    o["slack"] = inst.slack;
    o["sigma_csv"] = inst.sigma_csv;
    j["offenders"].push_back(o);
  }
  return j;
}

Json to_json(const Conjecture1Report& report) {
  Json j;
  j["instances"] = report.instances;
  j["f2_pass"] = report.f2_pass;
  j["boundary"] = report.boundary;
  j["counterexamples"] = report.counterexamples;
  j["counterexample_instances"] = Json::array();
  for (std::size_t i = 0; i < report.counterexample_csv.size(); ++i) {
    Json o;
    o["support"] = report.counterexample_supports[i];
    o["sigma_csv"] = report.counterexample_csv[i];
    j["counterexample_instances"].push_back(o);
  }
  return j;
}

Json to_json(const ConcentrationReport& report) {
  Json j;
  j["replicates"] = report.replicates;
  j["xi_value"] = report.xi_value;
  j["ratio_q50"] = report.ratio_q50;
  j["ratio_q90"] = report.ratio_q90;
  j["ratio_q99"] = report.ratio_q99;
  j["median_error"] = report.median_error;
  return j;
}

}  // namespace inclab
