#include "tailtest/harness/report.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace tailtest::harness {

namespace {

std::string format(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

nlohmann::json fit_json(const MlFit& fit) {
  return {{"mu", std::vector<double>(fit.params.mu.data(), fit.params.mu.data() + fit.params.mu.size())},
          {"nu", fit.params.nu},
          {"loglik", fit.loglik},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"restarts", fit.restarts}};
}

}  // namespace

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json j = {{"schema", kSchemaVersion},
                      {"kind", "test"},
                      {"statistic", report.statistic},
                      {"side", std::string(side_name(report.side))},
                      {"alpha", report.alpha},
                      {"p_value", report.p_value},
                      {"reject", report.reject},
                      {"nu0", report.nu0},
                      {"estimator", report.estimator},
                      {"n", report.n}};
  if (report.predicted_power) j["predicted_power"] = *report.predicted_power;
  return j;
}

nlohmann::json to_json(const ConfidenceInterval& ci) {
  nlohmann::json j = {{"schema", kSchemaVersion},
                      {"kind", "interval"},
                      {"level", ci.level},
                      {"method", std::string(method_name(ci.method))},
                      {"empty", ci.empty},
                      {"monotone", ci.monotone},
                      {"bracket", {ci.bracket_lo, ci.bracket_hi}}};
  if (ci.empty) {
    j["lo"] = nullptr;
    j["hi"] = nullptr;
  } else {
    j["lo"] = ci.lo;
    j["hi"] = ci.hi;
  }
  j["lower_open"] = ci.lower_open;
  j["upper_open"] = ci.upper_open;
  j["nu_at_zero"] = ci.nu_at_zero ? nlohmann::json(*ci.nu_at_zero) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const OneStepEstimate& e) {
  return {{"schema", kSchemaVersion},
          {"kind", "estimate"},
          {"method", std::string(method_name(e.method))},
          {"n", e.n},
          {"nu_prelim", e.nu_prelim},
          {"prelim_supplied", e.prelim_supplied},
          {"prelim_clamped", e.prelim_clamped},
          {"nu_cam", e.nu_cam},
          {"se", e.se},
          {"info", e.info_used},
          {"delta3_star", e.delta3_star}};
}

nlohmann::json to_json(const LrResult& lr) {
  nlohmann::json j = to_json(lr.report);
  j["constrained"] = fit_json(lr.constrained);
  j["free"] = fit_json(lr.free);
  j["start_nu_spread"] = lr.start_nu_spread;
  j["start_loglik_spread"] = lr.start_loglik_spread;
  return j;
}

nlohmann::json to_json(const CampaignResult& result, bool include_timing) {
  const SimCampaign& c = result.campaign;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : result.cells) {
    cells.push_back({{"method", cell.method},
                     {"nu", cell.nu},
                     {"reps", cell.reps},
                     {"rejections", cell.rejections},
                     {"failures", cell.failures},
                     {"frequency", cell.frequency},
                     {"se", cell.se}});
  }
  nlohmann::json j = {{"schema", kSchemaVersion},
                      {"kind", "campaign"},
                      {"k", c.k},
                      {"n", c.n},
                      {"reps", c.reps},
                      {"nu0", c.nu0},
                      {"alpha", c.alpha},
                      {"side", std::string(side_name(c.side))},
                      {"seed", c.seed},
                      {"cells", cells}};
  if (include_timing) j["wall_seconds"] = result.wall_seconds;
  return j;
}

void append_report_csv(const std::string& path, const TestReport& report) {
  bool fresh = true;
  {
    std::ifstream probe(path, std::ios::ate);
    fresh = !probe || probe.tellg() == 0;
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (fresh) out << "estimator,side,nu0,alpha,n,statistic,p_value,reject\n";
  out << report.estimator << ',' << side_name(report.side) << ',' << format(report.nu0) << ','
      << format(report.alpha) << ',' << report.n << ',' << format(report.statistic) << ','
      << format(report.p_value) << ',' << (report.reject ? 1 : 0) << '\n';
}

void write_campaign_csv(std::ostream& out, const CampaignResult& result) {
  out << "method,nu,reps,rejections,failures,frequency,se\n";
  for (const auto& cell : result.cells) {
    out << cell.method << ',' << format(cell.nu) << ',' << cell.reps << ',' << cell.rejections << ','
        << cell.failures << ',' << format(cell.frequency) << ',' << format(cell.se) << '\n';
  }
}

}  // namespace tailtest::harness
