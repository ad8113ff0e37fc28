#include "tailtest/harness/campaign.hpp"
#include "tailtest/harness/csv.hpp"
#include "tailtest/harness/report.hpp"
#include "tailtest/ml_baseline.hpp"
#include "tailtest/tail_inference.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

using namespace tailtest;
using namespace tailtest::harness;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

NuisanceMethod method_from(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw UsageError("unknown method: " + name);
  return *m;
}

Side side_from(const std::string& name) {
  const auto s = parse_side(name);
  if (!s) throw UsageError("unknown side: " + name);
  return *s;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad grid value: " + s);
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(number(item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
      throw UsageError("grid must be lo:hi:step with step > 0");
    }
    const int count = static_cast<int>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(parts[0] + i * parts[2]);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

std::string fmt(double v) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return out.str();
}

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference on the degrees of freedom of multivariate Student t data"};
  app.require_subcommand(1);

  std::string data_path;
  std::string method = "mecov";
  std::string side = "two";
  double nu0 = 0.0;
  double alpha = 0.05;
  std::uint64_t seed = 0;

  auto* test = app.add_subcommand("test", "Test H0: nu = nu0");
  std::optional<double> tau;
  std::string out_path;
  test->add_option("--data", data_path, "CSV file, rows are observations")->required();
  test->add_option("--nu0", nu0, "Null value of nu")->required()->check(CLI::PositiveNumber);
  test->add_option("--side", side, "two, greater or less")->capture_default_str();
  test->add_option("--alpha", alpha, "Level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  test->add_option("--method", method, "mecov, medmad, mot, mcd or lr")->capture_default_str();
  test->add_option("--tau", tau, "Local alternative tau3 for predicted power");
  test->add_option("--out", out_path, "Append a CSV row to this file");
  test->add_option("--seed", seed, "Seed for mcd starts")->capture_default_str();

  auto* ci = app.add_subcommand("ci", "Confidence interval for nu by test inversion");
  IntervalOptions interval;
  ci->add_option("--data", data_path, "CSV file")->required();
  ci->add_option("--level", interval.level, "Confidence level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  ci->add_option("--method", method, "Nuisance method")->capture_default_str();
  ci->add_option("--lower", interval.lower, "Lower end of the search bracket")->capture_default_str()
      ->check(CLI::PositiveNumber);
  ci->add_option("--upper", interval.upper, "Upper end of the search bracket")->capture_default_str();
  ci->add_option("--grid", interval.grid_points, "Scan grid size")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rejection frequencies");
  std::string config_path;
  std::optional<int> full;
  std::optional<int> reps_override;
  std::optional<unsigned> threads;
  bool timing = false;
  simulate->add_option("--config", config_path, "key = value campaign file")->required();
  simulate->add_option("--full", full, "Replication count, e.g. --full 2500")->expected(0, 1)->default_str("2500");
  simulate->add_option("--reps", reps_override, "Replication count override");
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)");
  simulate->add_option("--out", out_path, "Write the grid as CSV");
  simulate->add_flag("--timing", timing, "Include wall time in the JSON");

  auto* power = app.add_subcommand("power", "Asymptotic power curve");
  std::string tau_grid;
  Index k = 1;
  std::string sigma_path;
  std::vector<int> empirical;
  power->add_option("--nu0", nu0, "Null value of nu")->required()->check(CLI::PositiveNumber);
  power->add_option("--tau", tau_grid, "lo:hi:step or comma list")->required();
  power->add_option("--k", k, "Dimension")->required()->check(CLI::PositiveNumber);
  power->add_option("--sigma", sigma_path, "CSV with the k x k scatter (identity when omitted)");
  power->add_option("--alpha", alpha, "Level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  power->add_option("--side", side, "two, greater or less")->capture_default_str();
  power->add_option("--empirical", empirical, "n N: add Monte Carlo power")->expected(2);
  power->add_option("--method", method, "Nuisance method for --empirical")->capture_default_str();
  power->add_option("--seed", seed, "Master seed for --empirical")->capture_default_str();
  power->add_option("--out", out_path, "Write the curve here instead of stdout");

  auto* estimate = app.add_subcommand("estimate", "One-step efficient estimate of nu");
  std::optional<double> prelim;
  estimate->add_option("--data", data_path, "CSV file")->required();
  estimate->add_option("--method", method, "Nuisance method")->capture_default_str();
  estimate->add_option("--prelim", prelim, "Preliminary nu (moment estimator when omitted)")
      ->check(CLI::PositiveNumber);

  auto* draw = app.add_subcommand("sample", "Draw multivariate t data as CSV");
  double nu = 5.0;
  Index n = 100;
  draw->add_option("--k", k, "Dimension")->capture_default_str()->check(CLI::PositiveNumber);
  draw->add_option("--n", n, "Observations")->required()->check(CLI::PositiveNumber);
  draw->add_option("--nu", nu, "Degrees of freedom")->required()->check(CLI::PositiveNumber);
  draw->add_option("--sigma", sigma_path, "CSV with the k x k scatter (identity when omitted)");
  draw->add_option("--seed", seed, "Seed")->capture_default_str();
  draw->add_option("--out", out_path, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*test) {
      const Sample data = read_csv_file(data_path).data;
      if (method == kLrTag) {
        const LrResult lr = lr_test(data, nu0, alpha);
        print(to_json(lr));
        if (!out_path.empty()) append_report_csv(out_path, lr.report);
        return 0;
      }
      TestOptions options;
      options.side = side_from(side);
      options.alpha = alpha;
      options.method = method_from(method);
      options.mcd.seed = seed;
      options.tau3 = tau;
      const TestReport report = test_tail_weight(data, nu0, options);
      print(to_json(report));
      if (!out_path.empty()) append_report_csv(out_path, report);
    } else if (*ci) {
      const Sample data = read_csv_file(data_path).data;
      interval.method = method_from(method);
      print(to_json(confidence_interval(data, interval)));
    } else if (*simulate) {
      SimCampaign campaign = parse_campaign_file(config_path);
      if (simulate->count("--full")) campaign.reps = full.value_or(2500);
      if (reps_override) campaign.reps = *reps_override;
      if (threads) campaign.threads = *threads;
      campaign.validate();
      const CampaignResult result = run_campaign(campaign);
      print(to_json(result, timing));
      if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw UsageError("cannot write " + out_path);
        write_campaign_csv(out, result);
      }
      std::cerr << "wall time " << result.wall_seconds << " s\n";
    } else if (*power) {
      const std::vector<double> taus = parse_grid(tau_grid);
      const Side s = side_from(side);
      TParams p{Vector::Zero(k), Matrix::Identity(k, k), nu0};
      if (!sigma_path.empty()) {
        p.sigma = read_csv_file(sigma_path).data;
        if (p.sigma.rows() != k || p.sigma.cols() != k) throw UsageError("--sigma must be k x k");
        if (!is_symmetric(p.sigma)) throw UsageError("--sigma must be symmetric");
      }
      std::vector<double> mc;
      if (!empirical.empty()) {
        SimCampaign campaign;
        campaign.k = k;
        campaign.n = empirical[0];
        campaign.reps = empirical[1];
        campaign.nu0 = nu0;
        campaign.alternatives.clear();
        for (double t : taus) campaign.alternatives.push_back(nu0 + t / std::sqrt(static_cast<double>(campaign.n)));
        campaign.sigma = p.sigma;
        campaign.methods = {method};
        method_from(method);
        campaign.alpha = alpha;
        campaign.side = s;
        campaign.seed = seed;
        for (const auto& cell : run_campaign(campaign).cells) mc.push_back(cell.frequency);
      }
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw UsageError("cannot write " + out_path);
      }
      std::ostream& out = out_path.empty() ? std::cout : file;
      out << "tau,power" << (mc.empty() ? "" : ",empirical") << '\n';
      for (std::size_t i = 0; i < taus.size(); ++i) {
        out << fmt(taus[i]) << ',' << fmt(asymptotic_power(nu0, taus[i], p, s, alpha));
        if (!mc.empty()) out << ',' << fmt(mc[i]);
        out << '\n';
      }
    } else if (*draw) {
      TParams p{Vector::Zero(k), Matrix::Identity(k, k), nu};
      if (!sigma_path.empty()) {
        p.sigma = read_csv_file(sigma_path).data;
        if (p.sigma.rows() != k || p.sigma.cols() != k) throw UsageError("--sigma must be k x k");
      }
      const Sample x = sample(p, n, seed);
      std::ofstream file;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw UsageError("cannot write " + out_path);
      }
      write_csv(out_path.empty() ? std::cout : file, x);
    } else if (*estimate) {
      const Sample data = read_csv_file(data_path).data;
      print(to_json(one_step_estimator(data, method_from(method), prelim)));
    }
  } catch (const CsvError& e) {
    std::cerr << "error: " << data_path << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
