#include "tailtest/harness/campaign.hpp"

#include "tailtest/ml_baseline.hpp"
#include "tailtest/random.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace tailtest::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + text);
  }
}

long long to_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + text);
  }
}

std::vector<double> to_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
  return out;
}

}  // namespace

TParams SimCampaign::truth(double nu) const {
  TParams p;
  p.mu = mu.size() ? mu : Vector::Zero(k);
  p.sigma = sigma.size() ? sigma : Matrix::Identity(k, k);
  p.nu = nu;
  return p;
}

void SimCampaign::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (n <= k + 1) throw ConfigError("n must exceed k + 1");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (!(nu0 > 0.0)) throw ConfigError("nu0 must be positive");
  if (alternatives.empty()) throw ConfigError("alternatives must not be empty");
  for (double nu : alternatives) {
    if (!(nu > 0.0)) throw ConfigError("alternatives must be positive");
  }
  if (mu.size() && mu.size() != k) throw ConfigError("mu must have k entries");
  if (sigma.size()) {
    if (sigma.rows() != k || sigma.cols() != k) throw ConfigError("sigma must be k x k");
    if (!is_symmetric(sigma)) throw ConfigError("sigma must be symmetric");
    if (Eigen::SelfAdjointEigenSolver<Matrix>(sigma).eigenvalues().minCoeff() <= 0.0) {
      throw ConfigError("sigma must be positive definite");
    }
  }
  if (methods.empty()) throw ConfigError("methods must not be empty");
  for (const auto& m : methods) {
    if (m != kLrTag && !parse_method(m)) throw ConfigError("unknown method: " + m);
    if (m == "mecov" && !(nu0 > 2.0)) throw ConfigError("mecov requires nu0 > 2");
    if (m == "medmad" && k != 1) throw ConfigError("medmad requires k = 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

SimCampaign parse_campaign(std::istream& in) {
  SimCampaign c;
  std::map<std::string, std::string> entries;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (entries.count(key)) throw ConfigError("duplicate config key: " + key);
    entries[key] = trim(line.substr(eq + 1));
  }

  std::string sigma_text;
  for (const auto& [key, value] : entries) {
    if (key == "k") {
      c.k = to_integer(key, value);
    } else if (key == "n") {
      c.n = to_integer(key, value);
    } else if (key == "reps") {
      c.reps = static_cast<int>(to_integer(key, value));
    } else if (key == "nu0") {
      c.nu0 = to_double(key, value);
    } else if (key == "alternatives") {
      c.alternatives = to_doubles(key, value);
    } else if (key == "mu") {
      const auto v = to_doubles(key, value);
      c.mu = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    } else if (key == "sigma") {
      sigma_text = value;
    } else if (key == "methods") {
      c.methods = split_list(value);
    } else if (key == "alpha") {
      c.alpha = to_double(key, value);
    } else if (key == "side") {
      const auto s = parse_side(value);
      if (!s) throw ConfigError("unknown side: " + value);
      c.side = *s;
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(to_integer(key, value));
    } else if (key == "threads") {
      c.threads = static_cast<unsigned>(to_integer(key, value));
    } else if (key == "mcd_starts") {
      c.mcd.n_starts = static_cast<int>(to_integer(key, value));
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (!sigma_text.empty() && sigma_text != "identity") {
    const auto v = to_doubles("sigma", sigma_text);
    if (static_cast<Index>(v.size()) != c.k * c.k) throw ConfigError("sigma must have k*k entries");
    c.sigma.resize(c.k, c.k);
    for (Index i = 0; i < c.k; ++i) {
      for (Index j = 0; j < c.k; ++j) c.sigma(i, j) = v[static_cast<std::size_t>(i * c.k + j)];
    }
  }
  c.validate();
  return c;
}

SimCampaign parse_campaign_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_campaign(in);
}

std::uint64_t sample_seed(std::uint64_t master, double nu, int rep) {
  return derive_seed(master, {std::bit_cast<std::uint64_t>(nu), static_cast<std::uint64_t>(rep)});
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

CampaignResult run_campaign(const SimCampaign& campaign) {
  campaign.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n_alt = campaign.alternatives.size();
  const std::size_t n_methods = campaign.methods.size();
  const std::size_t reps = static_cast<std::size_t>(campaign.reps);

  // outcome: 1 reject, 0 accept, -1 failure; indexed [alt][rep][method].
  std::vector<signed char> outcome(n_alt * reps * n_methods, 0);
  parallel_for(n_alt * reps, campaign.threads, [&](std::size_t task) {
    const std::size_t a = task / reps;
    const int rep = static_cast<int>(task % reps);
    const double nu = campaign.alternatives[a];
    const Sample data = sample(campaign.truth(nu), campaign.n, sample_seed(campaign.seed, nu, rep));
    for (std::size_t m = 0; m < n_methods; ++m) {
      const std::string& tag = campaign.methods[m];
      signed char& slot = outcome[task * n_methods + m];
      try {
        if (tag == kLrTag) {
          slot = lr_test(data, campaign.nu0, campaign.alpha).report.reject ? 1 : 0;
        } else {
          TestOptions options;
          options.side = campaign.side;
          options.alpha = campaign.alpha;
          options.method = *parse_method(tag);
          options.mcd = campaign.mcd;
          options.mcd.seed = derive_seed(campaign.seed, {m, std::bit_cast<std::uint64_t>(nu),
                                                         static_cast<std::uint64_t>(rep)});
          slot = test_tail_weight(data, campaign.nu0, options).reject ? 1 : 0;
        }
      } catch (const std::runtime_error&) {
        slot = -1;
      } catch (const std::domain_error&) {
        slot = -1;
      }
    }
  });

  CampaignResult result;
  result.campaign = campaign;
  for (std::size_t m = 0; m < n_methods; ++m) {
    for (std::size_t a = 0; a < n_alt; ++a) {
      CampaignCell cell;
      cell.method = campaign.methods[m];
      cell.nu = campaign.alternatives[a];
      for (std::size_t r = 0; r < reps; ++r) {
        const signed char o = outcome[(a * reps + r) * n_methods + m];
        if (o < 0) {
          ++cell.failures;
        } else {
          ++cell.reps;
          cell.rejections += o;
        }
      }
      if (cell.reps > 0) {
        cell.frequency = static_cast<double>(cell.rejections) / cell.reps;
        cell.se = std::sqrt(cell.frequency * (1.0 - cell.frequency) / cell.reps);
      }
      result.cells.push_back(cell);
    }
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace tailtest::harness
