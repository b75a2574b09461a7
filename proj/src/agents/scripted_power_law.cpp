#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Dense>

#include "eqgym/agents/scripted.hpp"

namespace eqgym::agents {

namespace {

std::string fmt_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Four significant digits keep the proposals readable.
double tidy(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return std::strtod(buf, nullptr);
}

std::string term(const std::string& name, double p) {
  if (p == 1.0) return name;
  if (p == 0.5) return "np.sqrt(" + name + ")";
  return name + "**" + fmt_number(p);
}

}  // namespace

std::optional<PowerLawFit> fit_power_law(const session::ObservationPacket& packet) {
  const std::size_t n = packet.controllable_variables.size();
  std::vector<std::vector<double>> logs;
  std::vector<double> ys;
  for (const auto& h : packet.historical_experiments) {
    if (!h.output || *h.output == 0.0 || !std::isfinite(*h.output)) continue;
    std::vector<double> row;
    for (const auto& [name, desc] : packet.controllable_variables) {
      auto it = std::find_if(h.inputs.begin(), h.inputs.end(), [&](const auto& kv) { return kv.first == name; });
      if (it == h.inputs.end() || !(it->second > 0.0)) break;
      row.push_back(std::log(it->second));
    }
    if (row.size() != n) continue;
    logs.push_back(std::move(row));
    ys.push_back(*h.output);
  }
  // Fit the majority sign; rows of the other sign are ignored.
  std::size_t negative = static_cast<std::size_t>(std::count_if(ys.begin(), ys.end(), [](double y) { return y < 0; }));
  int sign = 2 * negative > ys.size() ? -1 : 1;

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if ((ys[i] < 0) == (sign < 0)) keep.push_back(i);
  }
  if (keep.size() < n + 1) return std::nullopt;

  Eigen::MatrixXd a(keep.size(), n + 1);
  Eigen::VectorXd b(keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    a(r, 0) = 1.0;
    for (std::size_t j = 0; j < n; ++j) a(r, j + 1) = logs[keep[r]][j];
    b(r) = std::log(std::fabs(ys[keep[r]]));
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < static_cast<Eigen::Index>(n + 1)) return std::nullopt;
  Eigen::VectorXd x = qr.solve(b);

  PowerLawFit fit;
  fit.sign = sign;
  fit.log_c = x(0);
  for (std::size_t j = 0; j < n; ++j) fit.exponents.emplace_back(packet.controllable_variables[j].first, x(j + 1));
  fit.points = keep.size();
  return fit;
}

PowerLawFit round_fit(const PowerLawFit& fit, const PowerLawConfig& config, std::string* constant_text) {
  PowerLawFit out = fit;
  for (auto& [name, p] : out.exponents) {
    double half = std::round(2 * p) / 2;
    if (std::fabs(p - half) <= config.exponent_snap) p = half;
  }
  double c = std::exp(fit.log_c);
  std::string text;
  auto close = [&](double candidate, double target) {
    return std::fabs(candidate - target) <= config.constant_snap * target;
  };
  for (int q = 1; q <= config.max_denominator && text.empty(); ++q) {
    double p = std::round(c * q);
    if (p >= 1 && close(p / q, c)) {
      out.log_c = std::log(p / q);
      text = q == 1 ? fmt_number(p) : fmt_number(p) + "/" + std::to_string(q);
    }
  }
  for (int q = 1; q <= config.max_denominator && text.empty(); ++q) {
    double p = std::round(c * c * q);
    if (p >= 1 && close(p / q, c * c)) {
      out.log_c = 0.5 * std::log(p / q);
      text = "np.sqrt(" + (q == 1 ? fmt_number(p) : fmt_number(p) + "/" + std::to_string(q)) + ")";
    }
  }
  if (constant_text) *constant_text = text;
  return out;
}

std::string render_power_law(const PowerLawFit& fit, const std::string& constant_text) {
  std::vector<std::string> num, den;
  if (constant_text.empty()) {
    num.push_back(fmt_number(std::exp(fit.log_c)));
  } else if (constant_text != "1") {
    num.push_back(constant_text);
  }
  for (const auto& [name, p] : fit.exponents) {
    if (p > 0) num.push_back(term(name, p));
    if (p < 0) den.push_back(term(name, -p));
  }
  auto join = [](const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : " * ") + p;
    return s;
  };
  std::string out = num.empty() ? "1" : join(num);
  if (den.size() == 1) out += " / " + den[0];
  if (den.size() > 1) out += " / (" + join(den) + ")";
  return fit.sign < 0 ? "-" + out : out;
}

void ScriptedPowerLaw::brief(const Briefing& b) {
  briefing_ = b;
  grid_.clear();
  for (const auto& [name, d] : b.controllables) {
    double hi = d.upper;
    double lo = d.lower > 0 ? d.lower : hi * 1e-3;
    std::array<double, 3> g{};
    bool ok = hi > 0 && lo < hi;
    for (int i = 0; ok && i < 3; ++i) {
      double q = 0.25 * (i + 1);
      g[i] = tidy(std::exp(std::log(lo) + q * (std::log(hi) - std::log(lo))));
      ok = g[i] > 0 && d.contains(g[i]) && (i == 0 || g[i] > g[i - 1]);
    }
    if (!ok) throw DegenerateDesign("domain of " + name + " cannot hold three distinct positive points");
    grid_.push_back(g);
  }
}

std::vector<session::NamedValues> ScriptedPowerLaw::design() const {
  session::NamedValues base;
  for (std::size_t i = 0; i < grid_.size(); ++i) base.emplace_back(briefing_.controllables[i].first, grid_[i][1]);
  std::vector<session::NamedValues> out{base};
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    for (int k : {0, 2}) {
      auto e = base;
      e[i].second = grid_[i][k];
      out.push_back(std::move(e));
    }
  }
  return out;
}

session::AgentTurn ScriptedPowerLaw::act(const session::ObservationPacket& packet) {
  session::AgentTurn turn;
  const bool can_test = packet.quota.test_quota > 0;
  switch (phase_) {
    case Phase::kDesign:
      turn.next_experiments = design();
      phase_ = Phase::kRounded;
      return turn;
    case Phase::kRounded: {
      phase_ = Phase::kIdle;
      auto fit = fit_power_law(packet);
      if (!fit) return turn;
      std::string constant;
      rounded_formula_ = render_power_law(round_fit(*fit, config_, &constant), constant);
      raw_formula_ = render_power_law(*fit);
      turn.current_hypothesis_formula = rounded_formula_;
      turn.test_hypothesis_flag = can_test;
      if (raw_formula_ != rounded_formula_) phase_ = Phase::kRaw;
      return turn;
    }
    case Phase::kRaw:
      phase_ = Phase::kIdle;
      turn.current_hypothesis_formula = raw_formula_;
      turn.test_hypothesis_flag = can_test;
      return turn;
    case Phase::kIdle:
      return turn;
  }
  return turn;
}

}  // namespace eqgym::agents
