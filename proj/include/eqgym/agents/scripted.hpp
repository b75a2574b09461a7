#pragma once

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "eqgym/agents/agent.hpp"

namespace eqgym::agents {

// Samples every controllable by its scale hint, ten per turn. Never tests
// and never states a hypothesis.
class ScriptedRandom : public Agent {
 public:
  explicit ScriptedRandom(std::uint64_t seed, std::size_t batch = 10) : rng_(seed), batch_(batch) {}
  void brief(const Briefing& b) override { briefing_ = b; }
  session::AgentTurn act(const session::ObservationPacket& packet) override;

 private:
  std::mt19937_64 rng_;
  std::size_t batch_;
  Briefing briefing_;
};

// Fitted y = C * prod x_i^p_i.
struct PowerLawFit {
  int sign = 1;
  double log_c = 0.0;
  std::vector<std::pair<std::string, double>> exponents;  // controllable order
  std::size_t points = 0;
};

struct PowerLawConfig {
  double exponent_snap = 1e-3;   // snap to a half-integer when this close
  double constant_snap = 1e-6;   // relative tolerance for named constants
  int max_denominator = 64;
};

// Least squares in log space over valid records with nonzero outputs of
// one sign. Returns nothing when the system is underdetermined.
std::optional<PowerLawFit> fit_power_law(const session::ObservationPacket& packet);

// Snaps exponents and the constant to the small vocabulary of PowerLawConfig.
PowerLawFit round_fit(const PowerLawFit& fit, const PowerLawConfig& config, std::string* constant_text);

// Formula text in the packet's names. `constant_text` overrides the
// decimal rendering of C when nonempty.
std::string render_power_law(const PowerLawFit& fit, const std::string& constant_text = "");

// One-factor-at-a-time design on a log grid, a fit, then up to two tests:
// the rounded formula first and the raw fit if that fails. Idles afterwards.
class ScriptedPowerLaw : public Agent {
 public:
  explicit ScriptedPowerLaw(PowerLawConfig config = {}) : config_(config) {}
  // Throws DegenerateDesign when a domain cannot hold three distinct
  // positive points.
  void brief(const Briefing& b) override;
  session::AgentTurn act(const session::ObservationPacket& packet) override;

  // Design points for the briefing: the base point, then two points per
  // variable. Exposed for tests.
  std::vector<session::NamedValues> design() const;

 private:
  enum class Phase { kDesign, kRounded, kRaw, kIdle };

  PowerLawConfig config_;
  Briefing briefing_;
  // Three increasing positive grid values per controllable.
  std::vector<std::array<double, 3>> grid_;
  Phase phase_ = Phase::kDesign;
  std::string rounded_formula_;
  std::string raw_formula_;
};

}  // namespace eqgym::agents
