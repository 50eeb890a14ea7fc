#include "qrl/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qrl {

namespace {

double norm_sq(const ActionRegister& reg) {
  double total = 0.0;
  for (const Amplitude& a : reg.amps) total += std::norm(a);
  return total;
}

void require_register(const ActionRegister& reg, const char* where) {
  if (reg.qubits < 1)
    throw std::invalid_argument(std::string(where) + ": register needs >= 1 qubit");
  if (reg.amps.size() != (std::size_t{1} << reg.qubits))
    throw std::invalid_argument(std::string(where) + ": amplitude count != 2^qubits");
}

void require_normalized(const ActionRegister& reg, const char* where) {
  require_register(reg, where);
  if (std::abs(std::sqrt(norm_sq(reg)) - 1.0) > 1e-9)
    throw std::domain_error(std::string(where) + ": register is not normalized");
}

void require_qubit(const ActionRegister& reg, int target, const char* where) {
  if (target < 0 || target >= reg.qubits)
    throw std::out_of_range(std::string(where) + ": qubit index " +
                            std::to_string(target) + " out of range");
}

}  // namespace

GroverAngle grover_angle(int qubits) {
  if (qubits < 1) throw std::invalid_argument("grover_angle: qubits must be >= 1");
  return {qubits, std::asin(std::pow(2.0, -0.5 * qubits))};
}

int qubit_count(int action_count) {
  if (action_count < 1)
    throw std::invalid_argument("qubit_count: action_count must be >= 1");
  int n = 0;
  while ((1 << n) < action_count) ++n;
  return n;
}

ActionRegister uniform_superposition(int qubits) {
  if (qubits < 1)
    throw std::invalid_argument("uniform_superposition: qubits must be >= 1");
  const std::size_t dim = std::size_t{1} << qubits;
  const double amp = std::pow(2.0, -0.5 * qubits);
  return {qubits, std::vector<Amplitude>(dim, Amplitude{amp, 0.0})};
}

ActionRegister hadamard(const ActionRegister& reg, int target) {
  require_normalized(reg, "hadamard");
  require_qubit(reg, target, "hadamard");
  // Qubit 0 is the most significant bit of the basis index.
  const std::size_t bit = std::size_t{1} << (reg.qubits - 1 - target);
  const double s = std::numbers::sqrt2 / 2.0;
  ActionRegister out = reg;
  for (std::size_t i = 0; i < reg.amps.size(); ++i) {
    if (i & bit) continue;
    const Amplitude lo = reg.amps[i];
    const Amplitude hi = reg.amps[i | bit];
    out.amps[i] = s * (lo + hi);
    out.amps[i | bit] = s * (lo - hi);
  }
  return out;
}

ActionRegister phase_gate(const ActionRegister& reg, int target, double phi) {
  require_normalized(reg, "phase_gate");
  require_qubit(reg, target, "phase_gate");
  const std::size_t bit = std::size_t{1} << (reg.qubits - 1 - target);
  const Amplitude phase = std::polar(1.0, phi);
  ActionRegister out = reg;
  for (std::size_t i = 0; i < reg.amps.size(); ++i)
    if (i & bit) out.amps[i] *= phase;
  return out;
}

void grover_rotate(ActionRegister& reg, int target_action, int iterations) {
  require_register(reg, "grover_rotate");
  if (target_action < 0 ||
      static_cast<std::size_t>(target_action) >= reg.amps.size())
    throw std::out_of_range("grover_rotate: target action out of range");
  if (iterations < 0)
    throw std::invalid_argument("grover_rotate: iterations must be >= 0");
  if (iterations == 0) return;  // bit-for-bit no-op, including no renorm

  const double inv_dim = 1.0 / static_cast<double>(reg.amps.size());
  for (int it = 0; it < iterations; ++it) {
    // U_a: flip the sign of the target amplitude.
    reg.amps[target_action] = -reg.amps[target_action];
    // U_a0: reflect every amplitude about the mean.
    Amplitude mean{0.0, 0.0};
    for (const Amplitude& a : reg.amps) mean += a;
    mean *= inv_dim;
    for (Amplitude& a : reg.amps) a = 2.0 * mean - a;
  }

  // Reflections are unitary; this only sweeps up accumulated rounding drift.
  const double total = norm_sq(reg);
  if (total <= 0.0 || !std::isfinite(total))
    throw std::domain_error("grover_rotate: register norm degenerated");
  const double scale = 1.0 / std::sqrt(total);
  for (Amplitude& a : reg.amps) a *= scale;
}

ActionRegister grover_iterate(const ActionRegister& reg, int target_action,
                              int iterations) {
  ActionRegister out = reg;
  grover_rotate(out, target_action, iterations);
  return out;
}

int measure_collapse(const ActionRegister& reg, Rng& rng) {
  require_register(reg, "measure_collapse");
  double total = 0.0;
  for (const Amplitude& a : reg.amps) total += std::norm(a);
  if (!(total > 1e-18) || !std::isfinite(total))
    throw std::domain_error("measure_collapse: register norm degenerated");

  const double u = rng.next_double() * total;
  double cum = 0.0;
  const std::size_t last = reg.amps.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    cum += std::norm(reg.amps[i]);
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(last);  // guards u == total under rounding
}

int compute_L(double reward, double v_next, double k,
              const GroverAngle& angle) {
  if (!(angle.theta > 0.0))
    throw std::invalid_argument("compute_L: angle.theta must be positive");
  const double raw = k * (reward + v_next);
  // For n = 2 the cap expression is exactly 1 mathematically, but asin
  // rounding can land it 1 ulp below; the relative nudge restores the exact
  // boundary without affecting any non-boundary width.
  const double cap_raw = std::numbers::pi / (4.0 * angle.theta) - 0.5;
  const int cap = static_cast<int>(cap_raw * (1.0 + 8.0 * 1e-16));
  if (!(raw > 0.0)) return 0;  // negative, zero, or NaN product
  if (raw >= static_cast<double>(cap)) return cap;
  return static_cast<int>(raw);  // 0 < raw < cap: truncation is safe
}

}  // namespace qrl
