#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qrl/rng.hpp"

namespace qrl {

using Amplitude = std::complex<double>;

// State of one n-qubit action register: 2^n complex amplitudes over the
// computational basis, basis state i <-> action index i. Kept as a plain
// struct; operations that require unit norm check it on entry.
struct ActionRegister {
  int qubits = 0;                 // n >= 1
  std::vector<Amplitude> amps;    // size 2^n, sum |amp|^2 == 1

  std::size_t size() const { return amps.size(); }
};

// Rotation angle of one Grover iteration, fixed by the register width:
// theta = arcsin(2^(-n/2)), so each iteration advances the target/rest
// decomposition by 2*theta.
struct GroverAngle {
  int qubits = 0;
  double theta = 0.0;
};

GroverAngle grover_angle(int qubits);

// Smallest n with 2^n >= action_count; action_count == 1 gives 0.
int qubit_count(int action_count);

// Equal-weight superposition |a_0> = H^(x)n |0...0>: every amplitude 2^(-n/2).
ActionRegister uniform_superposition(int qubits);

// Hadamard on qubit `target` (0 = most significant / leftmost in the basis
// label). Input must be normalized within 1e-9.
ActionRegister hadamard(const ActionRegister& reg, int target);

// Phase gate diag(1, e^{i*phi}) on qubit `target`.
ActionRegister phase_gate(const ActionRegister& reg, int target, double phi);

// One Grover step about `target_action`: reflect target's sign (U_a), then
// reflect every amplitude about the mean (U_a0). Applies `iterations` such
// steps and renormalizes once at the end as a drift safeguard; iterations == 0
// returns the register bit-for-bit unchanged.
ActionRegister grover_iterate(const ActionRegister& reg, int target_action,
                              int iterations);

// In-place equivalent of grover_iterate, used on hot paths.
void grover_rotate(ActionRegister& reg, int target_action, int iterations);

// Simulated measurement: draws one basis index with probability |amp|^2 by
// inverse-CDF over the cumulative norm in index order. The register is not
// modified — the agent keeps the superposition and only reads off an action.
int measure_collapse(const ActionRegister& reg, Rng& rng);

// Grover iteration count for one observed transition:
//   L = max(0, min(int(k * (r + v_next)), int(pi/(4*theta) - 1/2)))
// with int() truncating toward zero. The cap is the largest L that does not
// rotate the register past the target axis.
int compute_L(double reward, double v_next, double k, const GroverAngle& angle);

}  // namespace qrl
