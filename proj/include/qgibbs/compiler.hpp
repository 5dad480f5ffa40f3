#pragma once

#include "qgibbs/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qgibbs {

/// u(theta, phi, lambda) = [[cos(t/2), -e^{i lambda} sin(t/2)],
///                          [e^{i phi} sin(t/2), e^{i(phi+lambda)} cos(t/2)]].
Matrix u_gate(double theta, double phi, double lambda);

struct Gate {
  enum class Type { u, cz };
  Type type = Type::u;
  int q0 = 0;
  int q1 = -1;      // second qubit of a CZ
  int param = -1;   // offset of (theta, phi, lambda) for u gates
};

/// Hardware-shaped ansatz on k qubits (qubit 0 = ancilla, most significant).
/// Each module visits its CZ edges in order (even modules) or in reverse
/// order (odd modules); every CZ is preceded by u gates on both of its
/// qubits. A final layer of u gates on all qubits closes the circuit.
struct TemplateCircuit {
  int k = 0;
  int m = 0;
  std::vector<std::pair<int, int>> cz_pattern;
  std::vector<Gate> gates;
  int n_params = 0;

  /// Number of CZ layers (two-qubit depth).
  int depth() const { return m * static_cast<int>(cz_pattern.size()); }
};

TemplateCircuit make_template(int k, int m, std::vector<std::pair<int, int>> cz_pattern);

/// Ladder for a one-dimensional gadget of radius r: system qubits 1..2r+1
/// in chain order, the ancilla coupled to the central system qubit. For r = 1
/// the even-module edge order is (1,2), (0,2), (2,3).
TemplateCircuit ladder_template(int r, int m);

/// Two-qubit template whose module is three CZs on the single edge.
TemplateCircuit pair_template(int m);

/// V(theta) as a dense 2^k unitary.
Matrix template_unitary(const TemplateCircuit& tpl, const Eigen::VectorXd& theta);

/// The 2x2 (u) or 4x4 (CZ) matrix of one gate.
Matrix gate_matrix(const Gate& g, const Eigen::VectorXd& theta);

/// sum_i sum_{j < 2^{k-1}} |U_ij - V_ij|^2 (the ancilla-|0> input columns).
double compilation_loss(const Matrix& u_target, const Matrix& v);

/// Same loss minimized over a global phase of V.
double phase_aligned_loss(const Matrix& u_target, const Matrix& v);

/// Loss and its analytic gradient with respect to theta.
double loss_and_gradient(const TemplateCircuit& tpl, const Matrix& u_target,
                         const Eigen::VectorXd& theta, Eigen::VectorXd* grad);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.99;
  double beta2 = 0.99;
  double epsilon = 1e-3;
  int iterations = 8000;
  int restarts = 50;
};

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  int t = 0;

  explicit AdamState(Eigen::Index n = 0) : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

/// One bias-corrected Adam update of x in place.
void adam_step(AdamState& state, Eigen::VectorXd& x, const Eigen::VectorXd& grad, const AdamConfig& cfg);

struct CompileResult {
  Eigen::VectorXd best_theta;
  double best_loss = 0.0;
  int best_restart = -1;
  /// Loss before each update plus the final loss, per restart (aborted
  /// restarts are truncated).
  std::vector<std::vector<double>> traces;
  std::vector<std::string> failures;
};

/// Adam from uniform [0, 2pi) starts; restart i draws from stream (seed, i).
CompileResult compile_gadget(const Matrix& u_target, const TemplateCircuit& tpl, const AdamConfig& cfg,
                             std::uint64_t seed);

/// Running minimum of a trace.
std::vector<double> best_so_far(const std::vector<double>& trace);

}  // namespace qgibbs
