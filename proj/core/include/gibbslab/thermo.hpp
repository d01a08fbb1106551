#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gibbslab/gibbs.hpp"

namespace gibbslab {

enum class PressureMethod : std::uint8_t {
  TransferMatrix,
  Enumeration,
  OnsagerClosedForm,
};

// (1/m) log of the dominant eigenvalue of the periodic-transverse row
// transfer operator at the given coupling; width m <= 16 (2^m states).
// Power iteration to relative tolerance 1e-10.
double transfer_matrix_pressure(double coupling, int width);

// finite-volume value of the pressure sum on a free-boundary side x side
// box (side <= 5); no boundary field, matching the defining sum
double enumeration_pressure(double coupling, int side);

// closed-form thermodynamic limit (square-lattice nearest-neighbor model)
double onsager_pressure(double beta);

// P(q beta) by the chosen route
double pressure(double q, double beta, PressureMethod method,
                int width_or_side = 14);

struct PressureCurve {
  double beta = 0.0;
  std::vector<double> q;
  std::vector<double> value;  // nats/site
  PressureMethod method = PressureMethod::TransferMatrix;
  int width_or_side = 14;
};

PressureCurve pressure_curve(double beta, const std::vector<double>& qs,
                             PressureMethod method, int width_or_side = 14);

// scaled cumulant generating function of log waiting times:
//   q >= -1 : P((1-q) beta) + (q-1) P(beta)
//   q < -1  : P(2 beta) - 2 P(beta)
double rate_function(double q, double beta,
                     PressureMethod method = PressureMethod::TransferMatrix,
                     int width_or_side = 14);

struct RateFunctionCurve {
  double beta = 0.0;
  std::vector<double> q;
  std::vector<double> value;
};

RateFunctionCurve rate_function_curve(double beta, const std::vector<double>& qs,
                                      PressureMethod method = PressureMethod::TransferMatrix,
                                      int width_or_side = 14);

// s = P(beta) - beta dP/dbeta from the transfer-matrix curve (central
// difference with Richardson extrapolation, step 1e-4); in [0, log 2]
double entropy_oracle(double beta, int width = 14);
double onsager_entropy(double beta);  // same formula on the closed form

struct EntropyEstimate {
  int n = 0;
  double value = 0.0;  // nats/site
  double se = 0.0;
  std::size_t samples = 0;
  double censored_fraction = 0.0;
  bool inconclusive = false;  // censoring above 1/2
  // strong-approximation bracket bookkeeping (return-time route)
  double bracket_fraction = 0.0;
  double bracket_excluded = 0.0;  // replicas without a resolved normalizer
  std::map<std::string, double> extras;
};

// entropy from repetition of a sample's own initial pattern:
// mean (1/n^d) log R over replicas, with the containment fraction of
// log(R * P(sigma_{C_n})) in [-eps log n, log log n^eps]
EntropyEstimate entropy_via_return(int n, double beta, int replicas,
                                   std::uint64_t seed, double eps = 4.0,
                                   int cap = 0, int calibration = 0);

enum class WaitingLaw : std::uint8_t { SameP, MinusPhase, Bernoulli };

EntropyEstimate entropy_via_waiting(WaitingLaw q_law, double bernoulli_p,
                                    int n, double beta, int replicas,
                                    std::uint64_t seed, int cap = 0);

// limit target for the waiting-time exponent under the chosen eta-law
double waiting_exponent_target(WaitingLaw q_law, double bernoulli_p,
                               double beta, int width = 14);

EntropyEstimate matching_exponent(int n, double beta, int pairs,
                                  std::uint64_t seed, int cap = 0);

// -(1/n^d) log sum_A P(sigma_{C_n} = A)^2: enumerated for (n+1)^2 <= 25,
// extrapolated through the pressure limit 2P(beta) - P(2 beta) above that
double collision_entropy_target(int n, double beta, int width = 14);

}  // namespace gibbslab
