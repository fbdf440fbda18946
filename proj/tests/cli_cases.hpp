#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heis/cli.hpp"

namespace heis::testing {

struct CliCase {
  std::vector<std::string> args;
  int code;
};

// Valid, failing and malformed invocations with their required exit codes.
inline std::vector<CliCase> cli_exit_cases() {
  return {
      {{"verify", "leibniz-defect", "--n", "1"}, kExitOk},
      {{"verify", "leibniz-defect", "--n", "3"}, kExitOk},
      {{"verify", "theta-normal-form", "--n", "1", "--trials", "5"}, kExitOk},
      {{"verify", "h1-coefficients", "--n", "1"}, kExitOk},
      {{"verify", "class-invariance", "--n", "2"}, kExitOk},
      {{"verify", "all", "--n", "1"}, kExitOk},
      {{"verify", "j-membership", "--n", "2"}, kExitFailed},
      {{"verify", "vertical-split", "--n", "2", "--convention", "+"}, kExitFailed},
      {{"verify", "leibniz-defect", "--n", "1", "--trials", "5", "--mutate"}, kExitFailed},
      {{"verify", "all", "--n", "2"}, kExitFailed},
      {{"d", "--n", "1", "f*dx1"}, kExitOk},
      {{"wedge", "--n", "2", "dx1", "dy2"}, kExitOk},
      {{"scriptL", "--n", "1", "w1*dx1 + w2*dy1"}, kExitOk},
      {{"project", "--n", "1", "--part", "vertical", "f*dx1 + g*theta"}, kExitOk},
      {{"inJ", "--n", "1", "dx1^theta"}, kExitOk},
      {{"inI", "--n", "1", "dx1"}, kExitOk},
      {{"reduceI", "--n", "2", "dx1^dy1"}, kExitOk},
      {{"eval", "--n", "1", "X1(f)", "--bind", "f=t", "--at", "1,2,3"}, kExitOk},
      {{"ramp", "--t", "0", "--h", "1", "--eps", "0.1"}, kExitOk},
      {{"ramp", "--s", "0.5"}, kExitOk},
      {{}, kExitUsage},
      {{"frobnicate"}, kExitUsage},
      {{"d", "--n", "1", "w1(f)*dx1^dy1 + g*theta"}, kExitUsage},
      {{"d", "--n", "1", "dx2"}, kExitUsage},
      {{"d", "--n", "9", "f"}, kExitUsage},
      {{"d", "--n", "1", "--convention", "0", "f"}, kExitUsage},
      {{"d", "--n", "1", "--format", "xml", "f"}, kExitUsage},
      {{"L", "--n", "2", "theta"}, kExitUsage},
      {{"verify", "no-such-identity"}, kExitUsage},
      {{"verify", "h1-coefficients", "--n", "2"}, kExitUsage},
      {{"verify", "leibniz-defect", "--n", "4"}, kExitUsage},
      {{"eval", "--n", "1", "X1(f)", "--at", "1,2,3"}, kExitUsage},
      {{"eval", "--n", "1", "X1(f)", "--bind", "f=t", "--at", "1,2"}, kExitUsage},
      {{"ramp", "--h", "1", "--eps", "0.6"}, kExitUsage},
      {{"ramp", "--h", "0"}, kExitUsage},
  };
}

inline std::string joined(const std::vector<std::string>& args) {
  std::string out;
  for (auto& a : args) out += (out.empty() ? "" : " ") + a;
  return out;
}

}  // namespace heis::testing
