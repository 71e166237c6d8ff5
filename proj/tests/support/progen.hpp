#pragma once

#include <random>
#include <string>

namespace preguss::testing {

struct GenConfig {
  int functions = 3;
  int max_params = 2;
  int max_stmts = 4;      // per block
  int max_depth = 2;      // statement nesting
  int max_expr_depth = 2;
  bool loops = true;
};

// Random acyclic MiniC program: f_i may only call f_j with j < i; no `main`,
// so every function without callers is an analysis root. Loops are counted
// (`while (cK < L)`), so every execution terminates.
std::string generate_program(std::mt19937& rng, const GenConfig& cfg = {});

// Star shape: one host calling `callees` functions, with the guarded
// division depending on exactly one of them (`dependent`, 1-based).
struct Star {
  std::string source;
  std::string host;
  std::string dependent;
};
Star generate_star(std::mt19937& rng, int callees = 10);

}  // namespace preguss::testing
