#pragma once

#include <vector>

#include "plad/core_model.hpp"

// Dense two-phase tableau simplex for small linear programs. Used by the KKT
// verifier and as the exact cross-check backend for small LAD problems.
namespace plad::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };

/// minimize c'x subject to A x (rel) b, x >= 0.
struct Problem {
  Matrix a;
  Vector b;
  std::vector<Relation> relations;
  Vector c;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::IterationLimit;
  Vector x;
  double objective = 0.0;
  int pivots = 0;
};

Solution solve(const Problem& problem, int max_pivots = 200000);

}  // namespace plad::lp
