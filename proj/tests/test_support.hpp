#pragma once

#include "spider/chain_model.hpp"
#include "spider/spider_rw.hpp"

namespace spider::testing {

// The worked constant-coefficient instance: N = 3, a = 1/5, b = 11/20,
// c = 1/4, alpha = (1/2, 1/8, 1/6, 5/24).
inline RWParams example_rw() {
  RWParams p;
  p.num_legs = 3;
  p.a = 0.2;
  p.b = 0.55;
  p.c = 0.25;
  p.alpha = {0.5, 1.0 / 8, 1.0 / 6, 5.0 / 24};
  return p;
}

inline ValidatedChain example_chain() { return validate(to_spider_params(example_rw())); }

// A level-dependent N = 2 chain exercising the prefix machinery.
inline ValidatedChain nonconstant_chain() {
  SpiderParams p;
  p.num_legs = 2;
  p.alpha = {0.7, 0.12, 0.18};
  LegTable leg1;
  leg1.prefix = {{0.2, 0.5, 0.3}, {0.15, 0.5, 0.35}};
  leg1.tail = {0.15, 0.55, 0.3};
  LegTable leg2;
  leg2.prefix = {{0.2, 0.45, 0.35}};
  leg2.tail = {0.18, 0.52, 0.3};
  p.legs = {leg1, leg2};
  return validate(std::move(p));
}

}  // namespace spider::testing
