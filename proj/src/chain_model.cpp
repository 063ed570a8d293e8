#include "spider/chain_model.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

namespace spider {

namespace {

constexpr double kSumTol = 1e-12;

bool in_unit_interval(double p) { return p >= 0.0 && p <= 1.0; }

void check_triple(const RateTriple& t, int leg, int site_from, const char* what,
                  std::vector<Violation>& out) {
  std::ostringstream where;
  where << what << " of leg " << leg << " (sites >= " << site_from << ")";
  if (!in_unit_interval(t.up) || !in_unit_interval(t.stay) || !in_unit_interval(t.down))
    out.push_back({"NegativeProbability", where.str() + " has an entry outside [0,1]"});
  if (std::abs(t.up + t.stay + t.down - 1.0) > kSumTol)
    out.push_back({"SumViolation", where.str() + " sums to " +
                                       std::to_string(t.up + t.stay + t.down)});
  if (t.up <= 0.0)
    out.push_back({"ZeroRate", where.str() + " has a = 0 (leg not irreducible)"});
  if (t.down <= 0.0)
    out.push_back({"ZeroRate", where.str() + " has c = 0 (leg not irreducible)"});
}

}  // namespace

std::vector<Violation> check(const SpiderParams& params) {
  std::vector<Violation> out;
  const int N = params.num_legs;
  if (N < 1) {
    out.push_back({"DegenerateAlpha", "number of legs must be positive"});
    return out;
  }
  if (static_cast<int>(params.alpha.size()) != N + 1) {
    out.push_back({"SumViolation", "alpha must have N+1 entries"});
    return out;
  }
  if (static_cast<int>(params.legs.size()) != N) {
    out.push_back({"ZeroRate", "expected one rate table per leg"});
    return out;
  }
  double sum = 0.0;
  for (int m = 0; m <= N; ++m) {
    if (!in_unit_interval(params.alpha[m]))
      out.push_back({"NegativeProbability", "alpha_" + std::to_string(m) + " outside [0,1]"});
    sum += params.alpha[m];
  }
  if (std::abs(sum - 1.0) > kSumTol)
    out.push_back({"SumViolation", "alpha sums to " + std::to_string(sum)});
  // alpha_N > 0 and alpha_m > 0 for interior legs keep Pi_0 nonsingular.
  if (params.alpha[N] <= 0.0)
    out.push_back({"DegenerateAlpha", "alpha_N must be positive"});
  for (int m = 1; m < N; ++m)
    if (params.alpha[m] <= 0.0)
      out.push_back({"DegenerateAlpha", "alpha_" + std::to_string(m) + " must be positive"});
  for (int m = 1; m <= N; ++m) {
    const LegTable& leg = params.legs[m - 1];
    for (int k = 1; k <= static_cast<int>(leg.prefix.size()); ++k)
      check_triple(leg.prefix[k - 1], m, k, "prefix entry", out);
    check_triple(leg.tail, m, static_cast<int>(leg.prefix.size()) + 1, "tail", out);
  }
  return out;
}

ValidatedChain validate(SpiderParams params) {
  auto violations = check(params);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return ValidatedChain(std::move(params));
}

bool ValidatedChain::constant_rates() const {
  const RateTriple& t0 = params_.legs[0].tail;
  for (const LegTable& leg : params_.legs) {
    if (leg.tail.up != t0.up || leg.tail.stay != t0.stay || leg.tail.down != t0.down)
      return false;
    for (const RateTriple& t : leg.prefix)
      if (t.up != t0.up || t.stay != t0.stay || t.down != t0.down) return false;
  }
  return true;
}

RateTriple recurrence_coeff(const ValidatedChain& chain, int leg, int n) {
  const int N = chain.num_legs();
  if (leg == N) {
    if (n == 0) return {chain.alpha(N), chain.alpha(0), 0.0};
    return chain.leg_rate(N, n);
  }
  return chain.leg_rate(leg, n + 1);
}

BlockTriple blocks(const ValidatedChain& chain, int level) {
  const int N = chain.num_legs();
  BlockTriple out;
  out.level = level;
  if (level == 0) {
    out.B = Matrix::Zero(N, N);
    out.B(0, 0) = chain.alpha(0);
    Vector adiag(N);
    adiag(0) = chain.alpha(N);
    for (int j = 1; j < N; ++j) {
      const RateTriple& t = chain.leg_rate(j, 1);
      out.B(0, j) = chain.alpha(j);
      out.B(j, 0) = t.down;
      out.B(j, j) = t.stay;
      adiag(j) = t.up;
    }
    out.A = adiag.asDiagonal();
    out.C = Matrix();
    return out;
  }
  Vector a(N), b(N), c(N);
  for (int p = 0; p < N; ++p) {
    const RateTriple& t = recurrence_coeff(chain, p == 0 ? N : p, level);
    a(p) = t.up;
    b(p) = t.stay;
    c(p) = t.down;
  }
  out.A = a.asDiagonal();
  out.B = b.asDiagonal();
  out.C = c.asDiagonal();
  return out;
}

Matrix truncate(const ValidatedChain& chain, int L, int row_cap) {
  const int N = chain.num_legs();
  const long rows = static_cast<long>(L + 1) * N;
  if (rows > row_cap)
    throw Error("SizeOverflow", std::to_string(rows) + " rows exceeds cap " +
                                    std::to_string(row_cap));
  Matrix P = Matrix::Zero(rows, rows);
  for (int n = 0; n <= L; ++n) {
    BlockTriple t = blocks(chain, n);
    P.block(n * N, n * N, N, N) = t.B;
    if (n < L) P.block(n * N, (n + 1) * N, N, N) = t.A;
    if (n >= 1) P.block(n * N, (n - 1) * N, N, N) = t.C;
  }
  return P;
}

PotentialCoeffs potential(const ValidatedChain& chain, int n) {
  const int N = chain.num_legs();
  PotentialCoeffs out;
  out.level = n;
  out.diagonal = Vector(N);
  // pi_{n,N} with the convention a_{0,N} = alpha_N.
  double p = 1.0;
  for (int i = 1; i <= n; ++i)
    p *= recurrence_coeff(chain, N, i - 1).up / chain.leg_rate(N, i).down;
  out.diagonal(0) = p;
  for (int j = 1; j < N; ++j) {
    double q = chain.alpha(j) / chain.leg_rate(j, 1).down;  // pi_{1,j}
    for (int i = 1; i <= n; ++i)
      q *= chain.leg_rate(j, i).up / chain.leg_rate(j, i + 1).down;
    out.diagonal(j) = q;
  }
  return out;
}

LegNode leg_node(int level, int phase, int num_legs) {
  if (phase == 0) return {level == 0 ? 0 : num_legs, level};
  return {phase, level + 1};
}

std::pair<int, int> level_phase(const LegNode& pos, int num_legs) {
  if (pos.leg == 0 || pos.node == 0) return {0, 0};
  if (pos.leg == num_legs) return {pos.node, 0};
  return {pos.node - 1, pos.leg};
}

double parse_number(const nlohmann::json& value) {
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    const double num = std::stod(s.substr(0, slash));
    const double den = std::stod(s.substr(slash + 1));
    return num / den;
  }
  return value.get<double>();
}

SpiderParams parse_spider_params(const nlohmann::json& spec) {
  SpiderParams p;
  p.num_legs = spec.at("N").get<int>();
  for (const auto& v : spec.at("alpha")) p.alpha.push_back(parse_number(v));
  for (const auto& leg : spec.at("legs")) {
    LegTable table;
    if (leg.contains("prefix"))
      for (const auto& row : leg["prefix"])
        table.prefix.push_back(
            {parse_number(row.at(0)), parse_number(row.at(1)), parse_number(row.at(2))});
    const auto& t = leg.at("tail");
    table.tail = {parse_number(t.at(0)), parse_number(t.at(1)), parse_number(t.at(2))};
    p.legs.push_back(std::move(table));
  }
  return p;
}

nlohmann::json to_json(const SpiderParams& params) {
  nlohmann::json spec;
  spec["N"] = params.num_legs;
  spec["alpha"] = params.alpha;
  auto legs = nlohmann::json::array();
  for (const auto& leg : params.legs) {
    nlohmann::json j;
    auto prefix = nlohmann::json::array();
    for (const auto& t : leg.prefix) prefix.push_back({t.up, t.stay, t.down});
    j["prefix"] = std::move(prefix);
    j["tail"] = {leg.tail.up, leg.tail.stay, leg.tail.down};
    legs.push_back(std::move(j));
  }
  spec["legs"] = std::move(legs);
  return spec;
}

}  // namespace spider
