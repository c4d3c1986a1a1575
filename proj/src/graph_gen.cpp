#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "nibblepack/graph.hpp"

namespace nibblepack {

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

std::uint64_t edge_key(std::uint32_t u, std::uint32_t v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Pairing-model matching on degree stubs, followed by local re-matching of
// conflicting pairs (self-loops, duplicates, pairs inside a forbidden block).
// block[v] < 0 disables the block constraint for v. Returns the number of
// accepted swap proposals, or throws when the repair budget runs out.
struct PairingResult {
  std::vector<Edge> edges;
  std::size_t repair_steps = 0;
};

PairingResult pair_stubs(std::uint32_t n, std::uint32_t degree, const std::vector<std::int64_t>& block,
                         Rng& rng) {
  PairingResult result;
  if (degree == 0) return result;
  NP_CHECK((static_cast<std::uint64_t>(n) * degree) % 2 == 0, "n*degree must be even");

  std::vector<std::uint32_t> stubs;
  stubs.reserve(static_cast<std::size_t>(n) * degree);
  for (std::uint32_t v = 0; v < n; ++v) {
    for (std::uint32_t k = 0; k < degree; ++k) stubs.push_back(v);
  }
  for (std::size_t i = stubs.size(); i > 1; --i) {
    std::swap(stubs[i - 1], stubs[rng.uniform_below(i)]);
  }

  const std::size_t pairs = stubs.size() / 2;
  auto first = [&](std::size_t i) -> std::uint32_t& { return stubs[2 * i]; };
  auto second = [&](std::size_t i) -> std::uint32_t& { return stubs[2 * i + 1]; };

  std::unordered_map<std::uint64_t, int> multiplicity;
  multiplicity.reserve(pairs * 2);
  for (std::size_t i = 0; i < pairs; ++i) ++multiplicity[edge_key(first(i), second(i))];

  auto same_block = [&](std::uint32_t u, std::uint32_t v) {
    return block[u] >= 0 && block[u] == block[v];
  };
  auto pair_bad = [&](std::size_t i) {
    const std::uint32_t u = first(i), v = second(i);
    return u == v || same_block(u, v) || multiplicity[edge_key(u, v)] > 1;
  };
  // Candidate (u,v) valid against the current multiset, ignoring pairs i, j
  // which are about to be replaced.
  auto candidate_ok = [&](std::uint32_t u, std::uint32_t v, int allowed) {
    if (u == v || same_block(u, v)) return false;
    auto it = multiplicity.find(edge_key(u, v));
    return it == multiplicity.end() || it->second <= allowed;
  };

  std::vector<std::size_t> worklist;
  for (std::size_t i = 0; i < pairs; ++i) {
    if (pair_bad(i)) worklist.push_back(i);
  }

  std::size_t budget = 256 * pairs + 4096;
  while (!worklist.empty()) {
    const std::size_t i = worklist.back();
    if (!pair_bad(i)) {  // fixed as a side effect of an earlier swap
      worklist.pop_back();
      continue;
    }
    if (budget == 0) {
      throw RetriesExhausted("stub re-matching budget exhausted; degree sequence too constrained",
                             StepFailureCounts{});
    }
    --budget;
    ++result.repair_steps;
    const std::size_t j = rng.uniform_below(pairs);
    if (j == i) continue;
    const std::uint32_t a = first(i), b = second(i);
    const std::uint32_t c = first(j), d = second(j);
    const std::uint64_t key_ab = edge_key(a, b), key_cd = edge_key(c, d);
    // Count how many duplicates of a candidate key we tolerate: keys equal to
    // the two vanishing pairs free up one slot each.
    auto allowance = [&](std::uint32_t u, std::uint32_t v) {
      int allowed = 0;
      const std::uint64_t k = edge_key(u, v);
      if (k == key_ab) ++allowed;
      if (k == key_cd) ++allowed;
      return allowed;
    };
    bool committed = false;
    for (int variant = 0; variant < 2 && !committed; ++variant) {
      const std::uint32_t p = variant == 0 ? c : d;
      const std::uint32_t q = variant == 0 ? d : c;
      // proposal: (a,p), (b,q)
      if (!candidate_ok(a, p, allowance(a, p))) continue;
      if (edge_key(a, p) == edge_key(b, q)) continue;
      if (!candidate_ok(b, q, allowance(b, q))) continue;
      --multiplicity[key_ab];
      --multiplicity[key_cd];
      first(i) = a;
      second(i) = p;
      first(j) = b;
      second(j) = q;
      ++multiplicity[edge_key(a, p)];
      ++multiplicity[edge_key(b, q)];
      committed = true;
    }
    if (committed) {
      worklist.pop_back();
      if (pair_bad(i)) worklist.push_back(i);  // defensive; cannot trigger
    }
  }

  result.edges.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) result.edges.emplace_back(first(i), second(i));
  return result;
}

}  // namespace

SharpnessResult sharpness_construction(std::uint32_t n, std::uint32_t delta, double eta, Rng& rng) {
  const double clique_size_real = eta * delta;
  const auto clique_size = static_cast<std::uint32_t>(std::llround(clique_size_real));
  if (std::fabs(clique_size_real - clique_size) > 1e-9 || clique_size < 1) {
    throw ConfigError("eta*delta must be a positive integer");
  }
  if (clique_size > delta) throw ConfigError("eta must be <= 1");
  if (n % clique_size != 0) throw ConfigError("n must be divisible by eta*delta");
  const std::uint32_t overlay_degree = delta - clique_size;
  if ((static_cast<std::uint64_t>(overlay_degree) * n) % 2 != 0) {
    throw ConfigError("(1-eta)*delta*n must be even");
  }

  std::vector<Edge> edges;
  std::vector<std::int64_t> block(n);
  for (std::uint32_t v = 0; v < n; ++v) block[v] = v / clique_size;
  for (std::uint32_t b = 0; b < n / clique_size; ++b) {
    const std::uint32_t base = b * clique_size;
    for (std::uint32_t i = 0; i < clique_size; ++i) {
      for (std::uint32_t j = i + 1; j < clique_size; ++j) {
        edges.emplace_back(base + i, base + j);
      }
    }
  }

  SharpnessResult result;
  if (overlay_degree > 0) {
    PairingResult overlay = pair_stubs(n, overlay_degree, block, rng);
    result.repair_steps = overlay.repair_steps;
    edges.insert(edges.end(), overlay.edges.begin(), overlay.edges.end());
  }
  result.graph = Graph::from_edges(n, std::move(edges));
  NP_CHECK(result.graph.num_edges() ==
               static_cast<std::size_t>(n) / clique_size * (clique_size * (clique_size - 1) / 2) +
                   static_cast<std::size_t>(overlay_degree) * n / 2,
           "overlay collided with a clique edge");
  result.realized_max_codegree = degree_profile(result.graph).max_codegree;
  return result;
}

RegularResult random_regular_capped(std::uint32_t n, std::uint32_t delta,
                                    std::uint32_t codegree_cap, Rng& rng, int max_attempts) {
  if (delta >= n && delta > 0) throw ConfigError("degree must be < n");
  if ((static_cast<std::uint64_t>(n) * delta) % 2 != 0) throw ConfigError("n*delta must be even");
  const std::vector<std::int64_t> no_blocks(n, -1);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    PairingResult pairing = pair_stubs(n, delta, no_blocks, rng);
    Graph g = Graph::from_edges(n, std::move(pairing.edges));
    NP_CHECK(g.num_edges() == static_cast<std::size_t>(n) * delta / 2, "pairing left duplicates");
    if (degree_profile(g).max_codegree <= codegree_cap) {
      return RegularResult{std::move(g), attempt};
    }
  }
  StepFailureCounts counts;
  counts.attempts = max_attempts;
  throw RetriesExhausted("codegree cap " + std::to_string(codegree_cap) + " not reached in " +
                             std::to_string(max_attempts) + " attempts",
                         counts);
}

// ---------------------------------------------------------------------------
// GF(q) tables and the point/hyperplane incidence graph of PG(3, q).

namespace {

struct FieldTables {
  std::uint32_t q = 0;
  std::vector<std::uint8_t> add;  // q*q
  std::vector<std::uint8_t> mul;  // q*q
};

// Irreducible polynomials over GF(p), coefficient i belongs to x^i.
const std::vector<std::uint8_t>* irreducible_for(std::uint32_t q) {
  static const std::unordered_map<std::uint32_t, std::vector<std::uint8_t>> table = {
      {4, {1, 1, 1}},        // x^2 + x + 1 over GF(2)
      {8, {1, 1, 0, 1}},     // x^3 + x + 1
      {9, {1, 0, 1}},        // x^2 + 1 over GF(3)
      {16, {1, 1, 0, 0, 1}}, // x^4 + x + 1
      {25, {2, 0, 1}},       // x^2 + 2 over GF(5)
      {27, {1, 2, 0, 1}},    // x^3 + 2x + 1 over GF(3)
      {32, {1, 0, 1, 0, 0, 1}},  // x^5 + x^2 + 1
  };
  auto it = table.find(q);
  return it == table.end() ? nullptr : &it->second;
}

FieldTables make_field(std::uint32_t q) {
  if (q < 2 || q > 32) throw ConfigError("field order must be in [2, 32]");
  std::uint32_t p = 0;
  for (std::uint32_t cand = 2; cand <= q; ++cand) {
    if (q % cand == 0) {
      p = cand;
      break;
    }
  }
  std::uint32_t k = 0;
  std::uint32_t check = 1;
  while (check < q) {
    check *= p;
    ++k;
  }
  if (check != q) throw ConfigError("field order must be a prime power");

  FieldTables f;
  f.q = q;
  f.add.resize(q * q);
  f.mul.resize(q * q);

  auto digits_of = [&](std::uint32_t e) {
    std::vector<std::uint32_t> d(k);
    for (std::uint32_t i = 0; i < k; ++i) {
      d[i] = e % p;
      e /= p;
    }
    return d;
  };
  auto encode = [&](const std::vector<std::uint32_t>& d) {
    std::uint32_t e = 0;
    for (std::uint32_t i = k; i-- > 0;) e = e * p + d[i];
    return e;
  };

  const std::vector<std::uint8_t>* irr = k > 1 ? irreducible_for(q) : nullptr;
  if (k > 1 && irr == nullptr) throw ConfigError("unsupported field order");

  for (std::uint32_t a = 0; a < q; ++a) {
    const auto da = digits_of(a);
    for (std::uint32_t b = 0; b < q; ++b) {
      const auto db = digits_of(b);
      std::vector<std::uint32_t> sum(k);
      for (std::uint32_t i = 0; i < k; ++i) sum[i] = (da[i] + db[i]) % p;
      f.add[a * q + b] = static_cast<std::uint8_t>(encode(sum));

      std::vector<std::uint32_t> prod(2 * k - 1, 0);
      for (std::uint32_t i = 0; i < k; ++i) {
        for (std::uint32_t j = 0; j < k; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
      }
      for (std::uint32_t deg = 2 * k - 2; deg + 1 > k; --deg) {
        const std::uint32_t c = prod[deg];
        if (c == 0) continue;
        prod[deg] = 0;
        for (std::uint32_t i = 0; i < k; ++i) {
          // x^deg = -irr_low(x) * x^{deg-k} since irr is monic
          prod[deg - k + i] = (prod[deg - k + i] + c * (p - (*irr)[i] % p)) % p;
        }
      }
      prod.resize(k);
      f.mul[a * q + b] = static_cast<std::uint8_t>(encode(prod));
    }
  }

  // Field sanity: no zero divisors.
  for (std::uint32_t a = 1; a < q; ++a) {
    bool has_inverse = false;
    for (std::uint32_t b = 1; b < q; ++b) {
      if (f.mul[a * q + b] == 1) has_inverse = true;
      NP_CHECK(f.mul[a * q + b] != 0, "zero divisor; irreducible polynomial is wrong");
    }
    NP_CHECK(has_inverse, "element without inverse");
  }
  return f;
}

}  // namespace

Graph projective_incidence_graph(std::uint32_t q) {
  const FieldTables f = make_field(q);

  // Canonical projective points of GF(q)^4: first nonzero coordinate is 1.
  std::vector<std::array<std::uint8_t, 4>> reps;
  const std::uint64_t total = static_cast<std::uint64_t>(q) * q * q * q;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::array<std::uint8_t, 4> t{};
    std::uint64_t c = code;
    for (int i = 0; i < 4; ++i) {
      t[i] = static_cast<std::uint8_t>(c % q);
      c /= q;
    }
    int first_nonzero = -1;
    for (int i = 0; i < 4; ++i) {
      if (t[i] != 0) {
        first_nonzero = i;
        break;
      }
    }
    if (first_nonzero >= 0 && t[first_nonzero] == 1) reps.push_back(t);
  }
  const std::uint32_t count = static_cast<std::uint32_t>(reps.size());
  NP_CHECK(count == q * q * q + q * q + q + 1, "projective point count mismatch");

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(count) * (q * q + q + 1));
  const std::uint8_t* add = f.add.data();
  const std::uint8_t* mul = f.mul.data();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto& a = reps[i];
    const std::uint8_t* row0 = mul + static_cast<std::size_t>(a[0]) * q;
    const std::uint8_t* row1 = mul + static_cast<std::size_t>(a[1]) * q;
    const std::uint8_t* row2 = mul + static_cast<std::size_t>(a[2]) * q;
    const std::uint8_t* row3 = mul + static_cast<std::size_t>(a[3]) * q;
    for (std::uint32_t j = 0; j < count; ++j) {
      const auto& b = reps[j];
      const std::uint8_t left = add[static_cast<std::size_t>(row0[b[0]]) * q + row1[b[1]]];
      const std::uint8_t right = add[static_cast<std::size_t>(row2[b[2]]) * q + row3[b[3]]];
      if (add[static_cast<std::size_t>(left) * q + right] == 0) {
        edges.emplace_back(i, count + j);
      }
    }
  }
  return Graph::from_edges(2 * count, std::move(edges));
}

}  // namespace nibblepack
