#pragma once

// Semisimple 2d TFT. A connected surface of genus g with p inputs and q outputs
// acts diagonally in the normalized canonical basis e~_i = Delta_i^{-1/2} e_i
// with entry Delta_i^{chi/2}, chi = 2 - 2g - p - q.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hodgekit/errors.hpp"
#include "hodgekit/rational.hpp"

namespace hodgekit {

struct FrobeniusData {
  std::vector<Rational> deltas;

  int dimension() const { return static_cast<int>(deltas.size()); }

  void validate() const {
    if (deltas.empty()) throw InvalidInput("Frobenius algebra needs at least one idempotent");
    for (const auto& d : deltas) {
      if (d == 0) throw InvalidInput("Delta_i = 0 is not semisimple");
    }
  }
};

/// factor * base^{half_exponent / 2}, kept canonical: half_exponent is 0 or 1,
/// and 1 only when base is not a rational square.
struct HalfPower {
  Rational factor = 1;
  int half_exponent = 0;

  static HalfPower of(const Rational& base, long half_exponent, Rational factor = 1) {
    long whole = half_exponent >= 0 ? half_exponent / 2 : -((-half_exponent + 1) / 2);
    long rest = half_exponent - 2 * whole;
    factor *= pow(base, whole);
    if (rest == 1 && is_perfect_square(base)) {
      factor *= rational_sqrt(base);
      rest = 0;
    }
    if (factor == 0) rest = 0;
    return {factor, static_cast<int>(rest)};
  }

  HalfPower times(const HalfPower& other, const Rational& base) const {
    return of(base, half_exponent + other.half_exponent, factor * other.factor);
  }

  std::optional<Rational> rational() const {
    if (half_exponent != 0) return std::nullopt;
    return factor;
  }

  bool operator==(const HalfPower&) const = default;
};

struct CobordismComponent {
  int g = 0;
  std::vector<std::string> in;
  std::vector<std::string> out;

  int euler_characteristic() const {
    return 2 - 2 * g - static_cast<int>(in.size()) - static_cast<int>(out.size());
  }
};

struct Cobordism {
  std::vector<CobordismComponent> components;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void validate() const {
    std::set<std::string> seen;
    std::vector<std::string> ins, outs;
    for (const auto& c : components) {
      if (c.g < 0) throw InvalidInput("negative genus");
      for (const auto& l : c.in) {
        if (!seen.insert(l).second) throw InvalidInput("port label '" + l + "' is used twice");
        ins.push_back(l);
      }
      for (const auto& l : c.out) {
        if (!seen.insert(l).second) throw InvalidInput("port label '" + l + "' is used twice");
        outs.push_back(l);
      }
    }
    auto same_set = [](std::vector<std::string> a, std::vector<std::string> b) {
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      return a == b;
    };
    if (!same_set(ins, inputs)) throw InvalidInput("global inputs do not match the component inputs");
    if (!same_set(outs, outputs)) throw InvalidInput("global outputs do not match the component outputs");
  }

  int euler_characteristic() const {
    int chi = 0;
    for (const auto& c : components) chi += c.euler_characteristic();
    return chi;
  }
};

/// Disjoint union; labels must not collide.
inline Cobordism disjoint_union(const Cobordism& a, const Cobordism& b) {
  Cobordism out = a;
  out.components.insert(out.components.end(), b.components.begin(), b.components.end());
  out.inputs.insert(out.inputs.end(), b.inputs.begin(), b.inputs.end());
  out.outputs.insert(out.outputs.end(), b.outputs.begin(), b.outputs.end());
  out.validate();
  return out;
}

namespace detail {

inline void erase_label(std::vector<std::string>& v, const std::string& label) {
  v.erase(std::remove(v.begin(), v.end(), label), v.end());
}

}  // namespace detail

/// Glue each (output, input) pair of `cob` to each other. Ports on distinct
/// components merge them (genera add); ports on one component raise its genus.
inline Cobordism contract(const Cobordism& cob, const std::vector<std::pair<std::string, std::string>>& pairs) {
  cob.validate();
  Cobordism out = cob;
  std::set<std::string> used;
  for (const auto& [o, i] : pairs) {
    if (!used.insert(o).second || !used.insert(i).second) throw InvalidInput("gluing is not a bijection");
    auto find = [&](const std::string& label, bool is_out) -> int {
      for (std::size_t c = 0; c < out.components.size(); ++c) {
        const auto& ports = is_out ? out.components[c].out : out.components[c].in;
        if (std::find(ports.begin(), ports.end(), label) != ports.end()) return static_cast<int>(c);
      }
      return -1;
    };
    const int co = find(o, true);
    const int ci = find(i, false);
    if (co < 0) throw InvalidInput("'" + o + "' is not an output");
    if (ci < 0) throw InvalidInput("'" + i + "' is not an input");
    detail::erase_label(out.components[static_cast<std::size_t>(co)].out, o);
    detail::erase_label(out.components[static_cast<std::size_t>(ci)].in, i);
    detail::erase_label(out.outputs, o);
    detail::erase_label(out.inputs, i);
    if (co == ci) {
      ++out.components[static_cast<std::size_t>(co)].g;
    } else {
      auto& keep = out.components[static_cast<std::size_t>(std::min(co, ci))];
      auto gone = out.components[static_cast<std::size_t>(std::max(co, ci))];
      keep.g += gone.g;
      keep.in.insert(keep.in.end(), gone.in.begin(), gone.in.end());
      keep.out.insert(keep.out.end(), gone.out.begin(), gone.out.end());
      out.components.erase(out.components.begin() + std::max(co, ci));
    }
  }
  return out;
}

/// Glue outputs of `a` to inputs of `b` along `matching` (a-output, b-input).
inline Cobordism glue(const Cobordism& a, const Cobordism& b,
                      const std::vector<std::pair<std::string, std::string>>& matching) {
  a.validate();
  b.validate();
  for (const auto& [o, i] : matching) {
    if (std::find(a.outputs.begin(), a.outputs.end(), o) == a.outputs.end()) {
      throw InvalidInput("'" + o + "' is not an output of the first cobordism");
    }
    if (std::find(b.inputs.begin(), b.inputs.end(), i) == b.inputs.end()) {
      throw InvalidInput("'" + i + "' is not an input of the second cobordism");
    }
  }
  return contract(disjoint_union(a, b), matching);
}

/// One tensor factor: all ports share the idempotent index.
struct DiagonalBlock {
  std::vector<std::string> in;
  std::vector<std::string> out;
  std::vector<HalfPower> entries;
};

/// Map A^{(x)p} -> A^{(x)q} in the normalized canonical basis, stored as a
/// tensor product of diagonal blocks times a scalar from closed pieces.
struct BlockDiagonalMap {
  int N = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<DiagonalBlock> blocks;
  Rational scalar = 1;

  /// Blocks keyed by their port sets, for order-independent comparison.
  std::map<std::pair<std::set<std::string>, std::set<std::string>>, std::vector<HalfPower>> canonical() const {
    std::map<std::pair<std::set<std::string>, std::set<std::string>>, std::vector<HalfPower>> out;
    for (const auto& b : blocks) {
      out[{std::set<std::string>(b.in.begin(), b.in.end()), std::set<std::string>(b.out.begin(), b.out.end())}] = b.entries;
    }
    return out;
  }

  bool operator==(const BlockDiagonalMap& other) const {
    return N == other.N && inputs == other.inputs && outputs == other.outputs && scalar == other.scalar &&
           canonical() == other.canonical();
  }
};

inline std::vector<HalfPower> component_entries(const FrobeniusData& frob, int chi) {
  std::vector<HalfPower> entries;
  for (const auto& d : frob.deltas) entries.push_back(HalfPower::of(d, chi));
  return entries;
}

inline Rational closed_partition_function(int g, const FrobeniusData& frob) {
  frob.validate();
  if (g < 0) throw InvalidInput("negative genus");
  Rational z = 0;
  for (const auto& d : frob.deltas) z += pow(d, 1L - g);
  return z;
}

/// Evaluation that also accepts closed components, folding them into the scalar.
inline BlockDiagonalMap evaluate_full(const Cobordism& cob, const FrobeniusData& frob) {
  cob.validate();
  frob.validate();
  BlockDiagonalMap map{frob.dimension(), cob.inputs, cob.outputs, {}, 1};
  for (const auto& c : cob.components) {
    if (c.in.empty() && c.out.empty()) {
      map.scalar *= closed_partition_function(c.g, frob);
    } else {
      map.blocks.push_back({c.in, c.out, component_entries(frob, c.euler_characteristic())});
    }
  }
  return map;
}

inline BlockDiagonalMap evaluate_cobordism(const Cobordism& cob, const FrobeniusData& frob) {
  for (const auto& c : cob.components) {
    if (c.in.empty() && c.out.empty()) throw InvalidInput("closed component: use closed_partition_function");
  }
  return evaluate_full(cob, frob);
}

/// Contract output/input pairs of a map. Blocks joined through a pair multiply
/// entrywise; a block left without ports is traced into the scalar.
inline BlockDiagonalMap contract_map(const BlockDiagonalMap& map, const FrobeniusData& frob,
                                     const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<DiagonalBlock> blocks = map.blocks;
  std::vector<int> parent(blocks.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) { return parent[static_cast<std::size_t>(x)] == x ? x : parent[static_cast<std::size_t>(x)] = root(parent[static_cast<std::size_t>(x)]); };
  auto owner = [&](const std::string& label, bool is_out) {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& ports = is_out ? blocks[b].out : blocks[b].in;
      if (std::find(ports.begin(), ports.end(), label) != ports.end()) return static_cast<int>(b);
    }
    throw InvalidInput("'" + label + "' is not an " + (is_out ? "output" : "input") + " of the map");
  };
  BlockDiagonalMap out{map.N, map.inputs, map.outputs, {}, map.scalar};
  for (const auto& [o, i] : pairs) {
    const int bo = owner(o, true);
    const int bi = owner(i, false);
    detail::erase_label(blocks[static_cast<std::size_t>(bo)].out, o);
    detail::erase_label(blocks[static_cast<std::size_t>(bi)].in, i);
    detail::erase_label(out.outputs, o);
    detail::erase_label(out.inputs, i);
    parent[static_cast<std::size_t>(root(bo))] = root(bi);
  }
  std::map<int, DiagonalBlock> merged;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    auto [it, fresh] = merged.try_emplace(root(static_cast<int>(b)), blocks[b]);
    if (fresh) continue;
    auto& m = it->second;
    m.in.insert(m.in.end(), blocks[b].in.begin(), blocks[b].in.end());
    m.out.insert(m.out.end(), blocks[b].out.begin(), blocks[b].out.end());
    for (std::size_t i = 0; i < m.entries.size(); ++i) m.entries[i] = m.entries[i].times(blocks[b].entries[i], frob.deltas[i]);
  }
  for (auto& [r, block] : merged) {
    if (!block.in.empty() || !block.out.empty()) {
      out.blocks.push_back(std::move(block));
      continue;
    }
    Rational trace = 0;
    for (const auto& e : block.entries) {
      auto v = e.rational();
      if (!v) throw IntegrityError("trace of a closed piece is not rational");
      trace += *v;
    }
    out.scalar *= trace;
  }
  return out;
}

/// Composition along (a-output, b-input) pairs.
inline BlockDiagonalMap compose(const BlockDiagonalMap& a, const BlockDiagonalMap& b, const FrobeniusData& frob,
                                const std::vector<std::pair<std::string, std::string>>& matching) {
  BlockDiagonalMap both = a;
  both.inputs.insert(both.inputs.end(), b.inputs.begin(), b.inputs.end());
  both.outputs.insert(both.outputs.end(), b.outputs.begin(), b.outputs.end());
  both.blocks.insert(both.blocks.end(), b.blocks.begin(), b.blocks.end());
  both.scalar *= b.scalar;
  return contract_map(both, frob, matching);
}

// Dense evaluation from structure constants in an arbitrary basis, built only
// from unit, counit, multiplication and comultiplication.

using RationalMatrix = std::vector<std::vector<Rational>>;

inline RationalMatrix invert(RationalMatrix m) {
  const std::size_t n = m.size();
  RationalMatrix inv(n, std::vector<Rational>(n, 0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && m[pivot][col] == 0) ++pivot;
    if (pivot == n) throw InvalidInput("singular matrix");
    std::swap(m[pivot], m[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational scale = m[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      m[col][j] /= scale;
      inv[col][j] /= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

/// Linear map A^{(x)p} -> A^{(x)q}; data[in * N^q + out].
struct DenseMap {
  int N = 0;
  int p = 0;
  int q = 0;
  std::vector<Rational> data;

  static long power(int N, int k) {
    long r = 1;
    for (int i = 0; i < k; ++i) r *= N;
    return r;
  }
  long rows() const { return power(N, p); }
  long cols() const { return power(N, q); }
  Rational& at(long in, long out) { return data[static_cast<std::size_t>(in * cols() + out)]; }
  const Rational& at(long in, long out) const { return data[static_cast<std::size_t>(in * cols() + out)]; }

  static DenseMap zero(int N, int p, int q) {
    DenseMap m{N, p, q, {}};
    m.data.assign(static_cast<std::size_t>(power(N, p) * power(N, q)), Rational(0));
    return m;
  }
  static DenseMap identity(int N) {
    DenseMap m = zero(N, 1, 1);
    for (int i = 0; i < N; ++i) m.at(i, i) = 1;
    return m;
  }
};

/// b after a.
inline DenseMap then(const DenseMap& a, const DenseMap& b) {
  if (a.N != b.N || a.q != b.p) throw InvalidInput("incompatible composition");
  DenseMap out = DenseMap::zero(a.N, a.p, b.q);
  for (long i = 0; i < a.rows(); ++i) {
    for (long k = 0; k < a.cols(); ++k) {
      if (a.at(i, k) == 0) continue;
      for (long j = 0; j < b.cols(); ++j) out.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  }
  return out;
}

/// a (x) b with a's ports first.
inline DenseMap tensor(const DenseMap& a, const DenseMap& b) {
  DenseMap out = DenseMap::zero(a.N, a.p + b.p, a.q + b.q);
  for (long ia = 0; ia < a.rows(); ++ia) {
    for (long oa = 0; oa < a.cols(); ++oa) {
      if (a.at(ia, oa) == 0) continue;
      for (long ib = 0; ib < b.rows(); ++ib) {
        for (long ob = 0; ob < b.cols(); ++ob) {
          out.at(ia * b.rows() + ib, oa * b.cols() + ob) += a.at(ia, oa) * b.at(ib, ob);
        }
      }
    }
  }
  return out;
}

/// Frobenius algebra given by structure constants in a basis f_a.
struct DenseFrobenius {
  int N = 0;
  std::vector<std::vector<std::vector<Rational>>> mult;  // f_a f_b = sum_c mult[a][b][c] f_c
  std::vector<Rational> unit;
  RationalMatrix pairing;

  /// Structure constants in the basis f_a = sum_i basis[i][a] e_i.
  static DenseFrobenius from_canonical(const FrobeniusData& frob, std::optional<RationalMatrix> basis = std::nullopt) {
    frob.validate();
    const int N = frob.dimension();
    RationalMatrix B(static_cast<std::size_t>(N), std::vector<Rational>(static_cast<std::size_t>(N), 0));
    if (basis) {
      B = *basis;
    } else {
      for (int i = 0; i < N; ++i) B[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    }
    const RationalMatrix Binv = invert(B);
    DenseFrobenius out;
    out.N = N;
    const auto n = static_cast<std::size_t>(N);
    out.mult.assign(n, std::vector<std::vector<Rational>>(n, std::vector<Rational>(n, 0)));
    out.unit.assign(n, 0);
    out.pairing.assign(n, std::vector<Rational>(n, 0));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
          const Rational w = B[i][a] * B[i][b];
          out.pairing[a][b] += w * frob.deltas[i];
          for (std::size_t c = 0; c < n; ++c) out.mult[a][b][c] += w * Binv[c][i];
        }
      }
    }
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < n; ++i) out.unit[c] += Binv[c][i];
    }
    return out;
  }

  DenseMap multiplication() const {
    DenseMap m = DenseMap::zero(N, 2, 1);
    for (int a = 0; a < N; ++a) {
      for (int b = 0; b < N; ++b) {
        for (int c = 0; c < N; ++c) m.at(a * N + b, c) = mult[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
      }
    }
    return m;
  }

  DenseMap unit_map() const {
    DenseMap m = DenseMap::zero(N, 0, 1);
    for (int c = 0; c < N; ++c) m.at(0, c) = unit[static_cast<std::size_t>(c)];
    return m;
  }

  /// theta(x) = (x, 1)
  DenseMap counit() const {
    DenseMap m = DenseMap::zero(N, 1, 0);
    for (int a = 0; a < N; ++a) {
      for (int c = 0; c < N; ++c) m.at(a, 0) += pairing[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] * unit[static_cast<std::size_t>(c)];
    }
    return m;
  }

  /// Adjoint of multiplication under the pairing: x -> sum_{k,l} C^{kl} (x f_k) (x) f_l.
  DenseMap comultiplication() const {
    const RationalMatrix C = invert(pairing);
    DenseMap m = DenseMap::zero(N, 1, 2);
    for (int x = 0; x < N; ++x) {
      for (int k = 0; k < N; ++k) {
        for (int l = 0; l < N; ++l) {
          const Rational& ckl = C[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
          if (ckl == 0) continue;
          for (int c = 0; c < N; ++c) {
            m.at(x, c * N + l) += ckl * mult[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
          }
        }
      }
    }
    return m;
  }
};

/// Connected (g, p, q) surface as p-1 pants merging the inputs, g handles
/// (comultiply then multiply), and q-1 copants splitting the output; caps close
/// empty sides.
inline DenseMap pants_evaluate(const DenseFrobenius& frob, int g, int p, int q) {
  if (g < 0 || p < 0 || q < 0) throw InvalidInput("negative surface data");
  const DenseMap id = DenseMap::identity(frob.N);
  const DenseMap m = frob.multiplication();
  const DenseMap delta = frob.comultiplication();
  DenseMap state = frob.unit_map();
  if (p > 0) {
    state = id;
    for (int k = 1; k < p; ++k) state = then(tensor(state, id), m);
  }
  const DenseMap handle = then(delta, m);
  for (int k = 0; k < g; ++k) state = then(state, handle);
  if (q == 0) return then(state, frob.counit());
  DenseMap split = id;
  for (int k = 1; k < q; ++k) split = then(delta, tensor(split, id));
  return then(state, split);
}

/// Express a dense map given in the basis f_a = sum_i basis[i][a] e_i in the
/// canonical basis e_i.
inline DenseMap to_canonical_basis(const DenseMap& map, const RationalMatrix& basis) {
  DenseMap B = DenseMap::zero(map.N, 1, 1);
  DenseMap Binv = DenseMap::zero(map.N, 1, 1);
  const RationalMatrix inv = invert(basis);
  for (int i = 0; i < map.N; ++i) {
    for (int a = 0; a < map.N; ++a) {
      B.at(a, i) = basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];  // f_a -> e coordinates
      Binv.at(i, a) = inv[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)];  // e_i -> f coordinates
    }
  }
  auto power = [&](const DenseMap& x, int k) {
    DenseMap out = DenseMap::zero(map.N, 0, 0);
    out.data = {Rational(1)};
    for (int j = 0; j < k; ++j) out = tensor(out, x);
    return out;
  };
  return then(then(power(Binv, map.p), map), power(B, map.q));
}

/// True when the dense map in the e basis is e_i^{(x)p} -> c_i e_i^{(x)q} with
/// c_i = Delta_i^{(p-q)/2} times the given block entries (the e~ to e change).
inline bool dense_matches_block(const DenseMap& dense, const std::vector<HalfPower>& entries, const FrobeniusData& frob) {
  for (long in = 0; in < dense.rows(); ++in) {
    for (long out = 0; out < dense.cols(); ++out) {
      std::optional<int> idx;
      bool diagonal = true;
      long x = in;
      for (int k = 0; k < dense.p; ++k, x /= dense.N) {
        const int i = static_cast<int>(x % dense.N);
        if (idx && *idx != i) diagonal = false;
        idx = i;
      }
      x = out;
      for (int k = 0; k < dense.q; ++k, x /= dense.N) {
        const int i = static_cast<int>(x % dense.N);
        if (idx && *idx != i) diagonal = false;
        idx = i;
      }
      if (!diagonal || !idx) {
        if (dense.at(in, out) != 0) return false;
        continue;
      }
      const auto i = static_cast<std::size_t>(*idx);
      auto expected = entries[i].times(HalfPower::of(frob.deltas[i], dense.p - dense.q), frob.deltas[i]).rational();
      if (!expected || dense.at(in, out) != *expected) return false;
    }
  }
  return true;
}

inline Cobordism cobordism_from_json(const nlohmann::json& j) {
  try {
    Cobordism cob;
    for (const auto& c : j.at("components")) {
      cob.components.push_back({c.at("g").get<int>(), c.at("in").get<std::vector<std::string>>(),
                                c.at("out").get<std::vector<std::string>>()});
    }
    cob.inputs = j.at("inputs").get<std::vector<std::string>>();
    cob.outputs = j.at("outputs").get<std::vector<std::string>>();
    cob.validate();
    return cob;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed cobordism: ") + e.what());
  }
}

inline nlohmann::json cobordism_to_json(const Cobordism& cob) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : cob.components) comps.push_back({{"g", c.g}, {"in", c.in}, {"out", c.out}});
  return {{"components", comps}, {"inputs", cob.inputs}, {"outputs", cob.outputs}};
}

/// Entries as {"factor": "p/q", "sqrt_delta_power": 0|1}.
inline nlohmann::json map_to_json(const BlockDiagonalMap& map) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : map.blocks) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : b.entries) entries.push_back({{"factor", to_string(e.factor)}, {"sqrt_delta_power", e.half_exponent}});
    blocks.push_back({{"in", b.in}, {"out", b.out}, {"entries", entries}});
  }
  return {{"inputs", map.inputs}, {"outputs", map.outputs}, {"blocks", blocks}, {"scalar", to_string(map.scalar)}};
}

}  // namespace hodgekit
