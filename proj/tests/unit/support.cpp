#include "support.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tenet::testing {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) h = (h ^ ch) * 1099511628211ULL;
  return h;
}

int parity(const std::vector<int>& p) {
  int s = 1;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = a + 1; b < p.size(); ++b)
      if (p[a] > p[b]) s = -s;
  return s;
}

// sort in place; sign of the sorting permutation, 0 on a repeat
int sort_parity(std::vector<std::size_t>& v) {
  int s = 1;
  for (std::size_t a = 0; a < v.size(); ++a)
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      if (v[a] == v[b]) s = 0;
      if (v[a] > v[b]) s = -s;
    }
  std::sort(v.begin(), v.end());
  return s;
}

std::vector<std::vector<int>> permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

std::size_t nonnull(const std::vector<Index>& v) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [](const Index& i) { return !i.is_null(); }));
}

std::vector<Index> labels_of(const Tensor& t) {
  std::vector<Index> out;
  for (const auto& i : t.slots())
    if (!i.is_null()) out.push_back(i);
  return out;
}

void add_index(const Index& i, std::vector<Index>& out, bool protos = false) {
  if (i.is_null()) return;
  if (i.has_proto() && !protos) throw std::invalid_argument("Fock oracle does not handle protoindices");
  for (const auto& p : i.proto()) add_index(p, out, protos);
  if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
}

// orbital of an index, combined with the values of its protoindices
std::size_t slot_code(const Index& i, const std::vector<Index>& idx, const std::vector<std::size_t>& orb) {
  std::size_t c = orb[std::find(idx.begin(), idx.end(), i) - idx.begin()];
  std::size_t h = 0;
  for (const auto& p : i.proto()) h = h * 1000 + slot_code(p, idx, orb) + 1;
  return c + 1000 * h;
}

// odometer over index values; `f` gets positions per index
void enumerate(const std::vector<const std::vector<std::size_t>*>& ranges,
               const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> k(ranges.size(), 0), v(ranges.size());
  for (const auto* r : ranges)
    if (r->empty()) return;
  while (true) {
    for (std::size_t d = 0; d < k.size(); ++d) v[d] = (*ranges[d])[k[d]];
    f(v);
    std::size_t d = k.size();
    while (d > 0) {
      --d;
      if (++k[d] < ranges[d]->size()) break;
      k[d] = 0;
      if (d == 0) return;
    }
    if (k.empty()) return;
  }
}

}  // namespace

IndexSpaceRegistry small_registry(std::size_t nocc, std::size_t nvirt) {
  IndexSpaceRegistry reg = IndexSpaceRegistry::make_default();
  reg.set_extent("i", nocc);
  reg.set_extent("a", nvirt);
  reg.set_extent("p", nocc + nvirt);
  reg.freeze();
  return reg;
}

double LeafStore::raw(const std::string& label, const std::vector<std::size_t>& orbitals) const {
  std::uint64_t h = mix(seed_ ^ fnv(label));
  for (auto o : orbitals) h = mix(h ^ (o + 1));
  return static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
}

double LeafStore::variable(const std::string& name) const { return raw("$" + name, {}); }

double LeafStore::value(const Tensor& t, const std::vector<std::size_t>& orb) const {
  if (t.label == kDeltaLabel || t.label == kOverlapLabel) {
    for (std::size_t k = 1; k < orb.size(); ++k)
      if (orb[k] != orb[0]) return 0;
    return 1;
  }
  const std::size_t nb = nonnull(t.bra), nk = nonnull(t.ket);
  const std::vector<std::size_t> bra(orb.begin(), orb.begin() + nb), ket(orb.begin() + nb, orb.begin() + nb + nk),
      aux(orb.begin() + nb + nk, orb.end());
  const std::string key = t.label + "/" + std::to_string(nb) + "/" + std::to_string(nk);

  auto one = [&](const std::vector<std::size_t>& b, const std::vector<std::size_t>& k) {
    auto at = [&](const std::vector<std::size_t>& bb, const std::vector<std::size_t>& kk) {
      std::vector<std::size_t> all = bb;
      all.insert(all.end(), kk.begin(), kk.end());
      all.insert(all.end(), aux.begin(), aux.end());
      return raw(key, all);
    };
    // symmetrize from a sorted representative so equal elements are bitwise equal
    if (t.symmetry != Symmetry::nonsymm) {
      const bool anti = t.symmetry == Symmetry::antisymm;
      std::vector<std::size_t> sb = b, sk = k;
      const int sb_sign = sort_parity(sb), sk_sign = sort_parity(sk);
      const int sign = anti ? sb_sign * sk_sign : 1;
      if (anti && sign == 0) return 0.0;
      double s = 0;
      for (const auto& pb : permutations(static_cast<int>(sb.size())))
        for (const auto& pk : permutations(static_cast<int>(sk.size()))) {
          std::vector<std::size_t> bb, kk;
          for (int x : pb) bb.push_back(sb[x]);
          for (int x : pk) kk.push_back(sk[x]);
          s += (anti ? parity(pb) * parity(pk) : 1) * at(bb, kk);
        }
      return sign * s;
    }
    if (t.column_symmetry == ColumnSymmetry::symm && b.size() == k.size()) {
      std::vector<std::pair<std::size_t, std::size_t>> cols;
      for (std::size_t x = 0; x < b.size(); ++x) cols.emplace_back(b[x], k[x]);
      std::sort(cols.begin(), cols.end());
      double s = 0;
      for (const auto& p : permutations(static_cast<int>(cols.size()))) {
        std::vector<std::size_t> bb, kk;
        for (int x : p) {
          bb.push_back(cols[x].first);
          kk.push_back(cols[x].second);
        }
        s += at(bb, kk);
      }
      return s;
    }
    return at(b, k);
  };
  if (t.braket_symmetry != BraKetSymmetry::nonsymm && nb == nk) return one(bra, ket) + one(ket, bra);
  return one(bra, ket);
}

LeafEvaluator LeafStore::leaves() const {
  auto positions = std::make_shared<std::map<std::uint32_t, std::vector<std::size_t>>>(space_positions(reg_));
  return [this, positions](const ExprHandle& atom) -> Result {
    if (atom->is(ExprKind::variable)) return Result(variable(atom->variable().name));
    const Tensor& t = atom->tensor();
    const auto labels = labels_of(t);
    std::vector<const std::vector<std::size_t>*> ranges;
    std::vector<std::size_t> ext;
    for (const auto& i : labels) {
      ranges.push_back(&positions->at(i.space().type));
      ext.push_back(ranges.back()->size());
    }
    if (labels.empty()) return Result(value(t, {}));
    DenseTensor d(ext);
    std::size_t k = 0;
    enumerate(ranges, [&](const std::vector<std::size_t>& orb) { d.data[k++] = value(t, orb); });
    return Result(std::move(d));
  };
}

Result naive_evaluate(const ExprHandle& e, const std::vector<Index>& target, const LeafStore& store) {
  const auto positions = space_positions(store.registry());
  std::vector<std::size_t> ext;
  for (const auto& i : target) ext.push_back(positions.at(i.space().type).size());
  DenseTensor out(ext);
  double scalar = 0;

  for (const auto& term : terms_of(expand(e))) {
    auto [coef, factors] = split_term(term);
    if (!coef.is_real()) throw std::invalid_argument("complex coefficient");
    std::vector<Index> idx = target;
    for (const auto& f : factors) {
      if (f->is(ExprKind::tensor))
        for (const auto& i : f->tensor().slots()) add_index(i, idx, true);
      else if (!f->is(ExprKind::variable) && !f->is(ExprKind::constant))
        throw std::invalid_argument("naive_evaluate: unsupported factor");
    }
    std::vector<const std::vector<std::size_t>*> ranges;
    for (const auto& i : idx) ranges.push_back(&positions.at(i.space().type));
    const double c = coef.to_double();
    enumerate(ranges, [&](const std::vector<std::size_t>& orb) {
      double v = c;
      for (const auto& f : factors) {
        if (f->is(ExprKind::variable)) {
          v *= store.variable(f->variable().name);
          continue;
        }
        if (f->is(ExprKind::constant)) {
          v *= f->scalar().to_double();
          continue;
        }
        std::vector<std::size_t> o;
        for (const auto& i : labels_of(f->tensor())) o.push_back(slot_code(i, idx, orb));
        v *= store.value(f->tensor(), o);
        if (v == 0) return;
      }
      if (target.empty()) {
        scalar += v;
        return;
      }
      // local position of each target value inside its space
      std::size_t flat = 0;
      for (std::size_t d = 0; d < target.size(); ++d) {
        const auto& r = *ranges[d];
        flat = flat * r.size() + static_cast<std::size_t>(std::find(r.begin(), r.end(), orb[d]) - r.begin());
      }
      out.data[flat] += v;
    });
  }
  if (target.empty()) return Result(scalar);
  return Result(std::move(out));
}

double exhaustive_flops(const std::vector<std::set<Index>>& factors, const std::set<Index>& keep, const Extents& ext) {
  std::map<std::vector<std::set<Index>>, double> memo;
  std::function<double(std::vector<std::set<Index>>)> best = [&](std::vector<std::set<Index>> fs) -> double {
    if (fs.size() <= 1) return 0;
    std::sort(fs.begin(), fs.end());
    if (auto it = memo.find(fs); it != memo.end()) return it->second;
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < fs.size(); ++x)
      for (std::size_t y = x + 1; y < fs.size(); ++y) {
        std::set<Index> uni = fs[x];
        uni.insert(fs[y].begin(), fs[y].end());
        double cost = 1;
        for (const auto& i : uni) cost *= static_cast<double>(ext(i.space()));
        std::set<Index> outside = keep;
        std::vector<std::set<Index>> rest;
        for (std::size_t z = 0; z < fs.size(); ++z)
          if (z != x && z != y) {
            rest.push_back(fs[z]);
            outside.insert(fs[z].begin(), fs[z].end());
          }
        std::set<Index> kept;
        for (const auto& i : uni)
          if (outside.count(i)) kept.insert(i);
        rest.push_back(kept);
        b = std::min(b, cost + best(rest));
      }
    memo[fs] = b;
    return b;
  };
  return best(factors);
}

std::size_t count_matchings(int n, int m, int k) {
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  std::function<std::size_t(int, int)> go = [&](int left, int need) -> std::size_t {
    if (need == 0) return 1;
    if (left == n) return 0;
    std::size_t c = go(left + 1, need);  // left item stays unmatched
    for (int r = 0; r < m; ++r) {
      if (used[r]) continue;
      used[r] = true;
      c += go(left + 1, need - 1);
      used[r] = false;
    }
    return c;
  };
  return go(0, k);
}

ExprHandle random_term(std::mt19937& rng, int nfactors, const IndexSpaceRegistry& reg, bool extras) {
  struct Kind {
    const char* label;
    int rank;
    int aux;
    const char* tag;
  };
  static const std::vector<Kind> plain = {{"f", 1, 0, "N"},   {"g", 2, 0, "A"},     {"t", 1, 0, "A"},
                                          {"t", 2, 0, "A"},   {"v", 2, 0, "N"},     {"w", 2, 0, "S"},
                                          {"c", 2, 0, "N-N-S"}, {"k", 1, 0, "N-S"}, {"u", 2, 0, "S-S"}};
  static const std::vector<Kind> aux = {{"B", 1, 1, "N"}, {"h", 0, 1, "N"}, {"r", 2, 1, "A"}};
  std::vector<Tensor> ts;
  struct SlotRef {
    std::size_t t;
    int bundle;  // 0 bra, 1 ket, 2 aux
    std::size_t pos;
  };
  std::vector<SlotRef> bras, kets, auxs;
  for (int n = 0; n < nfactors; ++n) {
    const bool use_aux = extras && rng() % 3 == 0;
    const auto& k = use_aux ? aux[rng() % aux.size()] : plain[rng() % plain.size()];
    Tensor t;
    t.label = k.label;
    const auto sym = parse_symtag(k.tag);
    t.symmetry = sym.symmetry;
    t.braket_symmetry = sym.braket;
    t.column_symmetry = sym.column;
    t.bra.resize(k.rank);
    t.ket.resize(k.rank);
    t.aux.resize(k.aux);
    for (int s = 0; s < k.rank; ++s) {
      bras.push_back({ts.size(), 0, static_cast<std::size_t>(s)});
      kets.push_back({ts.size(), 1, static_cast<std::size_t>(s)});
    }
    for (int s = 0; s < k.aux; ++s) auxs.push_back({ts.size(), 2, static_cast<std::size_t>(s)});
    ts.push_back(std::move(t));
  }
  std::shuffle(bras.begin(), bras.end(), rng);
  std::shuffle(kets.begin(), kets.end(), rng);
  std::shuffle(auxs.begin(), auxs.end(), rng);
  std::uint32_t next_i = 1, next_a = 1;
  std::vector<Index> made;
  auto fresh = [&] {
    const bool occ = rng() % 2;
    made.push_back(make_index(reg, occ ? "i_" + std::to_string(next_i++) : "a_" + std::to_string(next_a++)));
    return made.back();
  };
  auto put = [&](const SlotRef& r, const Index& i) {
    (r.bundle == 0 ? ts[r.t].bra : r.bundle == 1 ? ts[r.t].ket : ts[r.t].aux)[r.pos] = i;
  };
  // pair bra and ket slots into dummies, leftovers become externals
  const std::size_t ndummy = std::min(bras.size(), kets.size()) * 3 / 4;
  for (std::size_t k = 0; k < ndummy; ++k) {
    const Index d = fresh();
    put(bras[k], d);
    put(kets[k], d);
  }
  for (std::size_t k = ndummy; k < bras.size(); ++k) put(bras[k], fresh());
  for (std::size_t k = ndummy; k < kets.size(); ++k) put(kets[k], fresh());
  // aux slots: hyperedges of one to three slots
  for (std::size_t k = 0; k < auxs.size();) {
    const std::size_t n = std::min<std::size_t>(auxs.size() - k, 1 + rng() % 3);
    const Index x = fresh();
    for (std::size_t j = 0; j < n; ++j) put(auxs[k + j], x);
    k += n;
  }
  // some unoccupied indices depend on one or two occupied ones
  std::map<Index, Index> with_proto;
  if (extras) {
    std::vector<Index> occ, virt;
    for (const auto& i : made) (i.space().label == "i" ? occ : virt).push_back(i);
    for (const auto& v : virt) {
      if (occ.empty() || rng() % 3) continue;
      std::vector<Index> p{occ[rng() % occ.size()]};
      if (occ.size() > 1 && rng() % 2) {
        Index q = occ[rng() % occ.size()];
        if (q != p[0]) p.push_back(q);
      }
      with_proto[v] = v.with_proto(p);
    }
  }
  std::vector<ExprHandle> fs;
  for (auto& t : ts) {
    for (auto* v : {&t.bra, &t.ket, &t.aux})
      for (auto& i : *v)
        if (with_proto.count(i)) i = with_proto.at(i);
    fs.push_back(make_tensor(std::move(t)));
  }
  return product(Scalar(static_cast<long long>(rng() % 5) + 1), std::move(fs));
}

ExprHandle scramble(const ExprHandle& term, std::mt19937& rng, const IndexSpaceRegistry& reg) {
  auto [coef, factors] = split_term(term);
  std::vector<ExprHandle> tensors, rest;
  for (const auto& f : factors) (f->is(ExprKind::tensor) ? tensors : rest).push_back(f);
  const auto ext = external_indices(tensors);
  std::map<std::string, std::vector<std::string>> dummies;  // space -> labels
  std::set<std::string> seen, named;
  // protoindices of external indices are external too
  std::function<void(const Index&)> name = [&](const Index& i) {
    named.insert(i.label());
    for (const auto& p : i.proto()) name(p);
  };
  for (const auto& i : ext) name(i);
  for (const auto& f : tensors)
    for (const auto& i : f->tensor().slots())
      if (!i.is_null() && !named.count(i.label()) && seen.insert(i.label()).second)
        dummies[i.space().label].push_back(i.label());
  std::map<std::string, std::string> rename;
  for (auto& [space, v] : dummies) {
    std::vector<int> ord(v.size());
    std::iota(ord.begin(), ord.end(), 50);
    std::shuffle(ord.begin(), ord.end(), rng);
    for (std::size_t k = 0; k < v.size(); ++k) rename[v[k]] = space + "_" + std::to_string(ord[k]);
  }
  std::function<Index(const Index&)> mapped = [&](const Index& i) -> Index {
    if (i.is_null()) return i;
    std::vector<Index> p;
    for (const auto& q : i.proto()) p.push_back(mapped(q));
    auto it = rename.find(i.label());
    return make_index(reg, it == rename.end() ? i.label() : it->second, p);
  };
  int sign = 1;
  std::vector<ExprHandle> out;
  for (const auto& f : tensors) {
    Tensor t = f->tensor();
    for (auto* v : {&t.bra, &t.ket, &t.aux})
      for (auto& i : *v) i = mapped(i);
    const bool full = nonnull(t.bra) == t.bra.size() && nonnull(t.ket) == t.ket.size();
    if (t.symmetry != Symmetry::nonsymm && full) {
      for (auto* v : {&t.bra, &t.ket}) {
        std::vector<int> p(v->size());
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        std::vector<Index> w;
        for (int x : p) w.push_back((*v)[x]);
        *v = w;
        if (t.symmetry == Symmetry::antisymm) sign *= parity(p);
      }
    } else if (t.column_symmetry == ColumnSymmetry::symm && t.bra.size() == t.ket.size()) {
      std::vector<int> p(t.bra.size());
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      std::vector<Index> b, k;
      for (int x : p) {
        b.push_back(t.bra[x]);
        k.push_back(t.ket[x]);
      }
      t.bra = b;
      t.ket = k;
    }
    if (t.braket_symmetry == BraKetSymmetry::symm && t.bra.size() == t.ket.size() && rng() % 2) std::swap(t.bra, t.ket);
    out.push_back(make_tensor(std::move(t)));
  }
  std::shuffle(out.begin(), out.end(), rng);
  rest.insert(rest.end(), out.begin(), out.end());
  return product(coef * Scalar(sign), std::move(rest));
}

std::size_t FockOracle::norbitals() const {
  std::size_t n = 0;
  const auto& reg = store_.registry();
  for (const auto& s : reg.spaces())
    if (reg.is_base(s)) n += reg.extent(s);
  return n;
}

FockMatrix FockOracle::evaluate(const ExprHandle& e, const std::map<Index, std::size_t>& fixed) const {
  const auto& reg = store_.registry();
  const auto positions = space_positions(reg);
  const std::size_t n = norbitals();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<bool> occupied(n, false);
  for (const auto& s : reg.spaces())
    if (reg.is_base(s) && reg.vacuum(s) == VacuumTrait::occupied)
      for (auto p : positions.at(s.type)) occupied[p] = true;

  FockMatrix m(dim * dim, 0.0);
  for (const auto& term : terms_of(expand(e))) {
    auto [coef, factors] = split_term(term);
    std::vector<Index> idx;
    for (const auto& f : factors) {
      if (f->is(ExprKind::tensor))
        for (const auto& i : f->tensor().slots()) add_index(i, idx);
      else if (f->is(ExprKind::normal_operator)) {
        for (const auto& i : f->op().creators) add_index(i, idx);
        for (const auto& i : f->op().annihilators) add_index(i, idx);
      }
    }
    std::vector<std::vector<std::size_t>> single;
    single.reserve(idx.size());
    std::vector<const std::vector<std::size_t>*> ranges;
    bool empty = false;
    for (const auto& i : idx) {
      const auto& r = positions.at(i.space().type);
      if (auto it = fixed.find(i); it != fixed.end()) {
        empty |= std::find(r.begin(), r.end(), it->second) == r.end();
        single.push_back({it->second});
        ranges.push_back(&single.back());
      } else {
        ranges.push_back(&r);
      }
    }
    if (empty) continue;
    const double c0 = coef.to_double();
    auto pos = [&](const Index& i, const std::vector<std::size_t>& orb) {
      return orb[std::find(idx.begin(), idx.end(), i) - idx.begin()];
    };
    enumerate(ranges, [&](const std::vector<std::size_t>& orb) {
      double c = c0;
      // each operator as an elementary string (creator?, orbital) in normal order, with its sign
      std::vector<std::vector<std::pair<bool, std::size_t>>> strings;
      for (const auto& f : factors) {
        if (f->is(ExprKind::tensor)) {
          std::vector<std::size_t> o;
          for (const auto& i : labels_of(f->tensor())) o.push_back(pos(i, orb));
          c *= store_.value(f->tensor(), o);
        } else if (f->is(ExprKind::variable)) {
          c *= store_.variable(f->variable().name);
        } else if (f->is(ExprKind::normal_operator)) {
          const auto& op = f->op();
          std::vector<std::pair<bool, std::size_t>> s;
          for (const auto& i : op.creators) s.emplace_back(true, pos(i, orb));
          for (auto it = op.annihilators.rbegin(); it != op.annihilators.rend(); ++it) s.emplace_back(false, pos(*it, orb));
          auto qcreator = [&](const std::pair<bool, std::size_t>& x) {
            return op.vacuum == Vacuum::genuine ? x.first : x.first != occupied[x.second];
          };
          std::vector<int> perm(s.size());
          std::iota(perm.begin(), perm.end(), 0);
          std::stable_partition(perm.begin(), perm.end(), [&](int k) { return qcreator(s[k]); });
          c *= parity(perm);
          std::vector<std::pair<bool, std::size_t>> ordered;
          for (int k : perm) ordered.push_back(s[k]);
          strings.push_back(std::move(ordered));
        }
        if (c == 0) return;
      }
      for (std::size_t st = 0; st < dim; ++st) {
        std::size_t cur = st;
        int sg = 1;
        bool zero = false;
        for (auto sit = strings.rbegin(); sit != strings.rend() && !zero; ++sit)
          for (auto it = sit->rbegin(); it != sit->rend(); ++it) {
            const std::size_t bit = std::size_t{1} << it->second;
            if (it->first == static_cast<bool>(cur & bit)) {
              zero = true;
              break;
            }
            if (std::popcount(cur & (bit - 1)) % 2) sg = -sg;
            cur ^= bit;
          }
        if (!zero) m[cur * dim + st] += c * sg;
      }
    });
  }
  return m;
}

double fock_deviation(const ExprHandle& a, const ExprHandle& b, const std::set<Index>& externals,
                      const LeafStore& store) {
  const auto positions = space_positions(store.registry());
  FockOracle oracle(store);
  std::vector<Index> ext(externals.begin(), externals.end());
  std::vector<const std::vector<std::size_t>*> ranges;
  for (const auto& i : ext) ranges.push_back(&positions.at(i.space().type));
  double dev = 0;
  auto check = [&](const std::vector<std::size_t>& orb) {
    std::map<Index, std::size_t> fixed;
    for (std::size_t k = 0; k < ext.size(); ++k) fixed[ext[k]] = orb[k];
    const auto ma = oracle.evaluate(a, fixed), mb = oracle.evaluate(b, fixed);
    for (std::size_t k = 0; k < ma.size(); ++k) dev = std::max(dev, std::abs(ma[k] - mb[k]));
  };
  if (ext.empty())
    check({});
  else
    enumerate(ranges, check);
  return dev;
}

}  // namespace tenet::testing
