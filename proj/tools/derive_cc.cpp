#include "derive_cc.hpp"

#include <chrono>
#include <functional>
#include <stdexcept>

namespace tenet::cli {

namespace {

struct Names {
  const IndexSpaceRegistry& reg;
  std::uint32_t next_i = 1, next_a = 1;
  Index occ() { return make_index(reg, "i_" + std::to_string(next_i++)); }
  Index virt() { return make_index(reg, "a_" + std::to_string(next_a++)); }
};

NormalOperator fermi(std::vector<Index> annihilators, std::vector<Index> creators) {
  NormalOperator op;
  op.annihilators = std::move(annihilators);
  op.creators = std::move(creators);
  op.vacuum = Vacuum::fermi;
  return op;
}

struct HPart {
  Scalar coef;
  ExprHandle tensor;
  ExprHandle op;
  int body;
};

std::vector<HPart> hamiltonian_parts(const IndexSpaceRegistry& reg) {
  auto p = [&](int k) { return make_index(reg, "p_" + std::to_string(k)); };
  std::vector<HPart> h;
  h.push_back({Scalar(1), make_tensor("f", {{p(1)}, {p(2)}, {}}, {}), make_operator(fermi({p(2)}, {p(1)})), 1});
  h.push_back({Scalar::ratio(1, 4), make_tensor("ḡ", {{p(1), p(2)}, {p(3), p(4)}, {}}, parse_symtag("A")),
               make_operator(fermi({p(3), p(4)}, {p(1), p(2)})), 2});
  return h;
}

// 1/(n!)^2 t{a..;i..} ã{i..;a..}
std::pair<Scalar, std::vector<ExprHandle>> cluster(int n, Names& names) {
  std::vector<Index> occ, virt;
  for (int k = 0; k < n; ++k) occ.push_back(names.occ());
  for (int k = 0; k < n; ++k) virt.push_back(names.virt());
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return {Scalar(Rational(1) / (f * f)),
          {make_tensor("t", {virt, occ, {}}, parse_symtag("A")), make_operator(fermi(occ, virt))}};
}

}  // namespace

ExprHandle cc_hamiltonian(const IndexSpaceRegistry& reg) {
  std::vector<ExprHandle> terms;
  for (const auto& h : hamiltonian_parts(reg)) terms.push_back(product(h.coef, {h.tensor, h.op}));
  return sum(std::move(terms));
}

CCResult derive_cc(const CCOptions& opts) {
  if (opts.max_rank < 1 || opts.max_rank > 4) throw std::invalid_argument("derive-cc supports ranks 1 to 4");
  const IndexSpaceRegistry& reg = opts.registry ? *opts.registry : default_registry();
  const auto t0 = std::chrono::steady_clock::now();
  CCResult res;
  const auto hparts = hamiltonian_parts(reg);

  for (int k = 0; k <= opts.max_rank; ++k) {
    std::vector<ExprHandle> acc;
    for (const auto& h : hparts) {
      const int max_n = 2 * h.body;
      // multisets of cluster ranks r_1 <= ... <= r_n with a possibly nonzero projection
      std::vector<int> ranks;
      std::function<void(int)> rec = [&](int lo) {
        int total = 0;
        for (int r : ranks) total += r;
        if (std::abs(total - k) <= h.body) {
          Names names{reg};
          std::vector<ExprHandle> tensors{h.tensor}, ops;
          Scalar coef = h.coef;
          if (k > 0) {
            std::vector<Index> occ, virt;
            for (int m = 0; m < k; ++m) occ.push_back(names.occ());
            for (int m = 0; m < k; ++m) virt.push_back(names.virt());
            ops.push_back(make_operator(fermi(virt, occ)));
          }
          ops.push_back(h.op);
          // 1/n! times the number of distinct orderings of the multiset
          Rational mult = 1;
          for (std::size_t a = 0; a < ranks.size();) {
            std::size_t b = a;
            while (b < ranks.size() && ranks[b] == ranks[a]) ++b;
            for (std::size_t m = 2; m <= b - a; ++m) mult *= m;
            a = b;
          }
          coef *= Scalar(Rational(1) / mult);
          for (int r : ranks) {
            auto [c, f] = cluster(r, names);
            coef *= c;
            tensors.push_back(f[0]);
            ops.push_back(f[1]);
          }
          WickOptions wo;
          wo.vacuum = Vacuum::fermi;
          wo.full_contractions = true;
          wo.topology = opts.topology;
          wo.use_connectivity = opts.use_connectivity;
          wo.registry = &reg;
          const int hpos = k > 0 ? 1 : 0;
          for (std::size_t m = 0; m < ranks.size(); ++m) wo.connectivity.emplace_back(hpos, hpos + 1 + static_cast<int>(m));
          std::vector<ExprHandle> factors = tensors;
          factors.insert(factors.end(), ops.begin(), ops.end());
          acc.push_back(reduce(wick(product(coef, std::move(factors)), wo, &res.stats), &reg));
        }
        if (static_cast<int>(ranks.size()) == max_n) return;
        for (int r = lo; r <= opts.max_rank; ++r) {
          ranks.push_back(r);
          rec(r);
          ranks.pop_back();
        }
      };
      rec(1);
    }
    SimplifyOptions so;
    so.registry = &reg;
    so.label_rank = {"f", "ḡ", "t"};
    res.residuals.push_back(simplify(sum(std::move(acc)), so));
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace tenet::cli
