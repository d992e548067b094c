#pragma once

#include "tenet/index.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tenet {

enum class Symmetry { antisymm, symm, nonsymm };
enum class BraKetSymmetry { symm, conjugate, nonsymm };
enum class ColumnSymmetry { symm, nonsymm };
enum class Vacuum { genuine, fermi };

inline constexpr const char* kDeltaLabel = "δ";
inline constexpr const char* kOverlapLabel = "s";
inline constexpr const char* kGenuineOpLabel = "a";
inline constexpr const char* kFermiOpLabel = "ã";

/// Bra, ket and aux slots; a null Index marks an empty bra/ket slot.
struct SlotBundleSpec {
  std::vector<Index> bra;
  std::vector<Index> ket;
  std::vector<Index> aux;
};

struct Tensor {
  std::string label;
  std::vector<Index> bra;
  std::vector<Index> ket;
  std::vector<Index> aux;
  Symmetry symmetry = Symmetry::nonsymm;
  BraKetSymmetry braket_symmetry = BraKetSymmetry::nonsymm;
  ColumnSymmetry column_symmetry = ColumnSymmetry::nonsymm;
  bool conjugated = false;

  std::size_t rank() const { return bra.size() + ket.size() + aux.size(); }
  /// All slots in bra, ket, aux order (empty slots included as null indices).
  std::vector<Index> slots() const;
  friend bool operator==(const Tensor& a, const Tensor& b);
};

/// Normal-ordered fermionic operator a^{c1..cn}_{b1..bm} = {a^{c1}..a^{cn} a_{bm}..a_{b1}}.
struct NormalOperator {
  std::vector<Index> creators;      // ket
  std::vector<Index> annihilators;  // bra
  Vacuum vacuum = Vacuum::fermi;

  const char* label() const { return vacuum == Vacuum::fermi ? kFermiOpLabel : kGenuineOpLabel; }
  std::size_t rank() const { return creators.size() + annihilators.size(); }
  friend bool operator==(const NormalOperator& a, const NormalOperator& b) {
    return a.vacuum == b.vacuum && a.creators == b.creators && a.annihilators == b.annihilators;
  }
};

/// Default symmetries for a tensor label (reserved labels δ and s are braket-symmetric).
struct SymmetrySpec {
  Symmetry symmetry = Symmetry::nonsymm;
  BraKetSymmetry braket = BraKetSymmetry::nonsymm;
  ColumnSymmetry column = ColumnSymmetry::nonsymm;
  friend bool operator==(const SymmetrySpec& a, const SymmetrySpec& b) {
    return a.symmetry == b.symmetry && a.braket == b.braket && a.column == b.column;
  }
};

SymmetrySpec default_symmetry(const std::string& label);
/// "A", "S-C", "N-N-S", ...; throws on malformed tags.
SymmetrySpec parse_symtag(const std::string& tag);
std::string symtag(const SymmetrySpec& s);

/// Sign of permuting one bundle of `t`; nullopt when the bundle has no permutational symmetry.
enum class BundleKind { bra, ket, aux };
std::optional<int> slot_permutation_phase(const Tensor& t, BundleKind bundle, const std::vector<int>& perm);

int permutation_parity(const std::vector<int>& perm);

NormalOperator adjoint(const NormalOperator& op);

}  // namespace tenet
