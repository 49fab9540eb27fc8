#pragma once
// Exact rational linear algebra and bounded cochain complexes.
// All arithmetic is mpq-based; nothing in the engine touches floating point.

#include <gmpxx.h>

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace persheaf {

using Rat = mpq_class;

// Parses "p" or "p/q" (q > 0 after canonicalization). Throws std::invalid_argument.
Rat rat_from_string(const std::string& s);
std::string rat_to_string(const Rat& r);

// Sparse row-major matrix. Rows hold (col, value) pairs sorted by column;
// zero values are never stored.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols);
  static RatMatrix identity(int n);
  static RatMatrix scalar(int n, const Rat& v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nnz() const;
  bool is_zero() const;

  void set(int r, int c, const Rat& v);
  void add_to(int r, int c, const Rat& v);
  Rat get(int r, int c) const;
  const std::vector<std::pair<int, Rat>>& row(int r) const { return data_[r]; }

  RatMatrix times(const RatMatrix& o) const;
  RatMatrix plus(const RatMatrix& o) const;
  RatMatrix minus(const RatMatrix& o) const;
  RatMatrix scaled(const Rat& v) const;
  RatMatrix transpose() const;
  bool equals(const RatMatrix& o) const;

  // [A | B] and [A ; B].
  static RatMatrix hcat(const RatMatrix& a, const RatMatrix& b);
  static RatMatrix vcat(const RatMatrix& a, const RatMatrix& b);
  // [[a, b], [c, d]] with consistent shapes.
  static RatMatrix block2x2(const RatMatrix& a, const RatMatrix& b,
                            const RatMatrix& c, const RatMatrix& d);

  int rank() const;
  // Columns form a basis of the null space (cols() - rank() of them).
  RatMatrix kernel_basis() const;
  // Solves B X = M for X; B must have full column rank and M must lie in the
  // column span of B (both hold at every call site; violations throw).
  static RatMatrix solve_in_span(const RatMatrix& b, const RatMatrix& m);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<std::vector<std::pair<int, Rat>>> data_;
};

struct RankKernel {
  int rank;
  RatMatrix kernel;
};
RankKernel rank_kernel(const RatMatrix& m);

struct CohomologyTable {
  std::map<int, int> dims;                 // nonzero entries only
  std::map<int, RatMatrix> representatives;  // optional cocycle bases

  int dim(int k) const;
  bool is_zero() const;
  bool same_dims(const CohomologyTable& o) const { return dims == o.dims; }
};

// Bounded complex; dims[i] is the dimension in degree lo + i and d[i] maps
// degree lo+i to lo+i+1 (so d.size() + 1 == dims.size() unless empty).
struct CochainComplex {
  int lo = 0;
  std::vector<int> dims;
  std::vector<RatMatrix> d;

  int hi() const { return lo + static_cast<int>(dims.size()) - 1; }
  int dim_at(int k) const;
  RatMatrix d_at(int k) const;  // zero-shaped matrix outside the stored range
  int total_dim() const;
  bool is_zero_complex() const;

  void validate() const;  // shapes and d∘d = 0; throws std::runtime_error
  CochainComplex trimmed() const;

  static CochainComplex zero();
  static CochainComplex concentrated(int degree, int dim);
};

CohomologyTable cohomology(const CochainComplex& c, bool with_representatives = false);
int euler_characteristic_dims(const CochainComplex& c);
int euler_characteristic_table(const CohomologyTable& t);

CochainComplex shift_complex(const CochainComplex& c, int n);
CochainComplex direct_sum(const CochainComplex& a, const CochainComplex& b);

struct ChainMap {
  std::shared_ptr<const CochainComplex> source, target;
  int lo = 0;  // degree of comp[0]
  std::vector<RatMatrix> comp;

  RatMatrix comp_at(int k) const;  // target-dim x source-dim zero outside range
  void validate() const;  // commutation with both differentials
};

ChainMap zero_chain_map(std::shared_ptr<const CochainComplex> src,
                        std::shared_ptr<const CochainComplex> tgt);
ChainMap scalar_chain_map(std::shared_ptr<const CochainComplex> c, const Rat& v);

// Cone(f)^k = target^k ⊕ source^{k+1}, d = [[d_T, f],[0, -d_S]].
CochainComplex cone(const ChainMap& f);

// Rank of the map induced by f on H^k. Uses
//   rank H^k(f) = rank [[f^k, d_T^{k-1}], [d_S^k, 0]] - rank d_S^k - rank d_T^{k-1}.
int induced_h_rank(const ChainMap& f, int k);
std::map<int, int> induced_h_ranks(const ChainMap& f);

// Double complex with commuting differentials; dims[pi][qi] is the dimension
// at (plo+pi, qlo+qi), dh maps (p,q)->(p+1,q), dv maps (p,q)->(p,q+1).
struct DoubleComplex {
  int plo = 0, qlo = 0;
  std::vector<std::vector<int>> dims;
  std::vector<std::vector<RatMatrix>> dh;
  std::vector<std::vector<RatMatrix>> dv;
};

// Tot^n = ⊕_{p+q=n} D^{p,q} with d = dh + (-1)^p dv. The output is validated;
// a non-commuting input surfaces as a d∘d ≠ 0 error here.
CochainComplex total_complex(const DoubleComplex& dc);

}  // namespace persheaf
