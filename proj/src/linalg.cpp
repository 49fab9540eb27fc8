#include "persheaf/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace persheaf {

Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  auto digits = [](const std::string& t, bool allow_sign) {
    if (t.empty()) return false;
    size_t i = (allow_sign && t[0] == '-') ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  std::string num = s;
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    num = s.substr(0, slash);
    if (!digits(s.substr(slash + 1), false))
      throw std::invalid_argument("bad rational literal: " + s);
  }
  if (!digits(num, true)) throw std::invalid_argument("bad rational literal: " + s);
  Rat r;
  if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
    throw std::invalid_argument("bad rational literal: " + s);
  if (mpz_sgn(mpq_denref(r.get_mpq_t())) == 0)
    throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

std::string rat_to_string(const Rat& r) { return r.get_str(); }

RatMatrix::RatMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix shape");
}

RatMatrix RatMatrix::identity(int n) { return scalar(n, Rat(1)); }

RatMatrix RatMatrix::scalar(int n, const Rat& v) {
  RatMatrix m(n, n);
  if (v != 0)
    for (int i = 0; i < n; ++i) m.data_[i].emplace_back(i, v);
  return m;
}

int RatMatrix::nnz() const {
  int n = 0;
  for (const auto& row : data_) n += static_cast<int>(row.size());
  return n;
}

bool RatMatrix::is_zero() const { return nnz() == 0; }

void RatMatrix::set(int r, int c, const Rat& v) {
  auto& row = data_.at(r);
  if (c < 0 || c >= cols_) throw std::out_of_range("column out of range");
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& p, int col) { return p.first < col; });
  if (it != row.end() && it->first == c) {
    if (v == 0)
      row.erase(it);
    else
      it->second = v;
  } else if (v != 0) {
    row.insert(it, {c, v});
  }
}

void RatMatrix::add_to(int r, int c, const Rat& v) {
  if (v == 0) return;
  auto& row = data_.at(r);
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& p, int col) { return p.first < col; });
  if (it != row.end() && it->first == c) {
    it->second += v;
    if (it->second == 0) row.erase(it);
  } else {
    row.insert(it, {c, v});
  }
}

Rat RatMatrix::get(int r, int c) const {
  const auto& row = data_.at(r);
  auto it = std::lower_bound(row.begin(), row.end(), c,
                             [](const auto& p, int col) { return p.first < col; });
  if (it != row.end() && it->first == c) return it->second;
  return Rat(0);
}

RatMatrix RatMatrix::times(const RatMatrix& o) const {
  if (cols_ != o.rows_) throw std::invalid_argument("shape mismatch in product");
  RatMatrix out(rows_, o.cols_);
  std::vector<Rat> acc(o.cols_, Rat(0));
  std::vector<int> touched;
  for (int r = 0; r < rows_; ++r) {
    touched.clear();
    for (const auto& [k, v] : data_[r]) {
      for (const auto& [c, w] : o.data_[k]) {
        if (acc[c] == 0) touched.push_back(c);
        acc[c] += v * w;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int c : touched) {
      if (acc[c] != 0) out.data_[r].emplace_back(c, acc[c]);
      acc[c] = 0;
    }
  }
  return out;
}

namespace {
std::vector<std::pair<int, Rat>> row_axpy(const std::vector<std::pair<int, Rat>>& a,
                                          const Rat& f,
                                          const std::vector<std::pair<int, Rat>>& b) {
  // a + f*b, sparse merge
  std::vector<std::pair<int, Rat>> out;
  out.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      Rat v = f * b[j].second;
      if (v != 0) out.emplace_back(b[j].first, v);
      ++j;
    } else {
      Rat v = a[i].second + f * b[j].second;
      if (v != 0) out.emplace_back(a[i].first, v);
      ++i;
      ++j;
    }
  }
  return out;
}
}  // namespace

RatMatrix RatMatrix::plus(const RatMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch in sum");
  RatMatrix out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) out.data_[r] = row_axpy(data_[r], Rat(1), o.data_[r]);
  return out;
}

RatMatrix RatMatrix::minus(const RatMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("shape mismatch in diff");
  RatMatrix out(rows_, cols_);
  for (int r = 0; r < rows_; ++r) out.data_[r] = row_axpy(data_[r], Rat(-1), o.data_[r]);
  return out;
}

RatMatrix RatMatrix::scaled(const Rat& v) const {
  RatMatrix out(rows_, cols_);
  if (v == 0) return out;
  for (int r = 0; r < rows_; ++r) {
    out.data_[r] = data_[r];
    for (auto& [c, w] : out.data_[r]) w *= v;
  }
  return out;
}

RatMatrix RatMatrix::transpose() const {
  RatMatrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (const auto& [c, v] : data_[r]) out.data_[c].emplace_back(r, v);
  return out;
}

bool RatMatrix::equals(const RatMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

RatMatrix RatMatrix::hcat(const RatMatrix& a, const RatMatrix& b) {
  if (a.rows_ != b.rows_) throw std::invalid_argument("hcat row mismatch");
  RatMatrix out(a.rows_, a.cols_ + b.cols_);
  for (int r = 0; r < a.rows_; ++r) {
    out.data_[r] = a.data_[r];
    for (const auto& [c, v] : b.data_[r]) out.data_[r].emplace_back(c + a.cols_, v);
  }
  return out;
}

RatMatrix RatMatrix::vcat(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols_ != b.cols_) throw std::invalid_argument("vcat col mismatch");
  RatMatrix out(a.rows_ + b.rows_, a.cols_);
  for (int r = 0; r < a.rows_; ++r) out.data_[r] = a.data_[r];
  for (int r = 0; r < b.rows_; ++r) out.data_[a.rows_ + r] = b.data_[r];
  return out;
}

RatMatrix RatMatrix::block2x2(const RatMatrix& a, const RatMatrix& b,
                              const RatMatrix& c, const RatMatrix& d) {
  return vcat(hcat(a, b), hcat(c, d));
}

namespace {

struct EchelonRow {
  int pivot_col;
  Rat pivot_val;
  std::vector<std::pair<int, Rat>> entries;  // includes the pivot entry
};

// Sparse forward elimination. Pivots are chosen only among columns < pivot_limit
// (pass cols for plain echelon). Rows whose support is entirely >= pivot_limit
// are returned in `residual`.
struct Echelon {
  std::vector<EchelonRow> pivots;  // in elimination order
  std::vector<std::vector<std::pair<int, Rat>>> residual;
};

Echelon eliminate(const RatMatrix& m, int pivot_limit) {
  Echelon ech;
  std::vector<std::vector<std::pair<int, Rat>>> work;
  work.reserve(m.rows());
  for (int r = 0; r < m.rows(); ++r)
    if (!m.row(r).empty()) work.push_back(m.row(r));

  while (true) {
    // Deterministic pivot choice: the sparsest row with an eligible column,
    // breaking ties by lowest column index.
    int best = -1;
    size_t best_size = 0;
    for (size_t i = 0; i < work.size(); ++i) {
      bool eligible = !work[i].empty() && work[i].front().first < pivot_limit;
      if (!eligible) continue;
      if (best < 0 || work[i].size() < best_size) {
        best = static_cast<int>(i);
        best_size = work[i].size();
      }
    }
    if (best < 0) break;

    EchelonRow prow;
    prow.entries = std::move(work[best]);
    work.erase(work.begin() + best);
    prow.pivot_col = prow.entries.front().first;
    prow.pivot_val = prow.entries.front().second;

    for (auto& row : work) {
      auto it = std::lower_bound(row.begin(), row.end(), prow.pivot_col,
                                 [](const auto& p, int col) { return p.first < col; });
      if (it != row.end() && it->first == prow.pivot_col) {
        Rat f = -it->second / prow.pivot_val;
        row = row_axpy(row, f, prow.entries);
      }
    }
    work.erase(std::remove_if(work.begin(), work.end(),
                              [](const auto& r) { return r.empty(); }),
               work.end());
    ech.pivots.push_back(std::move(prow));
  }
  ech.residual = std::move(work);
  return ech;
}

// Back-substitution: given the echelon of B (pivot cols < ncols_b), find x with
// B x = 0 fixing the free/augmented coordinates in `fixed` (col -> value).
// Pivot row i contains no pivot column of earlier pivots, so solving in reverse
// elimination order only consumes already-known coordinates.
std::vector<std::pair<int, Rat>> back_substitute(
    const Echelon& ech, int ncols_b, const std::map<int, Rat>& fixed) {
  std::map<int, Rat> x(fixed);
  for (auto it = ech.pivots.rbegin(); it != ech.pivots.rend(); ++it) {
    Rat s(0);
    for (const auto& [c, v] : it->entries) {
      if (c == it->pivot_col) continue;
      auto f = x.find(c);
      if (f != x.end()) s += v * f->second;
    }
    x[it->pivot_col] = -s / it->pivot_val;
  }
  std::vector<std::pair<int, Rat>> out;
  for (const auto& [c, v] : x)
    if (c < ncols_b && v != 0) out.emplace_back(c, v);
  return out;
}

}  // namespace

int RatMatrix::rank() const {
  return static_cast<int>(eliminate(*this, cols_).pivots.size());
}

RatMatrix RatMatrix::kernel_basis() const {
  Echelon ech = eliminate(*this, cols_);
  std::vector<bool> is_pivot(cols_, false);
  for (const auto& p : ech.pivots) is_pivot[p.pivot_col] = true;

  std::vector<int> free_cols;
  for (int c = 0; c < cols_; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);

  RatMatrix out(cols_, static_cast<int>(free_cols.size()));
  for (size_t j = 0; j < free_cols.size(); ++j) {
    std::map<int, Rat> fixed;
    for (int f : free_cols) fixed[f] = Rat(f == free_cols[j] ? 1 : 0);
    for (const auto& [r, v] : back_substitute(ech, cols_, fixed))
      out.set(r, static_cast<int>(j), v);
  }
  return out;
}

RatMatrix RatMatrix::solve_in_span(const RatMatrix& b, const RatMatrix& m) {
  if (b.rows() != m.rows()) throw std::invalid_argument("solve shape mismatch");
  RatMatrix aug = hcat(b, m);
  Echelon ech = eliminate(aug, b.cols());
  if (!ech.residual.empty())
    throw std::runtime_error("solve_in_span: right side not in column span");
  if (static_cast<int>(ech.pivots.size()) != b.cols())
    throw std::runtime_error("solve_in_span: matrix not of full column rank");
  RatMatrix x(b.cols(), m.cols());
  for (int j = 0; j < m.cols(); ++j) {
    // Solving aug * (x; -e_j) = 0 gives b x = m e_j.
    std::map<int, Rat> fixed;
    fixed[b.cols() + j] = Rat(-1);
    for (const auto& [r, v] : back_substitute(ech, b.cols(), fixed))
      x.set(r, j, v);
  }
  return x;
}

RankKernel rank_kernel(const RatMatrix& m) {
  RankKernel rk{m.rank(), m.kernel_basis()};
  return rk;
}

int CohomologyTable::dim(int k) const {
  auto it = dims.find(k);
  return it == dims.end() ? 0 : it->second;
}

bool CohomologyTable::is_zero() const { return dims.empty(); }

int CochainComplex::dim_at(int k) const {
  int i = k - lo;
  if (i < 0 || i >= static_cast<int>(dims.size())) return 0;
  return dims[i];
}

RatMatrix CochainComplex::d_at(int k) const {
  int i = k - lo;
  if (i < 0 || i >= static_cast<int>(d.size())) return RatMatrix(dim_at(k + 1), dim_at(k));
  return d[i];
}

int CochainComplex::total_dim() const {
  int n = 0;
  for (int x : dims) n += x;
  return n;
}

bool CochainComplex::is_zero_complex() const { return total_dim() == 0; }

void CochainComplex::validate() const {
  if (!dims.empty() && d.size() + 1 != dims.size())
    throw std::runtime_error("complex: differential count does not match degrees");
  for (size_t i = 0; i < d.size(); ++i) {
    if (d[i].rows() != dims[i + 1] || d[i].cols() != dims[i])
      throw std::runtime_error("complex: differential shape mismatch at degree " +
                               std::to_string(lo + static_cast<int>(i)));
  }
  for (size_t i = 0; i + 1 < d.size(); ++i) {
    if (!d[i + 1].times(d[i]).is_zero())
      throw std::runtime_error("complex: d∘d ≠ 0 at degree " +
                               std::to_string(lo + static_cast<int>(i)));
  }
}

CochainComplex CochainComplex::trimmed() const {
  int first = 0, last = static_cast<int>(dims.size()) - 1;
  while (first <= last && dims[first] == 0) ++first;
  while (last >= first && dims[last] == 0) --last;
  if (first > last) return zero();
  CochainComplex out;
  out.lo = lo + first;
  out.dims.assign(dims.begin() + first, dims.begin() + last + 1);
  out.d.assign(d.begin() + first, d.begin() + last);
  return out;
}

CochainComplex CochainComplex::zero() {
  CochainComplex c;
  c.lo = 0;
  c.dims = {0};
  return c;
}

CochainComplex CochainComplex::concentrated(int degree, int dim) {
  CochainComplex c;
  c.lo = degree;
  c.dims = {dim};
  return c;
}

CohomologyTable cohomology(const CochainComplex& c, bool with_representatives) {
  CohomologyTable t;
  std::map<int, int> ranks;  // rank of d^k
  for (int k = c.lo; k < c.hi(); ++k) ranks[k] = c.d_at(k).rank();
  auto rank_at = [&](int k) {
    auto it = ranks.find(k);
    return it == ranks.end() ? 0 : it->second;
  };
  for (int k = c.lo; k <= c.hi(); ++k) {
    int h = c.dim_at(k) - rank_at(k) - rank_at(k - 1);
    if (h > 0) t.dims[k] = h;
  }
  if (with_representatives) {
    for (const auto& [k, h] : t.dims) {
      // Extend a basis of im d^{k-1} by kernel vectors of d^k; the added
      // columns represent a basis of H^k.
      RatMatrix kern = c.d_at(k).kernel_basis();
      RatMatrix accum = c.d_at(k - 1);
      int base_rank = accum.rank();
      RatMatrix reps(c.dim_at(k), h);
      int taken = 0;
      for (int j = 0; j < kern.cols() && taken < h; ++j) {
        RatMatrix cand(c.dim_at(k), 1);
        for (int r = 0; r < kern.rows(); ++r) {
          Rat v = kern.get(r, j);
          if (v != 0) cand.set(r, 0, v);
        }
        RatMatrix trial = RatMatrix::hcat(accum, cand);
        if (trial.rank() > base_rank) {
          accum = trial;
          ++base_rank;
          for (int r = 0; r < cand.rows(); ++r) {
            Rat v = cand.get(r, 0);
            if (v != 0) reps.set(r, taken, v);
          }
          ++taken;
        }
      }
      if (taken != h) throw std::runtime_error("representative extraction failed");
      t.representatives[k] = reps;
    }
  }
  return t;
}

int euler_characteristic_dims(const CochainComplex& c) {
  int e = 0;
  for (size_t i = 0; i < c.dims.size(); ++i) {
    int k = c.lo + static_cast<int>(i);
    e += (k % 2 == 0 ? 1 : -1) * c.dims[i];
  }
  return e;
}

int euler_characteristic_table(const CohomologyTable& t) {
  int e = 0;
  for (const auto& [k, h] : t.dims) e += (k % 2 == 0 ? 1 : -1) * h;
  return e;
}

CochainComplex shift_complex(const CochainComplex& c, int n) {
  CochainComplex out;
  out.lo = c.lo - n;
  out.dims = c.dims;
  out.d = c.d;
  if (n % 2 != 0)
    for (auto& m : out.d) m = m.scaled(Rat(-1));
  return out;
}

CochainComplex direct_sum(const CochainComplex& a, const CochainComplex& b) {
  int lo = std::min(a.lo, b.lo);
  int hi = std::max(a.hi(), b.hi());
  CochainComplex out;
  out.lo = lo;
  out.dims.resize(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) out.dims[k - lo] = a.dim_at(k) + b.dim_at(k);
  for (int k = lo; k < hi; ++k) {
    RatMatrix d(out.dims[k + 1 - lo], out.dims[k - lo]);
    RatMatrix da = a.d_at(k), db = b.d_at(k);
    for (int r = 0; r < da.rows(); ++r)
      for (const auto& [c, v] : da.row(r)) d.set(r, c, v);
    for (int r = 0; r < db.rows(); ++r)
      for (const auto& [c, v] : db.row(r)) d.set(a.dim_at(k + 1) + r, a.dim_at(k) + c, v);
    out.d.push_back(std::move(d));
  }
  return out;
}

RatMatrix ChainMap::comp_at(int k) const {
  int i = k - lo;
  if (i < 0 || i >= static_cast<int>(comp.size()))
    return RatMatrix(target->dim_at(k), source->dim_at(k));
  return comp[i];
}

void ChainMap::validate() const {
  source->validate();
  target->validate();
  int k0 = std::min(source->lo, target->lo) - 1;
  int k1 = std::max(source->hi(), target->hi()) + 1;
  for (int k = k0; k <= k1; ++k) {
    RatMatrix f = comp_at(k);
    if (f.rows() != target->dim_at(k) || f.cols() != source->dim_at(k))
      throw std::runtime_error("chain map: component shape mismatch at degree " +
                               std::to_string(k));
    if (k < k1) {
      RatMatrix lhs = target->d_at(k).times(comp_at(k));
      RatMatrix rhs = comp_at(k + 1).times(source->d_at(k));
      if (!lhs.equals(rhs))
        throw std::runtime_error("chain map: does not commute with d at degree " +
                                 std::to_string(k));
    }
  }
}

ChainMap zero_chain_map(std::shared_ptr<const CochainComplex> src,
                        std::shared_ptr<const CochainComplex> tgt) {
  ChainMap f;
  f.source = std::move(src);
  f.target = std::move(tgt);
  f.lo = 0;
  return f;
}

ChainMap scalar_chain_map(std::shared_ptr<const CochainComplex> c, const Rat& v) {
  ChainMap f;
  f.source = c;
  f.target = c;
  f.lo = c->lo;
  for (size_t i = 0; i < c->dims.size(); ++i)
    f.comp.push_back(RatMatrix::scalar(c->dims[i], v));
  return f;
}

CochainComplex cone(const ChainMap& f) {
  const CochainComplex& s = *f.source;
  const CochainComplex& t = *f.target;
  int lo = std::min(t.lo, s.lo - 1);
  int hi = std::max(t.hi(), s.hi() - 1);
  CochainComplex out;
  out.lo = lo;
  out.dims.resize(hi - lo + 1);
  for (int k = lo; k <= hi; ++k) out.dims[k - lo] = t.dim_at(k) + s.dim_at(k + 1);
  for (int k = lo; k < hi; ++k) {
    RatMatrix dt = t.d_at(k);
    RatMatrix fs = f.comp_at(k + 1);
    RatMatrix zero(s.dim_at(k + 2), t.dim_at(k));
    RatMatrix ds = s.d_at(k + 1).scaled(Rat(-1));
    out.d.push_back(RatMatrix::block2x2(dt, fs, zero, ds));
  }
  return out;
}

int induced_h_rank(const ChainMap& f, int k) {
  RatMatrix ds = f.source->d_at(k);
  RatMatrix dt = f.target->d_at(k - 1);
  RatMatrix zero(ds.rows(), dt.cols());
  RatMatrix m = RatMatrix::block2x2(f.comp_at(k), dt, ds, zero);
  return m.rank() - ds.rank() - dt.rank();
}

std::map<int, int> induced_h_ranks(const ChainMap& f) {
  std::map<int, int> out;
  int k0 = std::min(f.source->lo, f.target->lo);
  int k1 = std::max(f.source->hi(), f.target->hi());
  for (int k = k0; k <= k1; ++k) {
    int r = induced_h_rank(f, k);
    if (r != 0) out[k] = r;
  }
  return out;
}

CochainComplex total_complex(const DoubleComplex& dc) {
  int np = static_cast<int>(dc.dims.size());
  int nq = np == 0 ? 0 : static_cast<int>(dc.dims[0].size());
  for (const auto& col : dc.dims)
    if (static_cast<int>(col.size()) != nq)
      throw std::invalid_argument("double complex: ragged dims");

  int nlo = dc.plo + dc.qlo;
  int nhi = nlo + (np - 1) + (nq - 1);
  CochainComplex out;
  out.lo = nlo;
  if (np == 0 || nq == 0) return CochainComplex::zero();
  out.dims.assign(nhi - nlo + 1, 0);

  // offsets[pi][qi] = position of block (p,q) inside Tot^{p+q}
  std::vector<std::vector<int>> offsets(np, std::vector<int>(nq, 0));
  for (int n = nlo; n <= nhi; ++n) {
    int off = 0;
    for (int pi = 0; pi < np; ++pi) {
      int qi = (n - dc.plo - pi) - dc.qlo;
      if (qi < 0 || qi >= nq) continue;
      offsets[pi][qi] = off;
      off += dc.dims[pi][qi];
    }
    out.dims[n - nlo] = off;
  }

  for (int n = nlo; n < nhi; ++n) {
    RatMatrix d(out.dims[n + 1 - nlo], out.dims[n - nlo]);
    for (int pi = 0; pi < np; ++pi) {
      int qi = (n - dc.plo - pi) - dc.qlo;
      if (qi < 0 || qi >= nq || dc.dims[pi][qi] == 0) continue;
      int src_off = offsets[pi][qi];
      if (pi + 1 < np && dc.dims[pi + 1][qi] > 0) {
        const RatMatrix& h = dc.dh.at(pi).at(qi);
        if (h.rows() != dc.dims[pi + 1][qi] || h.cols() != dc.dims[pi][qi])
          throw std::invalid_argument("double complex: dh shape mismatch");
        int dst = offsets[pi + 1][qi];
        for (int r = 0; r < h.rows(); ++r)
          for (const auto& [c, v] : h.row(r)) d.set(dst + r, src_off + c, v);
      }
      if (qi + 1 < nq && dc.dims[pi][qi + 1] > 0) {
        const RatMatrix& vmat = dc.dv.at(pi).at(qi);
        if (vmat.rows() != dc.dims[pi][qi + 1] || vmat.cols() != dc.dims[pi][qi])
          throw std::invalid_argument("double complex: dv shape mismatch");
        int dst = offsets[pi][qi + 1];
        bool flip = ((dc.plo + pi) % 2) != 0;
        for (int r = 0; r < vmat.rows(); ++r)
          for (const auto& [c, v] : vmat.row(r))
            d.set(dst + r, src_off + c, flip ? Rat(-v) : v);
      }
    }
    out.d.push_back(std::move(d));
  }
  out.validate();
  return out;
}

}  // namespace persheaf
