#pragma once

#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "gevrey/series.hpp"

namespace gevrey {

// Sentinel truncation degree for polynomial-exact multivariate data (all
// omitted coefficients are exactly zero, not unknown).
inline constexpr int kExactDegree = std::numeric_limits<int>::max() / 4;

// Sparse multivariate series: ordered variable list (X first by convention,
// then named Y/Z variables), terms keyed by exponent multi-index, truncated
// by total degree.  No explicit zero coefficients are stored.
template <typename K>
class MultiSeries {
 public:
  using Exponents = std::vector<int>;

  MultiSeries() : trunc_degree_(kExactDegree) {}
  MultiSeries(std::vector<std::string> vars, int trunc_degree = kExactDegree)
      : vars_(std::move(vars)), trunc_degree_(trunc_degree) {}

  static MultiSeries constant(std::vector<std::string> vars, K v,
                              int trunc_degree = kExactDegree) {
    MultiSeries m(std::move(vars), trunc_degree);
    m.add_term(Exponents(m.vars_.size(), 0), std::move(v));
    return m;
  }
  static MultiSeries variable(std::vector<std::string> vars, size_t idx,
                              int trunc_degree = kExactDegree) {
    MultiSeries m(std::move(vars), trunc_degree);
    Exponents e(m.vars_.size(), 0);
    e.at(idx) = 1;
    m.add_term(std::move(e), K(1));
    return m;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<Exponents, K>& terms() const { return terms_; }
  int trunc_degree() const { return trunc_degree_; }
  bool exact() const { return trunc_degree_ == kExactDegree; }
  bool empty() const { return terms_.empty(); }

  void set_trunc_degree(int d) {
    trunc_degree_ = d;
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (total_degree(it->first) > d) ? terms_.erase(it) : std::next(it);
  }

  static int total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0);
  }
  int max_term_degree() const {
    int d = 0;
    for (const auto& [e, v] : terms_) d = std::max(d, total_degree(e));
    return d;
  }
  // Largest exponent of one variable over all terms.
  int var_degree(size_t idx) const {
    int d = 0;
    for (const auto& [e, v] : terms_) d = std::max(d, e.at(idx));
    return d;
  }

  void add_term(Exponents e, K v) {
    if (e.size() != vars_.size()) throw validation_error("exponent arity mismatch");
    for (int x : e)
      if (x < 0) throw validation_error("negative exponent");
    if (total_degree(e) > trunc_degree_ || is_zero(v)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(std::move(e), std::move(v));
    } else {
      it->second = it->second + v;
      if (is_zero(it->second)) terms_.erase(it);
    }
  }

  const K& coeff(const Exponents& e) const {
    static const K kZero{0};
    auto it = terms_.find(e);
    return it == terms_.end() ? kZero : it->second;
  }

  bool depends_on(size_t idx) const {
    for (const auto& [e, v] : terms_)
      if (e.at(idx) > 0) return true;
    return false;
  }
  std::optional<size_t> var_index(const std::string& name) const {
    for (size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return i;
    return std::nullopt;
  }

  MultiSeries operator+(const MultiSeries& o) const {
    require_same_vars(o);
    MultiSeries r(vars_, std::min(trunc_degree_, o.trunc_degree_));
    for (const auto& [e, v] : terms_) r.add_term(e, v);
    for (const auto& [e, v] : o.terms_) r.add_term(e, v);
    return r;
  }
  MultiSeries operator-(const MultiSeries& o) const {
    require_same_vars(o);
    MultiSeries r(vars_, std::min(trunc_degree_, o.trunc_degree_));
    for (const auto& [e, v] : terms_) r.add_term(e, v);
    for (const auto& [e, v] : o.terms_) r.add_term(e, -v);
    return r;
  }
  MultiSeries operator*(const MultiSeries& o) const {
    require_same_vars(o);
    int d = (exact() && o.exact()) ? kExactDegree : std::min(trunc_degree_, o.trunc_degree_);
    MultiSeries r(vars_, d);
    for (const auto& [e1, v1] : terms_)
      for (const auto& [e2, v2] : o.terms_) {
        Exponents e(e1);
        for (size_t i = 0; i < e.size(); ++i) e[i] += e2[i];
        r.add_term(std::move(e), v1 * v2);
      }
    return r;
  }
  MultiSeries operator*(const K& s) const {
    MultiSeries r(vars_, trunc_degree_);
    for (const auto& [e, v] : terms_) r.add_term(e, v * s);
    return r;
  }
  bool operator==(const MultiSeries& o) const {
    return vars_ == o.vars_ && terms_ == o.terms_;
  }

  MultiSeries derivative(size_t idx) const {
    MultiSeries r(vars_, trunc_degree_ == kExactDegree ? kExactDegree : trunc_degree_ - 1);
    for (const auto& [e, v] : terms_) {
      if (e.at(idx) == 0) continue;
      Exponents de(e);
      de[idx] -= 1;
      r.add_term(std::move(de), v * K(e[idx]));
    }
    return r;
  }

  template <typename V>
  V eval(const std::vector<V>& point) const {
    if (point.size() != vars_.size()) throw validation_error("eval arity mismatch");
    V acc{};
    for (const auto& [e, v] : terms_) {
      V t = to_value<V>(v);
      for (size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) t = t * point[i];
      acc = acc + t;
    }
    return acc;
  }

 private:
  template <typename V>
  static V to_value(const K& k) {
    if constexpr (std::is_same_v<V, Cplx>) return to_complex(k);
    else if constexpr (std::is_same_v<V, double>) return to_double(k);
    else return V(k);
  }

  void require_same_vars(const MultiSeries& o) const {
    if (vars_ != o.vars_) throw validation_error("multiseries variable lists differ");
  }

  std::vector<std::string> vars_;
  std::map<Exponents, K> terms_;
  int trunc_degree_;
};

// F(X, {images}): every variable is replaced by a MultiSeries over the target
// variable list.  Internal utility; truncation degree of the result is the
// caller's responsibility.
template <typename K>
MultiSeries<K> substitute_all(const MultiSeries<K>& f,
                              const std::vector<MultiSeries<K>>& images,
                              int out_trunc) {
  if (images.size() != f.vars().size())
    throw validation_error("substitute_all: one image per variable required");
  const std::vector<std::string>& tvars = images.empty() ? f.vars() : images[0].vars();
  MultiSeries<K> result(tvars, out_trunc);
  // memoized powers of each image
  std::vector<std::vector<MultiSeries<K>>> pow(images.size());
  for (size_t i = 0; i < images.size(); ++i)
    pow[i].push_back(MultiSeries<K>::constant(tvars, K(1), out_trunc));
  auto power = [&](size_t i, int k) -> const MultiSeries<K>& {
    while (static_cast<int>(pow[i].size()) <= k) {
      MultiSeries<K> next = pow[i].back() * images[i];
      next.set_trunc_degree(std::min(next.trunc_degree(), out_trunc));
      pow[i].push_back(std::move(next));
    }
    return pow[i][static_cast<size_t>(k)];
  };
  for (const auto& [e, v] : f.terms()) {
    MultiSeries<K> t = MultiSeries<K>::constant(tvars, v, out_trunc);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i] > 0) t = t * power(i, e[i]);
    result = result + t;
  }
  result.set_trunc_degree(out_trunc);
  return result;
}

// Substitute truncated univariate series for the named variables; the first
// variable (X) persists.  Every substituted series must vanish at 0.  The
// result is certified to min(trunc degree of F, trunc orders of the
// substituted series that F actually depends on).
template <typename K>
TruncatedSeries<K> mv_substitute(const MultiSeries<K>& f,
                                 const std::map<std::string, TruncatedSeries<K>>& subs,
                                 int order_cap = kExactDegree) {
  int certified = std::min(order_cap, f.exact() ? kExactDegree : f.trunc_degree());
  int provided_min = kExactDegree;
  std::vector<const TruncatedSeries<K>*> image(f.vars().size(), nullptr);
  for (size_t i = 1; i < f.vars().size(); ++i) {
    auto it = subs.find(f.vars()[i]);
    if (it == subs.end()) {
      if (f.depends_on(i))
        throw validation_error("mv_substitute: no substitution for variable " + f.vars()[i]);
      continue;
    }
    if (!is_zero(it->second[0]))
      throw validation_error("mv_substitute: substitution for " + f.vars()[i] +
                             " has nonzero constant term");
    image[i] = &it->second;
    provided_min = std::min(provided_min, it->second.trunc_order());
    if (f.depends_on(i)) certified = std::min(certified, it->second.trunc_order());
  }
  // When F uses no substituted variable, fall back to the provided orders.
  if (certified >= kExactDegree) certified = std::min(order_cap, provided_min);
  if (certified >= kExactDegree)
    throw validation_error("mv_substitute: unbounded certified order; pass order_cap");

  TruncatedSeries<K> acc(certified);
  // memoized powers of each substituted series
  std::vector<std::vector<TruncatedSeries<K>>> pow(f.vars().size());
  auto power = [&](size_t i, int k) -> const TruncatedSeries<K>& {
    if (pow[i].empty()) pow[i].push_back(TruncatedSeries<K>::constant(K(1), certified));
    while (static_cast<int>(pow[i].size()) <= k)
      pow[i].push_back(pow[i].back() * image[i]->truncate(std::min(certified, image[i]->trunc_order())));
    return pow[i][static_cast<size_t>(k)];
  };
  for (const auto& [e, v] : f.terms()) {
    if (e[0] > certified) continue;
    TruncatedSeries<K> t = TruncatedSeries<K>::constant(v, certified - e[0]);
    for (size_t i = 1; i < e.size(); ++i)
      if (e[i] > 0) t = t * power(i, e[i]);
    acc = acc + t.shift_up(e[0]);
  }
  return acc;
}

// The factors B_1..B_n with F(X,Y) - F(X,Z) = sum_i B_i (Y_i - Z_i) and
// B_i(X,Y,Y) = dF/dY_i, built from the divided-difference induction
// (split off the last Y variable, recurse on the rest).  Unrolled, the i-th
// factor is the slot-i divided difference with earlier slots at Y and later
// slots at Z.
template <typename K>
struct BinomDecomposition {
  std::vector<std::string> vars;          // (X-block, Y-block, Z-block)
  std::vector<MultiSeries<K>> factors;    // B_1..B_n
};

template <typename K>
BinomDecomposition<K> binom_decompose(const MultiSeries<K>& f, size_t n_params = 1) {
  const size_t nv = f.vars().size();
  if (n_params >= nv) throw validation_error("binom_decompose: no Y variables");
  const size_t n = nv - n_params;
  std::vector<std::string> vars = f.vars();
  for (size_t j = 0; j < n; ++j) vars.push_back("Z" + f.vars()[n_params + j].substr(1));
  const int out_deg = f.exact() ? kExactDegree : f.trunc_degree() - 1;

  BinomDecomposition<K> dec;
  dec.vars = vars;
  for (size_t i = 0; i < n; ++i) {
    MultiSeries<K> b(vars, out_deg);
    for (const auto& [e, v] : f.terms()) {
      const int k = e[n_params + i];
      if (k == 0) continue;
      std::vector<int> base(vars.size(), 0);
      for (size_t p = 0; p < n_params; ++p) base[p] = e[p];
      for (size_t j = 0; j < i; ++j) base[n_params + j] = e[n_params + j];           // Y_j, j < i
      for (size_t j = i + 1; j < n; ++j) base[n_params + n + j] = e[n_params + j];   // Z_j, j > i
      for (int a = 0; a < k; ++a) {  // Y_i^a Z_i^{k-1-a}
        std::vector<int> ex(base);
        ex[n_params + i] = a;
        ex[n_params + n + i] = k - 1 - a;
        b.add_term(std::move(ex), v);
      }
    }
    dec.factors.push_back(std::move(b));
  }
  return dec;
}

// Identify variables: exponent of var `from` is folded onto var `to`
// (used for the diagonal check B_i(X,Y,Y)).
template <typename K>
MultiSeries<K> identify_vars(const MultiSeries<K>& f, const std::map<size_t, size_t>& fold) {
  MultiSeries<K> r(f.vars(), f.trunc_degree());
  for (const auto& [e, v] : f.terms()) {
    std::vector<int> ex(e);
    for (const auto& [from, to] : fold) {
      ex.at(to) += ex.at(from);
      ex.at(from) = 0;
    }
    r.add_term(std::move(ex), v);
  }
  return r;
}

using RatMultiSeries = MultiSeries<Rat>;

}  // namespace gevrey
