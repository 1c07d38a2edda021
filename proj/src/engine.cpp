#include "slicecount/engine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "slicecount/depth_reduction.hpp"

namespace slicecount {

std::string_view toString(Mode m) { return m == Mode::PaperStrict ? "paper-strict" : "practical"; }

InvariantCounts& InvariantCounts::operator+=(const InvariantCounts& o) {
  pChainViolations += o.pChainViolations;
  ratioViolations += o.ratioViolations;
  closureViolations += o.closureViolations;
  checks += o.checks;
  return *this;
}

// ---------------------------------------------------------------- parameters

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t satMul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSat / b) return kSat;
  return a * b;
}

std::uint64_t saturate(const boost::multiprecision::cpp_int& v) {
  if (v > boost::multiprecision::cpp_int(kSat)) return kSat;
  return v.convert_to<std::uint64_t>();
}

std::uint64_t ceilToU64(const Real& x) {
  Real c = ceil(x);
  if (c >= Real(kSat)) return kSat;
  return c.convert_to<std::uint64_t>();
}

void noteDeviation(std::vector<std::string>& out, const std::string& field, std::uint64_t used,
                   std::uint64_t formula) {
  if (used != formula)
    out.push_back(field + " = " + std::to_string(used) + " (formula: " + std::to_string(formula) + ")");
}

}  // namespace

Params deriveParams(std::uint64_t degree, std::uint64_t size, double epsilon, double delta, Mode mode,
                    const Overrides& ov) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw ParamError("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw ParamError("delta must lie in (0, 1)");
  if (degree == 0 || size == 0) throw ParamError("program degree and size must be positive");
  if (mode == Mode::PaperStrict && ov.any()) throw ParamError("overrides require practical mode");

  Params p;
  p.mode = mode;
  p.epsilon = epsilon;
  p.delta = delta;
  p.n = degree;
  p.size = size;

  const Real fourLn2 = 4 * log(Real(2));
  const boost::multiprecision::cpp_int cube =
      boost::multiprecision::pow(boost::multiprecision::cpp_int(degree + 1), 3);
  std::uint64_t ns;
  if (Real(epsilon) <= fourLn2) {
    p.epsilonPrime = epsilon;
    Rational kappa = Rational(epsilon) / Rational(4 * cube);
    p.kappa = Real(boost::multiprecision::numerator(kappa)) / Real(boost::multiprecision::denominator(kappa));
    Rational x = Rational(12) / (kappa * kappa);
    auto num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    boost::multiprecision::cpp_int q = num / den;
    if (q * den < num) ++q;
    ns = saturate(q);
  } else {
    p.epsilonPrime = fourLn2.convert_to<double>();
    p.kappa = fourLn2 / Real(4 * cube);
    ns = ceilToU64(Real(12) / (p.kappa * p.kappa));
  }
  const std::uint64_t nt = satMul(8 * degree, size);
  const std::uint64_t theta = satMul(satMul(satMul(512, ns), nt), satMul(degree, size));
  const std::uint64_t m = ceilToU64(16 * log(Real(1) / Real(delta)));
  const std::uint64_t threshold = satMul(16 * degree, satMul(size, size));
  const std::uint64_t ellMax = degree >= 64 ? kSat : (std::uint64_t{1} << degree);

  if (mode == Mode::PaperStrict) {
    p.ns = ns;
    p.nt = nt;
    p.theta = theta;
    p.m = m;
    p.supportThreshold = threshold;
    p.ellMax = ellMax;
  } else {
    p.ns = ov.ns.value_or(kPracticalNs);
    p.nt = ov.nt.value_or(kPracticalNt);
    p.theta = ov.theta.value_or(kPracticalTheta);
    p.m = ov.m.value_or(m);
    p.supportThreshold = ov.threshold.value_or(threshold);
    p.ellMax = ov.ellMax.value_or(std::max(ellMax, kPracticalEllMax));
    noteDeviation(p.deviations, "n_s", p.ns, ns);
    noteDeviation(p.deviations, "n_t", p.nt, nt);
    noteDeviation(p.deviations, "theta", p.theta, theta);
    noteDeviation(p.deviations, "m", p.m, m);
    noteDeviation(p.deviations, "support_threshold", p.supportThreshold, threshold);
    noteDeviation(p.deviations, "ell_max", p.ellMax, ellMax);
  }
  if (p.ns == 0 || p.nt == 0 || p.theta == 0 || p.m == 0 || p.supportThreshold == 0 || p.ellMax == 0)
    throw ParamError("n_s, n_t, theta, m, threshold and ell_max must be at least 1");
  if (degree < 16)
    p.deviations.push_back("degree " + std::to_string(degree) +
                           " < 16: the accuracy guarantee is only claimed for n >= 16");
  return p;
}

Params deriveParams(const Program& prog, double epsilon, double delta, Mode mode, const Overrides& ov) {
  return deriveParams(prog.degree(), prog.size(), epsilon, delta, mode, ov);
}

// ---------------------------------------------------------------- reduce / union (monomials)

namespace {
// Below this keep probability, geometric skipping beats one draw per element.
constexpr double kSkipBelow = 0.25;
}  // namespace

std::vector<Monomial> reduceSet(const std::vector<Monomial>& z, double t, SplitMix64& rng) {
  if (!(t >= 0 && t <= 1)) throw std::logic_error("reduce probability outside [0, 1]");
  if (t >= 1) return z;
  std::vector<Monomial> out;
  if (t <= 0) return out;
  if (t >= kSkipBelow) {
    for (const auto& m : z)
      if (rng.uniform() < t) out.push_back(m);
    return out;
  }
  const double lq = std::log1p(-t);
  for (std::uint64_t i = geometricSkip(rng, lq); i < z.size();) {
    out.push_back(z[i]);
    std::uint64_t s = geometricSkip(rng, lq);
    if (s >= z.size()) break;
    i += 1 + s;
  }
  return out;
}

std::vector<Monomial> unionFilter(const Program& p, NodeIndex q,
                                  const std::vector<std::vector<Monomial>>& sets,
                                  MembershipOracle& oracle) {
  const auto& kids = p.node(q).children;
  if (sets.size() != kids.size()) throw std::invalid_argument("one set per child expected");
  std::vector<Monomial> out;
  for (std::size_t i = 0; i < kids.size(); ++i)
    for (const Monomial& a : sets[i]) {
      bool earlier = false;
      for (std::size_t j = 0; j < i && !earlier; ++j) earlier = oracle.contains(kids[j], a);
      if (!earlier) out.push_back(a);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------- packed engine

namespace {

template <std::size_t W>
using Key = std::array<std::uint64_t, W>;

template <std::size_t W>
struct KeyHash {
  std::size_t operator()(const Key<W>& k) const noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (auto w : k) h = mix64(h ^ w);
    return static_cast<std::size_t>(h);
  }
};

template <std::size_t W>
Key<W> keyOf(const Monomial& m) {
  Key<W> k{};
  for (VariableId v : m.vars()) k[v / 64] |= std::uint64_t{1} << (v % 64);
  return k;
}

template <std::size_t W>
Key<W> keyOf(const VarSet& s) {
  Key<W> k{};
  for (auto v = s.find_first(); v != VarSet::npos; v = s.find_next(v)) k[v / 64] |= std::uint64_t{1} << (v % 64);
  return k;
}

template <std::size_t W>
Monomial monoOf(const Key<W>& k) {
  std::vector<VariableId> vs;
  for (std::size_t w = 0; w < W; ++w)
    for (std::uint64_t x = k[w]; x; x &= x - 1)
      vs.push_back(static_cast<VariableId>(w * 64 + std::countr_zero(x)));
  return Monomial(std::move(vs));
}

template <std::size_t W>
Key<W> operator|(const Key<W>& a, const Key<W>& b) {
  Key<W> r;
  for (std::size_t i = 0; i < W; ++i) r[i] = a[i] | b[i];
  return r;
}

template <std::size_t W>
Key<W> operator&(const Key<W>& a, const Key<W>& b) {
  Key<W> r;
  for (std::size_t i = 0; i < W; ++i) r[i] = a[i] & b[i];
  return r;
}

template <std::size_t W>
bool subsetOf(const Key<W>& a, const Key<W>& mask) {
  for (std::size_t i = 0; i < W; ++i)
    if (a[i] & ~mask[i]) return false;
  return true;
}

template <std::size_t W>
std::size_t popcount(const Key<W>& a) {
  std::size_t c = 0;
  for (auto w : a) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

template <std::size_t W>
void reduceKeys(const std::vector<Key<W>>& src, double t, SplitMix64& rng, std::vector<Key<W>>& out) {
  if (t >= 1) {
    out.insert(out.end(), src.begin(), src.end());
    return;
  }
  if (t <= 0) return;
  out.reserve(out.size() + static_cast<std::size_t>(t * static_cast<double>(src.size()) * 1.25) + 4);
  if (t >= kSkipBelow) {
    for (const auto& k : src)
      if (rng.uniform() < t) out.push_back(k);
    return;
  }
  const double lq = std::log1p(-t);
  for (std::uint64_t i = geometricSkip(rng, lq); i < src.size();) {
    out.push_back(src[i]);
    std::uint64_t s = geometricSkip(rng, lq);
    if (s >= src.size()) break;
    i += 1 + s;
  }
}

// reduce(A (x) B, t), pairs visited in (i, j) order.
template <std::size_t W>
void crossReduce(const std::vector<Key<W>>& a, const std::vector<Key<W>>& b, double t, SplitMix64& rng,
                 std::vector<Key<W>>& out) {
  const std::uint64_t nb = b.size();
  const std::uint64_t total = a.size() * nb;
  if (total == 0 || t <= 0) return;
  if (t >= 1) {
    out.reserve(total);
    for (const auto& x : a)
      for (const auto& y : b) out.push_back(x | y);
  } else if (t >= kSkipBelow) {
    out.reserve(static_cast<std::size_t>(t * static_cast<double>(total) * 1.25) + 4);
    for (const auto& x : a)
      for (const auto& y : b)
        if (rng.uniform() < t) out.push_back(x | y);
  } else {
    const double lq = std::log1p(-t);
    out.reserve(static_cast<std::size_t>(t * static_cast<double>(total) * 1.25) + 4);
    for (std::uint64_t i = geometricSkip(rng, lq); i < total;) {
      out.push_back(a[i / nb] | b[i % nb]);
      std::uint64_t s = geometricSkip(rng, lq);
      if (s >= total) break;
      i += 1 + s;
    }
  }
  std::sort(out.begin(), out.end());
}

template <std::size_t W>
struct Context {
  const Program& prog;
  const SupportInfo& info;
  const Params& params;
  PContext pc;
  std::vector<Key<W>> mask;
  std::vector<std::vector<Key<W>>> exactKeys;  // frontier height-0 nodes, sorted

  Context(const Program& p, const SupportInfo& i, const Params& pr)
      : prog(p), info(i), params(pr), pc(pr.context()), mask(p.size()), exactKeys(p.size()) {
    for (NodeIndex q = 0; q < p.size(); ++q) mask[q] = keyOf<W>(p.vars(q));
  }

  void loadExact(NodeIndex q) {
    if (!exactKeys[q].empty()) return;
    auto& ks = exactKeys[q];
    for (const Monomial& m : info.support(q)) ks.push_back(keyOf<W>(m));
    std::sort(ks.begin(), ks.end());
  }
};

template <std::size_t W>
class KeyOracle {
 public:
  explicit KeyOracle(const Context<W>& c) : c_(&c), memo_(c.prog.size()) {}

  bool contains(NodeIndex q, const Key<W>& k) {
    if (!subsetOf(k, c_->mask[q]) || popcount(k) != c_->prog.degree(q)) return false;
    if (c_->info.isExact(q)) {
      const auto& ks = c_->exactKeys[q];
      return std::binary_search(ks.begin(), ks.end(), k);
    }
    auto& memo = memo_[q];
    if (auto it = memo.find(k); it != memo.end()) return it->second;
    const Node& nd = c_->prog.node(q);
    bool r = false;
    if (nd.kind == NodeKind::Times) {
      NodeIndex a = nd.children[0], b = nd.children[1];
      r = contains(a, k & c_->mask[a]) && contains(b, k & c_->mask[b]);
    } else if (nd.kind == NodeKind::Plus) {
      for (NodeIndex ch : nd.children)
        if (contains(ch, k)) {
          r = true;
          break;
        }
    }
    memo.emplace(k, r);
    return r;
  }

 private:
  const Context<W>* c_;
  std::vector<std::unordered_map<Key<W>, bool, KeyHash<W>>> memo_;
};

template <std::size_t W>
struct NodeSamples {
  bool shared = false;  // every r uses sets[0]
  std::vector<std::vector<Key<W>>> sets;
  const std::vector<Key<W>>& get(std::uint64_t r) const { return shared ? sets[0] : sets[r]; }
  bool live() const { return !sets.empty(); }
};

struct Aborted {
  std::string reason;
};

template <class F>
void parallelFor(std::uint64_t count, unsigned jobs, F&& f) {
  if (jobs <= 1 || count < 2) {
    f(std::uint64_t{0}, count, 0u);
    return;
  }
  jobs = static_cast<unsigned>(std::min<std::uint64_t>(jobs, count));
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(jobs);
  const std::uint64_t chunk = (count + jobs - 1) / jobs;
  for (unsigned t = 0; t < jobs; ++t) {
    std::uint64_t lo = t * chunk, hi = std::min(count, lo + chunk);
    threads.emplace_back([&, lo, hi, t] {
      try {
        f(lo, hi, t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double ratioOf(const Real& num, const Real& den, InvariantCounts& inv) {
  Real r = num / den;
  ++inv.checks;
  if (r < 0 || r > Real(1) + Real(1e-40)) ++inv.ratioViolations;
  if (r > 1) r = 1;
  return r.convert_to<double>();
}

template <std::size_t W>
class Run {
 public:
  Run(const Program& p, const SupportInfo& info, const Params& params, std::uint64_t seed,
      const RunOptions& opt)
      : c_(p, info, params), seed_(seed), opt_(opt), R_(params.samplesPerNode()),
        jobs_(std::max(1u, opt.jobs)), samples_(p.size()), p_(p.size()) {
    for (unsigned t = 0; t < jobs_; ++t) oracles_.emplace_back(c_);
  }

  RunResult execute() {
    const Program& prog = c_.prog;
    const SupportInfo& info = c_.info;
    RunResult res;
    res.p.assign(prog.size(), std::nullopt);
    if (opt_.keepSamples) res.samples.assign(prog.size(), {});

    // Needed nodes: reachable Large nodes and their Exact children.
    std::vector<bool> reach = prog.reachable();
    std::vector<bool> needed(prog.size(), false);
    std::vector<std::uint32_t> parentsLeft(prog.size(), 0);
    for (NodeIndex q = 0; q < prog.size(); ++q) {
      if (!reach[q] || info.isExact(q)) continue;
      needed[q] = true;
      for (NodeIndex ch : prog.node(q).children) {
        needed[ch] = true;
        ++parentsLeft[ch];
      }
    }

    try {
      for (NodeIndex q = 0; q < prog.size(); ++q) {
        if (!needed[q]) continue;
        const std::uint32_t h = static_cast<std::uint32_t>(info.effectiveHeight[q]);
        if (h == 0) {
          heightZero(q);
        } else if (prog.node(q).kind == NodeKind::Times) {
          times(q, h, res);
        } else {
          plus(q, h, res);
        }
        audit(q, h, res.invariants);
        checkTheta(q);
        if (opt_.diagnostics) res.nodes.push_back(diagnose(q, h));
        if (opt_.keepSamples) res.samples[q] = export_(q);
        if (h > 0)
          for (NodeIndex ch : prog.node(q).children)
            if (--parentsLeft[ch] == 0 && ch != prog.root()) samples_[ch].sets.clear();
      }
    } catch (const Aborted& a) {
      res.aborted = true;
      res.abortReason = a.reason;
      res.estimate = 0;
      res.estimateText = "0";
      for (NodeIndex q = 0; q < prog.size(); ++q) res.p[q] = p_[q];
      return res;
    }
    for (NodeIndex q = 0; q < prog.size(); ++q) res.p[q] = p_[q];
    const PValue& pr = *p_[prog.root()];
    Real est = c_.pc.sixteenN() / pr.value();
    res.estimate = est.convert_to<double>();
    res.estimateText = est.str(30);
    return res;
  }

  std::vector<Key<W>> heightZeroOnly(NodeIndex q, std::uint64_t r) {
    c_.loadExact(q);
    const auto& supp = c_.exactKeys[q];
    PValue pv = PValue::heightZero(c_.pc, supp.size());
    std::vector<Key<W>> out;
    SplitMix64 rng(substreamSeed(seed_, {q, r, 0}));
    reduceKeys(supp, pv.isOne() ? 1.0 : pv.value().convert_to<double>(), rng, out);
    return out;
  }

 private:
  void heightZero(NodeIndex q) {
    c_.loadExact(q);
    const auto& supp = c_.exactKeys[q];
    PValue pv = PValue::heightZero(c_.pc, supp.size());
    auto& ns = samples_[q];
    if (pv.isOne()) {
      ns.shared = true;
      ns.sets.assign(1, supp);
    } else {
      const double t = pv.value().convert_to<double>();
      ns.sets.assign(R_, {});
      parallelFor(R_, jobs_, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
        for (std::uint64_t r = lo; r < hi; ++r) {
          SplitMix64 rng(substreamSeed(seed_, {q, r, 0}));
          reduceKeys(supp, t, rng, ns.sets[r]);
        }
      });
    }
    p_[q] = std::move(pv);
  }

  void times(NodeIndex q, std::uint32_t h, RunResult& res) {
    const Node& nd = c_.prog.node(q);
    const NodeIndex a = nd.children[0], b = nd.children[1];
    const PValue& pa = *p_[a];
    const PValue& pb = *p_[b];
    const auto& sa = samples_[a];
    const auto& sb = samples_[b];
    auto firstSize = [](const NodeSamples<W>& s) {
      return Rational(std::max<std::size_t>(1, s.get(0).size()));
    };
    SymValue v;
    if (pa.isOne() && pb.isOne() && c_.params.mode == Mode::Practical) {
      const std::uint64_t prod = std::max<std::uint64_t>(1, sa.get(0).size() * sb.get(0).size());
      v = SymValue::sixteenNOver(c_.pc, prod);
      res.deviations.push_back("node " + std::to_string(q) +
                               ": both children have p = 1; used 16n/(|S1||S2|)");
    } else if (pa.isOne()) {
      v = SymValue::divide(c_.pc, pb.sym, firstSize(sa));
    } else if (pb.isOne()) {
      v = SymValue::divide(c_.pc, pa.sym, firstSize(sb));
    } else {
      v = SymValue::productOver16n(c_.pc, pa.sym, pb.sym);
    }
    PValue pq = roundDown(c_.pc, h, v);
    const double t = ratioOf(pq.value(), pa.value() * pb.value(), res.invariants);
    auto& out = samples_[q];
    out.sets.assign(R_, {});
    parallelFor(R_, jobs_, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
      for (std::uint64_t r = lo; r < hi; ++r) {
        SplitMix64 rng(substreamSeed(seed_, {q, r, 0}));
        crossReduce(sa.get(r), sb.get(r), t, rng, out.sets[r]);
      }
    });
    p_[q] = std::move(pq);
  }

  void plus(NodeIndex q, std::uint32_t h, RunResult& res) {
    const auto& kids = c_.prog.node(q).children;
    const SymValue* rho = &p_[kids[0]]->sym;
    for (NodeIndex ch : kids) rho = &minOf(*rho, p_[ch]->sym);
    const SymValue rhoV = *rho;
    std::vector<double> ratio;
    for (NodeIndex ch : kids) ratio.push_back(ratioOf(rhoV.value, p_[ch]->value(), res.invariants));

    const std::uint64_t guard = satMul(kids.size(), c_.params.theta);
    std::vector<std::vector<Key<W>>> hat(R_);
    std::vector<char> overflow(jobs_, 0);
    parallelFor(R_, jobs_, [&](std::uint64_t lo, std::uint64_t hi, unsigned tid) {
      KeyOracle<W>& oracle = oracles_[tid];
      std::vector<Key<W>> tmp;
      for (std::uint64_t r = lo; r < hi; ++r) {
        SplitMix64 rng(substreamSeed(seed_, {q, r, 0}));
        auto& dst = hat[r];
        for (std::size_t i = 0; i < kids.size(); ++i) {
          tmp.clear();
          reduceKeys(samples_[kids[i]].get(r), ratio[i], rng, tmp);
          for (const auto& k : tmp) {
            bool earlier = false;
            for (std::size_t j = 0; j < i && !earlier; ++j) earlier = oracle.contains(kids[j], k);
            if (!earlier) dst.push_back(k);
          }
        }
        std::sort(dst.begin(), dst.end());
        if (dst.size() >= guard) overflow[tid] = 1;
      }
    });
    if (std::find(overflow.begin(), overflow.end(), 1) != overflow.end())
      throw Aborted{"union set at node " + std::to_string(q) + " reached k*theta"};

    // Median over n_t batches of the batch sums of |S^hat|.
    std::vector<std::uint64_t> sums(c_.params.nt, 0);
    for (std::uint64_t r = 0; r < R_; ++r) sums[r / c_.params.ns] += hat[r].size();
    std::sort(sums.begin(), sums.end());
    const std::uint64_t med = sums[(sums.size() - 1) / 2];
    SymValue v = rhoV;
    if (med > 0) {
      SymValue rhoHat = SymValue::divide(c_.pc, rhoV, Rational(med) / Rational(16 * c_.pc.n * c_.params.ns));
      v = minOf(rhoV, rhoHat);
    }
    PValue pq = roundDown(c_.pc, h, v);
    const double t = ratioOf(pq.value(), rhoV.value, res.invariants);
    auto& out = samples_[q];
    out.sets.assign(R_, {});
    parallelFor(R_, jobs_, [&](std::uint64_t lo, std::uint64_t hi, unsigned) {
      for (std::uint64_t r = lo; r < hi; ++r) {
        SplitMix64 rng(substreamSeed(seed_, {q, r, 1}));
        reduceKeys(hat[r], t, rng, out.sets[r]);
        std::vector<Key<W>>().swap(hat[r]);
      }
    });
    p_[q] = std::move(pq);
  }

  void audit(NodeIndex q, std::uint32_t h, InvariantCounts& inv) {
    const PValue& pq = *p_[q];
    ++inv.checks;
    if (compare(pq.sym, SymValue::one(c_.pc)) > 0) ++inv.pChainViolations;
    if (!isAcceptable(c_.pc, h, pq)) ++inv.closureViolations;
    if (h == 0) return;
    for (NodeIndex ch : c_.prog.node(q).children) {
      ++inv.checks;
      if (compare(pq.sym, p_[ch]->sym) > 0) ++inv.pChainViolations;
    }
  }

  void checkTheta(NodeIndex q) {
    const auto& s = samples_[q];
    const std::uint64_t n = s.shared ? 1 : R_;
    for (std::uint64_t r = 0; r < n; ++r)
      if (s.get(r).size() >= c_.params.theta)
        throw Aborted{"|S^" + std::to_string(r + 1) + "(q" + std::to_string(q) + ")| reached theta"};
  }

  NodeDiagnostics diagnose(NodeIndex q, std::uint32_t h) const {
    NodeDiagnostics d;
    d.node = q;
    d.effectiveHeight = h;
    const Node& nd = c_.prog.node(q);
    d.kind = nd.kind == NodeKind::Input ? "input" : nd.kind == NodeKind::Times ? "times" : "plus";
    d.p = p_[q]->describe();
    d.pValue = p_[q]->value().convert_to<double>();
    std::uint64_t total = 0;
    for (std::uint64_t r = 0; r < R_; ++r) {
      const auto sz = samples_[q].get(r).size();
      total += sz;
      d.maxSetSize = std::max<std::uint64_t>(d.maxSetSize, sz);
    }
    d.meanSetSize = R_ ? static_cast<double>(total) / static_cast<double>(R_) : 0;
    return d;
  }

  std::vector<std::vector<Monomial>> export_(NodeIndex q) const {
    std::vector<std::vector<Monomial>> out(R_);
    for (std::uint64_t r = 0; r < R_; ++r)
      for (const auto& k : samples_[q].get(r)) out[r].push_back(monoOf<W>(k));
    return out;
  }

  Context<W> c_;
  std::uint64_t seed_;
  RunOptions opt_;
  std::uint64_t R_;
  unsigned jobs_;
  std::vector<NodeSamples<W>> samples_;
  std::vector<std::optional<PValue>> p_;
  std::vector<KeyOracle<W>> oracles_;
};

template <class F>
auto dispatchWidth(std::size_t numVars, F&& f) {
  const std::size_t words = std::max<std::size_t>(1, (numVars + 63) / 64);
  if (words <= 1) return f(std::integral_constant<std::size_t, 1>{});
  if (words <= 2) return f(std::integral_constant<std::size_t, 2>{});
  if (words <= 4) return f(std::integral_constant<std::size_t, 4>{});
  if (words <= 8) return f(std::integral_constant<std::size_t, 8>{});
  if (words <= 16) return f(std::integral_constant<std::size_t, 16>{});
  if (words <= 32) return f(std::integral_constant<std::size_t, 32>{});
  throw ParamError("the sampling path supports at most 2048 variables");
}

std::uint64_t lowerMedianIndex(std::size_t n) { return (n - 1) / 2; }

}  // namespace

RunResult countCore(const Program& p, const SupportInfo& info, const Params& params, std::uint64_t seed,
                    const RunOptions& options) {
  if (info.isExact(p.root())) {
    RunResult r;
    r.exactPath = true;
    r.estimate = static_cast<double>(info.support(p.root()).size());
    r.estimateText = std::to_string(info.support(p.root()).size());
    return r;
  }
  if (satMul(params.ns, params.nt) > (std::uint64_t{1} << 32))
    throw ParamError("n_s * n_t = " + std::to_string(satMul(params.ns, params.nt)) +
                     " sample sets per node is beyond what this implementation can hold in memory");
  return dispatchWidth(p.numVars(), [&](auto w) {
    Run<decltype(w)::value> run(p, info, params, seed, options);
    return run.execute();
  });
}

RunResult countCore(const Program& p, const Params& params, std::uint64_t seed, const RunOptions& options) {
  SupportInfo info = cappedSupport(p, params.supportThreshold);
  return countCore(p, info, params, seed, options);
}

std::vector<Monomial> heightZeroSample(const Program& p, const SupportInfo& info, NodeIndex q,
                                       const Params& params, std::uint64_t seed, std::uint64_t r) {
  if (!info.isExact(q)) throw std::invalid_argument("node is not of effective height 0");
  return dispatchWidth(p.numVars(), [&](auto w) {
    constexpr std::size_t W = decltype(w)::value;
    Run<W> run(p, info, params, seed, RunOptions{});
    std::vector<Monomial> out;
    for (const auto& k : run.heightZeroOnly(q, r)) out.push_back(monoOf<W>(k));
    return out;
  });
}

CountResult counterWithParams(const Program& prog, const Params& params, std::uint64_t seed,
                              const RunOptions& options) {
  CountResult cr;
  cr.params = params;
  cr.seed = seed;
  cr.inputSize = prog.size();
  cr.reducedSize = prog.size();
  cr.reducedDepth = prog.depth();
  cr.deviations = params.deviations;
  SupportInfo info = cappedSupport(prog, params.supportThreshold);
  if (info.isExact(prog.root())) {
    RunResult r = countCore(prog, info, params, seed, options);
    cr.exactPath = true;
    cr.estimate = r.estimate;
    cr.estimateText = r.estimateText;
    cr.runEstimates.assign(1, r.estimate);
    return cr;
  }
  std::vector<std::pair<double, std::string>> ests;
  for (std::uint64_t j = 0; j < params.m; ++j) {
    RunOptions o = options;
    o.diagnostics = options.diagnostics && j == 0;
    RunResult r = countCore(prog, info, params, runSeed(seed, j), o);
    if (r.aborted) ++cr.abortedRuns;
    cr.invariants += r.invariants;
    for (auto& d : r.deviations)
      if (std::find(cr.deviations.begin(), cr.deviations.end(), d) == cr.deviations.end())
        cr.deviations.push_back(std::move(d));
    if (j == 0) cr.nodes = std::move(r.nodes);
    cr.runEstimates.push_back(r.estimate);
    ests.emplace_back(r.estimate, r.estimateText);
  }
  std::sort(ests.begin(), ests.end());
  const auto& med = ests[lowerMedianIndex(ests.size())];
  cr.estimate = med.first;
  cr.estimateText = med.second;
  return cr;
}

CountResult counter(const Program& p, double epsilon, double delta, Mode mode, const Overrides& overrides,
                    std::uint64_t seed, const RunOptions& options) {
  ValidationReport rep = validateProgram(p);
  if (!rep.ok()) throw std::invalid_argument("invalid program: " + rep.toString());
  Program reduced = reduceDepth(p);
  Params params = deriveParams(reduced, epsilon, delta, mode, overrides);
  CountResult cr = counterWithParams(reduced, params, seed, options);
  cr.inputSize = p.size();
  return cr;
}

CfgCountResult countCfg(const Grammar& g, std::size_t n, double epsilon, double delta, Mode mode,
                        const Overrides& overrides, std::uint64_t seed, const RunOptions& options) {
  if (n == 0) throw ParamError("n must be at least 1");
  CfgCountResult out;
  Grammar cnf = toCnf(g);
  UnionConcatProgram uc = cfgSliceProgram(cnf, n);
  if (uc.empty) {
    out.emptyLanguage = true;
    out.count.params = deriveParams(n, 1, epsilon, delta, mode, overrides);
    out.count.seed = seed;
    out.count.exactPath = true;
    out.count.estimate = 0;
    out.count.estimateText = "0";
    return out;
  }
  auto [prog, decoder] = ucToPlusTimes(uc, n);
  out.count = counter(prog, epsilon, delta, mode, overrides, seed, options);
  return out;
}

DnnfCountResult countDnnf(const NnfCircuit& c, double epsilon, double delta, Mode mode,
                          const Overrides& overrides, std::uint64_t seed, const RunOptions& options) {
  if (auto rep = checkDecomposable(c); !rep.empty())
    throw CircuitShapeError("circuit is not decomposable at node " + std::to_string(rep.front().node));
  DnnfCountResult out;
  const bool hasConstants = std::any_of(c.nodes.begin(), c.nodes.end(), [](const NnfNode& n) {
    return n.kind == NnfKind::True || n.kind == NnfKind::False;
  });
  out.smoothed = hasConstants || !checkSmooth(c).empty();
  NnfCircuit sc = out.smoothed ? smooth(c) : c;
  DnnfTranslation tr = dnnfToPlusTimes(sc);
  if (auto* k = std::get_if<ConstantCount>(&tr)) {
    out.constant = true;
    out.count.params = deriveParams(std::max<std::size_t>(1, c.numVars), 1, epsilon, delta, mode, overrides);
    out.count.seed = seed;
    out.count.exactPath = true;
    out.count.estimate = static_cast<double>(k->count);
    out.count.estimateText = std::to_string(k->count);
    return out;
  }
  auto& [prog, decoder] = std::get<0>(tr);
  out.count = counter(prog, epsilon, delta, mode, overrides, seed, options);
  return out;
}

}  // namespace slicecount
