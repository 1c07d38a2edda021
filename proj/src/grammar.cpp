#include "slicecount/grammar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace slicecount {

// ----------------------------------------------------------------- Grammar

std::optional<SymbolId> Grammar::findNonterminal(std::string_view name) const {
  for (SymbolId i = 0; i < nonterminals.size(); ++i)
    if (nonterminals[i] == name) return i;
  return std::nullopt;
}

std::optional<SymbolId> Grammar::findTerminal(std::string_view name) const {
  for (SymbolId i = 0; i < terminals.size(); ++i)
    if (terminals[i] == name) return i;
  return std::nullopt;
}

bool Grammar::isCnf() const {
  return std::all_of(rules.begin(), rules.end(), [](const Rule& r) {
    if (r.rhs.size() == 1) return r.rhs[0].terminal;
    if (r.rhs.size() == 2) return !r.rhs[0].terminal && !r.rhs[1].terminal;
    return false;
  });
}

namespace {

bool isNonterminalName(std::string_view s) {
  if (s.empty() || !(s[0] >= 'A' && s[0] <= 'Z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool isBareTerminal(std::string_view s) {
  if (s.empty()) return false;
  char c = s[0];
  if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
  return std::all_of(s.begin(), s.end(), [](char x) {
    return std::isalnum(static_cast<unsigned char>(x)) || x == '_';
  });
}

std::string quoteTerminal(const std::string& t) {
  return isBareTerminal(t) ? t : "'" + t + "'";
}

}  // namespace

std::string Grammar::toText() const {
  std::ostringstream os;
  os << "@start " << nonterminals[start] << '\n';
  for (const Rule& r : rules) {
    os << nonterminals[r.lhs] << " ->";
    for (const Symbol& s : r.rhs)
      os << ' ' << (s.terminal ? quoteTerminal(terminals[s.id]) : nonterminals[s.id]);
    os << '\n';
  }
  return os.str();
}

std::string Grammar::wordToString(const Word& w) const {
  bool single = std::all_of(w.begin(), w.end(), [&](SymbolId t) { return terminals[t].size() == 1; });
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i && !single) s += ' ';
    s += terminals[w[i]];
  }
  return s;
}

// ------------------------------------------------------------------ parser

Grammar parseGrammar(std::string_view text) {
  struct RawSym {
    bool quoted;
    std::string text;
  };
  struct RawRule {
    std::string lhs;
    std::vector<RawSym> rhs;
    std::size_t line;
  };
  std::vector<RawRule> raw;
  std::optional<std::pair<std::string, std::size_t>> startDirective;

  std::size_t lineNo = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++lineNo;
    // strip comments outside quotes
    bool inQuote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '\'') inQuote = !inQuote;
      if (line[i] == '#' && !inQuote) {
        line.resize(i);
        break;
      }
    }
    std::string_view sv(line);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
    if (sv.empty()) continue;

    if (sv.starts_with("@start")) {
      std::string_view name = sv.substr(6);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.front()))) name.remove_prefix(1);
      if (!isNonterminalName(name)) throw ParseError(lineNo, "@start needs a nonterminal name");
      startDirective = {std::string(name), lineNo};
      continue;
    }
    auto arrow = sv.find("->");
    if (arrow == std::string_view::npos) throw ParseError(lineNo, "expected '->'");
    std::string_view lhs = sv.substr(0, arrow);
    while (!lhs.empty() && std::isspace(static_cast<unsigned char>(lhs.back()))) lhs.remove_suffix(1);
    if (!isNonterminalName(lhs))
      throw ParseError(lineNo, "left-hand side '" + std::string(lhs) + "' is not a nonterminal");

    std::string_view body = sv.substr(arrow + 2);
    std::vector<std::vector<RawSym>> alts(1);
    std::size_t i = 0;
    bool sawSemicolon = false;
    while (i < body.size()) {
      char c = body[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (sawSemicolon) {
        throw ParseError(lineNo, "text after ';'");
      } else if (c == '|') {
        alts.emplace_back();
        ++i;
      } else if (c == ';') {
        sawSemicolon = true;
        ++i;
      } else if (c == '\'') {
        auto close = body.find('\'', i + 1);
        if (close == std::string_view::npos) throw ParseError(lineNo, "unterminated quote");
        if (close == i + 1) throw ParseError(lineNo, "empty quoted terminal");
        alts.back().push_back({true, std::string(body.substr(i + 1, close - i - 1))});
        i = close + 1;
      } else {
        std::size_t j = i;
        while (j < body.size() && !std::isspace(static_cast<unsigned char>(body[j])) &&
               body[j] != '|' && body[j] != ';' && body[j] != '\'')
          ++j;
        std::string tok(body.substr(i, j - i));
        if (!isNonterminalName(tok) && !isBareTerminal(tok))
          throw ParseError(lineNo, "bad symbol '" + tok + "' (quote non-lowercase terminals)");
        alts.back().push_back({false, tok});
        i = j;
      }
    }
    for (auto& alt : alts) raw.push_back({std::string(lhs), std::move(alt), lineNo});
  }
  if (raw.empty()) throw ParseError(lineNo, "grammar has no rules");

  Grammar g;
  std::unordered_map<std::string, SymbolId> ntIds, tIds;
  auto nt = [&](const std::string& name) {
    auto [it, fresh] = ntIds.try_emplace(name, static_cast<SymbolId>(g.nonterminals.size()));
    if (fresh) g.nonterminals.push_back(name);
    return it->second;
  };
  auto term = [&](const std::string& name) {
    auto [it, fresh] = tIds.try_emplace(name, static_cast<SymbolId>(g.terminals.size()));
    if (fresh) g.terminals.push_back(name);
    return it->second;
  };
  for (const auto& rr : raw) nt(rr.lhs);
  for (const auto& rr : raw) {
    Rule r;
    r.lhs = nt(rr.lhs);
    for (const auto& s : rr.rhs) {
      if (!s.quoted && isNonterminalName(s.text))
        r.rhs.push_back({false, nt(s.text)});
      else
        r.rhs.push_back({true, term(s.text)});
    }
    g.rules.push_back(std::move(r));
  }
  for (const auto& [name, id] : tIds) {
    if (ntIds.count(name)) {
      std::size_t where = 0;
      for (const auto& rr : raw)
        for (const auto& s : rr.rhs)
          if (s.quoted && s.text == name && !where) where = rr.line;
      throw ParseError(where, "terminal '" + name + "' clashes with a nonterminal name");
    }
  }
  g.start = 0;
  if (startDirective) {
    auto it = ntIds.find(startDirective->first);
    bool hasRule = it != ntIds.end() && std::any_of(g.rules.begin(), g.rules.end(), [&](const Rule& r) {
                     return r.lhs == it->second;
                   });
    if (!hasRule)
      throw ParseError(startDirective->second,
                       "undefined start symbol '" + startDirective->first + "'");
    g.start = it->second;
  }
  return g;
}

// --------------------------------------------------------------------- CNF

namespace {

std::vector<bool> nullableSet(const Grammar& g) {
  std::vector<bool> nullable(g.nonterminals.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : g.rules) {
      if (nullable[r.lhs]) continue;
      bool all = std::all_of(r.rhs.begin(), r.rhs.end(),
                             [&](const Symbol& s) { return !s.terminal && nullable[s.id]; });
      if (all) nullable[r.lhs] = changed = true;
    }
  }
  return nullable;
}

void pushUnique(std::vector<Rule>& rules, Rule r) {
  if (std::find(rules.begin(), rules.end(), r) == rules.end()) rules.push_back(std::move(r));
}

std::string freshName(const Grammar& g, std::string base) {
  if (!g.findNonterminal(base) && !g.findTerminal(base)) return base;
  for (std::size_t k = 1;; ++k) {
    std::string cand = base + "_" + std::to_string(k);
    if (!g.findNonterminal(cand) && !g.findTerminal(cand)) return cand;
  }
}

}  // namespace

Grammar toCnf(const Grammar& input) {
  Grammar g = input;

  // 1. epsilon removal
  {
    auto nullable = nullableSet(g);
    std::vector<Rule> out;
    for (const Rule& r : g.rules) {
      std::vector<std::size_t> optional;
      for (std::size_t i = 0; i < r.rhs.size(); ++i)
        if (!r.rhs[i].terminal && nullable[r.rhs[i].id]) optional.push_back(i);
      const std::size_t combos = std::size_t{1} << optional.size();
      for (std::size_t mask = 0; mask < combos; ++mask) {
        Rule v{r.lhs, {}};
        std::size_t k = 0;
        for (std::size_t i = 0; i < r.rhs.size(); ++i) {
          if (k < optional.size() && optional[k] == i) {
            bool drop = (mask >> k) & 1U;
            ++k;
            if (drop) continue;
          }
          v.rhs.push_back(r.rhs[i]);
        }
        if (!v.rhs.empty()) pushUnique(out, std::move(v));
      }
    }
    g.rules = std::move(out);
  }

  // 2. unit removal: A -> rhs for every non-unit rule of each B reachable by unit steps
  {
    const std::size_t nv = g.nonterminals.size();
    std::vector<std::vector<bool>> unit(nv, std::vector<bool>(nv, false));
    for (std::size_t a = 0; a < nv; ++a) unit[a][a] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (const Rule& r : g.rules) {
        if (r.rhs.size() != 1 || r.rhs[0].terminal) continue;
        for (std::size_t a = 0; a < nv; ++a)
          if (unit[a][r.lhs] && !unit[a][r.rhs[0].id]) unit[a][r.rhs[0].id] = changed = true;
      }
    }
    std::vector<Rule> out;
    for (std::size_t a = 0; a < nv; ++a) {
      for (const Rule& r : g.rules) {
        if (!unit[a][r.lhs]) continue;
        if (r.rhs.size() == 1 && !r.rhs[0].terminal) continue;
        pushUnique(out, Rule{static_cast<SymbolId>(a), r.rhs});
      }
    }
    // keep the original rule order for rules already present in the source
    std::stable_sort(out.begin(), out.end(), [](const Rule& x, const Rule& y) { return x.lhs < y.lhs; });
    g.rules = std::move(out);
  }

  // 3. terminal lifting in long rules
  {
    std::map<SymbolId, SymbolId> lifted;
    std::vector<Rule> extra;
    for (Rule& r : g.rules) {
      if (r.rhs.size() < 2) continue;
      for (Symbol& s : r.rhs) {
        if (!s.terminal) continue;
        auto it = lifted.find(s.id);
        if (it == lifted.end()) {
          const std::string& t = g.terminals[s.id];
          std::string base = isBareTerminal(t) ? "T_" + t : "T_" + std::to_string(s.id);
          std::string name = freshName(g, base);
          auto id = static_cast<SymbolId>(g.nonterminals.size());
          g.nonterminals.push_back(name);
          extra.push_back(Rule{id, {Symbol{true, s.id}}});
          it = lifted.emplace(s.id, id).first;
        }
        s = Symbol{false, it->second};
      }
    }
    for (auto& r : extra) g.rules.push_back(std::move(r));
  }

  // 4. binarization
  {
    std::vector<Rule> out;
    for (const Rule& r : g.rules) {
      if (r.rhs.size() <= 2) {
        out.push_back(r);
        continue;
      }
      SymbolId lhs = r.lhs;
      for (std::size_t i = 0; i + 2 < r.rhs.size(); ++i) {
        std::string name = freshName(g, g.nonterminals[r.lhs] + "_1");
        auto id = static_cast<SymbolId>(g.nonterminals.size());
        g.nonterminals.push_back(name);
        out.push_back(Rule{lhs, {r.rhs[i], Symbol{false, id}}});
        lhs = id;
      }
      out.push_back(Rule{lhs, {r.rhs[r.rhs.size() - 2], r.rhs.back()}});
    }
    g.rules = std::move(out);
  }
  return g;
}

bool cykAccepts(const Grammar& cnf, std::span<const SymbolId> word) {
  const std::size_t n = word.size();
  if (n == 0) return false;
  const std::size_t nv = cnf.nonterminals.size();
  // table[len-1][i][A]
  std::vector<std::vector<std::vector<bool>>> table(
      n, std::vector<std::vector<bool>>(n, std::vector<bool>(nv, false)));
  for (std::size_t i = 0; i < n; ++i)
    for (const Rule& r : cnf.rules)
      if (r.rhs.size() == 1 && r.rhs[0].terminal && r.rhs[0].id == word[i]) table[0][i][r.lhs] = true;
  for (std::size_t len = 2; len <= n; ++len)
    for (std::size_t i = 0; i + len <= n; ++i)
      for (std::size_t k = 1; k < len; ++k)
        for (const Rule& r : cnf.rules)
          if (r.rhs.size() == 2 && table[k - 1][i][r.rhs[0].id] &&
              table[len - k - 1][i + k][r.rhs[1].id])
            table[len - 1][i][r.lhs] = true;
  return table[n - 1][0][cnf.start];
}

bool derives(const Grammar& g, std::span<const SymbolId> word) {
  const std::size_t n = word.size();
  const std::size_t nv = g.nonterminals.size();
  // d[A][i][j]: A =>* word[i..j)
  std::vector<std::vector<std::vector<bool>>> d(
      nv, std::vector<std::vector<bool>>(n + 1, std::vector<bool>(n + 1, false)));
  auto seqCover = [&](const std::vector<Symbol>& rhs, std::size_t i, std::size_t j) {
    std::vector<bool> reach(n + 1, false);
    reach[i] = true;
    for (const Symbol& s : rhs) {
      std::vector<bool> next(n + 1, false);
      for (std::size_t k = i; k <= j; ++k) {
        if (!reach[k]) continue;
        if (s.terminal) {
          if (k < j && word[k] == s.id) next[k + 1] = true;
        } else {
          for (std::size_t e = k; e <= j; ++e)
            if (d[s.id][k][e]) next[e] = true;
        }
      }
      reach = std::move(next);
    }
    return bool(reach[j]);
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = i; j <= n; ++j)
        for (const Rule& r : g.rules)
          if (!d[r.lhs][i][j] && seqCover(r.rhs, i, j)) d[r.lhs][i][j] = changed = true;
  }
  return d[g.start][0][n];
}

// ------------------------------------------------------ (union, concat)

std::optional<std::vector<std::size_t>> UnionConcatProgram::lengths() const {
  std::vector<std::size_t> len(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const UcNode& u = nodes[i];
    switch (u.kind) {
      case UcKind::Letter: len[i] = 1; break;
      case UcKind::Concat: len[i] = len[u.children[0]] + len[u.children[1]]; break;
      case UcKind::Union:
        len[i] = len[u.children[0]];
        for (auto c : u.children)
          if (len[c] != len[i]) return std::nullopt;
        break;
    }
  }
  return len;
}

std::string UnionConcatProgram::toText() const {
  std::ostringstream os;
  if (empty) {
    os << "# empty language\n";
    return os.str();
  }
  for (const UcNode& u : nodes) {
    switch (u.kind) {
      case UcKind::Letter: os << "letter " << quoteTerminal(alphabet[u.letter]); break;
      case UcKind::Concat: os << "concat " << u.children[0] << ' ' << u.children[1]; break;
      case UcKind::Union:
        os << "union";
        for (auto c : u.children) os << ' ' << c;
        break;
    }
    os << '\n';
  }
  return os.str();
}

UnionConcatProgram cfgSliceProgram(const Grammar& cnf, std::size_t n) {
  if (n < 1) throw std::invalid_argument("slice length must be at least 1");
  if (!cnf.isCnf()) throw std::invalid_argument("cfgSliceProgram needs a CNF grammar");
  const std::size_t nv = cnf.nonterminals.size();

  // nonempty[A][i]: L_i(A) != {} (i in 1..n)
  std::vector<std::vector<bool>> nonempty(nv, std::vector<bool>(n + 1, false));
  for (const Rule& r : cnf.rules)
    if (r.rhs.size() == 1) nonempty[r.lhs][1] = true;
  for (std::size_t i = 2; i <= n; ++i)
    for (const Rule& r : cnf.rules)
      if (r.rhs.size() == 2)
        for (std::size_t k = 1; k < i && !nonempty[r.lhs][i]; ++k)
          if (nonempty[r.rhs[0].id][k] && nonempty[r.rhs[1].id][i - k]) nonempty[r.lhs][i] = true;

  UnionConcatProgram out;
  out.alphabet = cnf.terminals;
  if (!nonempty[cnf.start][n]) {
    out.empty = true;
    return out;
  }

  std::map<SymbolId, std::uint32_t> letterNode;
  std::map<std::pair<SymbolId, std::size_t>, std::uint32_t> memo;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> concatNode;

  auto emit = [&](UcNode u) {
    out.nodes.push_back(std::move(u));
    return static_cast<std::uint32_t>(out.nodes.size() - 1);
  };
  auto letter = [&](SymbolId a) {
    auto it = letterNode.find(a);
    if (it != letterNode.end()) return it->second;
    auto id = emit(UcNode{UcKind::Letter, a, {}});
    letterNode.emplace(a, id);
    return id;
  };

  auto build = [&](auto&& self, SymbolId A, std::size_t i) -> std::uint32_t {
    if (auto it = memo.find({A, i}); it != memo.end()) return it->second;
    std::vector<std::uint32_t> terms;
    if (i == 1) {
      for (const Rule& r : cnf.rules)
        if (r.lhs == A && r.rhs.size() == 1) terms.push_back(letter(r.rhs[0].id));
    } else {
      for (const Rule& r : cnf.rules) {
        if (r.lhs != A || r.rhs.size() != 2) continue;
        SymbolId B = r.rhs[0].id, C = r.rhs[1].id;
        for (std::size_t k = 1; k < i; ++k) {
          if (!nonempty[B][k] || !nonempty[C][i - k]) continue;
          std::uint32_t left = self(self, B, k);
          std::uint32_t right = self(self, C, i - k);
          auto [it, fresh] = concatNode.try_emplace({left, right}, 0);
          if (fresh) it->second = emit(UcNode{UcKind::Concat, 0, {left, right}});
          terms.push_back(it->second);
        }
      }
    }
    // dedupe, keeping first-seen order
    std::vector<std::uint32_t> uniq;
    for (auto t : terms)
      if (std::find(uniq.begin(), uniq.end(), t) == uniq.end()) uniq.push_back(t);
    std::uint32_t id = uniq.size() == 1 ? uniq[0] : emit(UcNode{UcKind::Union, 0, uniq});
    memo.emplace(std::make_pair(A, i), id);
    return id;
  };
  std::uint32_t root = build(build, cnf.start, n);
  // lengths strictly decrease below q_{S,n}, so it is always emitted last
  if (root != out.root()) throw std::logic_error("slice root is not the last node");
  return out;
}

Monomial WordDecoder::encode(const Word& w) const {
  if (w.size() != length_) throw std::invalid_argument("word has the wrong length");
  std::vector<VariableId> vars;
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (w[t] >= alphabetSize_) throw std::invalid_argument("letter out of range");
    vars.push_back(variable(w[t], t));
  }
  return Monomial(std::move(vars));
}

Word WordDecoder::decode(const Monomial& m) const {
  if (m.degree() != length_) throw std::invalid_argument("monomial degree differs from word length");
  Word w(length_, 0);
  std::vector<bool> seen(length_, false);
  for (VariableId v : m.vars()) {
    std::size_t pos = v / alphabetSize_;
    if (pos >= length_ || seen[pos]) throw std::invalid_argument("monomial is not a word encoding");
    seen[pos] = true;
    w[pos] = static_cast<SymbolId>(v % alphabetSize_);
  }
  return w;
}

std::pair<Program, WordDecoder> ucToPlusTimes(const UnionConcatProgram& uc, std::size_t n) {
  if (uc.empty) throw std::invalid_argument("empty language has no (+,x) program");
  auto lens = uc.lengths();
  if (!lens) throw std::invalid_argument("(union,concat) program is not homogeneous");
  if ((*lens)[uc.root()] != n) throw std::invalid_argument("root word length differs from n");

  const std::size_t sigma = uc.alphabet.size();
  std::vector<std::string> names;
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t a = 0; a < sigma; ++a) names.push_back(uc.alphabet[a] + "@" + std::to_string(t));
  WordDecoder decoder(sigma, n);

  std::vector<Node> nodes;
  std::map<std::pair<std::uint32_t, std::size_t>, NodeIndex> memo;
  auto build = [&](auto&& self, std::uint32_t i, std::size_t r) -> NodeIndex {
    if (auto it = memo.find({i, r}); it != memo.end()) return it->second;
    const UcNode& u = uc.nodes[i];
    Node nd;
    switch (u.kind) {
      case UcKind::Letter: nd = Node::input(decoder.variable(u.letter, r)); break;
      case UcKind::Concat: {
        NodeIndex a = self(self, u.children[0], r);
        NodeIndex b = self(self, u.children[1], r + (*lens)[u.children[0]]);
        nd = Node::times(a, b);
        break;
      }
      case UcKind::Union: {
        std::vector<NodeIndex> kids;
        for (auto c : u.children) kids.push_back(self(self, c, r));
        std::sort(kids.begin(), kids.end());
        kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
        nd = Node::plus(std::move(kids));
        break;
      }
    }
    nodes.push_back(std::move(nd));
    auto id = static_cast<NodeIndex>(nodes.size() - 1);
    memo.emplace(std::make_pair(i, r), id);
    return id;
  };
  build(build, uc.root(), 0);
  return {Program(std::move(nodes), std::move(names)), decoder};
}

}  // namespace slicecount
