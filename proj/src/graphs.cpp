#include "naesat/graphs.hpp"

#include <zlib.h>

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

#include "naesat/errors.hpp"
#include "naesat/rng.hpp"

namespace naesat {

FactorGraph FactorGraph::from_clause_vars(int n, int d, int k, std::vector<int> clause_vars) {
  if (n < 0 || d < 0 || k <= 0) throw InputError("graph: n, d must be nonnegative and k positive");
  if (static_cast<long long>(n) * d % k != 0) throw InputError("graph: n*d is not divisible by k");
  FactorGraph g;
  g.n_ = n;
  g.d_ = d;
  g.k_ = k;
  g.m_ = static_cast<int>(static_cast<long long>(n) * d / k);
  if (clause_vars.size() != static_cast<std::size_t>(g.m_) * k) throw InputError("graph: wrong number of clause slots");
  std::vector<int> fill(n, 0);
  g.clause_to_var_.assign(clause_vars.size(), -1);
  g.var_to_clause_.assign(static_cast<std::size_t>(n) * d, -1);
  for (std::size_t s = 0; s < clause_vars.size(); ++s) {
    int v = clause_vars[s];
    if (v < 0 || v >= n) throw InputError("graph: variable index out of range");
    if (fill[v] == d) throw InputError("graph: variable degree exceeds d");
    int t = v * d + fill[v]++;
    g.var_to_clause_[t] = static_cast<int>(s);
    g.clause_to_var_[s] = t;
  }
  for (int v = 0; v < n; ++v)
    if (fill[v] != d) throw InputError("graph: variable degree below d");
  g.clause_var_ = std::move(clause_vars);
  return g;
}

std::string FactorGraph::check() const {
  if (static_cast<long long>(n_) * d_ != static_cast<long long>(m_) * k_) return "n*d != m*k";
  if (clause_var_.size() != static_cast<std::size_t>(m_) * k_) return "clause slot count";
  if (var_to_clause_.size() != static_cast<std::size_t>(n_) * d_) return "variable slot count";
  std::vector<int> seen(clause_var_.size(), 0);
  for (std::size_t t = 0; t < var_to_clause_.size(); ++t) {
    int s = var_to_clause_[t];
    if (s < 0 || static_cast<std::size_t>(s) >= seen.size()) return "variable slot unmatched";
    if (seen[s]++) return "clause slot matched twice";
    if (clause_to_var_[s] != static_cast<int>(t)) return "inverse matching mismatch";
    if (clause_var_[s] != static_cast<int>(t) / d_) return "clause variable mismatch";
  }
  return {};
}

bool FactorGraph::is_simple() const {
  for (int a = 0; a < m_; ++a) {
    auto vs = clause_vars(a);
    for (int i = 0; i < k_; ++i)
      for (int j = i + 1; j < k_; ++j)
        if (vs[i] == vs[j]) return false;
  }
  return true;
}

FactorGraph generate_graph(int n, int d, int k, std::uint64_t seed) {
  if (n <= 0 || d <= 0 || k <= 0) throw InputError("generate_graph: n, d, k must be positive");
  if (static_cast<long long>(n) * d % k != 0) throw InputError("generate_graph: n*d is not divisible by k");
  const std::size_t edges = static_cast<std::size_t>(n) * d;
  // perm[t] is the clause slot matched to variable slot t (natural order).
  std::vector<int> perm(edges);
  std::iota(perm.begin(), perm.end(), 0);
  SplitMix64 rng(seed);
  for (std::size_t i = edges - 1; i > 0; --i) {
    std::size_t j = rng.below(i + 1);
    std::swap(perm[i], perm[j]);
  }
  std::vector<int> clause_vars(edges);
  for (std::size_t t = 0; t < edges; ++t) clause_vars[perm[t]] = static_cast<int>(t) / d;
  return FactorGraph::from_clause_vars(n, d, k, std::move(clause_vars));
}

LiteralAssignment generate_literals(const FactorGraph& g, std::uint64_t seed) {
  SplitMix64 rng(seed);
  LiteralAssignment L;
  L.bits.resize(g.edges());
  for (auto& b : L.bits) b = static_cast<std::uint8_t>(rng.bit());
  return L;
}

std::string serialize(const FactorGraph& g, const LiteralAssignment& L) {
  std::ostringstream os;
  os << "p naesat " << g.n() << ' ' << g.m() << ' ' << g.d() << ' ' << g.k() << '\n';
  for (int a = 0; a < g.m(); ++a) {
    for (int j = 0; j < g.k(); ++j) {
      int s = a * g.k() + j;
      int lit = g.var_at(s) + 1;
      os << (L.bits[s] ? -lit : lit) << ' ';
    }
    os << "0\n";
  }
  return os.str();
}

namespace {

bool parse_int(std::string_view tok, long long& out) {
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

Instance parse(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  std::size_t li = 0;
  auto skippable = [](std::string_view l) {
    auto t = split_ws(l);
    return t.empty() || t[0][0] == 'c';
  };
  while (li < lines.size() && skippable(lines[li])) ++li;
  if (li == lines.size()) throw ParseError(ParseErrorKind::MalformedHeader, "missing header line");
  auto head = split_ws(lines[li++]);
  long long hv[4];
  if (head.size() != 6 || head[0] != "p" || head[1] != "naesat")
    throw ParseError(ParseErrorKind::MalformedHeader, "header must be 'p naesat n m d k'");
  for (int i = 0; i < 4; ++i)
    if (!parse_int(head[2 + i], hv[i]) || hv[i] < 0 || hv[i] > (1LL << 30))
      throw ParseError(ParseErrorKind::MalformedHeader, "header fields must be nonnegative integers");
  const long long n = hv[0], m = hv[1], d = hv[2], k = hv[3];
  if (k == 0) throw ParseError(ParseErrorKind::MalformedHeader, "k must be positive");
  if (n * d != m * k) throw ParseError(ParseErrorKind::DegreeMismatch, "header has n*d != m*k");
  std::vector<int> clause_vars;
  std::vector<std::uint8_t> bits;
  clause_vars.reserve(static_cast<std::size_t>(m * k));
  bits.reserve(static_cast<std::size_t>(m * k));
  long long clauses = 0;
  for (; li < lines.size(); ++li) {
    if (skippable(lines[li])) continue;
    auto toks = split_ws(lines[li]);
    if (toks.back() == "0") toks.pop_back();
    if (static_cast<long long>(toks.size()) != k)
      throw ParseError(ParseErrorKind::Arity, "clause " + std::to_string(clauses + 1) + " does not have k literals");
    if (clauses == m) throw ParseError(ParseErrorKind::DegreeMismatch, "more clause lines than m");
    for (auto t : toks) {
      long long lit = 0;
      if (!parse_int(t, lit)) throw ParseError(ParseErrorKind::Arity, "non-integer literal '" + std::string(t) + "'");
      if (lit == 0 || lit > n || -lit > n)
        throw ParseError(ParseErrorKind::IndexOutOfRange, "variable index out of range: " + std::string(t));
      clause_vars.push_back(static_cast<int>((lit > 0 ? lit : -lit) - 1));
      bits.push_back(lit < 0 ? 1 : 0);
    }
    ++clauses;
  }
  if (clauses != m) throw ParseError(ParseErrorKind::DegreeMismatch, "fewer clause lines than m");
  std::vector<long long> deg(static_cast<std::size_t>(n), 0);
  for (int v : clause_vars) ++deg[v];
  for (long long v = 0; v < n; ++v)
    if (deg[v] != d)
      throw ParseError(ParseErrorKind::DegreeMismatch, "variable " + std::to_string(v + 1) + " has degree " +
                                                           std::to_string(deg[v]) + ", expected d");
  Instance inst;
  inst.graph = FactorGraph::from_clause_vars(static_cast<int>(n), static_cast<int>(d), static_cast<int>(k),
                                             std::move(clause_vars));
  inst.literals.bits = std::move(bits);
  return inst;
}

namespace {

bool ends_with_gz(const std::string& path) { return path.size() >= 3 && path.compare(path.size() - 3, 3, ".gz") == 0; }

}  // namespace

Instance read_instance(const std::string& path) {
  std::string text;
  if (ends_with_gz(path)) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw ParseError(ParseErrorKind::Io, "cannot open " + path);
    char buf[1 << 14];
    int got = 0;
    while ((got = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(got));
    bool bad = got < 0;
    gzclose(f);
    if (bad) throw ParseError(ParseErrorKind::Io, "gzip read error in " + path);
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseErrorKind::Io, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  return parse(text);
}

void write_instance(const std::string& path, const FactorGraph& g, const LiteralAssignment& L) {
  std::string text = serialize(g, L);
  if (ends_with_gz(path)) {
    gzFile f = gzopen(path.c_str(), "wb");
    if (!f) throw ParseError(ParseErrorKind::Io, "cannot open " + path);
    int wrote = gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    gzclose(f);
    if (wrote != static_cast<int>(text.size())) throw ParseError(ParseErrorKind::Io, "gzip write error in " + path);
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(ParseErrorKind::Io, "cannot open " + path);
    out << text;
  }
}

}  // namespace naesat
