#include "trimci/integrals.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "trimci/determinant.hpp"
#include "trimci/error.hpp"

namespace trimci {

namespace {

constexpr int kDenseTwoBodyMax = 40;

inline std::uint64_t tri(std::uint64_t n) { return n * (n + 1) / 2; }

inline std::uint64_t pair_index(int p, int q) {
  const auto a = static_cast<std::uint64_t>(std::max(p, q));
  const auto b = static_cast<std::uint64_t>(std::min(p, q));
  return tri(a) + b;
}

}  // namespace

IntegralTable::IntegralTable(int m, int n_electrons, int ms2)
    : m_(m), n_electrons_(n_electrons), ms2_(ms2) {
  if (m < 1 || m > kMaxOrbitals)
    throw ConfigError("IntegralTable: orbital count " + std::to_string(m) +
                      " outside [1, " + std::to_string(kMaxOrbitals) + "]");
  if (n_electrons < 0 || ((n_electrons + ms2) & 1) || n_up() < 0 || n_down() < 0 ||
      n_up() > m || n_down() > m)
    throw ConfigError("IntegralTable: inconsistent NELEC/MS2 for m=" + std::to_string(m));
  one_body_ = Eigen::MatrixXd::Zero(m, m);
  dense_two_body_ = m <= kDenseTwoBodyMax;
  if (dense_two_body_) {
    const std::uint64_t np = pair_index(m - 1, m - 1) + 1;
    dense2_.assign(tri(np - 1) + np, 0.0);
  }
}

std::uint64_t IntegralTable::canonical_key(int p, int q, int r, int s) const {
  const std::uint64_t pq = pair_index(p, q);
  const std::uint64_t rs = pair_index(r, s);
  return tri(std::max(pq, rs)) + std::min(pq, rs);
}

double IntegralTable::two_body(int p, int q, int r, int s) const {
  const std::uint64_t key = canonical_key(p, q, r, s);
  if (dense_two_body_) return dense2_[key];
  const auto it = sparse2_.find(key);
  return it == sparse2_.end() ? 0.0 : it->second;
}

bool IntegralTable::set_two_body(int p, int q, int r, int s, double v) {
  const std::uint64_t key = canonical_key(p, q, r, s);
  bool duplicate;
  if (dense_two_body_) {
    duplicate = dense2_[key] != 0.0;
    dense2_[key] = v;
  } else {
    if (v == 0.0) {
      duplicate = sparse2_.erase(key) > 0;
    } else {
      auto [it, inserted] = sparse2_.insert_or_assign(key, v);
      (void)it;
      duplicate = !inserted;
    }
  }
  if (duplicate) ++duplicate_writes_;
  return duplicate;
}

std::vector<std::array<int, 4>> IntegralTable::nonzero_two_body() const {
  // Decode canonical keys back to a representative (p,q,r,s) with
  // p >= q, r >= s, (pq) >= (rs).
  std::vector<std::uint64_t> keys;
  if (dense_two_body_) {
    for (std::uint64_t k = 0; k < dense2_.size(); ++k)
      if (dense2_[k] != 0.0) keys.push_back(k);
  } else {
    keys.reserve(sparse2_.size());
    for (const auto& [k, v] : sparse2_)
      if (v != 0.0) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
  }
  auto untri = [](std::uint64_t x) {
    // largest n with tri(n) <= x
    auto n = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(x) + 1.0) - 1.0) / 2.0);
    while (tri(n + 1) <= x) ++n;
    while (tri(n) > x) --n;
    return n;
  };
  std::vector<std::array<int, 4>> out;
  out.reserve(keys.size());
  for (std::uint64_t k : keys) {
    const std::uint64_t pq = untri(k);
    const std::uint64_t rs = k - tri(pq);
    const std::uint64_t p = untri(pq), q = pq - tri(p);
    const std::uint64_t r = untri(rs), s = rs - tri(r);
    out.push_back({static_cast<int>(p), static_cast<int>(q), static_cast<int>(r),
                   static_cast<int>(s)});
  }
  return out;
}

void IntegralTable::finalize() {
  const auto mm = static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_);
  std::vector<std::map<std::pair<int, int>, double>> bounds(mm);
  for (const auto& [p, q, r, s] : nonzero_two_body()) {
    const double av = std::abs(two_body(p, q, r, s));
    std::set<std::array<int, 4>> members;
    for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}})
      for (auto [c, d] : {std::pair{r, s}, std::pair{s, r}}) {
        members.insert({a, b, c, d});
        members.insert({c, d, a, b});
      }
    // Member (P,Q,R,S) read as (ar|bs): parent (P,R) reaches targets (Q,S)
    // and (S,Q); both orderings accumulate so the stored bound covers the
    // exchange partner integral as well.
    for (const auto& [P, Q, R, S] : members) {
      auto& row = bounds[static_cast<std::size_t>(P) * static_cast<std::size_t>(m_) +
                         static_cast<std::size_t>(R)];
      row[{Q, S}] += av;
      row[{S, Q}] += av;
    }
  }
  heat_bath_.assign(mm, {});
  for (std::size_t i = 0; i < mm; ++i) {
    auto& list = heat_bath_[i];
    list.reserve(bounds[i].size());
    for (const auto& [rs, bound] : bounds[i])
      list.push_back(HeatBathEntry{bound, static_cast<std::uint16_t>(rs.first),
                                   static_cast<std::uint16_t>(rs.second)});
    std::stable_sort(list.begin(), list.end(), [](const HeatBathEntry& x, const HeatBathEntry& y) {
      if (x.bound != y.bound) return x.bound > y.bound;
      if (x.r != y.r) return x.r < y.r;
      return x.s < y.s;
    });
  }
  finalized_ = true;
}

IntegralTable IntegralTable::from_hubbard(const HubbardSpec& spec) {
  if (spec.lx < 1 || spec.ly < 1)
    throw ConfigError("hubbard: lattice dimensions must be positive");
  const long sites = static_cast<long>(spec.lx) * spec.ly;
  if (sites > kMaxOrbitals)
    throw CapError("hubbard: " + std::to_string(sites) + " sites exceed the " +
                   std::to_string(kMaxOrbitals) + "-orbital capacity");
  const int m = static_cast<int>(sites);
  if (spec.n_up < 0 || spec.n_down < 0 || spec.n_up > m || spec.n_down > m)
    throw ConfigError("hubbard: invalid filling");

  IntegralTable table(m, spec.n_up + spec.n_down, spec.n_up - spec.n_down);
  auto site = [&](int x, int y) { return y * spec.lx + x; };
  std::set<std::pair<int, int>> bonds;  // deduplicates the doubled bond on 2-wide rings
  for (int y = 0; y < spec.ly; ++y)
    for (int x = 0; x < spec.lx; ++x) {
      const int p = site(x, y);
      if (spec.lx > 1) {
        if (x + 1 < spec.lx) bonds.insert(std::minmax(p, site(x + 1, y)));
        else if (spec.periodic) bonds.insert(std::minmax(p, site(0, y)));
      }
      if (spec.ly > 1) {
        if (y + 1 < spec.ly) bonds.insert(std::minmax(p, site(x, y + 1)));
        else if (spec.periodic) bonds.insert(std::minmax(p, site(x, 0)));
      }
    }
  for (const auto& [p, q] : bonds) table.set_one_body(p, q, -spec.t);
  for (int p = 0; p < m; ++p)
    if (spec.u != 0.0) table.set_two_body(p, p, p, p, spec.u);
  table.finalize();
  return table;
}

namespace {

// Parses a Fortran-style real, accepting D/d exponents.
bool parse_real(const std::string& tok, double& out) {
  std::string t = tok;
  for (char& c : t)
    if (c == 'D' || c == 'd') c = 'e';
  const char* begin = t.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

struct NamelistHeader {
  int norb = -1;
  int nelec = -1;
  int ms2 = 0;
  long lines_consumed = 0;
};

NamelistHeader parse_namelist(std::istream& in) {
  // Collect header text up to the namelist terminator ("/" or "&END").
  NamelistHeader h;
  std::string header;
  std::string line;
  bool terminated = false;
  while (std::getline(in, line)) {
    ++h.lines_consumed;
    std::string upper = line;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    const auto amp_end = upper.find("&END");
    const auto slash = upper.find('/');
    std::size_t cut = std::min(amp_end, slash);
    if (cut != std::string::npos) {
      header += line.substr(0, cut);
      terminated = true;
      break;
    }
    header += line;
    header += ' ';
  }
  if (!terminated) throw ParseError(h.lines_consumed, "FCIDUMP namelist not terminated");
  const auto fci = header.find("&FCI");
  if (fci == std::string::npos) throw ParseError(1, "FCIDUMP header must start with &FCI");
  header = header.substr(fci + 4);

  // Tokenize KEY=VALUE[,VALUE...] pairs; unknown keys are skipped.
  auto read_int_after = [&](const std::string& key, int& out) {
    std::string upper = header;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    auto pos = upper.find(key);
    while (pos != std::string::npos) {
      const bool start_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(upper[pos - 1]));
      if (start_ok) break;
      pos = upper.find(key, pos + 1);
    }
    if (pos == std::string::npos) return false;
    pos += key.size();
    while (pos < header.size() && (std::isspace(static_cast<unsigned char>(header[pos])) || header[pos] == '='))
      ++pos;
    std::size_t end = pos;
    while (end < header.size() && (std::isdigit(static_cast<unsigned char>(header[end])) ||
                                   header[end] == '+' || header[end] == '-'))
      ++end;
    if (end == pos) throw ParseError(1, "FCIDUMP header: bad value for " + key);
    out = std::stoi(header.substr(pos, end - pos));
    return true;
  };
  if (!read_int_after("NORB", h.norb)) throw ParseError(1, "FCIDUMP header: NORB missing");
  if (!read_int_after("NELEC", h.nelec)) throw ParseError(1, "FCIDUMP header: NELEC missing");
  read_int_after("MS2", h.ms2);
  return h;
}

}  // namespace

IntegralTable parse_fcidump(std::istream& in) {
  const NamelistHeader h = parse_namelist(in);
  if (h.norb < 1 || h.norb > kMaxOrbitals)
    throw ParseError(1, "FCIDUMP: NORB=" + std::to_string(h.norb) + " unsupported");
  IntegralTable table(h.norb, h.nelec, h.ms2);

  std::string line;
  long lineno = h.lines_consumed;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string vtok;
    if (!(ls >> vtok)) continue;  // blank line
    double value;
    if (!parse_real(vtok, value))
      throw ParseError(lineno, "bad numeric token '" + vtok + "'");
    long idx[4];
    for (int k = 0; k < 4; ++k) {
      std::string itok;
      if (!(ls >> itok)) throw ParseError(lineno, "expected 4 orbital indices");
      char* end = nullptr;
      idx[k] = std::strtol(itok.c_str(), &end, 10);
      if (end == itok.c_str() || *end != '\0')
        throw ParseError(lineno, "bad index token '" + itok + "'");
      if (idx[k] < 0 || idx[k] > h.norb)
        throw ParseError(lineno, "orbital index " + std::to_string(idx[k]) +
                                     " outside [0, NORB=" + std::to_string(h.norb) + "]");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing token '" + extra + "'");

    const long i = idx[0], j = idx[1], k = idx[2], l = idx[3];
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      table.set_core_energy(value);
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      table.set_two_body(static_cast<int>(i - 1), static_cast<int>(j - 1),
                         static_cast<int>(k - 1), static_cast<int>(l - 1), value);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      table.set_one_body(static_cast<int>(i - 1), static_cast<int>(j - 1), value);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      // orbital energy record; ignored
    } else {
      throw ParseError(lineno, "unrecognized index pattern " + std::to_string(i) + " " +
                                   std::to_string(j) + " " + std::to_string(k) + " " +
                                   std::to_string(l));
    }
  }
  table.finalize();
  return table;
}

IntegralTable load_fcidump_file(const std::string& path) {
  const bool gz = path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0;
  std::string content;
  if (gz) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw IoError("cannot open '" + path + "'");
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) content.append(buf, static_cast<std::size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw IoError("gzip read failure on '" + path + "'");
  } else {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    content = ss.str();
  }
  std::istringstream in(content);
  return parse_fcidump(in);
}

void write_fcidump(const IntegralTable& table, std::ostream& out) {
  char buf[64];
  out << "&FCI NORB=" << table.m() << ",NELEC=" << table.n_electrons()
      << ",MS2=" << table.ms2() << ",\n ORBSYM=";
  for (int p = 0; p < table.m(); ++p) out << "1,";
  out << "\n ISYM=1,\n&END\n";
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
  };
  for (const auto& [p, q, r, s] : table.nonzero_two_body())
    emit(table.two_body(p, q, r, s), p + 1, q + 1, r + 1, s + 1);
  for (int p = 0; p < table.m(); ++p)
    for (int q = 0; q <= p; ++q)
      if (table.one_body(p, q) != 0.0) emit(table.one_body(p, q), p + 1, q + 1, 0, 0);
  emit(table.core_energy(), 0, 0, 0, 0);
  if (!out) throw IoError("FCIDUMP write failure");
}

}  // namespace trimci
