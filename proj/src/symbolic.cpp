#include "ttno/symbolic.hpp"

#include "ttno/error.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace ttno {

const char *error_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::UnknownSite: return "UnknownSite";
  case ErrorCode::DuplicateFactor: return "DuplicateFactor";
  case ErrorCode::UnassignedSymbol: return "UnassignedSymbol";
  case ErrorCode::MixedSymbols: return "MixedSymbols";
  case ErrorCode::CycleDetected: return "CycleDetected";
  case ErrorCode::Disconnected: return "Disconnected";
  case ErrorCode::DuplicateId: return "DuplicateId";
  case ErrorCode::UnknownBond: return "UnknownBond";
  case ErrorCode::BadParams: return "BadParams";
  case ErrorCode::SiteMismatch: return "SiteMismatch";
  case ErrorCode::MatchingNotMaximum: return "MatchingNotMaximum";
  case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
  case ErrorCode::UnknownLabel: return "UnknownLabel";
  case ErrorCode::FileNotFound: return "FileNotFound";
  }
  return "Error";
}

namespace {

struct SymbolEntry {
  std::string name;
  std::vector<std::uint32_t> factors; // base ids, sorted by name
};

class SymbolRegistry {
public:
  SymbolRegistry() { entries_.push_back({"1", {}}); ids_["1"] = 0; }

  std::uint32_t intern(const std::string &name,
                       const std::vector<std::uint32_t> &factors) {
    {
      std::shared_lock lock(mu_);
      auto it = ids_.find(name);
      if (it != ids_.end())
        return it->second;
    }
    std::unique_lock lock(mu_);
    auto it = ids_.find(name);
    if (it != ids_.end())
      return it->second;
    auto id = static_cast<std::uint32_t>(entries_.size());
    entries_.push_back({name, factors});
    if (factors.empty())
      entries_.back().factors = {id};
    ids_[name] = id;
    return id;
  }

  const SymbolEntry &entry(std::uint32_t id) const {
    std::shared_lock lock(mu_);
    return entries_[id];
  }

private:
  mutable std::shared_mutex mu_;
  std::deque<SymbolEntry> entries_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

SymbolRegistry &registry() {
  static SymbolRegistry r;
  return r;
}

} // namespace

bool valid_symbol_name(std::string_view name) {
  if (name.empty())
    return false;
  return std::none_of(name.begin(), name.end(), [](char ch) {
    return ch == '*' || ch == '"' || ch == '\\' || ch == ' ';
  });
}

Symbol Symbol::named(std::string_view name) {
  if (name == "1")
    return unit();
  if (!valid_symbol_name(name))
    throw Error(ErrorCode::ParseError,
                "invalid symbol name '" + std::string(name) + "'");
  return Symbol(registry().intern(std::string(name), {}));
}

Symbol Symbol::parse(std::string_view name) {
  Symbol out;
  std::size_t start = 0;
  while (true) {
    auto star = name.find('*', start);
    out = out * named(name.substr(start, star - start));
    if (star == std::string_view::npos)
      break;
    start = star + 1;
  }
  return out;
}

const std::string &Symbol::name() const { return registry().entry(id_).name; }

bool Symbol::is_composite() const {
  return id_ != 0 && registry().entry(id_).factors.size() > 1;
}

std::vector<Symbol> Symbol::factors() const {
  std::vector<Symbol> out;
  if (id_ == 0)
    return out;
  for (auto f : registry().entry(id_).factors)
    out.push_back(Symbol(f));
  return out;
}

Symbol operator*(Symbol a, Symbol b) {
  if (a.is_unit())
    return b;
  if (b.is_unit())
    return a;
  auto fa = a.factors();
  auto fb = b.factors();
  std::vector<Symbol> all(fa.begin(), fa.end());
  all.insert(all.end(), fb.begin(), fb.end());
  std::sort(all.begin(), all.end(), SymbolNameLess());
  std::string name;
  std::vector<std::uint32_t> ids;
  for (auto s : all) {
    if (!name.empty())
      name += '*';
    name += s.name();
    ids.push_back(s.id());
  }
  return Symbol(registry().intern(name, ids));
}

Coefficient::Coefficient(const Rational &c, Symbol s) : c_(c), s_(s) {
  c_.canonicalize();
  if (c_ == 0)
    s_ = Symbol::unit();
}

Coefficient::Coefficient(long num, long den, Symbol s)
    : Coefficient(Rational(num, den), s) {}

std::string Coefficient::str() const {
  if (is_zero())
    return "0";
  std::string r = c_.get_str();
  if (s_.is_unit())
    return r;
  return "(" + r + ")" + s_.name();
}

std::optional<Coefficient> try_add(const Coefficient &a, const Coefficient &b) {
  if (a.is_zero())
    return b;
  if (b.is_zero())
    return a;
  if (a.symbol() != b.symbol())
    return std::nullopt;
  return Coefficient(Rational(a.rational() + b.rational()), a.symbol());
}

bool can_add(const Coefficient &a, const Coefficient &b) {
  return a.is_zero() || b.is_zero() || a.symbol() == b.symbol();
}

Coefficient coeff_add(const Coefficient &a, const Coefficient &b) {
  auto r = try_add(a, b);
  if (!r)
    throw Error(ErrorCode::MixedSymbols,
                a.symbol().name() + " + " + b.symbol().name());
  return *r;
}

Coefficient coeff_scale(const Coefficient &a, const Rational &q) {
  if (a.is_zero() || q == 0)
    return Coefficient();
  return Coefficient(Rational(a.rational() * q), a.symbol());
}

Coefficient coeff_mul(const Coefficient &a, const Coefficient &b) {
  if (a.is_zero() || b.is_zero())
    return Coefficient();
  return Coefficient(Rational(a.rational() * b.rational()),
                     a.symbol() * b.symbol());
}

Coefficient operator-(const Coefficient &a) {
  return coeff_scale(a, Rational(-1));
}

void SymbolTable::declare(const std::string &name) {
  if (name == "1")
    return;
  entries_.try_emplace(name);
}

void SymbolTable::assign(const std::string &name, Complex value) {
  if (name == "1")
    return;
  entries_[name] = value;
}

bool SymbolTable::contains(const std::string &name) const {
  return name == "1" || entries_.count(name) > 0;
}

bool SymbolTable::assigned(Symbol s) const {
  for (auto f : s.factors()) {
    auto it = entries_.find(f.name());
    if (it == entries_.end() || !it->second)
      return false;
  }
  return true;
}

Complex SymbolTable::value(Symbol s) const {
  Complex v = 1.0;
  for (auto f : s.factors()) {
    auto it = entries_.find(f.name());
    if (it == entries_.end() || !it->second)
      throw Error(ErrorCode::UnassignedSymbol, f.name());
    v *= *it->second;
  }
  return v;
}

Complex instantiate_coefficient(const Coefficient &a, const SymbolTable &table) {
  if (a.is_zero())
    return 0.0;
  return a.rational().get_d() * table.value(a.symbol());
}

int SymbolicOperator::site_dim(int id) const {
  for (const auto &s : sites)
    if (s.id == id)
      return s.dim;
  throw Error(ErrorCode::UnknownSite, std::to_string(id));
}

bool SymbolicOperator::has_site(int id) const {
  return std::any_of(sites.begin(), sites.end(),
                     [id](const Site &s) { return s.id == id; });
}

Eigen::MatrixXcd resolve_label(const SymbolicOperator &op,
                               const std::string &label, int dim) {
  auto it = op.operator_library.find(label);
  if (it != op.operator_library.end()) {
    if (it->second.rows() != dim || it->second.cols() != dim)
      throw Error(ErrorCode::UnknownLabel,
                  label + " has wrong shape for dimension " +
                      std::to_string(dim));
    return it->second;
  }
  if (label == kIdentity)
    return Eigen::MatrixXcd::Identity(dim, dim);
  if (dim == 2) {
    const Complex i(0, 1);
    Eigen::MatrixXcd m(2, 2);
    if (label == "X") {
      m << 0, 1, 1, 0;
      return m;
    }
    if (label == "Y") {
      m << 0, -i, i, 0;
      return m;
    }
    if (label == "Z") {
      m << 1, 0, 0, -1;
      return m;
    }
  }
  throw Error(ErrorCode::UnknownLabel, label);
}

std::vector<Symbol> used_symbols(const SymbolicOperator &op) {
  std::vector<Symbol> out;
  for (const auto &t : op.terms)
    for (auto f : t.coefficient.symbol().factors())
      if (std::find(out.begin(), out.end(), f) == out.end())
        out.push_back(f);
  std::sort(out.begin(), out.end(), SymbolNameLess());
  return out;
}

} // namespace ttno
