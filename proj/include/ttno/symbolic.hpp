#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <gmpxx.h>

namespace ttno {

using Rational = mpq_class;
using Complex = std::complex<double>;

/// Reserved label for the implicit identity operator.
inline constexpr const char *kIdentity = "I";

/// Interned symbol name. The default symbol is the reserved unit "1".
/// Products of symbols are interned as composite symbols whose name joins
/// the sorted base names with '*'.
class Symbol {
public:
  Symbol() = default;

  static Symbol unit() { return Symbol(); }
  static Symbol named(std::string_view name);
  /// Accepts composite names such as "a*b".
  static Symbol parse(std::string_view name);

  const std::string &name() const;
  bool is_unit() const { return id_ == 0; }
  bool is_composite() const;
  /// Base symbols of a composite (with multiplicity); {this} for a base
  /// symbol, empty for the unit.
  std::vector<Symbol> factors() const;
  std::uint32_t id() const { return id_; }

  friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
  friend bool operator!=(Symbol a, Symbol b) { return a.id_ != b.id_; }
  friend Symbol operator*(Symbol a, Symbol b);

private:
  explicit Symbol(std::uint32_t id) : id_(id) {}
  std::uint32_t id_ = 0;
};

/// Orders symbols by name, independent of interning order.
struct SymbolNameLess {
  bool operator()(Symbol a, Symbol b) const { return a.name() < b.name(); }
};

bool valid_symbol_name(std::string_view name);

/// Exact rational multiple of one symbol, or exact zero.
class Coefficient {
public:
  Coefficient() = default;
  Coefficient(const Rational &c, Symbol s = Symbol::unit());
  Coefficient(long num, long den, Symbol s = Symbol::unit());

  static Coefficient zero() { return Coefficient(); }

  bool is_zero() const { return c_ == 0; }
  const Rational &rational() const { return c_; }
  /// The unit symbol when zero.
  Symbol symbol() const { return s_; }
  std::string str() const;

  friend bool operator==(const Coefficient &a, const Coefficient &b) {
    return a.s_ == b.s_ && a.c_ == b.c_;
  }
  friend bool operator!=(const Coefficient &a, const Coefficient &b) {
    return !(a == b);
  }

private:
  Rational c_{0};
  Symbol s_;
};

/// Throws MixedSymbols when both operands are nonzero with different symbols.
Coefficient coeff_add(const Coefficient &a, const Coefficient &b);
/// Same as coeff_add but reports the mixed case instead of throwing.
std::optional<Coefficient> try_add(const Coefficient &a, const Coefficient &b);
bool can_add(const Coefficient &a, const Coefficient &b);
Coefficient coeff_scale(const Coefficient &a, const Rational &q);
/// Product; symbols multiply into a composite symbol.
Coefficient coeff_mul(const Coefficient &a, const Coefficient &b);
Coefficient operator-(const Coefficient &a);

class SymbolTable {
public:
  void declare(const std::string &name);
  void assign(const std::string &name, Complex value);
  bool contains(const std::string &name) const;
  bool assigned(Symbol s) const;
  /// Value of a base or composite symbol; the unit symbol is 1.
  Complex value(Symbol s) const;
  const std::map<std::string, std::optional<Complex>> &entries() const {
    return entries_;
  }

private:
  std::map<std::string, std::optional<Complex>> entries_;
};

Complex instantiate_coefficient(const Coefficient &a, const SymbolTable &table);

struct ProductTerm {
  Coefficient coefficient;
  /// site id -> label; identity factors are never stored.
  std::map<int, std::string> factors;

  friend bool operator==(const ProductTerm &a, const ProductTerm &b) {
    return a.coefficient == b.coefficient && a.factors == b.factors;
  }
};

struct Site {
  int id = 0;
  int dim = 2;
};

struct SymbolicOperator {
  std::vector<Site> sites;
  SymbolTable symbols;
  std::vector<ProductTerm> terms;
  std::map<std::string, Eigen::MatrixXcd> operator_library;

  int site_dim(int id) const;
  bool has_site(int id) const;
};

/// Matrix for a label on a site of dimension dim: library entries first,
/// then the identity and the Pauli matrices for dim 2. Throws UnknownLabel.
Eigen::MatrixXcd resolve_label(const SymbolicOperator &op,
                               const std::string &label, int dim);

SymbolicOperator parse_operator(const std::string &text);
std::string serialize_operator(const SymbolicOperator &op);

/// Symbols referenced by the operator's terms, ordered by name.
std::vector<Symbol> used_symbols(const SymbolicOperator &op);

} // namespace ttno
